#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include "imsp/complex_gmm.hpp"
#include "imsp/config.hpp"
#include "imsp/field_grid.hpp"
#include "imsp/helmholtz.hpp"
#include "imsp/inversion.hpp"

namespace imsp {

// Field dump: header `# nx,ny,x_min,x_max,y_min,y_max`, then one grid row
// per line; complex fields carry re,im pairs per node. All reals print with
// 17 significant digits so files round-trip exactly.

void save_field(const std::string& path, const ScattererField& field);
void save_field(const std::string& path, const ComplexField& field);
ScattererField load_scatterer(const std::string& path, const Rect& omega);
ComplexField load_complex_field(const std::string& path, const Rect& omega);

/// Receiver dump: `# kappa=<k> angle=<a> Nd=<n>` then rows `index,x,y,re,im`.
void save_data_record(const std::string& path, const DataRecord& record,
                      const ReceiverSet& receivers);
std::pair<DataRecord, ReceiverSet> load_data_record(const std::string& path);

/// Error samples: `# kappa=<k> angle=<a> Ns=<n> Nd=<d>` then one sample per
/// line, `n, re_1, im_1, ..., re_Nd, im_Nd`.
void save_error_samples(const std::string& path, const ErrorSampleSet& set, double angle);
std::pair<ErrorSampleSet, double> load_error_samples(const std::string& path);

/// Versioned mixture-model text format (cgmm-v1).
void save_mixture(const std::string& path, const MixtureModel& model);
MixtureModel load_mixture(const std::string& path);

/// report.csv columns: kappa, angle, misfit, step, rel_error, seconds.
void save_report_csv(const std::string& path, const std::vector<UpdateRecord>& records);

/// Canonical data-record file name inside an output directory, indexed by
/// position in the continuation schedule.
std::string data_record_name(int kappa_index, int angle_index);
std::string error_samples_name(int kappa_index);
std::string mixture_model_name(int kappa_index);

/// Run provenance: wall time, inputs, outputs and a config echo, written as
/// `manifest` in the output directory. Lines starting with `time.` are the
/// only ones allowed to differ between identical runs.
class RunManifest {
public:
    RunManifest(std::string command, const InversionConfig& cfg);
    void add_input(const std::string& path);
    void add_output(const std::string& path);
    void add_note(const std::string& key, const std::string& value);
    void write(const std::string& out_dir) const;

private:
    std::string command_;
    std::string config_echo_;
    std::vector<std::string> inputs_;
    std::vector<std::string> outputs_;
    std::vector<std::pair<std::string, std::string>> notes_;
    std::chrono::steady_clock::time_point started_;
    std::string started_stamp_;
};

/// Create the directory (and parents) if needed; errors map to IoError.
void ensure_directory(const std::string& path);

}  // namespace imsp
