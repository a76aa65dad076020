#pragma once

#include <limits>
#include <string>
#include <vector>

#include "imsp/adjoint.hpp"
#include "imsp/regularizer.hpp"

namespace imsp {

/// Ascending wavenumbers and the incident angles visited at each of them.
struct ContinuationSchedule {
    std::vector<double> kappas;
    std::vector<double> angles;

    static ContinuationSchedule make(double kappa_min, double kappa_max, int kappa_count,
                                     int angle_count);
    void validate() const;
};

struct StepControl {
    double init = 1.0;        // largest trial update magnitude (max-norm of dq)
    int max_backtracks = 20;
    double q_min = -0.99;
    double q_max = 10.0;
};

struct UpdateRecord {
    double kappa = 0.0;
    double angle = 0.0;
    double objective_before = 0.0;
    double objective_after = 0.0;
    double misfit_after = 0.0;  // data term at the accepted iterate
    double step = 0.0;          // accepted alpha, 0 when skipped
    bool accepted = false;
    double rel_error = std::numeric_limits<double>::quiet_NaN();
    double seconds = 0.0;
};

struct InversionReport {
    std::vector<UpdateRecord> records;
    ScattererField q_final;
    std::vector<std::pair<double, ScattererField>> snapshots;  // after each kappa
    std::vector<std::string> warnings;

    /// Relative error recorded after the last update at each kappa.
    std::vector<std::pair<double, double>> per_kappa_error() const;
};

/// ||q_true - q_est||_L2(Omega) / ||q_true||_L2(Omega); q_true is restricted
/// to the estimate's grid first when the resolutions differ.
double relative_error(const ScattererField& q_est, const ScattererField& q_true);

/// Fixed problem geometry and tuning shared by every update.
struct InversionProblem {
    GridSpec grid;  // inversion (coarse) grid
    PmlProfile pml;
    ReceiverSet receivers;
    RegularizerConfig reg;
    StepControl step;
    double solver_tol = 1e-10;
    double nu = 0.0;  // 0 = scale-aware default 1e-6 * mean|d|^2 per record
};

/// Effective measurement variance for one record.
double effective_nu(const DataRecord& data, double configured_nu);

/// One backtracking gradient update at fixed (kappa, angle). The trial step
/// is -alpha * g / ||g||_inf followed by clamping, alpha halved from
/// step.init until the total objective (misfit + reg_weight * R) decreases.
/// model == nullptr runs plain RLM (zero-mean component, covariance nu*I).
std::pair<ScattererField, UpdateRecord> update_step(const ScattererField& q,
                                                    const DataRecord& data,
                                                    const MixtureModel* model,
                                                    const InversionProblem& prob);

/// Recursive linearization: ascending kappas, all incident angles at each,
/// warm-started from the previous level. Mixture models are matched per
/// kappa; a missing model falls back to plain RLM with a warning.
InversionReport run_inversion(const InversionProblem& prob,
                              const ContinuationSchedule& schedule,
                              const std::vector<DataRecord>& data,
                              const std::vector<MixtureModel>* models,
                              const ScattererField* q_true,
                              const ScattererField* q_init = nullptr);

}  // namespace imsp
