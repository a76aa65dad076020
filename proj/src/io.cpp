#include "imsp/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "imsp/errors.hpp"

namespace imsp {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    return in;
}

std::vector<double> split_reals(const std::string& line, const std::string& path) {
    std::vector<double> out;
    const char* p = line.c_str();
    while (*p) {
        while (*p == ' ' || *p == '\t' || *p == ',') ++p;
        if (!*p) break;
        char* end = nullptr;
        const double v = std::strtod(p, &end);
        if (end == p) throw IoError("malformed number in " + path + ": '" + line + "'");
        out.push_back(v);
        p = end;
    }
    return out;
}

/// Parse `key=value` tokens from a `#`-prefixed header line.
double header_value(const std::string& header, const std::string& key,
                    const std::string& path) {
    const std::string tag = key + "=";
    const auto pos = header.find(tag);
    if (pos == std::string::npos) {
        throw IoError("missing '" + key + "' in header of " + path);
    }
    return std::strtod(header.c_str() + pos + tag.size(), nullptr);
}

}  // namespace

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw IoError("cannot create directory " + path + ": " + ec.message());
}

namespace {

void write_field_header(std::ofstream& out, const GridSpec& g) {
    out << "# " << g.nx << "," << g.ny << "," << fmt17(g.x_min) << "," << fmt17(g.x_max)
        << "," << fmt17(g.y_min) << "," << fmt17(g.y_max) << "\n";
}

struct FieldHeader {
    int nx, ny;
    Rect domain;
};

FieldHeader read_field_header(std::ifstream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line) || line.empty() || line[0] != '#') {
        throw IoError("missing field header in " + path);
    }
    const std::vector<double> v = split_reals(line.substr(1), path);
    if (v.size() != 6) throw IoError("field header needs 6 values in " + path);
    FieldHeader h;
    h.nx = static_cast<int>(v[0]);
    h.ny = static_cast<int>(v[1]);
    h.domain = Rect{v[2], v[3], v[4], v[5]};
    return h;
}

}  // namespace

void save_field(const std::string& path, const ScattererField& field) {
    auto out = open_out(path);
    write_field_header(out, field.grid);
    for (int j = 0; j < field.grid.ny; ++j) {
        for (int i = 0; i < field.grid.nx; ++i) {
            out << (i ? "," : "") << fmt17(field.at(i, j));
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

void save_field(const std::string& path, const ComplexField& field) {
    auto out = open_out(path);
    write_field_header(out, field.grid);
    for (int j = 0; j < field.grid.ny; ++j) {
        for (int i = 0; i < field.grid.nx; ++i) {
            const cdouble z = field.at(i, j);
            out << (i ? "," : "") << fmt17(std::real(z)) << "," << fmt17(std::imag(z));
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

ScattererField load_scatterer(const std::string& path, const Rect& omega) {
    auto in = open_in(path);
    const FieldHeader h = read_field_header(in, path);
    ScattererField f{GridSpec(h.nx, h.ny, h.domain, omega)};
    std::string line;
    for (int j = 0; j < h.ny; ++j) {
        if (!std::getline(in, line)) throw IoError("truncated field file " + path);
        const std::vector<double> row = split_reals(line, path);
        if (static_cast<int>(row.size()) != h.nx) {
            throw IoError("row " + std::to_string(j) + " of " + path + " has wrong length");
        }
        for (int i = 0; i < h.nx; ++i) f.at(i, j) = row[i];
    }
    return f;
}

ComplexField load_complex_field(const std::string& path, const Rect& omega) {
    auto in = open_in(path);
    const FieldHeader h = read_field_header(in, path);
    ComplexField f{GridSpec(h.nx, h.ny, h.domain, omega)};
    std::string line;
    for (int j = 0; j < h.ny; ++j) {
        if (!std::getline(in, line)) throw IoError("truncated field file " + path);
        const std::vector<double> row = split_reals(line, path);
        if (static_cast<int>(row.size()) != 2 * h.nx) {
            throw IoError("row " + std::to_string(j) + " of " + path + " has wrong length");
        }
        for (int i = 0; i < h.nx; ++i) f.at(i, j) = cdouble(row[2 * i], row[2 * i + 1]);
    }
    return f;
}

void save_data_record(const std::string& path, const DataRecord& record,
                      const ReceiverSet& receivers) {
    if (record.values.size() != receivers.count()) {
        throw ConfigError("data record length does not match receiver count");
    }
    auto out = open_out(path);
    out << "# kappa=" << fmt17(record.kappa) << " angle=" << fmt17(record.angle)
        << " Nd=" << receivers.count() << "\n";
    out << "index,x,y,re,im\n";
    for (int n = 0; n < receivers.count(); ++n) {
        out << n << "," << fmt17(receivers.points[n].first) << ","
            << fmt17(receivers.points[n].second) << "," << fmt17(std::real(record.values[n]))
            << "," << fmt17(std::imag(record.values[n])) << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

std::pair<DataRecord, ReceiverSet> load_data_record(const std::string& path) {
    auto in = open_in(path);
    std::string header;
    if (!std::getline(in, header) || header.empty() || header[0] != '#') {
        throw IoError("missing data record header in " + path);
    }
    DataRecord rec;
    rec.kappa = header_value(header, "kappa", path);
    rec.angle = header_value(header, "angle", path);
    const int nd = static_cast<int>(header_value(header, "Nd", path));
    std::string line;
    if (!std::getline(in, line)) throw IoError("truncated data record " + path);
    ReceiverSet rs;
    rec.values.resize(nd);
    for (int n = 0; n < nd; ++n) {
        if (!std::getline(in, line)) throw IoError("truncated data record " + path);
        const std::vector<double> row = split_reals(line, path);
        if (row.size() != 5) throw IoError("bad data row in " + path);
        rs.points.emplace_back(row[1], row[2]);
        rec.values[n] = cdouble(row[3], row[4]);
    }
    return {std::move(rec), std::move(rs)};
}

void save_error_samples(const std::string& path, const ErrorSampleSet& set, double angle) {
    auto out = open_out(path);
    out << "# kappa=" << fmt17(set.kappa) << " angle=" << fmt17(angle)
        << " Ns=" << set.count() << " Nd=" << set.dim() << "\n";
    for (int n = 0; n < set.count(); ++n) {
        out << n;
        for (Eigen::Index i = 0; i < set.dim(); ++i) {
            const cdouble z = set.samples(i, n);
            out << "," << fmt17(std::real(z)) << "," << fmt17(std::imag(z));
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

std::pair<ErrorSampleSet, double> load_error_samples(const std::string& path) {
    auto in = open_in(path);
    std::string header;
    if (!std::getline(in, header) || header.empty() || header[0] != '#') {
        throw IoError("missing error-sample header in " + path);
    }
    ErrorSampleSet set;
    set.kappa = header_value(header, "kappa", path);
    const double angle = header_value(header, "angle", path);
    const int ns = static_cast<int>(header_value(header, "Ns", path));
    const int nd = static_cast<int>(header_value(header, "Nd", path));
    set.samples.resize(nd, ns);
    std::string line;
    for (int n = 0; n < ns; ++n) {
        if (!std::getline(in, line)) throw IoError("truncated error-sample file " + path);
        const std::vector<double> row = split_reals(line, path);
        if (static_cast<int>(row.size()) != 1 + 2 * nd) {
            throw IoError("bad error-sample row in " + path);
        }
        for (int i = 0; i < nd; ++i) {
            set.samples(i, n) = cdouble(row[1 + 2 * i], row[2 + 2 * i]);
        }
    }
    return {std::move(set), angle};
}

void save_mixture(const std::string& path, const MixtureModel& model) {
    model.validate();
    auto out = open_out(path);
    const Eigen::Index nd = model.dim();
    out << "cgmm-v1 K=" << model.K() << " Nd=" << nd << " kappa=" << fmt17(model.kappa_tag)
        << " delta=" << fmt17(model.delta_reg) << "\n";
    for (int k = 0; k < model.K(); ++k) {
        const auto& c = model.components[k];
        out << "pi=" << fmt17(model.weights[k]) << "\n";
        for (Eigen::Index i = 0; i < nd; ++i) {
            out << (i ? " " : "") << fmt17(std::real(c.zeta[i])) << " "
                << fmt17(std::imag(c.zeta[i]));
        }
        out << "\n";
        for (Eigen::Index r = 0; r < nd; ++r) {
            for (Eigen::Index s = 0; s < nd; ++s) {
                out << (s ? " " : "") << fmt17(std::real(c.sigma(r, s))) << " "
                    << fmt17(std::imag(c.sigma(r, s)));
            }
            out << "\n";
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

MixtureModel load_mixture(const std::string& path) {
    auto in = open_in(path);
    std::string header;
    if (!std::getline(in, header) || header.rfind("cgmm-v1", 0) != 0) {
        throw IoError("not a cgmm-v1 file: " + path);
    }
    const int K = static_cast<int>(header_value(header, "K", path));
    const int nd = static_cast<int>(header_value(header, "Nd", path));
    MixtureModel model;
    model.kappa_tag = header_value(header, "kappa", path);
    model.delta_reg = header_value(header, "delta", path);
    model.weights.resize(K);
    model.components.resize(K);
    std::string line;
    for (int k = 0; k < K; ++k) {
        if (!std::getline(in, line) || line.rfind("pi=", 0) != 0) {
            throw IoError("expected 'pi=' line in " + path);
        }
        model.weights[k] = std::strtod(line.c_str() + 3, nullptr);
        if (!std::getline(in, line)) throw IoError("truncated mixture file " + path);
        const std::vector<double> zeta = split_reals(line, path);
        if (static_cast<int>(zeta.size()) != 2 * nd) {
            throw IoError("bad mean line in " + path);
        }
        auto& c = model.components[k];
        c.zeta.resize(nd);
        for (int i = 0; i < nd; ++i) c.zeta[i] = cdouble(zeta[2 * i], zeta[2 * i + 1]);
        c.sigma.resize(nd, nd);
        for (int r = 0; r < nd; ++r) {
            if (!std::getline(in, line)) throw IoError("truncated mixture file " + path);
            const std::vector<double> row = split_reals(line, path);
            if (static_cast<int>(row.size()) != 2 * nd) {
                throw IoError("bad covariance row in " + path);
            }
            for (int s = 0; s < nd; ++s) c.sigma(r, s) = cdouble(row[2 * s], row[2 * s + 1]);
        }
    }
    model.validate();
    return model;
}

void save_report_csv(const std::string& path, const std::vector<UpdateRecord>& records) {
    auto out = open_out(path);
    out << "kappa,angle,misfit,step,rel_error,seconds\n";
    for (const auto& r : records) {
        out << fmt17(r.kappa) << "," << fmt17(r.angle) << "," << fmt17(r.objective_after)
            << "," << fmt17(r.step) << ","
            << (std::isnan(r.rel_error) ? "nan" : fmt17(r.rel_error)) << ","
            << fmt17(r.seconds) << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

std::string data_record_name(int kappa_index, int angle_index) {
    std::ostringstream s;
    s << "data_k" << kappa_index + 1 << "_a" << angle_index << ".csv";
    return s.str();
}

std::string error_samples_name(int kappa_index) {
    return "errors_k" + std::to_string(kappa_index + 1) + ".csv";
}

std::string mixture_model_name(int kappa_index) {
    return "model_k" + std::to_string(kappa_index + 1) + ".cgmm";
}

RunManifest::RunManifest(std::string command, const InversionConfig& cfg)
    : command_(std::move(command)),
      config_echo_(dump_config(cfg)),
      started_(std::chrono::steady_clock::now()) {
    const std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    started_stamp_ = buf;
}

void RunManifest::add_input(const std::string& path) { inputs_.push_back(path); }
void RunManifest::add_output(const std::string& path) { outputs_.push_back(path); }
void RunManifest::add_note(const std::string& key, const std::string& value) {
    notes_.emplace_back(key, value);
}

void RunManifest::write(const std::string& out_dir) const {
    ensure_directory(out_dir);
    auto out = open_out(out_dir + "/manifest");
    out << "# imsp run manifest\n";
    out << "version = 0.1.0\n";
    out << "command = " << command_ << "\n";
    out << "time.started = " << started_stamp_ << "\n";
    out << "time.wall_seconds = "
        << std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count()
        << "\n";
    for (std::size_t i = 0; i < inputs_.size(); ++i) {
        out << "input." << i << " = " << inputs_[i] << "\n";
    }
    for (std::size_t i = 0; i < outputs_.size(); ++i) {
        out << "output." << i << " = " << outputs_[i] << "\n";
    }
    for (const auto& [k, v] : notes_) {
        out << k << " = " << v << "\n";
    }
    out << "\n# config\n" << config_echo_;
    if (!out) throw IoError("write failed: " + out_dir + "/manifest");
}

}  // namespace imsp
