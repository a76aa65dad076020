#include "imsp/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "imsp/errors.hpp"

namespace imsp {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v, int line) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size() || v.empty()) {
        std::ostringstream msg;
        msg << "line " << line << ": key '" << key << "' expects a real number, got '" << v << "'";
        throw ConfigError(msg.str());
    }
    return x;
}

int parse_int(const std::string& key, const std::string& v, int line) {
    const double x = parse_double(key, v, line);
    const int i = static_cast<int>(std::llround(x));
    if (std::abs(x - i) > 0.0) {
        std::ostringstream msg;
        msg << "line " << line << ": key '" << key << "' expects an integer, got '" << v << "'";
        throw ConfigError(msg.str());
    }
    return i;
}

std::uint64_t parse_seed(const std::string& key, const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const unsigned long long s = std::stoull(v, &pos);
        if (pos == v.size() && !v.empty()) return static_cast<std::uint64_t>(s);
    } catch (const std::exception&) {
    }
    std::ostringstream msg;
    msg << "line " << line << ": key '" << key << "' expects an unsigned integer seed, got '"
        << v << "'";
    throw ConfigError(msg.str());
}

bool parse_bool(const std::string& key, const std::string& v, int line) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    std::ostringstream msg;
    msg << "line " << line << ": key '" << key << "' expects a boolean, got '" << v << "'";
    throw ConfigError(msg.str());
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

void InversionConfig::validate() const {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    require(grid.coarse >= 3, "grid.coarse must be >= 3");
    require(grid.fine >= 3, "grid.fine must be >= 3");
    require(grid.reference >= 3, "grid.reference must be >= 3");
    require(grid.omega.x1 < grid.omega.x2 && grid.omega.y1 < grid.omega.y2,
            "grid.omega bounds must be ordered");
    pml.validate();
    require(receivers.count >= 1, "receivers.count must be >= 1");
    require(receivers.radius > 0.0, "receivers.radius must be > 0");
    require(continuation.kappa_min > 0.0, "continuation.kappa_min must be > 0");
    require(continuation.count >= 1, "continuation.count must be >= 1");
    require(continuation.count == 1 || continuation.kappa_max > continuation.kappa_min,
            "continuation.kappa_max must exceed kappa_min");
    require(continuation.angles >= 1, "continuation.angles must be >= 1");
    require(noise.sigma >= 0.0, "noise.sigma must be >= 0");
    require(noise.nu >= 0.0, "noise.nu must be >= 0");
    require(mixture.k >= 1, "mixture.k must be >= 1");
    require(mixture.delta >= 0.0, "mixture.delta must be >= 0");
    require(mixture.tol > 0.0, "mixture.tol must be > 0");
    require(mixture.max_iter >= 1, "mixture.max_iter must be >= 1");
    reg.validate();
    require(step.init > 0.0, "step.init must be > 0");
    require(step.max_backtracks >= 0, "step.max_backtracks must be >= 0");
    require(step.q_min > -1.0, "step.q_min must be > -1");
    require(step.q_min < step.q_max, "step.q_min must be below step.q_max");
    require(learning.count >= 1, "learning.count must be >= 1");
    require(learning.family == "gaussian_bumps" || learning.family == "random_square",
            "learning.family must be gaussian_bumps or random_square");
    require(solver.tol > 0.0, "solver.tol must be > 0");
    // The receiver circle must fit inside the non-PML box.
    build_receivers(receivers.count, receivers.radius, grid.omega);
}

GridSpec InversionConfig::make_grid(int n) const {
    return GridSpec::around_omega(grid.omega, pml, n, n);
}

ReceiverSet InversionConfig::make_receivers() const {
    return build_receivers(receivers.count, receivers.radius, grid.omega);
}

ContinuationSchedule InversionConfig::schedule() const {
    return ContinuationSchedule::make(continuation.kappa_min, continuation.kappa_max,
                                      continuation.count, continuation.angles);
}

ExampleSpec InversionConfig::example_spec() const {
    ExampleSpec spec;
    spec.family = learning.family == "random_square" ? ExampleFamily::random_square
                                                     : ExampleFamily::gaussian_bumps;
    spec.count = learning.count;
    spec.seed = learning.seed;
    return spec;
}

StepControl InversionConfig::step_control() const {
    return StepControl{step.init, step.max_backtracks, step.q_min, step.q_max};
}

InversionProblem InversionConfig::problem() const {
    InversionProblem p;
    p.grid = coarse_grid();
    p.pml = pml;
    p.receivers = make_receivers();
    p.reg = reg;
    p.step = step_control();
    p.solver_tol = solver.tol;
    p.nu = noise.nu;
    return p;
}

InversionConfig parse_config(std::istream& in) {
    InversionConfig cfg;

    using Setter = std::function<void(const std::string&, int)>;
    const std::map<std::string, Setter> table = {
        {"grid.coarse", [&](const std::string& v, int l) { cfg.grid.coarse = parse_int("grid.coarse", v, l); }},
        {"grid.fine", [&](const std::string& v, int l) { cfg.grid.fine = parse_int("grid.fine", v, l); }},
        {"grid.reference", [&](const std::string& v, int l) { cfg.grid.reference = parse_int("grid.reference", v, l); }},
        {"grid.omega_x1", [&](const std::string& v, int l) { cfg.grid.omega.x1 = parse_double("grid.omega_x1", v, l); }},
        {"grid.omega_x2", [&](const std::string& v, int l) { cfg.grid.omega.x2 = parse_double("grid.omega_x2", v, l); }},
        {"grid.omega_y1", [&](const std::string& v, int l) { cfg.grid.omega.y1 = parse_double("grid.omega_y1", v, l); }},
        {"grid.omega_y2", [&](const std::string& v, int l) { cfg.grid.omega.y2 = parse_double("grid.omega_y2", v, l); }},
        {"pml.sigma0", [&](const std::string& v, int l) { cfg.pml.sigma0 = parse_double("pml.sigma0", v, l); }},
        {"pml.p", [&](const std::string& v, int l) { cfg.pml.p = parse_double("pml.p", v, l); }},
        {"pml.d1", [&](const std::string& v, int l) { cfg.pml.d1 = parse_double("pml.d1", v, l); }},
        {"pml.d2", [&](const std::string& v, int l) { cfg.pml.d2 = parse_double("pml.d2", v, l); }},
        {"receivers.count", [&](const std::string& v, int l) { cfg.receivers.count = parse_int("receivers.count", v, l); }},
        {"receivers.radius", [&](const std::string& v, int l) { cfg.receivers.radius = parse_double("receivers.radius", v, l); }},
        {"continuation.kappa_min", [&](const std::string& v, int l) { cfg.continuation.kappa_min = parse_double("continuation.kappa_min", v, l); }},
        {"continuation.kappa_max", [&](const std::string& v, int l) { cfg.continuation.kappa_max = parse_double("continuation.kappa_max", v, l); }},
        {"continuation.count", [&](const std::string& v, int l) { cfg.continuation.count = parse_int("continuation.count", v, l); }},
        {"continuation.angles", [&](const std::string& v, int l) { cfg.continuation.angles = parse_int("continuation.angles", v, l); }},
        {"noise.sigma", [&](const std::string& v, int l) { cfg.noise.sigma = parse_double("noise.sigma", v, l); }},
        {"noise.nu", [&](const std::string& v, int l) { cfg.noise.nu = parse_double("noise.nu", v, l); }},
        {"noise.seed", [&](const std::string& v, int l) { cfg.noise.seed = parse_seed("noise.seed", v, l); }},
        {"mixture.k", [&](const std::string& v, int l) { cfg.mixture.k = parse_int("mixture.k", v, l); }},
        {"mixture.delta", [&](const std::string& v, int l) { cfg.mixture.delta = parse_double("mixture.delta", v, l); }},
        {"mixture.tol", [&](const std::string& v, int l) { cfg.mixture.tol = parse_double("mixture.tol", v, l); }},
        {"mixture.max_iter", [&](const std::string& v, int l) { cfg.mixture.max_iter = parse_int("mixture.max_iter", v, l); }},
        {"mixture.seed", [&](const std::string& v, int l) { cfg.mixture.seed = parse_seed("mixture.seed", v, l); }},
        {"reg.a_scale", [&](const std::string& v, int l) { cfg.reg.a_scale = parse_double("reg.a_scale", v, l); }},
        {"reg.s", [&](const std::string& v, int l) { cfg.reg.s = parse_double("reg.s", v, l); }},
        {"reg.lambda", [&](const std::string& v, int l) { cfg.reg.lambda = parse_double("reg.lambda", v, l); }},
        {"reg.delta_tv", [&](const std::string& v, int l) { cfg.reg.delta_tv = parse_double("reg.delta_tv", v, l); }},
        {"reg.weight", [&](const std::string& v, int l) { cfg.reg.reg_weight = parse_double("reg.weight", v, l); }},
        {"step.init", [&](const std::string& v, int l) { cfg.step.init = parse_double("step.init", v, l); }},
        {"step.max_backtracks", [&](const std::string& v, int l) { cfg.step.max_backtracks = parse_int("step.max_backtracks", v, l); }},
        {"step.q_min", [&](const std::string& v, int l) { cfg.step.q_min = parse_double("step.q_min", v, l); }},
        {"step.q_max", [&](const std::string& v, int l) { cfg.step.q_max = parse_double("step.q_max", v, l); }},
        {"learning.family", [&](const std::string& v, int l) { cfg.learning.family = v; (void)l; }},
        {"learning.count", [&](const std::string& v, int l) { cfg.learning.count = parse_int("learning.count", v, l); }},
        {"learning.seed", [&](const std::string& v, int l) { cfg.learning.seed = parse_seed("learning.seed", v, l); }},
        {"learning.pool_angles", [&](const std::string& v, int l) { cfg.learning.pool_angles = parse_bool("learning.pool_angles", v, l); }},
        {"solver.tol", [&](const std::string& v, int l) { cfg.solver.tol = parse_double("solver.tol", v, l); }},
    };

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << "line " << lineno << ": expected 'section.key = value', got '" << stripped << "'";
            throw ConfigError(msg.str());
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        const auto it = table.find(key);
        if (it == table.end()) {
            std::ostringstream msg;
            msg << "line " << lineno << ": unknown config key '" << key << "'";
            throw ConfigError(msg.str());
        }
        it->second(value, lineno);
    }
    cfg.validate();
    return cfg;
}

InversionConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    return parse_config(in);
}

std::string dump_config(const InversionConfig& cfg) {
    std::ostringstream out;
    out << "grid.coarse = " << cfg.grid.coarse << "\n";
    out << "grid.fine = " << cfg.grid.fine << "\n";
    out << "grid.reference = " << cfg.grid.reference << "\n";
    out << "grid.omega_x1 = " << fmt17(cfg.grid.omega.x1) << "\n";
    out << "grid.omega_x2 = " << fmt17(cfg.grid.omega.x2) << "\n";
    out << "grid.omega_y1 = " << fmt17(cfg.grid.omega.y1) << "\n";
    out << "grid.omega_y2 = " << fmt17(cfg.grid.omega.y2) << "\n";
    out << "pml.sigma0 = " << fmt17(cfg.pml.sigma0) << "\n";
    out << "pml.p = " << fmt17(cfg.pml.p) << "\n";
    out << "pml.d1 = " << fmt17(cfg.pml.d1) << "\n";
    out << "pml.d2 = " << fmt17(cfg.pml.d2) << "\n";
    out << "receivers.count = " << cfg.receivers.count << "\n";
    out << "receivers.radius = " << fmt17(cfg.receivers.radius) << "\n";
    out << "continuation.kappa_min = " << fmt17(cfg.continuation.kappa_min) << "\n";
    out << "continuation.kappa_max = " << fmt17(cfg.continuation.kappa_max) << "\n";
    out << "continuation.count = " << cfg.continuation.count << "\n";
    out << "continuation.angles = " << cfg.continuation.angles << "\n";
    out << "noise.sigma = " << fmt17(cfg.noise.sigma) << "\n";
    out << "noise.nu = " << fmt17(cfg.noise.nu) << "\n";
    out << "noise.seed = " << cfg.noise.seed << "\n";
    out << "mixture.k = " << cfg.mixture.k << "\n";
    out << "mixture.delta = " << fmt17(cfg.mixture.delta) << "\n";
    out << "mixture.tol = " << fmt17(cfg.mixture.tol) << "\n";
    out << "mixture.max_iter = " << cfg.mixture.max_iter << "\n";
    out << "mixture.seed = " << cfg.mixture.seed << "\n";
    out << "reg.a_scale = " << fmt17(cfg.reg.a_scale) << "\n";
    out << "reg.s = " << fmt17(cfg.reg.s) << "\n";
    out << "reg.lambda = " << fmt17(cfg.reg.lambda) << "\n";
    out << "reg.delta_tv = " << fmt17(cfg.reg.delta_tv) << "\n";
    out << "reg.weight = " << fmt17(cfg.reg.reg_weight) << "\n";
    out << "step.init = " << fmt17(cfg.step.init) << "\n";
    out << "step.max_backtracks = " << cfg.step.max_backtracks << "\n";
    out << "step.q_min = " << fmt17(cfg.step.q_min) << "\n";
    out << "step.q_max = " << fmt17(cfg.step.q_max) << "\n";
    out << "learning.family = " << cfg.learning.family << "\n";
    out << "learning.count = " << cfg.learning.count << "\n";
    out << "learning.seed = " << cfg.learning.seed << "\n";
    out << "learning.pool_angles = " << (cfg.learning.pool_angles ? "true" : "false") << "\n";
    out << "solver.tol = " << fmt17(cfg.solver.tol) << "\n";
    return out.str();
}

}  // namespace imsp
