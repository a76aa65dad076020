#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "imsp/field_grid.hpp"
#include "imsp/inversion.hpp"
#include "imsp/model_error.hpp"
#include "imsp/regularizer.hpp"

namespace imsp {

struct GridConfig {
    int coarse = 128;
    int fine = 432;
    int reference = 640;
    Rect omega{-1.0, 1.0, -1.0, 1.0};
};

struct ReceiverConfig {
    int count = 400;
    double radius = 1.0;
};

struct ContinuationConfig {
    double kappa_min = M_PI;
    double kappa_max = 10.0 * M_PI;
    int count = 10;
    int angles = 20;
};

struct NoiseConfig {
    double sigma = 0.02;
    double nu = 0.0;  // 0 = scale-aware default
    std::uint64_t seed = 1;
};

struct MixtureConfig {
    int k = 4;
    double delta = 0.0;  // 0 = scale-aware default
    double tol = 1e-8;
    int max_iter = 500;
    std::uint64_t seed = 1;
};

struct StepConfig {
    double init = 1.0;
    int max_backtracks = 20;
    double q_min = -0.99;
    double q_max = 10.0;
};

struct LearningConfig {
    std::string family = "gaussian_bumps";
    int count = 200;
    std::uint64_t seed = 1;
    bool pool_angles = false;
};

struct SolverConfig {
    double tol = 1e-10;
};

/// Full run configuration; defaults reproduce the reference experiment.
struct InversionConfig {
    GridConfig grid;
    PmlProfile pml;
    ReceiverConfig receivers;
    ContinuationConfig continuation;
    NoiseConfig noise;
    MixtureConfig mixture;
    RegularizerConfig reg;
    StepConfig step;
    LearningConfig learning;
    SolverConfig solver;

    void validate() const;

    GridSpec make_grid(int n) const;
    GridSpec coarse_grid() const { return make_grid(grid.coarse); }
    GridSpec fine_grid() const { return make_grid(grid.fine); }
    GridSpec reference_grid() const { return make_grid(grid.reference); }
    ReceiverSet make_receivers() const;
    ContinuationSchedule schedule() const;
    ExampleSpec example_spec() const;
    StepControl step_control() const;
    InversionProblem problem() const;  // on the coarse grid
};

/// Parse the flat `section.key = value` format; unknown keys are rejected,
/// missing keys keep their defaults. `#` starts a comment.
InversionConfig parse_config(std::istream& in);
InversionConfig load_config(const std::string& path);
std::string dump_config(const InversionConfig& cfg);

}  // namespace imsp
