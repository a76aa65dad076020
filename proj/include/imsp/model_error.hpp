#pragma once

#include <cstdint>

#include "imsp/complex_gmm.hpp"
#include "imsp/field_grid.hpp"
#include "imsp/helmholtz.hpp"

namespace imsp {

enum class ExampleFamily { gaussian_bumps, random_square };

/// Ensemble of random training scatterers. Each draw is a pure function of
/// (seed, index).
struct ExampleSpec {
    ExampleFamily family = ExampleFamily::gaussian_bumps;
    int count = 200;
    std::uint64_t seed = 1;

    // gaussian_bumps parameter ranges (three bump terms, seven draws each)
    double shape_lo = 1.0, shape_hi = 3.0;      // boundary-vanishing exponents
    double amp_lo = -1.0, amp_hi = 1.0;         // bump amplitude
    double width_lo = 8.0, width_hi = 10.0;     // Gaussian sharpness
    double center_lo = -0.8, center_hi = 0.8;   // bump centers

    // random_square ranges
    double half_lo = 0.05, half_hi = 0.5;       // half side length
    double height_lo = -1.0, height_hi = 1.0;

    void validate() const;
};

/// The three-peak Gaussian scatterer of the first reference experiment,
/// q(x,y) = q_tilde(3x, 3y) inside Omega = [-1,1]^2.
ScattererField true_scatterer_example1(const GridSpec& grid);

/// Nested-squares scatterer: 0.7 on [-0.3,0.3]^2 minus the open inner square,
/// -0.1 on (-0.1,0.1)^2, 0 elsewhere.
ScattererField true_scatterer_example2(const GridSpec& grid);

/// Deterministic training draw number `index` of the ensemble.
ScattererField gen_example(const ExampleSpec& spec, int index, const GridSpec& grid);

struct ErrorSampleReport {
    int requested = 0;
    int succeeded = 0;
    int failed = 0;
};

/// e_n = F(q_n) - F_a(q_n): fine-grid minus coarse-grid receiver data for
/// each training scatterer, with q_n evaluated analytically on each grid.
/// Failed solves are skipped and counted.
ErrorSampleSet compute_error_samples(const ExampleSpec& spec, double kappa, double angle,
                                     const GridSpec& fine, const GridSpec& coarse,
                                     const ReceiverSet& receivers, const PmlProfile& pml,
                                     double tol, ErrorSampleReport* report = nullptr);

}  // namespace imsp
