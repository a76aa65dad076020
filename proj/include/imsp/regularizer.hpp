#pragma once

#include "imsp/field_grid.hpp"

namespace imsp {

struct RegularizerConfig {
    double a_scale = 0.01;   // A = a_scale * (-Laplacian), zero-Dirichlet on Omega
    double s = 1.5;          // fractional exponent
    double lambda = 0.0;     // TV weight
    double delta_tv = 1e-3;  // TV smoothing
    double reg_weight = 1.0; // global multiplier against the data gradient

    void validate() const;
};

/// A^power q through the discrete sine expansion on the interior-of-Omega
/// nodes: coefficient (m,n) is scaled by (a_scale * lambda_mn)^power with
/// lambda_mn the discrete Dirichlet eigenvalues of -Laplacian. power = 0 is
/// the identity. Nodes outside the open Omega box are zeroed for power > 0.
ScattererField apply_A_pow(const ScattererField& q, double power,
                           const RegularizerConfig& cfg);

/// Gradient A^s q of (1/2)||A^{s/2} q||^2.
ScattererField grad_R_gaussian(const ScattererField& q, const RegularizerConfig& cfg);

/// Gradient of the smoothed TV energy lambda * integral sqrt(|grad q|^2 + delta),
/// forward-difference gradient with the adjoint backward-difference divergence
/// and zero-flux at the Omega box edges. The energy decreases along -grad.
ScattererField grad_R_tv(const ScattererField& q, const RegularizerConfig& cfg);

/// (1/2)||A^{s/2} q||^2 + lambda * smoothed TV energy (shifted so q = 0 gives 0).
double R_value(const ScattererField& q, const RegularizerConfig& cfg);

}  // namespace imsp
