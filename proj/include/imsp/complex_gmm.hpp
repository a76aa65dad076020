#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "imsp/errors.hpp"

namespace imsp {

using cdouble = std::complex<double>;

/// Circularly symmetric complex Gaussian, density
///   pi^{-N} det(Sigma)^{-1} exp(-(eta-zeta)^H Sigma^{-1} (eta-zeta)).
struct ComplexGaussian {
    Eigen::VectorXcd zeta;
    Eigen::MatrixXcd sigma;

    Eigen::Index dim() const { return zeta.size(); }
};

/// K-component complex Gaussian mixture learned for one wavenumber.
struct MixtureModel {
    Eigen::VectorXd weights;
    std::vector<ComplexGaussian> components;
    double kappa_tag = 0.0;
    double delta_reg = 0.0;

    int K() const { return static_cast<int>(components.size()); }
    Eigen::Index dim() const { return components.empty() ? 0 : components[0].dim(); }
    void validate() const;
};

/// Model-error vectors in C^{N_d} for one wavenumber, one column per sample.
struct ErrorSampleSet {
    double kappa = 0.0;
    Eigen::MatrixXcd samples;  // N_d x N_s

    int count() const { return static_cast<int>(samples.cols()); }
    Eigen::Index dim() const { return samples.rows(); }
};

/// A mixture component collapsed during the M step (effective count below
/// the collapse threshold). fit_em retries on this.
class CollapseError : public NumericError {
public:
    explicit CollapseError(const std::string& msg) : NumericError(msg) {}
};

/// ln N_c(eta | zeta, Sigma), computed through a Hermitian Cholesky
/// factorization with log-determinant accumulation.
double log_density(const Eigen::VectorXcd& eta, const ComplexGaussian& g);

/// Posterior component weights gamma_k of one observation, log-space stable.
Eigen::VectorXd responsibilities(const Eigen::VectorXcd& eta, const MixtureModel& model);

/// Weighted re-estimation of (pi, zeta, Sigma) with +delta*I covariance
/// regularization. gamma is N_s x K with unit row sums.
MixtureModel m_step(const ErrorSampleSet& samples, const Eigen::MatrixXd& gamma,
                    double delta);

double log_likelihood(const ErrorSampleSet& samples, const MixtureModel& model);

struct EmResult {
    MixtureModel model;
    std::vector<double> trace;  // log-likelihood, initial value first
    int iterations = 0;
    int restarts = 0;
};

/// Complex-valued EM. Means are initialized from K distinct samples, each
/// covariance from the pooled sample covariance + delta*I, weights uniform.
/// Stops when |delta logL| <= tol*(1+|logL|) or after max_iter sweeps; the
/// best-likelihood iterate is returned. Collapsed components trigger a
/// freshly seeded restart, up to retry_budget attempts.
EmResult fit_em(const ErrorSampleSet& samples, int K, double delta, double tol,
                int max_iter, std::uint64_t seed, int retry_budget = 5);

/// Scale-aware default M-step regularization, 1e-6 * tr(pooled cov)/N_d.
double default_em_delta(const ErrorSampleSet& samples);

/// tau(e) = (Re e_1, Im e_1, ..., Re e_N, Im e_N).
Eigen::VectorXd realify(const Eigen::VectorXcd& e);

/// The 2N x 2N real embedding with blocks [[Re, -Im], [Im, Re]] per entry of
/// a Hermitian matrix; satisfies det(M) = |det Sigma|^2 and
/// tau^T M(Sigma^{-1}) tau = e^H Sigma^{-1} e.
Eigen::MatrixXd real_representation(const Eigen::MatrixXcd& sigma);

}  // namespace imsp
