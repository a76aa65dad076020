#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <vector>

#include "imsp/complex_gmm.hpp"
#include "imsp/helmholtz.hpp"

namespace imsp {

/// Measured data plus the mixture error model for one (kappa, angle) visit.
/// The effective covariances Sigma_k + nu*I are factored once and reused by
/// every misfit/weight evaluation (backtracking re-evaluates many times).
class MisfitContext {
public:
    MisfitContext(DataRecord data, MixtureModel model, double nu);

    /// Plain RLM: single zero-mean component with covariance nu*I.
    static MisfitContext plain(DataRecord data, double nu);

    /// Phi(q_data) = -ln sum_k pi_k N_c(d - q_data | zeta_k, Sigma_k + nu I).
    double misfit(const Eigen::VectorXcd& q_data) const;

    /// rho = sum_k gamma_k (Sigma_k + nu I)^{-1} (d - q_data - zeta_k).
    Eigen::VectorXcd residual_weights(const Eigen::VectorXcd& q_data) const;

    const DataRecord& data() const { return data_; }
    const MixtureModel& model() const { return model_; }
    double nu() const { return nu_; }
    Eigen::Index dim() const { return data_.values.size(); }

private:
    struct Component {
        Eigen::VectorXcd zeta;
        Eigen::LLT<Eigen::MatrixXcd> llt;
        double log_det = 0.0;
        double log_pi = 0.0;
    };

    Eigen::VectorXd log_terms(const Eigen::VectorXcd& residual) const;

    DataRecord data_;
    MixtureModel model_;
    double nu_ = 0.0;
    std::vector<Component> comps_;
};

double misfit_phi(const Eigen::VectorXcd& q_data, const MisfitContext& ctx);
Eigen::VectorXcd residual_weights(const Eigen::VectorXcd& q_data, const MisfitContext& ctx);

/// Adjoint solve: conj-operator system with receiver point sources
/// -kappa^2 * rho_j spread by the adjoint of bilinear interpolation scaled
/// by 1/(hx*hy). Reuses the forward factorization.
ComplexField solve_adjoint(const HelmholtzOperator& op, const Eigen::VectorXcd& rho,
                           const ReceiverSet& receivers,
                           ForwardSolveReport* report = nullptr);
ComplexField solve_adjoint(const ScattererField& q, double kappa,
                           const Eigen::VectorXcd& rho, const ReceiverSet& receivers,
                           const PmlProfile& pml, double tol = 1e-10);

struct DataGradientResult {
    ScattererField gradient;      // supported strictly inside Omega
    double misfit = 0.0;          // Phi at the current iterate
    Eigen::VectorXcd predicted;   // F_a(q, kappa, angle)
    ForwardSolveReport forward_report;
};

/// Gradient of q -> misfit_phi(F_a(q, kappa, angle)) under the cell-area
/// weighted inner product <a,b> = hx*hy*sum(a*b):
///   -2 * Re((conj(u_inc) + conj(s1 s2) conj(u_s)) * v)   on Omega,
/// with v the adjoint field.
DataGradientResult data_gradient(const HelmholtzOperator& op, double angle,
                                 const ReceiverSet& receivers, const MisfitContext& ctx);
DataGradientResult data_gradient(const ScattererField& q, double kappa, double angle,
                                 const ReceiverSet& receivers, const PmlProfile& pml,
                                 const MisfitContext& ctx, double tol = 1e-10);

}  // namespace imsp
