#include "imsp/adjoint.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "imsp/errors.hpp"

namespace imsp {

namespace {

constexpr double kLogPi = 1.1447298858494001741;

double log_sum_exp(const Eigen::VectorXd& v) {
    const double m = v.maxCoeff();
    if (!std::isfinite(m)) return m;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::exp(v[i] - m);
    return m + std::log(acc);
}

}  // namespace

MisfitContext::MisfitContext(DataRecord data, MixtureModel model, double nu)
    : data_(std::move(data)), model_(std::move(model)), nu_(nu) {
    if (nu_ < 0.0) throw ConfigError("measurement variance nu must be >= 0");
    model_.validate();
    const Eigen::Index n = data_.values.size();
    if (model_.dim() != n) {
        std::ostringstream msg;
        msg << "mixture dimension " << model_.dim() << " does not match data length " << n;
        throw ConfigError(msg.str());
    }
    comps_.resize(model_.K());
    for (int k = 0; k < model_.K(); ++k) {
        Component& c = comps_[k];
        c.zeta = model_.components[k].zeta;
        Eigen::MatrixXcd eff = model_.components[k].sigma;
        eff.diagonal().array() += nu_;
        c.llt.compute(eff);
        if (c.llt.info() != Eigen::Success) {
            std::ostringstream msg;
            msg << "effective covariance Sigma_" << k
                << " + nu*I is not positive definite (Cholesky pivot failed)";
            throw NumericError(msg.str());
        }
        const auto& L = c.llt.matrixLLT();
        c.log_det = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) c.log_det += 2.0 * std::log(std::real(L(i, i)));
        c.log_pi = std::log(model_.weights[k]);
    }
}

MisfitContext MisfitContext::plain(DataRecord data, double nu) {
    const Eigen::Index n = data.values.size();
    MixtureModel model;
    model.weights = Eigen::VectorXd::Ones(1);
    model.components.resize(1);
    model.components[0].zeta = Eigen::VectorXcd::Zero(n);
    model.components[0].sigma = Eigen::MatrixXcd::Zero(n, n);
    model.kappa_tag = data.kappa;
    return MisfitContext(std::move(data), std::move(model), nu);
}

Eigen::VectorXd MisfitContext::log_terms(const Eigen::VectorXcd& residual) const {
    Eigen::VectorXd t(static_cast<Eigen::Index>(comps_.size()));
    const Eigen::Index n = residual.size();
    for (std::size_t k = 0; k < comps_.size(); ++k) {
        const Component& c = comps_[k];
        const Eigen::VectorXcd w = c.llt.matrixL().solve(residual - c.zeta);
        t[static_cast<Eigen::Index>(k)] =
            c.log_pi - static_cast<double>(n) * kLogPi - c.log_det - w.squaredNorm();
    }
    return t;
}

double MisfitContext::misfit(const Eigen::VectorXcd& q_data) const {
    if (q_data.size() != dim()) throw ConfigError("misfit: predicted data length mismatch");
    const Eigen::VectorXcd r = data_.values - q_data;
    const double lse = log_sum_exp(log_terms(r));
    if (!std::isfinite(lse)) throw NumericError("misfit underflow: all components at -inf");
    return -lse;
}

Eigen::VectorXcd MisfitContext::residual_weights(const Eigen::VectorXcd& q_data) const {
    if (q_data.size() != dim()) throw ConfigError("residual_weights: data length mismatch");
    const Eigen::VectorXcd r = data_.values - q_data;
    const Eigen::VectorXd t = log_terms(r);
    const double lse = log_sum_exp(t);
    if (!std::isfinite(lse)) throw NumericError("residual_weights underflow");
    Eigen::VectorXcd rho = Eigen::VectorXcd::Zero(r.size());
    for (std::size_t k = 0; k < comps_.size(); ++k) {
        const double gamma = std::exp(t[static_cast<Eigen::Index>(k)] - lse);
        if (gamma == 0.0) continue;
        rho += gamma * comps_[k].llt.solve(r - comps_[k].zeta);
    }
    return rho;
}

double misfit_phi(const Eigen::VectorXcd& q_data, const MisfitContext& ctx) {
    return ctx.misfit(q_data);
}

Eigen::VectorXcd residual_weights(const Eigen::VectorXcd& q_data, const MisfitContext& ctx) {
    return ctx.residual_weights(q_data);
}

ComplexField solve_adjoint(const HelmholtzOperator& op, const Eigen::VectorXcd& rho,
                           const ReceiverSet& receivers, ForwardSolveReport* report) {
    if (rho.size() != receivers.count()) {
        throw ConfigError("solve_adjoint: rho length does not match receiver count");
    }
    const GridSpec& g = op.grid();
    const double scale = 1.0 / (g.hx * g.hy);
    const double k2 = op.kappa() * op.kappa();
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(op.interior_count());
    for (int n = 0; n < receivers.count(); ++n) {
        const auto st = interp_stencil(g, receivers.points[n].first, receivers.points[n].second);
        const cdouble amp = -k2 * rho[n] * scale;
        auto add = [&](int i, int j, double w) {
            if (w == 0.0) return;
            if (i <= 0 || i >= g.nx - 1 || j <= 0 || j >= g.ny - 1) {
                throw GeometryError("receiver stencil touches the outer boundary");
            }
            b[op.interior_index(i, j)] += amp * w;
        };
        add(st.i, st.j, st.w00);
        add(st.i + 1, st.j, st.w10);
        add(st.i, st.j + 1, st.w01);
        add(st.i + 1, st.j + 1, st.w11);
    }
    return op.solve_conjugate(b, report);
}

ComplexField solve_adjoint(const ScattererField& q, double kappa,
                           const Eigen::VectorXcd& rho, const ReceiverSet& receivers,
                           const PmlProfile& pml, double tol) {
    HelmholtzOperator op(q, kappa, pml, tol);
    return solve_adjoint(op, rho, receivers);
}

DataGradientResult data_gradient(const HelmholtzOperator& op, double angle,
                                 const ReceiverSet& receivers, const MisfitContext& ctx) {
    DataGradientResult res;
    const GridSpec& g = op.grid();

    const ComplexField u_inc = incident_field(op.kappa(), angle, g);
    const ComplexField u_s = op.solve_scattered(angle, &res.forward_report);
    res.predicted = sample_receivers(u_s, receivers);
    res.misfit = ctx.misfit(res.predicted);

    const Eigen::VectorXcd rho = ctx.residual_weights(res.predicted);
    const ComplexField v = solve_adjoint(op, rho, receivers);

    res.gradient = ScattererField(g);
    for (int j = 0; j < g.ny; ++j) {
        const double y = g.y(j);
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.x(i);
            if (!g.strictly_inside_omega(x, y)) continue;
            // s1 = s2 = 1 on Omega, so conj(s1 s2) drops out here.
            const cdouble w = u_inc.at(i, j) + u_s.at(i, j);
            res.gradient.at(i, j) = -2.0 * std::real(std::conj(w) * v.at(i, j));
        }
    }
    return res;
}

DataGradientResult data_gradient(const ScattererField& q, double kappa, double angle,
                                 const ReceiverSet& receivers, const PmlProfile& pml,
                                 const MisfitContext& ctx, double tol) {
    HelmholtzOperator op(q, kappa, pml, tol);
    return data_gradient(op, angle, receivers, ctx);
}

}  // namespace imsp
