#include "imsp/complex_gmm.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "imsp/rng.hpp"

namespace imsp {

namespace {

constexpr double kLogPi = 1.1447298858494001741;  // ln(pi)

/// Cholesky factor plus log-determinant of one component covariance.
struct FactoredComponent {
    Eigen::VectorXcd zeta;
    Eigen::LLT<Eigen::MatrixXcd> llt;
    double log_det = 0.0;
    double log_weight = 0.0;
};

FactoredComponent factor_component(const ComplexGaussian& g, double weight, int index) {
    FactoredComponent fc;
    fc.zeta = g.zeta;
    fc.llt.compute(g.sigma);
    if (fc.llt.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "covariance of component " << index
            << " is not positive definite (Cholesky pivot failed)";
        throw NumericError(msg.str());
    }
    fc.log_det = 0.0;
    const auto& L = fc.llt.matrixLLT();
    for (Eigen::Index i = 0; i < L.rows(); ++i) {
        fc.log_det += 2.0 * std::log(std::real(L(i, i)));
    }
    fc.log_weight = weight > 0.0 ? std::log(weight) : -std::numeric_limits<double>::infinity();
    return fc;
}

double log_density_factored(const Eigen::VectorXcd& eta, const FactoredComponent& fc) {
    const Eigen::VectorXcd r = eta - fc.zeta;
    const Eigen::VectorXcd w = fc.llt.matrixL().solve(r);
    return -static_cast<double>(eta.size()) * kLogPi - fc.log_det - w.squaredNorm();
}

std::vector<FactoredComponent> factor_model(const MixtureModel& model) {
    std::vector<FactoredComponent> fcs;
    fcs.reserve(model.components.size());
    for (int k = 0; k < model.K(); ++k) {
        fcs.push_back(factor_component(model.components[k], model.weights[k], k));
    }
    return fcs;
}

/// log(sum(exp(v))) with max subtraction.
double log_sum_exp(const Eigen::VectorXd& v) {
    const double m = v.maxCoeff();
    if (!std::isfinite(m)) return m;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::exp(v[i] - m);
    return m + std::log(acc);
}

Eigen::VectorXd component_log_terms(const Eigen::VectorXcd& eta,
                                    const std::vector<FactoredComponent>& fcs) {
    Eigen::VectorXd t(static_cast<Eigen::Index>(fcs.size()));
    for (std::size_t k = 0; k < fcs.size(); ++k) {
        t[static_cast<Eigen::Index>(k)] = fcs[k].log_weight + log_density_factored(eta, fcs[k]);
    }
    return t;
}

}  // namespace

void MixtureModel::validate() const {
    if (components.empty()) throw ConfigError("mixture model has no components");
    if (weights.size() != K()) throw ConfigError("mixture weights/components length mismatch");
    double sum = 0.0;
    for (Eigen::Index k = 0; k < weights.size(); ++k) {
        if (!(weights[k] > 0.0) || weights[k] > 1.0 + 1e-12) {
            throw ConfigError("mixture weight " + std::to_string(k) + " outside (0,1]");
        }
        sum += weights[k];
    }
    if (std::abs(sum - 1.0) > 1e-12 * K()) {
        throw ConfigError("mixture weights sum to " + std::to_string(sum) + ", expected 1");
    }
    const Eigen::Index n = components[0].dim();
    for (const auto& c : components) {
        if (c.dim() != n || c.sigma.rows() != n || c.sigma.cols() != n) {
            throw ConfigError("mixture component dimensions are inconsistent");
        }
    }
}

double log_density(const Eigen::VectorXcd& eta, const ComplexGaussian& g) {
    if (eta.size() != g.dim()) throw ConfigError("log_density dimension mismatch");
    return log_density_factored(eta, factor_component(g, 1.0, 0));
}

Eigen::VectorXd responsibilities(const Eigen::VectorXcd& eta, const MixtureModel& model) {
    model.validate();
    const auto fcs = factor_model(model);
    const Eigen::VectorXd t = component_log_terms(eta, fcs);
    const double lse = log_sum_exp(t);
    if (!std::isfinite(lse)) {
        throw NumericError("all mixture components assign zero density to the input");
    }
    Eigen::VectorXd gamma = (t.array() - lse).exp().matrix();
    gamma /= gamma.sum();
    return gamma;
}

MixtureModel m_step(const ErrorSampleSet& samples, const Eigen::MatrixXd& gamma,
                    double delta) {
    const int n_s = samples.count();
    const int K = static_cast<int>(gamma.cols());
    if (gamma.rows() != n_s) throw ConfigError("m_step gamma row count mismatch");
    if (delta < 0.0) throw ConfigError("m_step delta must be >= 0");

    MixtureModel out;
    out.kappa_tag = samples.kappa;
    out.delta_reg = delta;
    out.weights.resize(K);
    out.components.resize(K);
    const double collapse_eps = 1e-8 * n_s;
    for (int k = 0; k < K; ++k) {
        const Eigen::VectorXd g = gamma.col(k);
        const double nk = g.sum();
        if (nk < collapse_eps) {
            std::ostringstream msg;
            msg << "component " << k << " collapsed (effective count " << nk << ")";
            throw CollapseError(msg.str());
        }
        out.weights[k] = nk / n_s;
        const Eigen::VectorXcd gc = g.cast<cdouble>();
        Eigen::VectorXcd zeta = (samples.samples * gc) / nk;
        Eigen::MatrixXcd centered = samples.samples.colwise() - zeta;
        Eigen::MatrixXcd sigma = (centered * gc.asDiagonal() * centered.adjoint()) / nk;
        sigma = 0.5 * (sigma + sigma.adjoint().eval());  // round Hermitian
        sigma.diagonal().array() += delta;
        out.components[k] = ComplexGaussian{std::move(zeta), std::move(sigma)};
    }
    return out;
}

double log_likelihood(const ErrorSampleSet& samples, const MixtureModel& model) {
    model.validate();
    const auto fcs = factor_model(model);
    double ll = 0.0;
    for (int n = 0; n < samples.count(); ++n) {
        ll += log_sum_exp(component_log_terms(samples.samples.col(n), fcs));
    }
    return ll;
}

double default_em_delta(const ErrorSampleSet& samples) {
    const Eigen::VectorXcd mean = samples.samples.rowwise().mean();
    double tr = 0.0;
    for (int n = 0; n < samples.count(); ++n) {
        tr += (samples.samples.col(n) - mean).squaredNorm();
    }
    tr /= samples.count();
    return 1e-6 * tr / static_cast<double>(samples.dim());
}

namespace {

MixtureModel initialize_em(const ErrorSampleSet& samples, int K, double delta,
                           std::uint64_t seed) {
    const int n_s = samples.count();

    // K distinct sample indices as initial means.
    std::mt19937_64 gen(seed);
    std::vector<int> order(n_s);
    std::iota(order.begin(), order.end(), 0);
    for (int i = n_s - 1; i > 0; --i) {
        const int j = static_cast<int>(uniform01(gen) * (i + 1));
        std::swap(order[i], order[std::min(j, i)]);
    }

    Eigen::VectorXcd mean = samples.samples.rowwise().mean();
    Eigen::MatrixXcd centered = samples.samples.colwise() - mean;
    Eigen::MatrixXcd pooled = (centered * centered.adjoint()) / n_s;
    pooled = 0.5 * (pooled + pooled.adjoint().eval());
    pooled.diagonal().array() += delta;

    MixtureModel model;
    model.kappa_tag = samples.kappa;
    model.delta_reg = delta;
    model.weights = Eigen::VectorXd::Constant(K, 1.0 / K);
    model.components.resize(K);
    for (int k = 0; k < K; ++k) {
        model.components[k].zeta = samples.samples.col(order[k]);
        model.components[k].sigma = pooled;
    }
    return model;
}

EmResult run_em_once(const ErrorSampleSet& samples, int K, double delta, double tol,
                     int max_iter, std::uint64_t seed) {
    EmResult res;
    res.model = initialize_em(samples, K, delta, seed);

    const int n_s = samples.count();
    double ll = log_likelihood(samples, res.model);
    res.trace.push_back(ll);
    MixtureModel best = res.model;
    double best_ll = ll;

    Eigen::MatrixXd gamma(n_s, K);
    for (int it = 0; it < max_iter; ++it) {
        const auto fcs = factor_model(res.model);
        for (int n = 0; n < n_s; ++n) {
            const Eigen::VectorXd t = component_log_terms(samples.samples.col(n), fcs);
            const double lse = log_sum_exp(t);
            if (!std::isfinite(lse)) {
                throw NumericError("degenerate responsibilities in EM iteration " +
                                   std::to_string(it));
            }
            Eigen::VectorXd row = (t.array() - lse).exp().matrix();
            gamma.row(n) = (row / row.sum()).transpose();
        }
        res.model = m_step(samples, gamma, delta);
        const double ll_new = log_likelihood(samples, res.model);
        res.trace.push_back(ll_new);
        ++res.iterations;
        if (ll_new > best_ll) {
            best_ll = ll_new;
            best = res.model;
        }
        if (std::abs(ll_new - ll) <= tol * (1.0 + std::abs(ll_new))) {
            ll = ll_new;
            break;
        }
        ll = ll_new;
    }
    res.model = best;
    return res;
}

}  // namespace

EmResult fit_em(const ErrorSampleSet& samples, int K, double delta, double tol,
                int max_iter, std::uint64_t seed, int retry_budget) {
    if (K < 1) throw ConfigError("fit_em requires K >= 1");
    if (samples.count() < K) {
        throw ConfigError("fit_em needs at least K samples, got " +
                          std::to_string(samples.count()));
    }
    int restarts = 0;
    for (int attempt = 0;; ++attempt) {
        try {
            EmResult res = run_em_once(samples, K, delta, tol, max_iter,
                                       mix_seed(seed, static_cast<std::uint64_t>(attempt)));
            res.restarts = restarts;
            return res;
        } catch (const CollapseError&) {
            if (++restarts > retry_budget) throw;
        }
    }
}

Eigen::VectorXd realify(const Eigen::VectorXcd& e) {
    Eigen::VectorXd tau(2 * e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) {
        tau[2 * i] = std::real(e[i]);
        tau[2 * i + 1] = std::imag(e[i]);
    }
    return tau;
}

Eigen::MatrixXd real_representation(const Eigen::MatrixXcd& sigma) {
    const Eigen::Index n = sigma.rows();
    if (sigma.cols() != n) throw ConfigError("real_representation requires a square matrix");
    const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
    if ((sigma - sigma.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw ConfigError("real_representation requires a Hermitian matrix");
    }
    Eigen::MatrixXd m(2 * n, 2 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double re = std::real(sigma(i, j));
            const double im = std::imag(sigma(i, j));
            m(2 * i, 2 * j) = re;
            m(2 * i, 2 * j + 1) = -im;
            m(2 * i + 1, 2 * j) = im;
            m(2 * i + 1, 2 * j + 1) = re;
        }
    }
    return m;
}

}  // namespace imsp
