#include "imsp/helmholtz.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <vector>

#include "imsp/errors.hpp"
#include "imsp/rng.hpp"

namespace imsp {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

InterpStencil interp_stencil(const GridSpec& grid, double px, double py) {
    const double tol_x = 1e-12 * (std::abs(grid.x_max - grid.x_min) + 1.0);
    const double tol_y = 1e-12 * (std::abs(grid.y_max - grid.y_min) + 1.0);
    if (px < grid.x_min - tol_x || px > grid.x_max + tol_x ||
        py < grid.y_min - tol_y || py > grid.y_max + tol_y) {
        std::ostringstream msg;
        msg << "point (" << px << ", " << py << ") outside grid domain";
        throw GeometryError(msg.str());
    }
    InterpStencil s;
    s.i = std::clamp(static_cast<int>(std::floor((px - grid.x_min) / grid.hx)), 0, grid.nx - 2);
    s.j = std::clamp(static_cast<int>(std::floor((py - grid.y_min) / grid.hy)), 0, grid.ny - 2);
    const double fx = (px - grid.x(s.i)) / grid.hx;
    const double fy = (py - grid.y(s.j)) / grid.hy;
    s.w00 = (1 - fx) * (1 - fy);
    s.w10 = fx * (1 - fy);
    s.w01 = (1 - fx) * fy;
    s.w11 = fx * fy;
    return s;
}

ComplexField incident_field(double kappa, double angle, const GridSpec& grid) {
    if (!(kappa > 0.0)) throw ConfigError("incident_field requires kappa > 0");
    ComplexField f(grid);
    const double cx = std::cos(angle);
    const double cy = std::sin(angle);
    for (int j = 0; j < grid.ny; ++j) {
        const double y = grid.y(j);
        for (int i = 0; i < grid.nx; ++i) {
            const double phase = kappa * (grid.x(i) * cx + y * cy);
            f.at(i, j) = cdouble(std::cos(phase), std::sin(phase));
        }
    }
    return f;
}

HelmholtzOperator::HelmholtzOperator(const ScattererField& q, double kappa,
                                     const PmlProfile& pml, double tol)
    : grid_(q.grid), pml_(pml), kappa_(kappa), tol_(tol), q_values_(q.values) {
    if (!(kappa > 0.0)) throw ConfigError("HelmholtzOperator requires kappa > 0");
    pml_.validate();

    const int nx = grid_.nx;
    const int ny = grid_.ny;
    n_int_ = (nx - 2) * (ny - 2);

    // Stretching factors at nodes and at staggered midpoints.
    std::vector<cdouble> s1_node(nx), s1_mid(nx - 1);
    for (int i = 0; i < nx; ++i) {
        s1_node[i] = cdouble(1.0, pml_sigma(grid_.x(i), grid_.omega.x1, grid_.omega.x2,
                                            pml_.d1, pml_));
    }
    for (int i = 0; i + 1 < nx; ++i) {
        const double xm = grid_.x(i) + 0.5 * grid_.hx;
        s1_mid[i] = cdouble(1.0, pml_sigma(xm, grid_.omega.x1, grid_.omega.x2, pml_.d1, pml_));
    }
    std::vector<cdouble> s2_node(ny), s2_mid(ny - 1);
    for (int j = 0; j < ny; ++j) {
        s2_node[j] = cdouble(1.0, pml_sigma(grid_.y(j), grid_.omega.y1, grid_.omega.y2,
                                            pml_.d2, pml_));
    }
    for (int j = 0; j + 1 < ny; ++j) {
        const double ym = grid_.y(j) + 0.5 * grid_.hy;
        s2_mid[j] = cdouble(1.0, pml_sigma(ym, grid_.omega.y1, grid_.omega.y2, pml_.d2, pml_));
    }

    const double ihx2 = 1.0 / (grid_.hx * grid_.hx);
    const double ihy2 = 1.0 / (grid_.hy * grid_.hy);
    const double k2 = kappa_ * kappa_;

    std::vector<Eigen::Triplet<cdouble>> trip;
    trip.reserve(static_cast<std::size_t>(n_int_) * 5);
    for (int j = 1; j + 1 < ny; ++j) {
        for (int i = 1; i + 1 < nx; ++i) {
            const int row = interior_index(i, j);
            // Flux coefficients s2/s1 (x-direction) and s1/s2 (y-direction)
            // at the surrounding cell midpoints.
            const cdouble cxp = s2_node[j] / s1_mid[i] * ihx2;
            const cdouble cxm = s2_node[j] / s1_mid[i - 1] * ihx2;
            const cdouble cyp = s1_node[i] / s2_mid[j] * ihy2;
            const cdouble cym = s1_node[i] / s2_mid[j - 1] * ihy2;
            const cdouble diag = -(cxp + cxm + cyp + cym) +
                                 s1_node[i] * s2_node[j] * k2 *
                                     (1.0 + q_values_[grid_.idx(i, j)]);
            trip.emplace_back(row, row, diag);
            if (i + 2 < nx) trip.emplace_back(row, interior_index(i + 1, j), cxp);
            if (i - 1 >= 1) trip.emplace_back(row, interior_index(i - 1, j), cxm);
            if (j + 2 < ny) trip.emplace_back(row, interior_index(i, j + 1), cyp);
            if (j - 1 >= 1) trip.emplace_back(row, interior_index(i, j - 1), cym);
        }
    }
    matrix_.resize(n_int_, n_int_);
    matrix_.setFromTriplets(trip.begin(), trip.end());
    matrix_.makeCompressed();

    const auto t0 = std::chrono::steady_clock::now();
    lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<cdouble>,
                                           Eigen::COLAMDOrdering<int>>>();
    lu_->compute(matrix_);
    factor_seconds_ = seconds_since(t0);
    if (lu_->info() != Eigen::Success) {
        throw SolverError("sparse LU factorization failed (matrix singular?) at kappa=" +
                          std::to_string(kappa_));
    }
}

Eigen::VectorXcd HelmholtzOperator::scattering_rhs(double angle) const {
    const ComplexField uinc = incident_field(kappa_, angle, grid_);
    Eigen::VectorXcd b(n_int_);
    const double k2 = kappa_ * kappa_;
    for (int j = 1; j + 1 < grid_.ny; ++j) {
        for (int i = 1; i + 1 < grid_.nx; ++i) {
            b[interior_index(i, j)] = -k2 * q_values_[grid_.idx(i, j)] * uinc.at(i, j);
        }
    }
    return b;
}

ComplexField HelmholtzOperator::solve(const Eigen::VectorXcd& rhs_interior,
                                      ForwardSolveReport* report) const {
    const auto t0 = std::chrono::steady_clock::now();
    Eigen::VectorXcd u = lu_->solve(rhs_interior);
    if (lu_->info() != Eigen::Success) {
        throw SolverError("sparse LU back-substitution failed");
    }
    const double b_norm = rhs_interior.norm();
    const double resid = (matrix_ * u - rhs_interior).norm();
    const double rel = b_norm > 0.0 ? resid / b_norm : resid;
    if (rel > tol_) {
        std::ostringstream msg;
        msg << "forward solve residual " << rel << " exceeds tolerance " << tol_;
        throw SolverError(msg.str());
    }
    if (report) {
        report->residual_norm = rel;
        report->unknowns = n_int_;
        report->nonzeros = static_cast<int>(matrix_.nonZeros());
        report->factor_seconds = factor_seconds_;
        report->solve_seconds = seconds_since(t0);
    }
    return to_full(u);
}

ComplexField HelmholtzOperator::solve_conjugate(const Eigen::VectorXcd& rhs_interior,
                                                ForwardSolveReport* report) const {
    // conj(A) v = g  <=>  A conj(v) = conj(g)
    ComplexField v = solve(rhs_interior.conjugate(), report);
    for (auto& z : v.values) z = std::conj(z);
    return v;
}

ComplexField HelmholtzOperator::solve_scattered(double angle,
                                                ForwardSolveReport* report) const {
    return solve(scattering_rhs(angle), report);
}

Eigen::VectorXcd HelmholtzOperator::to_interior(const ComplexField& f) const {
    Eigen::VectorXcd v(n_int_);
    for (int j = 1; j + 1 < grid_.ny; ++j) {
        for (int i = 1; i + 1 < grid_.nx; ++i) {
            v[interior_index(i, j)] = f.at(i, j);
        }
    }
    return v;
}

ComplexField HelmholtzOperator::to_full(const Eigen::VectorXcd& interior) const {
    ComplexField f(grid_);
    for (int j = 1; j + 1 < grid_.ny; ++j) {
        for (int i = 1; i + 1 < grid_.nx; ++i) {
            f.at(i, j) = interior[interior_index(i, j)];
        }
    }
    return f;
}

Eigen::VectorXcd sample_receivers(const ComplexField& field, const ReceiverSet& receivers) {
    Eigen::VectorXcd d(receivers.count());
    for (int n = 0; n < receivers.count(); ++n) {
        d[n] = interpolate(field, receivers.points[n].first, receivers.points[n].second);
    }
    return d;
}

std::pair<ComplexField, ForwardSolveReport> solve_forward(const ScattererField& q,
                                                          double kappa, double angle,
                                                          const PmlProfile& pml, double tol) {
    HelmholtzOperator op(q, kappa, pml, tol);
    ForwardSolveReport report;
    ComplexField u = op.solve_scattered(angle, &report);
    return {std::move(u), report};
}

Eigen::VectorXcd forward_map(const ScattererField& q, double kappa, double angle,
                             const ReceiverSet& receivers, const PmlProfile& pml,
                             double tol) {
    auto [u, report] = solve_forward(q, kappa, angle, pml, tol);
    return sample_receivers(u, receivers);
}

DataRecord synthesize_data(const ScattererField& q_true, double kappa, double angle,
                           const ReceiverSet& receivers, const PmlProfile& pml,
                           double noise_sigma, std::uint64_t seed, double tol) {
    if (noise_sigma < 0.0) throw ConfigError("noise sigma must be >= 0");
    DataRecord rec;
    rec.kappa = kappa;
    rec.angle = angle;
    rec.values = forward_map(q_true, kappa, angle, receivers, pml, tol);
    if (noise_sigma > 0.0) {
        std::mt19937_64 gen(seed);
        for (Eigen::Index n = 0; n < rec.values.size(); ++n) {
            rec.values[n] *= 1.0 + noise_sigma * uniform_pm1(gen);
        }
    }
    return rec;
}

}  // namespace imsp
