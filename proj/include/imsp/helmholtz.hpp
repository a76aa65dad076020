#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <memory>

#include "imsp/field_grid.hpp"

namespace imsp {

struct ForwardSolveReport {
    double residual_norm = 0.0;  // ||A u - b||_2 / ||b||_2 (0 for b = 0)
    int unknowns = 0;
    int nonzeros = 0;
    double factor_seconds = 0.0;
    double solve_seconds = 0.0;
};

/// Receiver data for one (wavenumber, incident angle) pair.
struct DataRecord {
    double kappa = 0.0;
    double angle = 0.0;
    Eigen::VectorXcd values;
};

/// Bilinear interpolation weights of a point, shared between receiver
/// sampling and its adjoint (point-source spreading).
struct InterpStencil {
    int i = 0, j = 0;                     // lower-left node
    double w00 = 0, w10 = 0, w01 = 0, w11 = 0;
};

InterpStencil interp_stencil(const GridSpec& grid, double px, double py);

/// Plane wave exp(i*kappa*(x*cos(angle) + y*sin(angle))) sampled at nodes.
ComplexField incident_field(double kappa, double angle, const GridSpec& grid);

/// Second-order finite-difference discretization of the truncated PML
/// problem  div(s grad u) + s1*s2*kappa^2*(1+q)*u = rhs  with u = 0 on the
/// outer boundary. Boundary unknowns are eliminated, so the stored matrix
/// couples interior nodes only and is complex symmetric. One factorization
/// serves all right-hand sides at fixed (q, kappa), and the conjugated
/// (adjoint) system reuses it.
class HelmholtzOperator {
public:
    HelmholtzOperator(const ScattererField& q, double kappa, const PmlProfile& pml,
                      double tol = 1e-10);

    const GridSpec& grid() const { return grid_; }
    double kappa() const { return kappa_; }
    double tol() const { return tol_; }
    const PmlProfile& pml() const { return pml_; }

    /// Interior-unknown system matrix (row-major interior ordering).
    const Eigen::SparseMatrix<cdouble>& matrix() const { return matrix_; }

    /// Scattering right-hand side -kappa^2 * q * u_inc for one incident angle.
    Eigen::VectorXcd scattering_rhs(double angle) const;

    /// Solve A u = rhs (interior-sized rhs); returns a full-grid field with
    /// exact zeros on the boundary.
    ComplexField solve(const Eigen::VectorXcd& rhs_interior,
                       ForwardSolveReport* report = nullptr) const;

    /// Solve conj(A) v = rhs via the same factorization.
    ComplexField solve_conjugate(const Eigen::VectorXcd& rhs_interior,
                                 ForwardSolveReport* report = nullptr) const;

    /// Scattered field for one incident angle.
    ComplexField solve_scattered(double angle, ForwardSolveReport* report = nullptr) const;

    /// Interior <-> full-grid embedding helpers.
    int interior_count() const { return n_int_; }
    int interior_index(int i, int j) const { return (j - 1) * (grid_.nx - 2) + (i - 1); }
    Eigen::VectorXcd to_interior(const ComplexField& f) const;
    ComplexField to_full(const Eigen::VectorXcd& interior) const;

private:
    GridSpec grid_;
    PmlProfile pml_;
    double kappa_;
    double tol_;
    int n_int_;
    Eigen::SparseMatrix<cdouble> matrix_;
    std::vector<double> q_values_;
    std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<cdouble>, Eigen::COLAMDOrdering<int>>> lu_;
    double factor_seconds_ = 0.0;
};

/// Receiver samples of a grid field.
Eigen::VectorXcd sample_receivers(const ComplexField& field, const ReceiverSet& receivers);

/// One-shot forward solve (assembles, factorizes, solves).
std::pair<ComplexField, ForwardSolveReport> solve_forward(const ScattererField& q,
                                                          double kappa, double angle,
                                                          const PmlProfile& pml,
                                                          double tol = 1e-10);

/// F_a(q, kappa, angle): scattered field sampled at the receivers.
Eigen::VectorXcd forward_map(const ScattererField& q, double kappa, double angle,
                             const ReceiverSet& receivers, const PmlProfile& pml,
                             double tol = 1e-10);

/// Clean forward data with multiplicative uniform noise,
/// d_j = (1 + sigma*r_j) * F(q_true)_j,  r_j ~ U[-1,1] from the given seed.
DataRecord synthesize_data(const ScattererField& q_true, double kappa, double angle,
                           const ReceiverSet& receivers, const PmlProfile& pml,
                           double noise_sigma, std::uint64_t seed, double tol = 1e-10);

}  // namespace imsp
