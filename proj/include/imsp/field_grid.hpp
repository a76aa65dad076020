#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

namespace imsp {

using cdouble = std::complex<double>;

/// Axis-aligned rectangle [x1,x2] x [y1,y2].
struct Rect {
    double x1 = -1.0;
    double x2 = 1.0;
    double y1 = -1.0;
    double y2 = 1.0;

    double width() const { return x2 - x1; }
    double height() const { return y2 - y1; }
};

/// PML absorption profile sigma(t) = sigma0 * (t/d)^p inside a layer of
/// thickness d outside the physical region.
struct PmlProfile {
    double sigma0 = 1.5;
    double p = 2.5;
    double d1 = 0.15;
    double d2 = 0.15;

    void validate() const;
};

/// Uniform tensor-product grid over the PML-extended domain D, with the
/// physical region Omega marked inside it. Node (i,j) sits at
/// (x_min + i*hx, y_min + j*hy), stored row-major (one y-row per line).
struct GridSpec {
    int nx = 0;
    int ny = 0;
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;
    double hx = 0.0;
    double hy = 0.0;
    Rect omega;

    GridSpec() = default;
    GridSpec(int nx_, int ny_, Rect domain, Rect omega_bounds);

    /// D = omega expanded by the PML thicknesses, n nodes per side.
    static GridSpec around_omega(const Rect& omega_bounds, const PmlProfile& pml,
                                 int nx_, int ny_);

    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
    double x(int i) const { return x_min + i * hx; }
    double y(int j) const { return y_min + j * hy; }

    bool inside_omega(double px, double py) const;           // closed box
    bool strictly_inside_omega(double px, double py) const;  // open box, tol-safe
    bool same_geometry(const GridSpec& other) const;         // identical grid
    bool same_bounds(const GridSpec& other) const;           // same D and Omega
};

/// Real-valued contrast q on a grid, compactly supported in Omega.
struct ScattererField {
    GridSpec grid;
    std::vector<double> values;

    ScattererField() = default;
    explicit ScattererField(const GridSpec& g) : grid(g), values(g.size(), 0.0) {}

    double& at(int i, int j) { return values[grid.idx(i, j)]; }
    double at(int i, int j) const { return values[grid.idx(i, j)]; }
};

/// Complex-valued field on the full PML-extended grid.
struct ComplexField {
    GridSpec grid;
    std::vector<cdouble> values;

    ComplexField() = default;
    explicit ComplexField(const GridSpec& g) : grid(g), values(g.size(), cdouble(0, 0)) {}

    cdouble& at(int i, int j) { return values[grid.idx(i, j)]; }
    cdouble at(int i, int j) const { return values[grid.idx(i, j)]; }
};

/// Measurement points, all inside the non-PML region.
struct ReceiverSet {
    std::vector<std::pair<double, double>> points;

    int count() const { return static_cast<int>(points.size()); }
};

/// One-sided PML profile value at a coordinate. Zero on [lo,hi], grows as
/// sigma0*((dist)/thickness)^p through the layer. Throws GeometryError
/// outside [lo-thickness, hi+thickness].
double pml_sigma(double coord, double lo, double hi, double thickness,
                 const PmlProfile& profile);

/// Complex stretching factors s1(x) = 1 + i*sigma1(x), s2(y) = 1 + i*sigma2(y).
std::pair<cdouble, cdouble> stretching(double px, double py, const GridSpec& grid,
                                       const PmlProfile& profile);

/// Bilinear interpolation at a point inside the grid bounds.
cdouble interpolate(const ComplexField& field, double px, double py);
double interpolate(const ScattererField& field, double px, double py);

/// Receivers equally spaced on the circle of given radius about the origin.
/// The circle must fit inside the non-PML box.
ReceiverSet build_receivers(int count, double radius, const Rect& omega_bounds);

/// Bilinear sampling of a fine-grid field at the nodes of a coarser grid
/// sharing the same domain bounds.
ScattererField restrict_to_grid(const ScattererField& fine, const GridSpec& coarse);
ComplexField restrict_to_grid(const ComplexField& fine, const GridSpec& coarse);

/// In-place clamp to [q_min, q_max].
void clamp_field(ScattererField& q, double q_min, double q_max);

/// Cell-area-weighted discrete L2 norm, hx*hy*sum(v^2) under the root.
double field_l2_norm(const ScattererField& q);

}  // namespace imsp
