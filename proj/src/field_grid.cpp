#include "imsp/field_grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "imsp/errors.hpp"

namespace imsp {

namespace {

// Strictness tolerance for classifying nodes against the Omega box; far
// below any usable grid spacing, far above accumulated rounding in x_min+i*hx.
double omega_tol(const Rect& r) {
    return 1e-9 * std::max(r.width(), r.height());
}

}  // namespace

void PmlProfile::validate() const {
    if (!(sigma0 > 1.0)) {
        throw ConfigError("pml.sigma0 must be > 1, got " + std::to_string(sigma0));
    }
    if (!(p >= 2.0)) {
        throw ConfigError("pml.p must be >= 2, got " + std::to_string(p));
    }
    if (!(d1 > 0.0) || !(d2 > 0.0)) {
        throw ConfigError("pml thicknesses d1, d2 must be > 0");
    }
}

GridSpec::GridSpec(int nx_, int ny_, Rect domain, Rect omega_bounds)
    : nx(nx_), ny(ny_),
      x_min(domain.x1), x_max(domain.x2),
      y_min(domain.y1), y_max(domain.y2),
      omega(omega_bounds) {
    if (nx < 3 || ny < 3) {
        throw ConfigError("grid needs nx >= 3 and ny >= 3");
    }
    if (!(x_max > x_min) || !(y_max > y_min)) {
        throw ConfigError("grid domain bounds are inverted or empty");
    }
    hx = (x_max - x_min) / (nx - 1);
    hy = (y_max - y_min) / (ny - 1);
    const double tol = omega_tol(omega);
    if (omega.x1 < x_min - tol || omega.x2 > x_max + tol ||
        omega.y1 < y_min - tol || omega.y2 > y_max + tol) {
        throw GeometryError("omega_bounds extend outside the grid domain");
    }
}

GridSpec GridSpec::around_omega(const Rect& omega_bounds, const PmlProfile& pml,
                                int nx_, int ny_) {
    pml.validate();
    Rect domain{omega_bounds.x1 - pml.d1, omega_bounds.x2 + pml.d1,
                omega_bounds.y1 - pml.d2, omega_bounds.y2 + pml.d2};
    return GridSpec(nx_, ny_, domain, omega_bounds);
}

bool GridSpec::inside_omega(double px, double py) const {
    const double tol = omega_tol(omega);
    return px >= omega.x1 - tol && px <= omega.x2 + tol &&
           py >= omega.y1 - tol && py <= omega.y2 + tol;
}

bool GridSpec::strictly_inside_omega(double px, double py) const {
    const double tol = omega_tol(omega);
    return px > omega.x1 + tol && px < omega.x2 - tol &&
           py > omega.y1 + tol && py < omega.y2 - tol;
}

bool GridSpec::same_geometry(const GridSpec& other) const {
    return nx == other.nx && ny == other.ny && same_bounds(other);
}

bool GridSpec::same_bounds(const GridSpec& other) const {
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)); };
    return close(x_min, other.x_min) && close(x_max, other.x_max) &&
           close(y_min, other.y_min) && close(y_max, other.y_max) &&
           close(omega.x1, other.omega.x1) && close(omega.x2, other.omega.x2) &&
           close(omega.y1, other.omega.y1) && close(omega.y2, other.omega.y2);
}

double pml_sigma(double coord, double lo, double hi, double thickness,
                 const PmlProfile& profile) {
    if (!(thickness > 0.0) || !(lo < hi)) {
        throw GeometryError("pml_sigma needs thickness > 0 and lo < hi");
    }
    const double tol = 1e-12 * (std::abs(hi - lo) + thickness);
    if (coord < lo - thickness - tol || coord > hi + thickness + tol) {
        std::ostringstream msg;
        msg << "coordinate " << coord << " outside PML-extended interval ["
            << lo - thickness << ", " << hi + thickness << "]";
        throw GeometryError(msg.str());
    }
    if (coord >= lo && coord <= hi) return 0.0;
    const double t = coord > hi ? (coord - hi) / thickness : (lo - coord) / thickness;
    return profile.sigma0 * std::pow(std::min(t, 1.0), profile.p);
}

std::pair<cdouble, cdouble> stretching(double px, double py, const GridSpec& grid,
                                       const PmlProfile& profile) {
    const double s1 = pml_sigma(px, grid.omega.x1, grid.omega.x2, profile.d1, profile);
    const double s2 = pml_sigma(py, grid.omega.y1, grid.omega.y2, profile.d2, profile);
    return {cdouble(1.0, s1), cdouble(1.0, s2)};
}

namespace {

struct BilinearStencil {
    int i, j;        // lower-left node
    double fx, fy;   // local coordinates in [0,1]
};

BilinearStencil locate(const GridSpec& g, double px, double py) {
    const double tol_x = 1e-12 * (std::abs(g.x_max - g.x_min) + 1.0);
    const double tol_y = 1e-12 * (std::abs(g.y_max - g.y_min) + 1.0);
    if (px < g.x_min - tol_x || px > g.x_max + tol_x ||
        py < g.y_min - tol_y || py > g.y_max + tol_y) {
        std::ostringstream msg;
        msg << "point (" << px << ", " << py << ") outside grid domain";
        throw GeometryError(msg.str());
    }
    int i = static_cast<int>(std::floor((px - g.x_min) / g.hx));
    int j = static_cast<int>(std::floor((py - g.y_min) / g.hy));
    i = std::clamp(i, 0, g.nx - 2);
    j = std::clamp(j, 0, g.ny - 2);
    const double fx = (px - g.x(i)) / g.hx;
    const double fy = (py - g.y(j)) / g.hy;
    return {i, j, fx, fy};
}

template <typename Field>
auto interp_impl(const Field& field, double px, double py) {
    const auto s = locate(field.grid, px, py);
    const auto v00 = field.at(s.i, s.j);
    const auto v10 = field.at(s.i + 1, s.j);
    const auto v01 = field.at(s.i, s.j + 1);
    const auto v11 = field.at(s.i + 1, s.j + 1);
    return v00 * ((1 - s.fx) * (1 - s.fy)) + v10 * (s.fx * (1 - s.fy)) +
           v01 * ((1 - s.fx) * s.fy) + v11 * (s.fx * s.fy);
}

}  // namespace

cdouble interpolate(const ComplexField& field, double px, double py) {
    return interp_impl(field, px, py);
}

double interpolate(const ScattererField& field, double px, double py) {
    return interp_impl(field, px, py);
}

ReceiverSet build_receivers(int count, double radius, const Rect& omega_bounds) {
    if (count < 1) throw ConfigError("receiver count must be >= 1");
    if (!(radius > 0.0)) throw ConfigError("receiver radius must be > 0");
    const double half_w = std::min(std::abs(omega_bounds.x1), std::abs(omega_bounds.x2));
    const double half_h = std::min(std::abs(omega_bounds.y1), std::abs(omega_bounds.y2));
    const double limit = std::min(half_w, half_h);
    if (radius > limit * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "receiver circle radius " << radius
            << " extends into the PML region (limit " << limit << ")";
        throw GeometryError(msg.str());
    }
    ReceiverSet rs;
    rs.points.reserve(count);
    const double two_pi = 2.0 * M_PI;
    for (int n = 0; n < count; ++n) {
        const double a = two_pi * n / count;
        rs.points.emplace_back(radius * std::cos(a), radius * std::sin(a));
    }
    return rs;
}

namespace {

template <typename Field>
Field restrict_impl(const Field& fine, const GridSpec& coarse) {
    if (!fine.grid.same_bounds(coarse)) {
        throw GeometryError("restrict_to_grid requires matching domain bounds");
    }
    Field out(coarse);
    for (int j = 0; j < coarse.ny; ++j) {
        for (int i = 0; i < coarse.nx; ++i) {
            out.at(i, j) = interpolate(fine, coarse.x(i), coarse.y(j));
        }
    }
    return out;
}

}  // namespace

ScattererField restrict_to_grid(const ScattererField& fine, const GridSpec& coarse) {
    return restrict_impl(fine, coarse);
}

ComplexField restrict_to_grid(const ComplexField& fine, const GridSpec& coarse) {
    return restrict_impl(fine, coarse);
}

void clamp_field(ScattererField& q, double q_min, double q_max) {
    for (double& v : q.values) v = std::clamp(v, q_min, q_max);
}

double field_l2_norm(const ScattererField& q) {
    double acc = 0.0;
    for (double v : q.values) acc += v * v;
    return std::sqrt(q.grid.hx * q.grid.hy * acc);
}

}  // namespace imsp
