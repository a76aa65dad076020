#include "imsp/regularizer.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "imsp/errors.hpp"

namespace imsp {

void RegularizerConfig::validate() const {
    if (!(a_scale > 0.0)) throw ConfigError("reg.a_scale must be > 0");
    if (!(s > 0.0)) throw ConfigError("reg.s must be > 0");
    if (lambda < 0.0) throw ConfigError("reg.lambda must be >= 0");
    if (!(delta_tv > 0.0)) throw ConfigError("reg.delta_tv must be > 0");
    if (reg_weight < 0.0) throw ConfigError("reg.weight must be >= 0");
}

namespace {

/// Index box of grid nodes strictly inside Omega.
struct OmegaBox {
    int ix0, ix1, iy0, iy1;  // inclusive
    int mx() const { return ix1 - ix0 + 1; }
    int my() const { return iy1 - iy0 + 1; }
};

OmegaBox omega_interior_box(const GridSpec& g) {
    OmegaBox b{g.nx, -1, g.ny, -1};
    for (int i = 0; i < g.nx; ++i) {
        const double x = g.x(i);
        const double mid = 0.5 * (g.omega.y1 + g.omega.y2);
        if (g.strictly_inside_omega(x, mid)) {
            b.ix0 = std::min(b.ix0, i);
            b.ix1 = std::max(b.ix1, i);
        }
    }
    for (int j = 0; j < g.ny; ++j) {
        const double y = g.y(j);
        const double mid = 0.5 * (g.omega.x1 + g.omega.x2);
        if (g.strictly_inside_omega(mid, y)) {
            b.iy0 = std::min(b.iy0, j);
            b.iy1 = std::max(b.iy1, j);
        }
    }
    if (b.ix1 < b.ix0 || b.iy1 < b.iy0) {
        throw GeometryError("no grid nodes strictly inside Omega");
    }
    return b;
}

/// Cached DST-I (RODFT00) plan with its work buffer, one per box size.
struct DstPlan {
    fftw_plan plan = nullptr;
    double* buf = nullptr;
    int my = 0, mx = 0;

    ~DstPlan() {
        if (plan) fftw_destroy_plan(plan);
        if (buf) fftw_free(buf);
    }
};

DstPlan& dst_plan(int my, int mx) {
    static std::map<std::pair<int, int>, DstPlan> cache;
    DstPlan& p = cache[{my, mx}];
    if (!p.plan) {
        p.my = my;
        p.mx = mx;
        p.buf = static_cast<double*>(fftw_malloc(sizeof(double) * my * mx));
        p.plan = fftw_plan_r2r_2d(my, mx, p.buf, p.buf, FFTW_RODFT00, FFTW_RODFT00,
                                  FFTW_ESTIMATE);
        if (!p.plan) throw NumericError("failed to create DST plan");
    }
    return p;
}

}  // namespace

ScattererField apply_A_pow(const ScattererField& q, double power,
                           const RegularizerConfig& cfg) {
    cfg.validate();
    if (power < 0.0) throw ConfigError("apply_A_pow power must be >= 0");
    if (power == 0.0) return q;

    const GridSpec& g = q.grid;
    const OmegaBox box = omega_interior_box(g);
    const int mx = box.mx();
    const int my = box.my();

    // Plans and their work buffers are shared; serialize transform use.
    static std::mutex dst_mutex;
    std::lock_guard<std::mutex> lock(dst_mutex);
    DstPlan& p = dst_plan(my, mx);

    for (int j = 0; j < my; ++j) {
        for (int i = 0; i < mx; ++i) {
            p.buf[j * mx + i] = q.at(box.ix0 + i, box.iy0 + j);
        }
    }
    fftw_execute(p.plan);

    // Discrete Dirichlet eigenvalues of -Laplacian on the box.
    std::vector<double> lam_x(mx), lam_y(my);
    for (int m = 0; m < mx; ++m) {
        const double s = std::sin(M_PI * (m + 1) / (2.0 * (mx + 1)));
        lam_x[m] = 4.0 / (g.hx * g.hx) * s * s;
    }
    for (int m = 0; m < my; ++m) {
        const double s = std::sin(M_PI * (m + 1) / (2.0 * (my + 1)));
        lam_y[m] = 4.0 / (g.hy * g.hy) * s * s;
    }
    const double norm = 1.0 / (4.0 * (mx + 1) * (my + 1));
    for (int j = 0; j < my; ++j) {
        for (int i = 0; i < mx; ++i) {
            const double lam = cfg.a_scale * (lam_x[i] + lam_y[j]);
            p.buf[j * mx + i] *= std::pow(lam, power) * norm;
        }
    }
    fftw_execute(p.plan);

    ScattererField out(g);
    for (int j = 0; j < my; ++j) {
        for (int i = 0; i < mx; ++i) {
            out.at(box.ix0 + i, box.iy0 + j) = p.buf[j * mx + i];
        }
    }
    return out;
}

ScattererField grad_R_gaussian(const ScattererField& q, const RegularizerConfig& cfg) {
    return apply_A_pow(q, cfg.s, cfg);
}

namespace {

/// Forward-difference TV state over the open Omega box: flux components
/// gx/phi, gy/phi at each box node (zero-flux at the far edges).
struct TvFlux {
    OmegaBox box;
    std::vector<double> fx, fy;  // gx/phi, gy/phi
    double energy = 0.0;         // sum of (phi - sqrt(delta)) over box nodes
};

TvFlux tv_flux(const ScattererField& q, double delta) {
    const GridSpec& g = q.grid;
    TvFlux t;
    t.box = omega_interior_box(g);
    const int mx = t.box.mx();
    const int my = t.box.my();
    t.fx.assign(static_cast<std::size_t>(mx) * my, 0.0);
    t.fy.assign(static_cast<std::size_t>(mx) * my, 0.0);
    const double sq_delta = std::sqrt(delta);
    for (int j = 0; j < my; ++j) {
        for (int i = 0; i < mx; ++i) {
            const int gi = t.box.ix0 + i;
            const int gj = t.box.iy0 + j;
            const double gx = i + 1 < mx ? (q.at(gi + 1, gj) - q.at(gi, gj)) / g.hx : 0.0;
            const double gy = j + 1 < my ? (q.at(gi, gj + 1) - q.at(gi, gj)) / g.hy : 0.0;
            const double phi = std::sqrt(gx * gx + gy * gy + delta);
            t.fx[static_cast<std::size_t>(j) * mx + i] = gx / phi;
            t.fy[static_cast<std::size_t>(j) * mx + i] = gy / phi;
            t.energy += phi - sq_delta;
        }
    }
    return t;
}

}  // namespace

ScattererField grad_R_tv(const ScattererField& q, const RegularizerConfig& cfg) {
    cfg.validate();
    ScattererField out(q.grid);
    if (cfg.lambda == 0.0) return out;

    const TvFlux t = tv_flux(q, cfg.delta_tv);
    const GridSpec& g = q.grid;
    const int mx = t.box.mx();
    const int my = t.box.my();
    auto fx = [&](int i, int j) {
        return (i >= 0 && i < mx) ? t.fx[static_cast<std::size_t>(j) * mx + i] : 0.0;
    };
    auto fy = [&](int i, int j) {
        return (j >= 0 && j < my) ? t.fy[static_cast<std::size_t>(j) * mx + i] : 0.0;
    };
    for (int j = 0; j < my; ++j) {
        for (int i = 0; i < mx; ++i) {
            const double div_x = (fx(i - 1, j) - fx(i, j)) / g.hx;
            const double div_y = (fy(i, j - 1) - fy(i, j)) / g.hy;
            out.at(t.box.ix0 + i, t.box.iy0 + j) = cfg.lambda * (div_x + div_y);
        }
    }
    return out;
}

double R_value(const ScattererField& q, const RegularizerConfig& cfg) {
    cfg.validate();
    const ScattererField half = apply_A_pow(q, 0.5 * cfg.s, cfg);
    double acc = 0.0;
    for (double v : half.values) acc += v * v;
    double r = 0.5 * q.grid.hx * q.grid.hy * acc;
    if (cfg.lambda > 0.0) {
        const TvFlux t = tv_flux(q, cfg.delta_tv);
        r += cfg.lambda * q.grid.hx * q.grid.hy * t.energy;
    }
    return r;
}

}  // namespace imsp
