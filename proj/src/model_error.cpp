#include "imsp/model_error.hpp"

#include <cmath>
#include <vector>

#include "imsp/errors.hpp"
#include "imsp/rng.hpp"

namespace imsp {

void ExampleSpec::validate() const {
    if (count < 1) throw ConfigError("learning.count must be >= 1");
    auto range_ok = [](double lo, double hi) { return lo < hi; };
    if (family == ExampleFamily::gaussian_bumps) {
        if (!range_ok(shape_lo, shape_hi) || !range_ok(amp_lo, amp_hi) ||
            !range_ok(width_lo, width_hi) || !range_ok(center_lo, center_hi)) {
            throw ConfigError("gaussian_bumps parameter ranges must have lo < hi");
        }
        if (shape_lo <= 0.0) throw ConfigError("gaussian_bumps shape exponents must be > 0");
    } else {
        if (!range_ok(half_lo, half_hi) || !range_ok(height_lo, height_hi)) {
            throw ConfigError("random_square parameter ranges must have lo < hi");
        }
        if (half_lo <= 0.0 || half_hi >= 1.0) {
            throw ConfigError("random_square half side must lie in (0, 1)");
        }
    }
}

namespace {

double example1_formula(double x, double y) {
    const double t1 = 0.3 * (1.0 - x) * (1.0 - x) * std::exp(-x * x - (y + 1.0) * (y + 1.0));
    const double t2 = (0.2 * x - x * x * x - std::pow(y, 5)) * std::exp(-x * x - y * y);
    const double t3 = 0.03 * std::exp(-(x + 1.0) * (x + 1.0) - y * y);
    return t1 - t2 - t3;
}

template <typename F>
ScattererField fill_omega(const GridSpec& grid, F&& f) {
    ScattererField q(grid);
    for (int j = 0; j < grid.ny; ++j) {
        const double y = grid.y(j);
        for (int i = 0; i < grid.nx; ++i) {
            const double x = grid.x(i);
            if (grid.inside_omega(x, y)) q.at(i, j) = f(x, y);
        }
    }
    return q;
}

}  // namespace

ScattererField true_scatterer_example1(const GridSpec& grid) {
    return fill_omega(grid, [](double x, double y) { return example1_formula(3.0 * x, 3.0 * y); });
}

ScattererField true_scatterer_example2(const GridSpec& grid) {
    return fill_omega(grid, [](double x, double y) {
        if (x > -0.1 && x < 0.1 && y > -0.1 && y < 0.1) return -0.1;
        if (x >= -0.3 && x <= 0.3 && y >= -0.3 && y <= 0.3) return 0.7;
        return 0.0;
    });
}

ScattererField gen_example(const ExampleSpec& spec, int index, const GridSpec& grid) {
    spec.validate();
    if (index < 0 || index >= spec.count) {
        throw ConfigError("example index " + std::to_string(index) + " out of range");
    }
    std::mt19937_64 gen(mix_seed(spec.seed, static_cast<std::uint64_t>(index)));

    if (spec.family == ExampleFamily::gaussian_bumps) {
        struct Bump {
            double a1, a2, a3, a4, a5, a6, a7;
        };
        Bump b[3];
        for (auto& t : b) {
            t.a1 = uniform_in(gen, spec.shape_lo, spec.shape_hi);
            t.a2 = uniform_in(gen, spec.shape_lo, spec.shape_hi);
            t.a3 = uniform_in(gen, spec.amp_lo, spec.amp_hi);
            t.a4 = uniform_in(gen, spec.width_lo, spec.width_hi);
            t.a5 = uniform_in(gen, spec.center_lo, spec.center_hi);
            t.a6 = uniform_in(gen, spec.width_lo, spec.width_hi);
            t.a7 = uniform_in(gen, spec.center_lo, spec.center_hi);
        }
        return fill_omega(grid, [&](double x, double y) {
            // (1-x^2)^a vanishes on the Omega boundary; clip tiny negative
            // bases from rounding at |x| ~ 1.
            const double bx = std::max(0.0, 1.0 - x * x);
            const double by = std::max(0.0, 1.0 - y * y);
            double v = 0.0;
            for (const auto& t : b) {
                v += std::pow(bx, t.a1) * std::pow(by, t.a2) * t.a3 *
                     std::exp(-t.a4 * (x - t.a5) * (x - t.a5) -
                              t.a6 * (y - t.a7) * (y - t.a7));
            }
            return v;
        });
    }

    // random_square: half width first, then a center keeping the square
    // inside [-1,1]^2, then the height.
    const double hw = uniform_in(gen, spec.half_lo, spec.half_hi);
    const double cx = uniform_in(gen, -(1.0 - hw), 1.0 - hw);
    const double cy = uniform_in(gen, -(1.0 - hw), 1.0 - hw);
    const double height = uniform_in(gen, spec.height_lo, spec.height_hi);
    return fill_omega(grid, [&](double x, double y) {
        return (std::abs(x - cx) <= hw && std::abs(y - cy) <= hw) ? height : 0.0;
    });
}

ErrorSampleSet compute_error_samples(const ExampleSpec& spec, double kappa, double angle,
                                     const GridSpec& fine, const GridSpec& coarse,
                                     const ReceiverSet& receivers, const PmlProfile& pml,
                                     double tol, ErrorSampleReport* report) {
    spec.validate();
    if (!fine.same_bounds(coarse)) {
        throw GeometryError("fine and coarse grids must share domain bounds");
    }
    std::vector<Eigen::VectorXcd> kept;
    kept.reserve(spec.count);
    int failed = 0;
    for (int n = 0; n < spec.count; ++n) {
        try {
            const ScattererField q_fine = gen_example(spec, n, fine);
            const ScattererField q_coarse = gen_example(spec, n, coarse);
            const Eigen::VectorXcd d_fine = forward_map(q_fine, kappa, angle, receivers, pml, tol);
            const Eigen::VectorXcd d_coarse =
                forward_map(q_coarse, kappa, angle, receivers, pml, tol);
            kept.push_back(d_fine - d_coarse);
        } catch (const SolverError&) {
            ++failed;
        }
    }
    if (kept.empty()) {
        throw SolverError("all error-sample solves failed at kappa=" + std::to_string(kappa));
    }
    ErrorSampleSet set;
    set.kappa = kappa;
    set.samples.resize(receivers.count(), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t n = 0; n < kept.size(); ++n) {
        set.samples.col(static_cast<Eigen::Index>(n)) = kept[n];
    }
    if (report) {
        report->requested = spec.count;
        report->succeeded = static_cast<int>(kept.size());
        report->failed = failed;
    }
    return set;
}

}  // namespace imsp
