#include "imsp/inversion.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "imsp/errors.hpp"

namespace imsp {

ContinuationSchedule ContinuationSchedule::make(double kappa_min, double kappa_max,
                                                int kappa_count, int angle_count) {
    if (kappa_count < 1) throw ConfigError("continuation.count must be >= 1");
    if (angle_count < 1) throw ConfigError("continuation.angles must be >= 1");
    if (!(kappa_min > 0.0)) throw ConfigError("continuation.kappa_min must be > 0");
    if (kappa_count > 1 && !(kappa_max > kappa_min)) {
        throw ConfigError("continuation.kappa_max must exceed kappa_min");
    }
    ContinuationSchedule s;
    s.kappas.resize(kappa_count);
    for (int i = 0; i < kappa_count; ++i) {
        s.kappas[i] = kappa_count == 1
                          ? kappa_min
                          : kappa_min + i * (kappa_max - kappa_min) / (kappa_count - 1);
    }
    s.angles.resize(angle_count);
    for (int j = 0; j < angle_count; ++j) {
        s.angles[j] = 2.0 * M_PI * j / angle_count;
    }
    return s;
}

void ContinuationSchedule::validate() const {
    if (kappas.empty() || angles.empty()) {
        throw ConfigError("continuation schedule needs kappas and angles");
    }
    for (std::size_t i = 0; i < kappas.size(); ++i) {
        if (!(kappas[i] > 0.0)) throw ConfigError("wavenumbers must be positive");
        if (i > 0 && !(kappas[i] > kappas[i - 1])) {
            throw ConfigError("wavenumbers must be strictly increasing");
        }
    }
}

double relative_error(const ScattererField& q_est, const ScattererField& q_true) {
    const ScattererField* truth = &q_true;
    ScattererField restricted;
    if (!q_true.grid.same_geometry(q_est.grid)) {
        restricted = restrict_to_grid(q_true, q_est.grid);
        truth = &restricted;
    }
    const double denom = field_l2_norm(*truth);
    if (denom == 0.0) {
        throw NumericError("relative_error undefined: q_true has zero norm");
    }
    ScattererField diff = *truth;
    for (std::size_t n = 0; n < diff.values.size(); ++n) {
        diff.values[n] -= q_est.values[n];
    }
    return field_l2_norm(diff) / denom;
}

double effective_nu(const DataRecord& data, double configured_nu) {
    if (configured_nu > 0.0) return configured_nu;
    const double mean_sq = data.values.squaredNorm() / std::max<Eigen::Index>(1, data.values.size());
    if (mean_sq == 0.0) {
        throw ConfigError("cannot derive nu from all-zero data; set noise.nu explicitly");
    }
    return 1e-6 * mean_sq;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::pair<ScattererField, UpdateRecord> update_step(const ScattererField& q,
                                                    const DataRecord& data,
                                                    const MixtureModel* model,
                                                    const InversionProblem& prob) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!q.grid.same_geometry(prob.grid)) {
        throw GeometryError("update_step: iterate grid differs from problem grid");
    }

    const double nu = effective_nu(data, prob.nu);
    const MisfitContext ctx = model ? MisfitContext(data, *model, nu)
                                    : MisfitContext::plain(data, nu);

    UpdateRecord rec;
    rec.kappa = data.kappa;
    rec.angle = data.angle;

    HelmholtzOperator op(q, data.kappa, prob.pml, prob.solver_tol);
    DataGradientResult dres = data_gradient(op, data.angle, prob.receivers, ctx);
    rec.objective_before = dres.misfit + prob.reg.reg_weight * R_value(q, prob.reg);

    ScattererField g = dres.gradient;
    if (prob.reg.reg_weight > 0.0) {
        const ScattererField g_gauss = grad_R_gaussian(q, prob.reg);
        const ScattererField g_tv = grad_R_tv(q, prob.reg);
        for (std::size_t n = 0; n < g.values.size(); ++n) {
            g.values[n] += prob.reg.reg_weight * (g_gauss.values[n] + g_tv.values[n]);
        }
    }

    double g_max = 0.0;
    double q_max_abs = 0.0;
    for (std::size_t n = 0; n < g.values.size(); ++n) {
        g_max = std::max(g_max, std::abs(g.values[n]));
        q_max_abs = std::max(q_max_abs, std::abs(q.values[n]));
    }

    if (g_max <= 1e-14 * std::max(1.0, q_max_abs)) {
        // Data already explained; stay put.
        rec.accepted = true;
        rec.step = 0.0;
        rec.objective_after = rec.objective_before;
        rec.misfit_after = dres.misfit;
        rec.seconds = seconds_since(t0);
        return {q, rec};
    }

    double alpha = prob.step.init;
    for (int bt = 0; bt <= prob.step.max_backtracks; ++bt, alpha *= 0.5) {
        ScattererField trial = q;
        const double scale = alpha / g_max;
        for (std::size_t n = 0; n < trial.values.size(); ++n) {
            trial.values[n] -= scale * g.values[n];
        }
        clamp_field(trial, prob.step.q_min, prob.step.q_max);

        HelmholtzOperator trial_op(trial, data.kappa, prob.pml, prob.solver_tol);
        const Eigen::VectorXcd predicted =
            sample_receivers(trial_op.solve_scattered(data.angle), prob.receivers);
        const double misfit_trial = ctx.misfit(predicted);
        const double obj_trial = misfit_trial + prob.reg.reg_weight * R_value(trial, prob.reg);
        if (obj_trial < rec.objective_before) {
            rec.accepted = true;
            rec.step = alpha;
            rec.objective_after = obj_trial;
            rec.misfit_after = misfit_trial;
            rec.seconds = seconds_since(t0);
            return {std::move(trial), rec};
        }
    }

    // No descent found; keep the iterate unchanged.
    rec.accepted = false;
    rec.step = 0.0;
    rec.objective_after = rec.objective_before;
    rec.misfit_after = dres.misfit;
    rec.seconds = seconds_since(t0);
    return {q, rec};
}

namespace {

bool kappa_matches(double a, double b) {
    return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a) + std::abs(b));
}

const DataRecord* find_record(const std::vector<DataRecord>& data, double kappa,
                              double angle) {
    for (const auto& rec : data) {
        if (kappa_matches(rec.kappa, kappa) &&
            std::abs(rec.angle - angle) <= 1e-9 * (1.0 + std::abs(angle))) {
            return &rec;
        }
    }
    return nullptr;
}

const MixtureModel* find_model(const std::vector<MixtureModel>* models, double kappa) {
    if (!models) return nullptr;
    for (const auto& m : *models) {
        if (kappa_matches(m.kappa_tag, kappa)) return &m;
    }
    return nullptr;
}

}  // namespace

InversionReport run_inversion(const InversionProblem& prob,
                              const ContinuationSchedule& schedule,
                              const std::vector<DataRecord>& data,
                              const std::vector<MixtureModel>* models,
                              const ScattererField* q_true,
                              const ScattererField* q_init) {
    schedule.validate();

    // Every (kappa, angle) record must exist before any solve.
    for (double kappa : schedule.kappas) {
        for (double angle : schedule.angles) {
            if (!find_record(data, kappa, angle)) {
                std::ostringstream msg;
                msg << "missing data record for kappa=" << kappa << " angle=" << angle;
                throw ConfigError(msg.str());
            }
        }
    }

    InversionReport report;
    ScattererField q = q_init ? *q_init : ScattererField(prob.grid);
    if (q_init && !q_init->grid.same_geometry(prob.grid)) {
        throw GeometryError("initial iterate grid differs from inversion grid");
    }

    ScattererField truth_on_grid;
    if (q_true) {
        truth_on_grid = q_true->grid.same_geometry(prob.grid)
                            ? *q_true
                            : restrict_to_grid(*q_true, prob.grid);
    }

    for (double kappa : schedule.kappas) {
        const MixtureModel* model = find_model(models, kappa);
        if (models && !model) {
            std::ostringstream msg;
            msg << "no mixture model for kappa=" << kappa << "; using plain RLM at this level";
            report.warnings.push_back(msg.str());
        }
        for (double angle : schedule.angles) {
            const DataRecord* rec = find_record(data, kappa, angle);
            auto [q_new, urec] = update_step(q, *rec, model, prob);
            q = std::move(q_new);
            if (q_true) urec.rel_error = relative_error(q, truth_on_grid);
            if (!urec.accepted) {
                std::ostringstream msg;
                msg << "no descent at kappa=" << kappa << " angle=" << angle
                    << "; step skipped";
                report.warnings.push_back(msg.str());
            }
            report.records.push_back(urec);
        }
        report.snapshots.emplace_back(kappa, q);
    }
    report.q_final = std::move(q);
    return report;
}

std::vector<std::pair<double, double>> InversionReport::per_kappa_error() const {
    std::vector<std::pair<double, double>> out;
    for (std::size_t n = 0; n < records.size(); ++n) {
        const bool last_at_kappa =
            n + 1 == records.size() || records[n + 1].kappa != records[n].kappa;
        if (last_at_kappa) out.emplace_back(records[n].kappa, records[n].rel_error);
    }
    return out;
}

}  // namespace imsp
