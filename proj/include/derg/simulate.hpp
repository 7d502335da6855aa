#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "derg/governor.hpp"
#include "derg/types.hpp"

namespace derg {

// ---------------------------------------------------------------------------
// Closed-loop simulation of a pre-stabilized plant under zero-order-hold
// applied references.
// ---------------------------------------------------------------------------

struct SimConfig {
    int substeps = 10;           // RK4 sub-intervals per governor sample
    double t_max = 30.0;         // horizon [s]
    double settle_tol = 1e-3;    // settling criterion on ||x - xbar|| and ||v - target||
    double violation_tol = 1e-6; // flag threshold on c_i(x,v); separates RK4
                                 // discretization noise from true violations
    bool early_exit_on_settle = false;
    std::optional<Vector> settle_target;  // defaults to r or its admissible approximation

    void validate(double dt) const {
        if (substeps < 1) throw std::invalid_argument("SimConfig: substeps must be >= 1");
        if (t_max < dt) throw std::invalid_argument("SimConfig: t_max must be >= dt");
    }
};

struct RunRow {
    double t;
    Vector x;
    Vector v;
    double kappa;  // 0 at t = 0 (no update yet)
    double dsm;    // Delta(x, v) at the logged pair
    double min_c;  // min_i c_i(x, v)
};

struct RunLog {
    std::vector<RunRow> rows;
    bool constraint_violated = false;    // some c_i(x,v) < -violation_tol at a sub-step
    bool d_invariance_violated = false;  // some c_i(xbar_v,v) < delta - 1e-9 at a sample
    bool aborted = false;                // integration produced a non-finite state
    std::optional<double> settling_time; // first time the criterion holds to the end
    Vector terminal_v;
    Vector settle_target;
    double ise = 0.0;  // integral of ||x - xbar_target||^2 dt over the logged horizon
    double min_sample_dsm = std::numeric_limits<double>::infinity();
    double min_substep_c = std::numeric_limits<double>::infinity();
};

// Classical 4th-order Runge-Kutta step of xdot = f(x,v) with v held constant.
[[nodiscard]] inline Vector rk4_step(const PlantModel& plant, const Vector& x, const Vector& v,
                                     double h) {
    if (h <= 0.0) throw std::invalid_argument("rk4_step: step size must be positive");
    const Vector k1 = plant.deriv(x, v);
    const Vector k2 = plant.deriv(x + 0.5 * h * k1, v);
    const Vector k3 = plant.deriv(x + 0.5 * h * k2, v);
    const Vector k4 = plant.deriv(x + h * k3, v);
    Vector next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!next.allFinite()) {
        throw NonFiniteState("rk4_step: state became non-finite");
    }
    return next;
}

// Best admissible approximation of r: r itself when strictly steady-state
// admissible, otherwise the balance point on the delta-tightened boundary of
// the single violated constraint (r* = r - w (delta - c)/||w||^2 with
// w = M'a + e). Returns nullopt when several constraints are active at once.
[[nodiscard]] inline std::optional<Vector> best_admissible_reference(const Vector& r,
                                                                     const ConstraintSet& cons,
                                                                     const PlantModel& plant,
                                                                     double xi, double delta) {
    const Vector xbar = plant.equilibrium(r);
    int worst = -1;
    int n_active = 0;
    for (int i = 0; i < cons.size(); ++i) {
        const double ci = cons.value(i, xbar, r);
        if (ci < xi) {
            ++n_active;
            if (worst < 0 || ci < cons.value(worst, xbar, r)) worst = i;
        }
    }
    if (n_active == 0) return r;
    if (n_active > 1) return std::nullopt;

    const Vector w = plant.equilibrium_gain().transpose() * cons[worst].a + cons[worst].e;
    const double wn2 = w.squaredNorm();
    if (wn2 == 0.0) return std::nullopt;
    const double shift = delta - cons.value(worst, xbar, r);
    if (shift <= 0.0) return r;  // admissible but inside the repulsion band
    return Vector(r - w * (shift / wn2));
}

// Alternates one governor update per dt with `substeps` RK4 sub-intervals,
// holding v constant in between. Constraint violations are logged, never
// thrown; a non-finite state truncates the run with `aborted` set.
[[nodiscard]] inline RunLog simulate(const PlantModel& plant, const LyapunovSpec& lyap,
                                     const ConstraintSet& cons, const ErgParams& params,
                                     const SimConfig& sim, const Vector& x0, const Vector& v0,
                                     const Vector& r) {
    params.validate();
    sim.validate(params.dt);

    RunLog log;
    log.settle_target =
        sim.settle_target.has_value()
            ? *sim.settle_target
            : best_admissible_reference(r, cons, plant, params.xi, params.delta).value_or(r);
    const Vector xbar_target = plant.equilibrium(log.settle_target);

    Vector x = x0;
    ErgState state{v0, 0};

    const auto record_sample = [&](double t, double kappa) {
        RunRow row{t, x, state.v_prev, kappa, dsm(x, state.v_prev, lyap, cons, plant),
                   cons.min_value(x, state.v_prev)};
        log.min_sample_dsm = std::min(log.min_sample_dsm, row.dsm);
        log.min_substep_c = std::min(log.min_substep_c, row.min_c);
        if (row.min_c < -sim.violation_tol) log.constraint_violated = true;
        const Vector xbar = plant.equilibrium(state.v_prev);
        double min_cd = std::numeric_limits<double>::infinity();
        for (int i = 0; i < cons.size(); ++i) {
            min_cd = std::min(min_cd, cons.value(i, xbar, state.v_prev) - params.delta);
        }
        if (min_cd < -detail::kDomainSlack) log.d_invariance_violated = true;
        log.rows.push_back(std::move(row));
    };

    record_sample(0.0, 0.0);

    const long total_samples = static_cast<long>(std::llround(sim.t_max / params.dt));
    const double h = params.dt / sim.substeps;

    for (long k = 1; k <= total_samples; ++k) {
        try {
            for (int s = 0; s < sim.substeps; ++s) {
                x = rk4_step(plant, x, state.v_prev, h);
                const double min_c = cons.min_value(x, state.v_prev);
                log.min_substep_c = std::min(log.min_substep_c, min_c);
                if (min_c < -sim.violation_tol) log.constraint_violated = true;
            }
            const StepResult step = erg_step(x, state, r, params, plant, lyap, cons);
            if (!step.v_new.allFinite()) {
                throw NonFiniteState("simulate: applied reference became non-finite");
            }
            record_sample(k * params.dt, step.diag.kappa);
        } catch (const NonFiniteState&) {
            log.aborted = true;
            break;
        }

        if (sim.early_exit_on_settle &&
            (x - xbar_target).norm() < sim.settle_tol &&
            (state.v_prev - log.settle_target).norm() < sim.settle_tol) {
            break;
        }
    }

    log.terminal_v = state.v_prev;

    // Trailing block over which the settling criterion holds through the end.
    if (!log.aborted) {
        std::optional<double> settled;
        for (auto it = log.rows.rbegin(); it != log.rows.rend(); ++it) {
            if ((it->x - xbar_target).norm() < sim.settle_tol &&
                (it->v - log.settle_target).norm() < sim.settle_tol) {
                settled = it->t;
            } else {
                break;
            }
        }
        log.settling_time = settled;
    }

    for (std::size_t i = 1; i < log.rows.size(); ++i) {
        const double sq_prev = (log.rows[i - 1].x - xbar_target).squaredNorm();
        const double sq_curr = (log.rows[i].x - xbar_target).squaredNorm();
        log.ise += 0.5 * (sq_prev + sq_curr) * (log.rows[i].t - log.rows[i - 1].t);
    }
    return log;
}

}  // namespace derg
