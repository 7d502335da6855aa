#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "derg/types.hpp"

namespace derg {

// ---------------------------------------------------------------------------
// Navigation field
// ---------------------------------------------------------------------------

// Unit-saturated pull towards the desired reference:
//   rho_a = (r - v) / max{||r - v||, eta1}.
[[nodiscard]] inline Vector attraction_field(const Vector& v, const Vector& r, double eta1) {
    const Vector diff = r - v;
    return diff / std::max(diff.norm(), eta1);
}

// Reference-space gradient of c_i evaluated along the equilibrium map,
// grad_v c_i(xbar_v, v) = -M'a_i - e_i. Constant for affine maps.
[[nodiscard]] inline Vector constraint_ref_gradient(const Constraint& c, const PlantModel& plant) {
    return -plant.equilibrium_gain().transpose() * c.a - c.e;
}

// Push away from constraints, active within margin xi and saturating at
// margin delta:
//   rho_r = sum_i max{(xi - c_i(xbar_v,v)) / (xi - delta), 0} * ghat_i,
// where ghat_i is the unit reference-space gradient of c_i.
[[nodiscard]] inline Vector repulsion_field(const Vector& v, const PlantModel& plant,
                                            const ConstraintSet& cons, double xi, double delta) {
    Vector field = Vector::Zero(plant.ref_dim());
    const Vector xbar = plant.equilibrium(v);
    for (int i = 0; i < cons.size(); ++i) {
        const double ci = cons.value(i, xbar, v);
        const double weight = std::max((xi - ci) / (xi - delta), 0.0);
        if (weight == 0.0) continue;
        const Vector grad = constraint_ref_gradient(cons[i], plant);
        const double norm = grad.norm();
        if (norm < 1e-12) {
            throw ZeroGradient("repulsion_field: active constraint with vanishing "
                               "reference-space gradient");
        }
        field += weight * grad / norm;
    }
    return field;
}

// ---------------------------------------------------------------------------
// Threshold values and dynamic safety margin
// ---------------------------------------------------------------------------

// Smallest Lyapunov value on any constraint boundary, for quadratic V:
//   Gamma(v) = min_i c_i(xbar_v,v)^2 / (a_i' P(v)^-1 a_i).
// Closed-form minimum of the positive-definite quadratic over {c_i = 0}.
[[nodiscard]] inline double threshold_gamma(const Vector& v, const LyapunovSpec& lyap,
                                            const ConstraintSet& cons, const PlantModel& plant) {
    if (!lyap.has_quadratic_form()) {
        throw NotQuadratic("threshold_gamma: no quadratic form, use threshold_gamma_hat");
    }
    const Matrix P = lyap.quadratic_form(v);
    const Eigen::LLT<Matrix> llt(P);
    if (llt.info() != Eigen::Success) {
        throw SingularQuadraticForm("threshold_gamma: quadratic form is not positive definite");
    }
    const Vector xbar = plant.equilibrium(v);
    double gamma = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cons.size(); ++i) {
        const double ci = cons.value(i, xbar, v);
        const double quad = cons[i].a.dot(llt.solve(cons[i].a));
        gamma = std::min(gamma, ci * ci / quad);
    }
    return gamma;
}

// Ball-based lower bound on the threshold:
//   Gammahat(v) = min_i m1(v) * (c_i(xbar_v,v)/||a_i||)^2,
// using the point-to-hyperplane distance from xbar_v to {c_i = 0}.
[[nodiscard]] inline double threshold_gamma_hat(const Vector& v, const LyapunovSpec& lyap,
                                                const ConstraintSet& cons,
                                                const PlantModel& plant) {
    const double m1 = lyap.lower_bound(v);
    const Vector xbar = plant.equilibrium(v);
    double gamma = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cons.size(); ++i) {
        const double dist = cons.value(i, xbar, v) / cons[i].a.norm();
        gamma = std::min(gamma, m1 * dist * dist);
    }
    return gamma;
}

// Dynamic safety margin Delta(x,v) = Gamma(v) - V(x,v); may be negative.
// Uses the exact threshold when a quadratic form exists, the ball-based one
// otherwise.
[[nodiscard]] inline double dsm(const Vector& x, const Vector& v, const LyapunovSpec& lyap,
                                const ConstraintSet& cons, const PlantModel& plant) {
    const double gamma = lyap.has_quadratic_form() ? threshold_gamma(v, lyap, cons, plant)
                                                   : threshold_gamma_hat(v, lyap, cons, plant);
    return gamma - lyap.value(x, v);
}

// g(x,v,r) = Delta(x,v) * (rho_a + rho_r). Zero whenever Delta = 0.
[[nodiscard]] inline Vector navigation_field(const Vector& x, const Vector& v, const Vector& r,
                                             const ErgParams& params, const PlantModel& plant,
                                             const LyapunovSpec& lyap, const ConstraintSet& cons) {
    const double margin = dsm(x, v, lyap, cons, plant);
    return margin * (attraction_field(v, r, params.eta1) +
                     repulsion_field(v, plant, cons, params.xi, params.delta));
}

// ---------------------------------------------------------------------------
// Distances to the delta-tightened constraints
// ---------------------------------------------------------------------------

struct TightenedDistances {
    std::vector<double> per_constraint;  // theta_i
    double min;                          // thetabar
};

namespace detail {

// Signed distances (c_i(xbar_v,v) - delta)/||a_i||; negative outside D.
inline TightenedDistances signed_tightened_distances(const Vector& v, const ConstraintSet& cons,
                                                     const PlantModel& plant, double delta) {
    TightenedDistances out;
    out.per_constraint.reserve(cons.size());
    out.min = std::numeric_limits<double>::infinity();
    const Vector xbar = plant.equilibrium(v);
    for (int i = 0; i < cons.size(); ++i) {
        const double theta = (cons.value(i, xbar, v) - delta) / cons[i].a.norm();
        out.per_constraint.push_back(theta);
        out.min = std::min(out.min, theta);
    }
    return out;
}

// Slack for membership checks along chains of governor updates: exact
// arithmetic keeps c_i >= delta, floating point may undershoot.
inline constexpr double kDomainSlack = 1e-9;

}  // namespace detail

// theta_i = (c_i(xbar_v,v) - delta)/||a_i||, the Euclidean distance from the
// equilibrium to the tightened boundary {c_i = delta}. Requires v in D.
[[nodiscard]] inline TightenedDistances distance_to_tightened_constraints(
    const Vector& v, const ConstraintSet& cons, const PlantModel& plant, double delta) {
    TightenedDistances out = detail::signed_tightened_distances(v, cons, plant, delta);
    if (out.min < -detail::kDomainSlack) {
        throw NotInDomain("distance_to_tightened_constraints: v is not steady-state admissible");
    }
    for (auto& theta : out.per_constraint) theta = std::max(theta, 0.0);
    out.min = std::max(out.min, 0.0);
    return out;
}

// ---------------------------------------------------------------------------
// Safe-gain bounds
// ---------------------------------------------------------------------------

// Largest kappa that keeps the next applied reference steady-state
// admissible: thetabar / (mu * dt * max{||g||, eta2}).
[[nodiscard]] inline double kappa_invariance_bound(double theta_bar, double g_norm,
                                                   const ErgParams& params,
                                                   const PlantModel& plant) {
    return theta_bar / (plant.mu() * params.dt * std::max(g_norm, params.eta2));
}

[[nodiscard]] inline double kappa_invariance_bound(const Vector& x, const Vector& v_prev,
                                                   const Vector& r, double theta_bar,
                                                   const ErgParams& params,
                                                   const PlantModel& plant,
                                                   const LyapunovSpec& lyap,
                                                   const ConstraintSet& cons) {
    const double g_norm = navigation_field(x, v_prev, r, params, plant, lyap, cons).norm();
    return kappa_invariance_bound(theta_bar, g_norm, params, plant);
}

// Largest kappa certified to keep the Lyapunov level set inside the
// constraints across the reference update:
//   max{ s1*thetabar - s2*||x - xbar_{v_prev}||, 0 } / (mu*dt*max{||g||,eta2}),
// with s1 = sqrt(m1)/(sqrt(m1)+sqrt(m2)), s2 = sqrt(m2)/(sqrt(m1)+sqrt(m2)).
// Never exceeds kappa_invariance_bound on the same inputs.
[[nodiscard]] inline double kappa_feasibility_bound(double theta_bar, double g_norm,
                                                    double state_distance, double m1, double m2,
                                                    const ErgParams& params,
                                                    const PlantModel& plant) {
    const double s1 = std::sqrt(m1);
    const double s2 = std::sqrt(m2);
    const double numerator =
        std::max((s1 * theta_bar - s2 * state_distance) / (s1 + s2), 0.0);
    return numerator / (plant.mu() * params.dt * std::max(g_norm, params.eta2));
}

[[nodiscard]] inline double kappa_feasibility_bound(const Vector& x, const Vector& v_prev,
                                                    const Vector& r, double theta_bar,
                                                    const ErgParams& params,
                                                    const LyapunovSpec& lyap,
                                                    const PlantModel& plant,
                                                    const ConstraintSet& cons) {
    const double g_norm = navigation_field(x, v_prev, r, params, plant, lyap, cons).norm();
    const double state_distance = (x - plant.equilibrium(v_prev)).norm();
    return kappa_feasibility_bound(theta_bar, g_norm, state_distance, lyap.lower_bound(v_prev),
                                   lyap.upper_bound(v_prev), params, plant);
}

// ---------------------------------------------------------------------------
// Governor update
// ---------------------------------------------------------------------------

struct StepDiagnostics {
    double kappa;      // gain actually used
    double dsm;        // Delta(x, v_prev)
    double theta_bar;  // signed min distance to the tightened constraints
    double g_norm;     // ||g(x, v_prev, r)||
};

struct StepResult {
    Vector v_new;
    StepDiagnostics diag;
};

// One governor sample: v_new = v_prev + dt * kappa * g(x, v_prev, r), with
// kappa from the configured policy. Dynamic policies require v_prev in D and
// keep v_new there; the fixed policy applies the literal update so runs that
// leave D can still be simulated and flagged.
inline StepResult erg_step(const Vector& x, ErgState& state, const Vector& r,
                           const ErgParams& params, const PlantModel& plant,
                           const LyapunovSpec& lyap, const ConstraintSet& cons) {
    const Vector& v_prev = state.v_prev;

    const double margin = dsm(x, v_prev, lyap, cons, plant);
    const Vector g = margin * (attraction_field(v_prev, r, params.eta1) +
                               repulsion_field(v_prev, plant, cons, params.xi, params.delta));
    const double g_norm = g.norm();

    const TightenedDistances signed_dist =
        detail::signed_tightened_distances(v_prev, cons, plant, params.delta);

    double kappa = 0.0;
    switch (params.kappa.rule) {
        case KappaRule::Fixed:
            kappa = params.kappa.fixed_value;
            break;
        case KappaRule::DynamicInvarianceOnly: {
            if (signed_dist.min < -detail::kDomainSlack) {
                throw NotInDomain("erg_step: v_prev left the steady-state admissible set");
            }
            kappa = kappa_invariance_bound(std::max(signed_dist.min, 0.0), g_norm, params, plant);
            break;
        }
        case KappaRule::Dynamic: {
            if (signed_dist.min < -detail::kDomainSlack) {
                throw NotInDomain("erg_step: v_prev left the steady-state admissible set");
            }
            const double state_distance = (x - plant.equilibrium(v_prev)).norm();
            kappa = kappa_feasibility_bound(std::max(signed_dist.min, 0.0), g_norm,
                                            state_distance, lyap.lower_bound(v_prev),
                                            lyap.upper_bound(v_prev), params, plant);
            break;
        }
    }

    StepResult result;
    result.v_new = v_prev + params.dt * kappa * g;
    result.diag = {kappa, margin, signed_dist.min, g_norm};
    state.v_prev = result.v_new;
    state.k += 1;
    return result;
}

}  // namespace derg
