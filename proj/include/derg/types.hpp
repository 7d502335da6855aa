#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace derg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

// An active repulsion term whose reference-space gradient vanishes; the
// constraint/equilibrium pairing is ill-posed.
struct ZeroGradient : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The Lyapunov quadratic form is not positive definite / not invertible.
struct SingularQuadraticForm : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No quadratic form is available; the caller must use the ball-based
// threshold instead.
struct NotQuadratic : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A reference that is required to be steady-state admissible is not.
struct NotInDomain : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A state component became non-finite during integration.
struct NonFiniteState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// ConstraintSet: affine constraints c_i(x,v) = b_i - a_i'x - e_i'v >= 0
// ---------------------------------------------------------------------------

struct Constraint {
    Vector a;  // state-space row (must be nonzero)
    Vector e;  // reference-space row
    double b;
};

class ConstraintSet {
  public:
    explicit ConstraintSet(std::vector<Constraint> constraints)
        : constraints_(std::move(constraints)) {
        if (constraints_.empty()) {
            throw std::invalid_argument("ConstraintSet: need at least one constraint");
        }
        const auto n = constraints_.front().a.size();
        const auto m = constraints_.front().e.size();
        for (const auto& c : constraints_) {
            if (c.a.size() != n || c.e.size() != m) {
                throw std::invalid_argument("ConstraintSet: inconsistent dimensions");
            }
            if (c.a.norm() == 0.0) {
                throw std::invalid_argument(
                    "ConstraintSet: constraint must involve the state (a_i != 0)");
            }
        }
    }

    [[nodiscard]] int size() const { return static_cast<int>(constraints_.size()); }
    [[nodiscard]] int state_dim() const { return static_cast<int>(constraints_.front().a.size()); }
    [[nodiscard]] int ref_dim() const { return static_cast<int>(constraints_.front().e.size()); }

    [[nodiscard]] const Constraint& operator[](int i) const { return constraints_[i]; }

    [[nodiscard]] double value(int i, const Vector& x, const Vector& v) const {
        const auto& c = constraints_[i];
        return c.b - c.a.dot(x) - c.e.dot(v);
    }

    [[nodiscard]] double min_value(const Vector& x, const Vector& v) const {
        double m = value(0, x, v);
        for (int i = 1; i < size(); ++i) m = std::min(m, value(i, x, v));
        return m;
    }

  private:
    std::vector<Constraint> constraints_;
};

// ---------------------------------------------------------------------------
// PlantModel: pre-stabilized dynamics xdot = f(x,v) with affine equilibrium
// map xbar_v = M v + q and sensitivity bound mu >= ||M||.
// ---------------------------------------------------------------------------

class PlantModel {
  public:
    using DynamicsFn = std::function<Vector(const Vector&, const Vector&)>;

    PlantModel(int state_dim, int ref_dim, DynamicsFn f, Matrix equilibrium_gain,
               Vector equilibrium_offset, double mu)
        : n_(state_dim),
          m_(ref_dim),
          f_(std::move(f)),
          M_(std::move(equilibrium_gain)),
          q_(std::move(equilibrium_offset)),
          mu_(mu) {
        if (M_.rows() != n_ || M_.cols() != m_ || q_.size() != n_) {
            throw std::invalid_argument("PlantModel: equilibrium map has wrong shape");
        }
        const double spectral = M_.jacobiSvd().singularValues()(0);
        if (spectral > mu_ * (1.0 + 1e-12)) {
            throw std::invalid_argument("PlantModel: mu must bound ||grad_v xbar_v||");
        }
    }

    [[nodiscard]] int state_dim() const { return n_; }
    [[nodiscard]] int ref_dim() const { return m_; }
    [[nodiscard]] double mu() const { return mu_; }
    [[nodiscard]] const Matrix& equilibrium_gain() const { return M_; }

    [[nodiscard]] Vector equilibrium(const Vector& v) const { return M_ * v + q_; }
    [[nodiscard]] Vector deriv(const Vector& x, const Vector& v) const { return f_(x, v); }

  private:
    int n_;
    int m_;
    DynamicsFn f_;
    Matrix M_;  // n x m
    Vector q_;  // n
    double mu_;
};

// ---------------------------------------------------------------------------
// LyapunovSpec: V(x,v) with bounds m1(v)||x-xbar||^2 <= V <= m2(v)||x-xbar||^2.
// quadratic_form is set when V is exactly (x-xbar)'P(v)(x-xbar).
// ---------------------------------------------------------------------------

struct LyapunovSpec {
    std::function<double(const Vector&, const Vector&)> value;
    std::function<Matrix(const Vector&)> quadratic_form;  // optional
    std::function<double(const Vector&)> lower_bound;     // m1(v)
    std::function<double(const Vector&)> upper_bound;     // m2(v)

    [[nodiscard]] bool has_quadratic_form() const { return static_cast<bool>(quadratic_form); }
};

// ---------------------------------------------------------------------------
// Governor parameters and state
// ---------------------------------------------------------------------------

enum class KappaRule { Dynamic, DynamicInvarianceOnly, Fixed };

struct KappaPolicy {
    KappaRule rule = KappaRule::Dynamic;
    double fixed_value = 0.0;

    static KappaPolicy dynamic() { return {KappaRule::Dynamic, 0.0}; }
    static KappaPolicy invariance_only() { return {KappaRule::DynamicInvarianceOnly, 0.0}; }
    static KappaPolicy fixed(double value) {
        if (value < 0.0) throw std::invalid_argument("KappaPolicy: fixed value must be >= 0");
        return {KappaRule::Fixed, value};
    }
};

struct ErgParams {
    double dt;      // sampling period [s]
    double eta1;    // attraction smoothing
    double eta2;    // gain-bound smoothing
    double xi;      // repulsion activation margin
    double delta;   // static safety margin
    KappaPolicy kappa;

    void validate() const {
        if (dt <= 0.0) throw std::invalid_argument("ErgParams: dt must be positive");
        if (eta1 <= 0.0 || eta2 <= 0.0) throw std::invalid_argument("ErgParams: eta must be positive");
        if (!(xi > delta && delta > 0.0)) {
            throw std::invalid_argument("ErgParams: need xi > delta > 0");
        }
        if (kappa.rule == KappaRule::Fixed && kappa.fixed_value < 0.0) {
            throw std::invalid_argument("ErgParams: fixed kappa must be >= 0");
        }
    }
};

struct ErgState {
    Vector v_prev;  // previously applied reference
    long k = 0;     // sample index
};

}  // namespace derg
