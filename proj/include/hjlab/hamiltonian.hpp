// Quasi-convex Hamiltonians and the operations the junction model needs:
// monotone envelopes, minimizers, level-set endpoints and the effective
// junction function max(A, H+_left, H-_right).
//
// A Hamiltonian is stored as a uniform tabulation over [p_min, p_max]
// (plus the closed form when one exists, so the range can be extended).
// The envelopes are running minima over the tabulation:
//     minus_envelope(p) = min over q <= p of H(q)   (non-increasing part)
//     plus_envelope(p)  = min over q >= p of H(q)   (non-decreasing part)
// For quasi-convex H these coincide with clamping H at its minimum past /
// before the minimizer, and max(minus, plus) recovers H pointwise.
#ifndef HJLAB_HAMILTONIAN_HPP
#define HJLAB_HAMILTONIAN_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hjlab/errors.hpp"

#include <nlohmann/json_fwd.hpp>

namespace hjlab {

class QuasiConvexHamiltonian {
  public:
    // Tabulates `form` at n_samples uniform points of [p_min, p_max] and
    // validates quasi-convexity.  qc_tol scales with the value range; the
    // default accepts only floating-point noise.
    QuasiConvexHamiltonian(std::function<double(double)> form, double p_min,
                           double p_max, int n_samples = 1201,
                           double qc_tol_rel = 1e-12);

    // From explicit uniform samples (e.g. a measured effective Hamiltonian
    // or a (p, H) table from a config file).
    QuasiConvexHamiltonian(Eigen::ArrayXd values, double p_min, double p_max,
                           double qc_tol_rel = 1e-12);

    // Library shapes used by scenarios and tests.
    static QuasiConvexHamiltonian vee(double offset = 0.0, double slope = 1.0,
                                      double center = 0.0, double p_min = -3,
                                      double p_max = 3);
    static QuasiConvexHamiltonian quadratic(double center = 0.0,
                                            double scale = 1.0,
                                            double offset = 0.0,
                                            double p_min = -3, double p_max = 3);
    // Flat bottom [p_lo, p_hi] at `offset`, linear walls on both sides.
    static QuasiConvexHamiltonian trapezoid(double p_lo, double p_hi,
                                            double slope_left, double slope_right,
                                            double offset = 0.0,
                                            double p_min = -3, double p_max = 3);

    double operator()(double p) const { return interpolate(values_, p); }
    double envelope_minus(double p) const { return interpolate(env_minus_, p); }
    double envelope_plus(double p) const { return interpolate(env_plus_, p); }

    // Smallest minimizer over the sampled range (deterministic tie-break).
    double minimizer() const { return p0_; }
    double min_value() const { return min_value_; }

    double p_min() const { return p_min_; }
    double p_max() const { return p_max_; }
    double dp() const { return dp_; }
    int n_samples() const { return static_cast<int>(values_.size()); }
    const Eigen::ArrayXd &values() const { return values_; }
    Eigen::ArrayXd sample_points() const;

    // Largest one-sided difference quotient |dH/dp| over the samples; the
    // CFL condition is built on this.
    double max_abs_slope() const { return max_abs_slope_; }

    // max |H| over [lo, hi] (clipped to the sample range): the barrier
    // constant aggregates this across branches.
    double max_abs_on(double lo, double hi) const;

    // Coercivity proxy: both tabulation ends rise above the minimum by
    // more than `margin`.  Quasi-convexity is enforced at construction;
    // coercivity is a separate validator because windowed re-tabulations
    // of a wide Hamiltonian legitimately fail it.
    bool is_coercive(double margin = 0.0) const {
        return values_[0] - min_value_ > margin &&
               values_[values_.size() - 1] - min_value_ > margin;
    }

    // Endpoints (min, max) of {p : H(p) = lambda} on one monotone branch.
    // increasing=true walks the non-decreasing branch (E_R-type sets),
    // increasing=false the non-increasing branch (E_L-type sets).  At
    // lambda = min H the argmin interval endpoints are returned.
    std::pair<double, double> level_set_endpoints(double lambda, bool increasing,
                                                  double tol = 1e-9) const;

    // Largest |p| with |H(p)| <= level, i.e. how steep solutions driven by
    // this branch can get once their time-Lipschitz bound is `level`.
    double slope_range_at_level(double level) const;

    // Re-tabulates over a wider range.  Requires the closed form.
    QuasiConvexHamiltonian retabulated(double p_min, double p_max) const;
    bool has_closed_form() const { return static_cast<bool>(form_); }

    // Serialization descriptor ({kind, params} or sample table).
    nlohmann::json descriptor() const;
    static QuasiConvexHamiltonian from_descriptor(const nlohmann::json &j);

  private:
    void finalize(double qc_tol_rel);
    double interpolate(const Eigen::ArrayXd &a, double p) const;

    double p_min_ = 0, p_max_ = 0, dp_ = 0;
    Eigen::ArrayXd values_, env_minus_, env_plus_;
    double p0_ = 0, min_value_ = 0, max_abs_slope_ = 0;
    int argmin_lo_ = 0, argmin_hi_ = 0; // sample indices bounding the flat bottom
    std::function<double(double)> form_;
    std::string kind_ = "table";
    std::vector<double> params_; // factory arguments, for descriptor()
};

// Effective junction function max(A, plus-envelope of the left branch at
// the left slope, minus-envelope of the right branch at the right slope).
// Non-decreasing in A and pL, non-increasing in pR.
double junction_function(double A, const QuasiConvexHamiltonian &H_left,
                         const QuasiConvexHamiltonian &H_right, double pL,
                         double pR);

// Monotone numerical Hamiltonian for interior nodes: the junction function
// with the limiter absent (a junction with A = min H is invisible).
double godunov_flux(const QuasiConvexHamiltonian &H, double p_left,
                    double p_right);

// The four slopes bounding the corrector cone at level A:
//   p_bar_R = min, p_hat_R = max of {H_R = A} on the increasing branch,
//   p_bar_L = max, p_hat_L = min of {H_L = A} on the decreasing branch.
struct SlopeQuadruple {
    double p_bar_L, p_hat_L, p_bar_R, p_hat_R;
};

SlopeQuadruple slope_quadruple(const QuasiConvexHamiltonian &H_left,
                               const QuasiConvexHamiltonian &H_right, double A,
                               double tol = 1e-9);

} // namespace hjlab

#endif
