#pragma once

#include <vector>

#include "geodyn/integrators.hpp"
#include "geodyn/kepler.hpp"

namespace geodyn {

struct SeriesResult {
  double value = 0.0;
  bool divergent = false;  // λh² ≥ 4: partial sums do not converge
};

// Σ_{k=1}^{k_max} 2((k-1)!)²/(2k)! h^{2k-2} λᵏ, the squared frequency of the
// modified equation of x_{n+1} - 2x_n + x_{n-1} = -λh²x_n.
SeriesResult linear_modified_series(double lambda, double h, int k_max);

// Ω = 2 asin(h√λ/2)/h. Throws StabilityError for λh² ≥ 4.
double linear_dispersion(double lambda, double h);

// Frequency of the linear scheme measured from zero crossings of x_n.
double measured_linear_frequency(double lambda, double h, long steps = 10000);

// Truncated modified Lagrangian of a method: order h for sym-euler and vi1,
// order h² for sv and vi2. Requires a Kepler split; N = 2.
template <class T>
T modified_lagrangian_t(Method m, const Pair<T>& x, const Pair<T>& v, double h,
                        const std::vector<double>& weights);

double modified_lagrangian(Method m, const PhaseState& s, double h,
                           const SplitPotential& split = SplitPotential::kepler());

// Correction L̄ with L_mod = L + ε L̄ and its scale ε(h).
LagrangianField perturbation_lagrangian(Method m, const SplitPotential& split = SplitPotential::kepler());
double perturbation_scale(Method m, double h);
int base_order(Method m);

// ẍ of the Euler-Lagrange equations of the modified Lagrangian.
Vec modified_acceleration(Method m, const PhaseState& s, double h, const SplitPotential& split);
// Velocity whose modified momentum ∂L_mod/∂ẋ equals the numerical momentum p.
Vec modified_initial_velocity(Method m, const PhaseState& s, double h, const SplitPotential& split);

// max_n |x_n - x̃(nh)| over steps, x̃ integrated by classical RK4 at h/100.
double shadowing_error(Method m, const PhaseState& s0, double h, long steps,
                       const SplitPotential& split = SplitPotential::kepler());

struct DriftPrediction {
  double d_ecc = 0.0;    // per period
  double d_angle = 0.0;  // per period
  bool ecc_leading_zero = false;
  bool angle_leading_zero = false;
  int order_ecc = 0;
  int order_angle = 0;
};

// Leading per-period drift of |A| and of the LRL angle, averaged along the
// orbit through the seed.
DriftPrediction predicted_drift(Method m, const PhaseState& seed, double h,
                                const SplitPotential& split = SplitPotential::kepler());
// Same, on the orbit with these elements and periapsis on +x₂.
DriftPrediction predicted_drift(Method m, const OrbitElements& el, double h,
                                const SplitPotential& split = SplitPotential::kepler());

enum class DriftMetric { Ecc, Angle };

DriftMetric parse_metric(const std::string& id);
const char* to_string(DriftMetric m);

struct DriftEstimate {
  Method method = Method::SymEuler;
  DriftMetric metric = DriftMetric::Ecc;
  std::vector<double> h;
  std::vector<double> drift;  // magnitudes, one per h
  double fitted_order = 0.0;
  int predicted_order = 0;
};

// h₀, h₀/2, ..., h₀/2^{levels-1}.
std::vector<double> halving_sequence(double h0, int levels);

// Least-squares slope of log y against log x.
double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y);

struct PeriodDrift {
  long steps = 0;
  double d_ecc = 0.0;    // signed, after minus before
  double d_angle = 0.0;  // signed, wrapped to (-π, π]
  double position_error = 0.0;  // vs the exact orbit at steps·h
};

// Runs round(T/h) steps of the one-step map from the seed.
PeriodDrift one_period_drift(Method m, const PhaseState& seed, double h,
                             const SplitPotential& split = SplitPotential::kepler());

// Secular rate of the LRL angle times T, from a least-squares fit of the
// unwrapped angle over `periods` orbits. Negative is clockwise.
double precession_per_period(Method m, const PhaseState& seed, double h, int periods = 20,
                             const SplitPotential& split = SplitPotential::kepler());

DriftEstimate measured_drift_order(Method m, DriftMetric metric, const PhaseState& seed,
                                   const std::vector<double>& hs,
                                   const SplitPotential& split = SplitPotential::kepler(),
                                   unsigned workers = 1);

}  // namespace geodyn
