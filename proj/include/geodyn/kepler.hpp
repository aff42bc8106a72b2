#pragma once

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "geodyn/hyperdual.hpp"

namespace geodyn {

// Small fixed-capacity vector; dimension 2 or 3.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;

Vec vec2(double a, double b);

struct PhaseState {
  Vec x;
  Vec v;
};

// Kepler potential φ(x) = -1/|x| and its gradient x/|x|³.
double potential(const Vec& x);
Vec grad_potential(const Vec& x);

struct PotentialPart {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
};

// Ordered decomposition φ = Σ φ⁽ⁱ⁾. Part i is paired with the drift of
// coordinate i when the part count equals the dimension; a single part
// drifts every coordinate.
class SplitPotential {
 public:
  // Weighted Kepler split φ⁽ⁱ⁾ = wᵢ φ.
  static SplitPotential kepler(std::vector<double> weights);
  // Two-part Kepler split with weights (w, 1 - w).
  static SplitPotential kepler(double w = 0.5);
  static SplitPotential kepler_single();
  static SplitPotential custom(std::vector<PotentialPart> parts);

  std::size_t size() const { return count_; }
  double part_value(std::size_t i, const Vec& x) const;
  Vec part_grad(std::size_t i, const Vec& x) const;
  double value(const Vec& x) const;
  Vec grad(const Vec& x) const;

  bool is_kepler() const { return !weights_.empty(); }
  const std::vector<double>& weights() const { return weights_; }

  // First coordinate and width of the drift block of part i.
  std::pair<int, int> block(std::size_t i, int dim) const;
  // Index of the part whose drift moves coordinate c.
  std::size_t block_of(int c, int dim) const;

 private:
  std::size_t count_ = 0;
  std::vector<double> weights_;
  std::vector<PotentialPart> parts_;
};

struct ConservedSet {
  double H = 0.0;
  double m = 0.0;  // x₁v₂ - x₂v₁
  Vec A;           // Laplace-Runge-Lenz vector
  double ecc = 0.0;
  double omega = 0.0;  // atan2(A₂, A₁); 0 when the orbit is circular
  bool omega_defined = false;
};

ConservedSet conserved(const PhaseState& s);

struct OrbitElements {
  double a = 0.0;
  double b = 0.0;
  double e = 0.0;
  double T = 0.0;
};

OrbitElements orbit_elements(const PhaseState& s);

// Exact bound Kepler motion through a given state, via the eccentric anomaly.
class KeplerOrbit {
 public:
  explicit KeplerOrbit(const PhaseState& s0);
  // Orbit with the given elements, periapsis on +x₂, counter-clockwise.
  explicit KeplerOrbit(const OrbitElements& el);

  PhaseState at(double t) const;
  const OrbitElements& elements() const { return el_; }
  const PhaseState& initial() const { return s0_; }

 private:
  void setup();

  PhaseState s0_;
  OrbitElements el_;
  Vec P_;
  Vec Q_;
  double mean_motion_ = 0.0;
  double M0_ = 0.0;
};

PhaseState analytic_reference(const PhaseState& s0, double t);

// Solves M = E - e sin E.
double solve_kepler_equation(double M, double e);

enum class Quantity { H, m, A1, A2 };

Quantity parse_quantity(const std::string& id);
const char* to_string(Quantity q);

// Noether characteristics (v_H, v_m, v_A1, v_A2), N = 2.
std::array<Vec, 4> characteristics(const PhaseState& s);

struct Sample {
  long step = 0;
  double t = 0.0;
  PhaseState s;
  ConservedSet c;
};

struct TrajectoryRecord {
  std::string method;
  double h = 0.0;
  std::vector<Sample> samples;
};

// max over interior samples of |dP/dt - Q·N[x]|, N[x] = ẍ + x/|x|³.
double noether_residual(const TrajectoryRecord& traj, Quantity which);

// Perturbation Lagrangian L̄(x, ẋ) in the plane, differentiated exactly.
using LagrangianField =
    std::function<HyperDual(const Pair<HyperDual>& x, const Pair<HyperDual>& v)>;

// EL(L̄) = ∂²L̄/∂ẋ∂x·ẋ + ∂²L̄/∂ẋ²·ẍ - ∂L̄/∂x evaluated with ẍ = -∇φ(x).
Vec euler_lagrange_on_shell(const LagrangianField& Lbar, const PhaseState& s);

// Period average of ⟨EL(L̄), char⟩ along the orbit through s0.
double perturbation_average(const LagrangianField& Lbar, Quantity which, const PhaseState& s0);
// Same, on the orbit with these elements, periapsis on +x₂.
double perturbation_average(const LagrangianField& Lbar, Quantity which, const OrbitElements& el);

// Composite Simpson of f over one period of the orbit, refined from 2048
// intervals until successive results agree to tol.
double period_average(const KeplerOrbit& orbit, const std::function<double(const PhaseState&)>& f,
                      double tol = 1e-8);

}  // namespace geodyn
