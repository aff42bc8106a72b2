#include "geodyn/kepler.hpp"

#include <cmath>
#include <numbers>

#include "geodyn/error.hpp"

namespace geodyn {

namespace {

constexpr double kOriginTol = 1e-12;
constexpr double kCircularTol = 1e-12;

double checked_norm(const Vec& x) {
  const double r = x.norm();
  if (!(r >= kOriginTol)) throw SingularOriginError("position within 1e-12 of the origin");
  return r;
}

Vec rot90(const Vec& p) { return vec2(-p(1), p(0)); }

void require_planar(const PhaseState& s) {
  if (s.x.size() != 2 || s.v.size() != 2)
    throw InvalidArgumentError("orbit diagnostics are implemented for N = 2 only");
}

}  // namespace

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

double potential(const Vec& x) { return -1.0 / checked_norm(x); }

Vec grad_potential(const Vec& x) {
  const double r = checked_norm(x);
  return x / (r * r * r);
}

SplitPotential SplitPotential::kepler(std::vector<double> weights) {
  if (weights.empty()) throw InvalidArgumentError("split needs at least one weight");
  double sum = 0.0;
  for (double w : weights) sum += w;
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgumentError("split weights must sum to 1");
  SplitPotential sp;
  sp.count_ = weights.size();
  sp.weights_ = std::move(weights);
  return sp;
}

SplitPotential SplitPotential::kepler(double w) { return kepler(std::vector<double>{w, 1.0 - w}); }

SplitPotential SplitPotential::kepler_single() { return kepler(std::vector<double>{1.0}); }

SplitPotential SplitPotential::custom(std::vector<PotentialPart> parts) {
  if (parts.empty()) throw InvalidArgumentError("split needs at least one part");
  SplitPotential sp;
  sp.count_ = parts.size();
  sp.parts_ = std::move(parts);
  return sp;
}

double SplitPotential::part_value(std::size_t i, const Vec& x) const {
  if (is_kepler()) return weights_[i] * potential(x);
  return parts_[i].value(x);
}

Vec SplitPotential::part_grad(std::size_t i, const Vec& x) const {
  if (is_kepler()) return weights_[i] * grad_potential(x);
  return parts_[i].grad(x);
}

double SplitPotential::value(const Vec& x) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < count_; ++i) sum += part_value(i, x);
  return sum;
}

Vec SplitPotential::grad(const Vec& x) const {
  if (is_kepler()) return grad_potential(x);
  Vec g = Vec::Zero(x.size());
  for (std::size_t i = 0; i < count_; ++i) g += part_grad(i, x);
  return g;
}

std::pair<int, int> SplitPotential::block(std::size_t i, int dim) const {
  if (count_ == 1) return {0, dim};
  if (static_cast<int>(count_) == dim) return {static_cast<int>(i), 1};
  throw InvalidArgumentError("split must have 1 or N parts (got " + std::to_string(count_) +
                             " for N = " + std::to_string(dim) + ")");
}

std::size_t SplitPotential::block_of(int c, int dim) const {
  if (count_ == 1) return 0;
  if (static_cast<int>(count_) == dim) return static_cast<std::size_t>(c);
  throw InvalidArgumentError("split must have 1 or N parts");
}

ConservedSet conserved(const PhaseState& s) {
  const Vec& x = s.x;
  const Vec& v = s.v;
  const double r = checked_norm(x);
  ConservedSet c;
  const double v2 = v.squaredNorm();
  c.H = 0.5 * v2 - 1.0 / r;
  c.m = x(0) * v(1) - x(1) * v(0);
  c.A = x * v2 - v * x.dot(v) - x / r;
  c.ecc = std::hypot(c.A(0), c.A(1));
  if (c.ecc >= kCircularTol) {
    c.omega = std::atan2(c.A(1), c.A(0));
    c.omega_defined = true;
  }
  return c;
}

OrbitElements orbit_elements(const PhaseState& s) {
  const ConservedSet c = conserved(s);
  if (c.H >= 0.0) throw NonnegativeEnergyError("orbit elements need H < 0");
  OrbitElements el;
  el.a = -1.0 / (2.0 * c.H);
  el.e = c.ecc;
  el.b = el.a * std::sqrt(std::max(0.0, 1.0 - el.e * el.e));
  el.T = 2.0 * std::numbers::pi * std::pow(el.a, 1.5);
  return el;
}

double solve_kepler_equation(double M, double e) {
  const auto residual = [&](double E) { return E - e * std::sin(E) - M; };
  double E = M;
  for (int it = 0; it < 50; ++it) {
    const double f = residual(E);
    if (std::abs(f) < 1e-13) return E;
    E -= f / (1.0 - e * std::cos(E));
  }
  if (std::abs(residual(E)) < 1e-13) return E;
  // E - M lies in [-e, e], so [M - 1, M + 1] brackets the root.
  double lo = M - 1.0;
  double hi = M + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f = residual(mid);
    if (std::abs(f) < 1e-13) return mid;
    (f < 0.0 ? lo : hi) = mid;
  }
  throw ConvergenceError("Kepler equation solver did not converge (e = " + std::to_string(e) + ")");
}

KeplerOrbit::KeplerOrbit(const PhaseState& s0) : s0_(s0) {
  require_planar(s0);
  el_ = orbit_elements(s0);
  const ConservedSet c = conserved(s0);
  if (c.m == 0.0) throw InvalidArgumentError("radial orbit has no reference solution");
  P_ = c.ecc >= kCircularTol ? Vec(c.A / c.ecc) : Vec(s0.x / s0.x.norm());
  Q_ = rot90(P_) * (c.m > 0.0 ? 1.0 : -1.0);
  setup();
}

KeplerOrbit::KeplerOrbit(const OrbitElements& el) : el_(el) {
  P_ = vec2(0.0, 1.0);
  Q_ = rot90(P_);
  // Start at periapsis.
  const double rp = el.a * (1.0 - el.e);
  const double vp = std::sqrt((1.0 + el.e) / (el.a * (1.0 - el.e)));
  s0_ = PhaseState{P_ * rp, Q_ * vp};
  el_ = orbit_elements(s0_);
  setup();
}

void KeplerOrbit::setup() {
  mean_motion_ = std::pow(el_.a, -1.5);
  const double e = el_.e;
  const double E0 = std::atan2(s0_.x.dot(Q_) / el_.b, s0_.x.dot(P_) / el_.a + e);
  M0_ = E0 - e * std::sin(E0);
}

PhaseState KeplerOrbit::at(double t) const {
  if (t == 0.0) return s0_;
  const double two_pi = 2.0 * std::numbers::pi;
  const double M = std::remainder(M0_ + mean_motion_ * t, two_pi);
  const double e = el_.e;
  const double E = solve_kepler_equation(M, e);
  const double cE = std::cos(E);
  const double sE = std::sin(E);
  const double rate = mean_motion_ / (1.0 - e * cE);
  PhaseState s;
  s.x = el_.a * (cE - e) * P_ + el_.b * sE * Q_;
  s.v = rate * (-el_.a * sE * P_ + el_.b * cE * Q_);
  return s;
}

PhaseState analytic_reference(const PhaseState& s0, double t) { return KeplerOrbit(s0).at(t); }

Quantity parse_quantity(const std::string& id) {
  if (id == "H") return Quantity::H;
  if (id == "m") return Quantity::m;
  if (id == "A1") return Quantity::A1;
  if (id == "A2") return Quantity::A2;
  throw UnknownIdError("unknown quantity '" + id + "'");
}

const char* to_string(Quantity q) {
  switch (q) {
    case Quantity::H: return "H";
    case Quantity::m: return "m";
    case Quantity::A1: return "A1";
    case Quantity::A2: return "A2";
  }
  return "?";
}

std::array<Vec, 4> characteristics(const PhaseState& s) {
  require_planar(s);
  const double x1 = s.x(0), x2 = s.x(1), v1 = s.v(0), v2 = s.v(1);
  return {s.v, vec2(-x2, x1), vec2(-x2 * v2, 2.0 * x1 * v2 - v1 * x2),
          vec2(2.0 * x2 * v1 - x1 * v2, -x1 * v1)};
}

namespace {

double quantity_value(const ConservedSet& c, Quantity q) {
  switch (q) {
    case Quantity::H: return c.H;
    case Quantity::m: return c.m;
    case Quantity::A1: return c.A(0);
    case Quantity::A2: return c.A(1);
  }
  return 0.0;
}

}  // namespace

double noether_residual(const TrajectoryRecord& traj, Quantity which) {
  const auto& s = traj.samples;
  if (s.size() < 3) throw TrajectoryTooShortError("noether_residual needs at least 3 samples");
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    const double dt_back = s[k].t - s[k - 1].t;
    const double dt_fwd = s[k + 1].t - s[k].t;
    const double dt = 0.5 * (dt_back + dt_fwd);
    const double dP = (quantity_value(conserved(s[k + 1].s), which) -
                       quantity_value(conserved(s[k - 1].s), which)) /
                      (2.0 * dt);
    const Vec acc = (s[k + 1].s.x - 2.0 * s[k].s.x + s[k - 1].s.x) / (dt * dt);
    const Vec N = acc + grad_potential(s[k].s.x);
    const Vec Q = characteristics(s[k].s)[static_cast<int>(which)];
    worst = std::max(worst, std::abs(dP - Q.dot(N)));
  }
  return worst;
}

Vec euler_lagrange_on_shell(const LagrangianField& Lbar, const PhaseState& s) {
  require_planar(s);
  const Vec a = -grad_potential(s.x);
  // z = (x₁, x₂, v₁, v₂); seed ε1 on v_i and ε2 on z_j.
  const std::array<double, 4> z{s.x(0), s.x(1), s.v(0), s.v(1)};
  const auto eval = [&](int i, int j) {
    std::array<HyperDual, 4> w{z[0], z[1], z[2], z[3]};
    w[i].e1 = 1.0;
    w[j].e2 = 1.0;
    return Lbar({w[0], w[1]}, {w[2], w[3]});
  };
  Vec el(2);
  for (int i = 0; i < 2; ++i) {
    double acc = 0.0;
    double dLdx = 0.0;
    for (int j = 0; j < 4; ++j) {
      const HyperDual r = eval(2 + i, j);
      const double w = j < 2 ? s.v(j) : a(j - 2);
      acc += r.e12 * w;
      if (j == i) dLdx = r.e2;
    }
    el(i) = acc - dLdx;
  }
  return el;
}

double period_average(const KeplerOrbit& orbit, const std::function<double(const PhaseState&)>& f,
                      double tol) {
  const double T = orbit.elements().T;
  const auto simpson = [&](int n) {
    const double dt = T / n;
    double sum = f(orbit.at(0.0)) + f(orbit.at(T));
    for (int k = 1; k < n; ++k) sum += (k % 2 ? 4.0 : 2.0) * f(orbit.at(k * dt));
    return sum * dt / 3.0 / T;
  };
  int n = 2048;
  double prev = simpson(n);
  while (n < (1 << 22)) {
    n *= 2;
    const double cur = simpson(n);
    if (std::abs(cur - prev) < tol) return cur;
    prev = cur;
  }
  throw ConvergenceError("period average did not converge");
}

namespace {

double average_on(const KeplerOrbit& orbit, const LagrangianField& Lbar, Quantity which) {
  const int idx = static_cast<int>(which);
  return period_average(orbit, [&](const PhaseState& s) {
    return euler_lagrange_on_shell(Lbar, s).dot(characteristics(s)[idx]);
  });
}

}  // namespace

double perturbation_average(const LagrangianField& Lbar, Quantity which, const PhaseState& s0) {
  return average_on(KeplerOrbit(s0), Lbar, which);
}

double perturbation_average(const LagrangianField& Lbar, Quantity which, const OrbitElements& el) {
  return average_on(KeplerOrbit(el), Lbar, which);
}

}  // namespace geodyn
