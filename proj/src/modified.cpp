#include "geodyn/modified.hpp"

#include <Eigen/LU>
#include <cmath>
#include <numbers>

#include "geodyn/error.hpp"
#include "geodyn/parallel.hpp"

namespace geodyn {

SeriesResult linear_modified_series(double lambda, double h, int k_max) {
  if (k_max < 1) throw InvalidArgumentError("k_max must be at least 1");
  if (!(lambda > 0.0)) throw InvalidArgumentError("lambda must be positive");
  SeriesResult res;
  res.divergent = lambda * h * h >= 4.0;
  // c_k = 2((k-1)!)²/(2k)!, c_{k+1}/c_k = k²/((2k+1)(2k+2)).
  double coeff = 1.0;
  double term_scale = lambda;  // h^{2k-2} λᵏ
  for (int k = 1; k <= k_max; ++k) {
    res.value += coeff * term_scale;
    coeff *= static_cast<double>(k) * k / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
    term_scale *= h * h * lambda;
  }
  return res;
}

double linear_dispersion(double lambda, double h) {
  if (!(lambda > 0.0) || !(h > 0.0)) throw InvalidArgumentError("lambda and h must be positive");
  if (lambda * h * h >= 4.0)
    throw StabilityError("stability boundary: lambda*h^2 = " + std::to_string(lambda * h * h) +
                         " >= 4, the linear scheme is unstable");
  return 2.0 * std::asin(0.5 * h * std::sqrt(lambda)) / h;
}

double measured_linear_frequency(double lambda, double h, long steps) {
  linear_dispersion(lambda, h);
  // Seed with the exact solution cos(Ω t) of the scheme's own recurrence.
  double prev = 1.0;
  double curr = 1.0 - 0.5 * lambda * h * h;
  std::vector<double> crossings;
  for (long n = 1; n <= steps; ++n) {
    if (curr == 0.0) {
      crossings.push_back(n * h);
    } else if ((prev > 0.0) != (curr > 0.0) && prev != 0.0) {
      crossings.push_back((n - 1 + prev / (prev - curr)) * h);
    }
    const double next = (2.0 - lambda * h * h) * curr - prev;
    prev = curr;
    curr = next;
  }
  if (crossings.size() < 2) throw InvalidArgumentError("too few zero crossings to measure a frequency");
  return std::numbers::pi * static_cast<double>(crossings.size() - 1) /
         (crossings.back() - crossings.front());
}

namespace {

template <class T>
struct KeplerDerivs {
  T d[2];     // ∂ᵢφ
  T dd[2][2];  // ∂ᵢ∂ⱼφ
  T inv_r;
};

template <class T>
KeplerDerivs<T> kepler_derivs(const Pair<T>& x) {
  using std::sqrt;
  KeplerDerivs<T> k;
  const T r2 = x[0] * x[0] + x[1] * x[1];
  const T r = sqrt(r2);
  const T inv_r3 = T(1.0) / (r2 * r);
  const T inv_r5 = inv_r3 / r2;
  k.inv_r = T(1.0) / r;
  for (int i = 0; i < 2; ++i) {
    k.d[i] = x[i] * inv_r3;
    for (int j = 0; j < 2; ++j)
      k.dd[i][j] = (i == j ? inv_r3 : T(0.0)) - T(3.0) * x[i] * x[j] * inv_r5;
  }
  return k;
}

void require_kepler_split(const std::vector<double>& w) {
  if (w.empty()) throw InvalidArgumentError("modified Lagrangians need a weighted Kepler split");
  if (w.size() != 1 && w.size() != 2) throw InvalidArgumentError("modified Lagrangians need 1 or 2 split parts");
}

// Order-h velocity shift g of vi1: ẋ = p + (h/2) g.
template <class T>
Pair<T> vi1_shift(const KeplerDerivs<T>& k, const std::vector<double>& w) {
  if (w.size() == 1) return {k.d[0], k.d[1]};
  return {k.d[0], (w[1] - w[0]) * k.d[1]};
}

template <class T>
T bracket_sv(const Pair<T>& x, const Pair<T>& v, const KeplerDerivs<T>& k) {
  const T r2 = x[0] * x[0] + x[1] * x[1];
  const T inv_r = k.inv_r;
  const T inv_r3 = inv_r / r2;
  const T xv = x[0] * v[0] + x[1] * v[1];
  const T v2 = v[0] * v[0] + v[1] * v[1];
  return inv_r3 * inv_r - T(2.0) * v2 * inv_r3 + T(6.0) * xv * xv * inv_r3 / r2;
}

// h² coefficient of the modified Lagrangian of the palindromic composition;
// f = φ⁽¹⁾, g = φ⁽²⁾.
template <class T>
T vi2_correction(const Pair<T>& v, const KeplerDerivs<T>& k, const std::vector<double>& w,
                 bool adjoint_after) {
  if (w.size() != 2) throw InvalidArgumentError("vi2 modified Lagrangian needs a two-part split");
  const double a = w[0], b = w[1];
  const T& p1 = k.d[0];
  const T& p2 = k.d[1];
  const T& p11 = k.dd[0][0];
  const T& p12 = k.dd[0][1];
  const T& p22 = k.dd[1][1];
  const T v11 = v[0] * v[0], v12 = v[0] * v[1], v22 = v[1] * v[1];
  if (adjoint_after) {
    return v11 * p11 / 24.0 + v12 * p12 / 12.0 + v22 * p22 * (b / 24.0 - a / 12.0) -
           p1 * p1 / 12.0 + p2 * p2 * (a * a / 24.0 + a * b / 12.0 - b * b / 12.0);
  }
  return -v11 * p11 / 12.0 + v12 * p12 * (a / 12.0 - b / 6.0) + v22 * p22 * (a / 24.0 - b / 12.0) +
         p1 * p1 / 24.0 + p2 * p2 * (-a * a / 12.0 + a * b / 12.0 + b * b / 24.0);
}

template <class T>
T correction(Method m, const Pair<T>& x, const Pair<T>& v, const std::vector<double>& w) {
  const KeplerDerivs<T> k = kepler_derivs(x);
  switch (m) {
    case Method::SymEuler: return v[0] * k.d[0] + v[1] * k.d[1];
    case Method::StormerVerlet: return bracket_sv(x, v, k);
    case Method::Vi1:
    case Method::Vi1Adjoint: {
      require_kepler_split(w);
      const Pair<T> g = vi1_shift(k, w);
      const T gv = g[0] * v[0] + g[1] * v[1];
      return m == Method::Vi1 ? -gv : gv;
    }
    case Method::Vi2:
    case Method::Vi2Flipped:
      require_kepler_split(w);
      return vi2_correction(v, k, w, m == Method::Vi2);
  }
  throw UnknownIdError("unknown method");
}

// 4-variable function z = (x₁, x₂, v₁, v₂): gradient and Hessian.
template <class F>
void derivatives(const F& fn, const std::array<double, 4>& z, Eigen::Vector4d& grad,
                 Eigen::Matrix4d& hess) {
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      std::array<HyperDual, 4> w{z[0], z[1], z[2], z[3]};
      w[i].e1 = 1.0;
      w[j].e2 = 1.0;
      const HyperDual r = fn({w[0], w[1]}, {w[2], w[3]});
      hess(i, j) = hess(j, i) = r.e12;
      if (i == j) grad(i) = r.e1;
    }
  }
}

void require_planar(const PhaseState& s) {
  if (s.x.size() != 2 || s.v.size() != 2)
    throw InvalidArgumentError("modified analysis is implemented for N = 2 only");
}

}  // namespace

int base_order(Method m) {
  switch (m) {
    case Method::SymEuler:
    case Method::Vi1:
    case Method::Vi1Adjoint: return 1;
    case Method::StormerVerlet:
    case Method::Vi2:
    case Method::Vi2Flipped: return 2;
  }
  return 0;
}

double perturbation_scale(Method m, double h) {
  switch (m) {
    case Method::SymEuler:
    case Method::Vi1:
    case Method::Vi1Adjoint: return 0.5 * h;
    case Method::StormerVerlet: return h * h / 24.0;
    case Method::Vi2:
    case Method::Vi2Flipped: return h * h;
  }
  return 0.0;
}

template <class T>
T modified_lagrangian_t(Method m, const Pair<T>& x, const Pair<T>& v, double h,
                        const std::vector<double>& weights) {
  using std::sqrt;
  const T r = sqrt(x[0] * x[0] + x[1] * x[1]);
  const T L = T(0.5) * (v[0] * v[0] + v[1] * v[1]) + T(1.0) / r;
  if (h == 0.0) return L;
  return L + T(perturbation_scale(m, h)) * correction(m, x, v, weights);
}

template double modified_lagrangian_t<double>(Method, const Pair<double>&, const Pair<double>&,
                                              double, const std::vector<double>&);
template HyperDual modified_lagrangian_t<HyperDual>(Method, const Pair<HyperDual>&,
                                                    const Pair<HyperDual>&, double,
                                                    const std::vector<double>&);

double modified_lagrangian(Method m, const PhaseState& s, double h, const SplitPotential& split) {
  require_planar(s);
  if (s.x.norm() < 1e-12) throw SingularOriginError("position within 1e-12 of the origin");
  return modified_lagrangian_t<double>(m, {s.x(0), s.x(1)}, {s.v(0), s.v(1)}, h, split.weights());
}

LagrangianField perturbation_lagrangian(Method m, const SplitPotential& split) {
  const std::vector<double> w = split.weights();
  if (m != Method::SymEuler && m != Method::StormerVerlet) require_kepler_split(w);
  return [m, w](const Pair<HyperDual>& x, const Pair<HyperDual>& v) { return correction(m, x, v, w); };
}

Vec modified_acceleration(Method m, const PhaseState& s, double h, const SplitPotential& split) {
  require_planar(s);
  const std::vector<double>& w = split.weights();
  Eigen::Vector4d grad;
  Eigen::Matrix4d hess;
  derivatives([&](const Pair<HyperDual>& x, const Pair<HyperDual>& v) {
                return modified_lagrangian_t<HyperDual>(m, x, v, h, w);
              },
              {s.x(0), s.x(1), s.v(0), s.v(1)}, grad, hess);
  const Eigen::Matrix2d W = hess.block<2, 2>(2, 2);
  const Eigen::Vector2d rhs = grad.head<2>() - hess.block<2, 2>(2, 0) * Eigen::Vector2d(s.v(0), s.v(1));
  const Eigen::Vector2d a = W.partialPivLu().solve(rhs);
  return vec2(a(0), a(1));
}

Vec modified_initial_velocity(Method m, const PhaseState& s, double h, const SplitPotential& split) {
  require_planar(s);
  const std::vector<double>& w = split.weights();
  const auto momentum = [&](const Vec& vel) {
    Vec p(2);
    for (int i = 0; i < 2; ++i) {
      std::array<HyperDual, 4> z{s.x(0), s.x(1), vel(0), vel(1)};
      z[2 + i].e1 = 1.0;
      p(i) = modified_lagrangian_t<HyperDual>(m, {z[0], z[1]}, {z[2], z[3]}, h, w).e1;
    }
    return p;
  };
  return newton_solve([&](const Vec& vel) { return Vec(momentum(vel) - s.v); }, s.v, 1e-13);
}

double shadowing_error(Method m, const PhaseState& s0, double h, long steps,
                       const SplitPotential& split) {
  constexpr int kSub = 100;
  const double dt = h / kSub;
  const auto rhs = [&](const PhaseState& y) {
    return PhaseState{y.v, modified_acceleration(m, y, h, split)};
  };
  const auto axpy = [](const PhaseState& y, double a, const PhaseState& k) {
    return PhaseState{y.x + a * k.x, y.v + a * k.v};
  };
  PhaseState num = s0;
  PhaseState ref{s0.x, modified_initial_velocity(m, s0, h, split)};
  double worst = 0.0;
  for (long n = 1; n <= steps; ++n) {
    num = step(m, num, split, h);
    for (int k = 0; k < kSub; ++k) {
      const PhaseState k1 = rhs(ref);
      const PhaseState k2 = rhs(axpy(ref, 0.5 * dt, k1));
      const PhaseState k3 = rhs(axpy(ref, 0.5 * dt, k2));
      const PhaseState k4 = rhs(axpy(ref, dt, k3));
      ref.x += dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
      ref.v += dt / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    }
    worst = std::max(worst, (num.x - ref.x).norm());
  }
  return worst;
}

namespace {

DriftPrediction predict_on(Method m, const KeplerOrbit& orbit, double h, const SplitPotential& split) {
  const ConservedSet c0 = conserved(orbit.initial());
  if (c0.ecc < 1e-12) throw CircularOrbitError("angle drift is undefined for a circular orbit");
  const LagrangianField Lbar = perturbation_lagrangian(m, split);
  double avg[2] = {0.0, 0.0};
  for (int q = 0; q < 2; ++q) {
    avg[q] = period_average(orbit, [&](const PhaseState& s) {
      return euler_lagrange_on_shell(Lbar, s).dot(characteristics(s)[2 + q]);
    });
  }
  // Magnitude of the integrand, for deciding whether an average vanishes.
  const double scale = period_average(orbit, [&](const PhaseState& s) {
    const Vec el = euler_lagrange_on_shell(Lbar, s);
    const auto ch = characteristics(s);
    return el.norm() * (ch[2].norm() + ch[3].norm());
  });
  const double eps = perturbation_scale(m, h);
  const double T = orbit.elements().T;
  const double dA1 = -eps * T * avg[0];
  const double dA2 = -eps * T * avg[1];
  const double A1 = c0.A(0), A2 = c0.A(1);
  const double e = c0.ecc;
  DriftPrediction p;
  p.d_ecc = (A1 * dA1 + A2 * dA2) / e;
  p.d_angle = (A1 * dA2 - A2 * dA1) / (e * e);
  const double floor = 1e-7 * scale * (1.0 + std::abs(A1) + std::abs(A2)) + 1e-14;
  p.ecc_leading_zero = std::abs((A1 * avg[0] + A2 * avg[1]) / e) <= floor;
  p.angle_leading_zero = std::abs((A1 * avg[1] - A2 * avg[0]) / e) <= floor;
  const int base = base_order(m);
  p.order_ecc = p.ecc_leading_zero ? 2 * base : base;
  p.order_angle = p.angle_leading_zero ? 2 * base : base;
  return p;
}

}  // namespace

DriftPrediction predicted_drift(Method m, const PhaseState& seed, double h, const SplitPotential& split) {
  return predict_on(m, KeplerOrbit(seed), h, split);
}

DriftPrediction predicted_drift(Method m, const OrbitElements& el, double h, const SplitPotential& split) {
  return predict_on(m, KeplerOrbit(el), h, split);
}

DriftMetric parse_metric(const std::string& id) {
  if (id == "ecc") return DriftMetric::Ecc;
  if (id == "angle") return DriftMetric::Angle;
  throw UnknownIdError("unknown metric '" + id + "'");
}

const char* to_string(DriftMetric m) { return m == DriftMetric::Ecc ? "ecc" : "angle"; }

std::vector<double> halving_sequence(double h0, int levels) {
  if (!(h0 > 0.0) || levels < 1) throw InvalidArgumentError("need h0 > 0 and at least one level");
  std::vector<double> hs;
  for (int i = 0; i < levels; ++i) hs.push_back(std::ldexp(h0, -i));
  return hs;
}

double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgumentError("slope fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgumentError("log-log fit needs positive values");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

PeriodDrift one_period_drift(Method m, const PhaseState& seed, double h, const SplitPotential& split) {
  const KeplerOrbit orbit(seed);
  PeriodDrift d;
  d.steps = std::lround(orbit.elements().T / h);
  PhaseState s = seed;
  for (long n = 1; n <= d.steps; ++n) {
    try {
      s = step(m, s, split, h);
    } catch (const Error& e) {
      throw StepError(n, e.what());
    }
  }
  const ConservedSet c0 = conserved(seed);
  const ConservedSet c1 = conserved(s);
  d.d_ecc = c1.ecc - c0.ecc;
  d.d_angle = std::remainder(c1.omega - c0.omega, 2.0 * std::numbers::pi);
  d.position_error = (s.x - orbit.at(static_cast<double>(d.steps) * h).x).norm();
  return d;
}

DriftEstimate measured_drift_order(Method m, DriftMetric metric, const PhaseState& seed,
                                   const std::vector<double>& hs, const SplitPotential& split,
                                   unsigned workers) {
  DriftEstimate est;
  est.method = m;
  est.metric = metric;
  est.h = hs;
  est.drift.assign(hs.size(), 0.0);
  parallel_for(hs.size(), workers, [&](std::size_t i) {
    const PeriodDrift d = one_period_drift(m, seed, hs[i], split);
    est.drift[i] = std::abs(metric == DriftMetric::Ecc ? d.d_ecc : d.d_angle);
  });
  if (hs.size() >= 2) est.fitted_order = fit_log_slope(est.h, est.drift);
  const DriftPrediction p = predicted_drift(m, seed, hs.front(), split);
  est.predicted_order = metric == DriftMetric::Ecc ? p.order_ecc : p.order_angle;
  return est;
}

}  // namespace geodyn

namespace geodyn {

double precession_per_period(Method m, const PhaseState& seed, double h, int periods,
                             const SplitPotential& split) {
  if (periods < 1) throw InvalidArgumentError("periods must be at least 1");
  if (!conserved(seed).omega_defined) throw CircularOrbitError("the LRL angle of a circular orbit is undefined");
  const double T = orbit_elements(seed).T;
  const long steps = std::lround(periods * T / h);
  PhaseState s = seed;
  double prev = conserved(seed).omega;
  double unwrapped = prev;
  // Least-squares line through (t_n, ω_n); sums are centred on the run midpoint.
  const double t_mid = 0.5 * static_cast<double>(steps) * h;
  double stt = 0.0, sty = 0.0;
  for (long n = 0; n <= steps; ++n) {
    if (n > 0) {
      try {
        s = step(m, s, split, h);
      } catch (const Error& e) {
        throw StepError(n, e.what());
      }
      const double omega = conserved(s).omega;
      unwrapped += std::remainder(omega - prev, 2.0 * std::numbers::pi);
      prev = omega;
    }
    const double dt = static_cast<double>(n) * h - t_mid;
    stt += dt * dt;
    sty += dt * unwrapped;
  }
  return sty / stt * T;
}

}  // namespace geodyn
