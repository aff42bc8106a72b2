#include "geodyn/variational_check.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "geodyn/error.hpp"

namespace geodyn {

namespace {

double radical_inverse(unsigned long i, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

constexpr std::array<unsigned, 13> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};

bool admissible(const SecondOrderSystem& sys, const VectorXd& x, const VectorXd& v) {
  for (const auto& p : sys.singular_points)
    if ((x - p).norm() < sys.singular_radius) return false;
  return v.norm() < sys.speed_limit;
}

// Column j holds ∂F/∂z_j for z = x or v.
MatrixXd jacobian(const VectorField& F, double t, const VectorXd& x, const VectorXd& v, bool wrt_v,
                  double d) {
  const int n = static_cast<int>(x.size());
  MatrixXd J(F(t, x, v).size(), n);
  for (int j = 0; j < n; ++j) {
    VectorXd xp = x, xm = x, vp = v, vm = v;
    if (wrt_v) {
      vp(j) += d;
      vm(j) -= d;
    } else {
      xp(j) += d;
      xm(j) -= d;
    }
    J.col(j) = (F(t, xp, vp) - F(t, xm, vm)) / (2.0 * d);
  }
  return J;
}

// dM[k] = ∂M/∂z_k.
std::vector<MatrixXd> mass_partials(const MatrixField& M, double t, const VectorXd& x,
                                    const VectorXd& v, bool wrt_v, double d) {
  const int n = static_cast<int>(x.size());
  std::vector<MatrixXd> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    VectorXd xp = x, xm = x, vp = v, vm = v;
    if (wrt_v) {
      vp(k) += d;
      vm(k) -= d;
    } else {
      xp(k) += d;
      xm(k) -= d;
    }
    out.push_back((M(t, xp, vp) - M(t, xm, vm)) / (2.0 * d));
  }
  return out;
}

// Σ_k ∂M_ik/∂z_j v_k as an n×n matrix indexed (i, j).
MatrixXd contract(const std::vector<MatrixXd>& dM, const VectorXd& v) {
  const int n = static_cast<int>(v.size());
  MatrixXd out(n, n);
  for (int j = 0; j < n; ++j) out.col(j) = dM[j] * v;
  return out;
}

// d/dt G along (1, ẋ, ẍ).
template <class G>
MatrixXd total_derivative(const G& g, double t, const VectorXd& x, const VectorXd& v,
                          const VectorXd& a, double eta) {
  return (g(t + eta, x + eta * v, v + eta * a) - g(t - eta, x - eta * v, v - eta * a)) / (2.0 * eta);
}

void validate(const SecondOrderSystem& sys, const std::vector<PointSample>& samples) {
  for (const auto& s : samples) {
    if (s.x.size() != sys.n || s.v.size() != sys.n)
      throw InvalidArgumentError("sample dimension does not match the system");
    if (!admissible(sys, s.x, s.v))
      throw SamplingDomainError("sample lies outside the admissible domain of " + sys.name);
    const MatrixXd M = sys.mass(s.t, s.x, s.v);
    if ((M - M.transpose()).cwiseAbs().maxCoeff() >= 1e-12)
      throw InvalidArgumentError("mass matrix of " + sys.name + " is not symmetric");
  }
}

struct Accumulator {
  std::vector<ConditionResult> rows;
  void add(const std::string& name, const std::string& desc) { rows.push_back({name, desc, 0.0, false}); }
  void update(std::size_t k, double r) {
    if (!std::isfinite(r)) r = std::numeric_limits<double>::infinity();
    rows[k].residual = std::max(rows[k].residual, r);
  }
  CheckReport finish(const SecondOrderSystem& sys, const char* checker, double tol) {
    CheckReport rep;
    rep.system = sys.name;
    rep.checker = checker;
    rep.tolerance = tol;
    rep.pass = true;
    for (auto& c : rows) {
      c.pass = c.residual < tol;
      rep.pass = rep.pass && c.pass;
    }
    rep.conditions = std::move(rows);
    return rep;
  }
};

double max_abs(const MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

Structure parse_structure(const std::string& id) {
  if (id == "general") return Structure::General;
  if (id == "velocity-mass") return Structure::VelocityMass;
  if (id == "constant-mass") return Structure::ConstantMass;
  throw UnknownIdError("unknown structure '" + id + "'");
}

const char* to_string(Structure s) {
  switch (s) {
    case Structure::General: return "general";
    case Structure::VelocityMass: return "velocity-mass";
    case Structure::ConstantMass: return "constant-mass";
  }
  return "?";
}

const ConditionResult& CheckReport::condition(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return c;
  throw UnknownIdError("no condition '" + name + "' in report");
}

std::vector<PointSample> sample_cloud(const SecondOrderSystem& sys, int count) {
  const int dims = 1 + 2 * sys.n;
  if (dims > static_cast<int>(kPrimes.size())) throw InvalidArgumentError("dimension too large for sampling");
  std::vector<PointSample> out;
  const auto& b = sys.box;
  for (unsigned long i = 1; static_cast<int>(out.size()) < count; ++i) {
    if (i > 1000000) throw SamplingDomainError("admissible region of the sample box is too small");
    PointSample s;
    s.t = b.t_lo + (b.t_hi - b.t_lo) * radical_inverse(i, kPrimes[0]);
    s.x.resize(sys.n);
    s.v.resize(sys.n);
    for (int k = 0; k < sys.n; ++k) {
      s.x(k) = b.x_lo + (b.x_hi - b.x_lo) * radical_inverse(i, kPrimes[1 + k]);
      s.v(k) = b.v_lo + (b.v_hi - b.v_lo) * radical_inverse(i, kPrimes[1 + sys.n + k]);
    }
    if (admissible(sys, s.x, s.v)) out.push_back(std::move(s));
  }
  return out;
}

VectorXd acceleration(const SecondOrderSystem& sys, double t, const VectorXd& x, const VectorXd& v,
                      double delta) {
  const MatrixXd M = sys.mass(t, x, v);
  const MatrixXd Sv = contract(mass_partials(sys.mass, t, x, v, true, delta), v);
  const MatrixXd Sx = contract(mass_partials(sys.mass, t, x, v, false, delta), v);
  const MatrixXd Mt = (sys.mass(t + delta, x, v) - sys.mass(t - delta, x, v)) / (2.0 * delta);
  const VectorXd rhs = sys.force(t, x, v) - Sx * v - Mt * v;
  return (M + Sv).partialPivLu().solve(rhs);
}

CheckReport check_constant_mass(const SecondOrderSystem& sys, const std::vector<PointSample>& samples,
                                const CheckOptions& opt) {
  validate(sys, samples);
  Accumulator acc;
  acc.add("a", "df_i/dv_j + df_j/dv_i = 0");
  acc.add("b", "df_i/dx_j - df_j/dx_i - d/dt df_i/dv_j = 0");
  const double d = opt.delta;
  const auto fv = [&](double t, const VectorXd& x, const VectorXd& v) {
    return jacobian(sys.force, t, x, v, true, d);
  };
  for (const auto& s : samples) {
    const VectorXd a = acceleration(sys, s.t, s.x, s.v, d);
    const MatrixXd Fv = fv(s.t, s.x, s.v);
    const MatrixXd Fx = jacobian(sys.force, s.t, s.x, s.v, false, d);
    acc.update(0, max_abs(Fv + Fv.transpose()));
    const MatrixXd dFv = total_derivative(fv, s.t, s.x, s.v, a, opt.time_step);
    acc.update(1, max_abs(Fx - Fx.transpose() - dFv));
  }
  return acc.finish(sys, "constant-mass", opt.tolerance);
}

CheckReport check_velocity_mass(const SecondOrderSystem& sys, const std::vector<PointSample>& samples,
                                const CheckOptions& opt) {
  validate(sys, samples);
  Accumulator acc;
  acc.add("a", "sum_k dM_ik/dv_j v_k symmetric in (i, j)");
  acc.add("b", "A + A^T = 0");
  acc.add("c", "dA_jk/dx_i + dA_ki/dx_j + dA_ij/dx_k = 0");
  acc.add("d", "dphi_i/dx_j - dphi_j/dx_i - dA_ij/dt = 0");
  const int n = sys.n;
  const double d = opt.delta;
  // f is affine in ẋ, so A and φ are read off exactly.
  const auto phi = [&](double t, const VectorXd& x) { return sys.force(t, x, VectorXd::Zero(n)); };
  const auto A = [&](double t, const VectorXd& x) {
    const VectorXd f0 = phi(t, x);
    MatrixXd out(n, n);
    for (int j = 0; j < n; ++j) out.col(j) = sys.force(t, x, VectorXd::Unit(n, j)) - f0;
    return out;
  };
  for (const auto& s : samples) {
    const MatrixXd S = contract(mass_partials(sys.mass, s.t, s.x, s.v, true, d), s.v);
    acc.update(0, max_abs(S - S.transpose()));
    const MatrixXd As = A(s.t, s.x);
    acc.update(1, max_abs(As + As.transpose()));
    std::vector<MatrixXd> dA;  // dA[k] = ∂A/∂x_k
    for (int k = 0; k < n; ++k) {
      VectorXd xp = s.x, xm = s.x;
      xp(k) += d;
      xm(k) -= d;
      dA.push_back((A(s.t, xp) - A(s.t, xm)) / (2.0 * d));
    }
    double cyc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          cyc = std::max(cyc, std::abs(dA[i](j, k) + dA[j](k, i) + dA[k](i, j)));
    acc.update(2, cyc);
    MatrixXd dphi(n, n);  // (i, j) = ∂φ_i/∂x_j
    for (int j = 0; j < n; ++j) {
      VectorXd xp = s.x, xm = s.x;
      xp(j) += d;
      xm(j) -= d;
      dphi.col(j) = (phi(s.t, xp) - phi(s.t, xm)) / (2.0 * d);
    }
    const MatrixXd At = (A(s.t + d, s.x) - A(s.t - d, s.x)) / (2.0 * d);
    acc.update(3, max_abs(dphi - dphi.transpose() - At));
  }
  return acc.finish(sys, "velocity-mass", opt.tolerance);
}

CheckReport check_general(const SecondOrderSystem& sys, const std::vector<PointSample>& samples,
                          const CheckOptions& opt) {
  validate(sys, samples);
  Accumulator acc;
  acc.add("a", "sum_k (dM_ik/dv_j - dM_jk/dv_i) v_k = 0");
  acc.add("b", "sum_k (dM_ik/dx_j + dM_jk/dx_i) v_k - df_i/dv_j - df_j/dv_i = 0");
  acc.add("c", "d/dt sum_k dM_ik/dx_j v_k - df_i/dx_j + df_j/dx_i - d/dt df_j/dv_i = 0");
  const double d = opt.delta;
  const auto Sx = [&](double t, const VectorXd& x, const VectorXd& v) {
    return contract(mass_partials(sys.mass, t, x, v, false, d), v);
  };
  const auto fv = [&](double t, const VectorXd& x, const VectorXd& v) {
    return jacobian(sys.force, t, x, v, true, d);
  };
  for (const auto& s : samples) {
    const VectorXd a = acceleration(sys, s.t, s.x, s.v, d);
    const MatrixXd Sv = contract(mass_partials(sys.mass, s.t, s.x, s.v, true, d), s.v);
    acc.update(0, max_abs(Sv - Sv.transpose()));
    const MatrixXd Sxs = Sx(s.t, s.x, s.v);
    const MatrixXd Fv = fv(s.t, s.x, s.v);
    acc.update(1, max_abs(Sxs + Sxs.transpose() - Fv - Fv.transpose()));
    const MatrixXd Fx = jacobian(sys.force, s.t, s.x, s.v, false, d);
    const MatrixXd dSx = total_derivative(Sx, s.t, s.x, s.v, a, opt.time_step);
    const MatrixXd dFv = total_derivative(fv, s.t, s.x, s.v, a, opt.time_step);
    acc.update(2, max_abs(dSx - Fx + Fx.transpose() - dFv.transpose()));
  }
  return acc.finish(sys, "general", opt.tolerance);
}

CheckReport check_system(const SecondOrderSystem& sys, const std::vector<PointSample>& samples,
                         const CheckOptions& opt) {
  switch (sys.structure) {
    case Structure::ConstantMass: return check_constant_mass(sys, samples, opt);
    case Structure::VelocityMass: return check_velocity_mass(sys, samples, opt);
    case Structure::General: return check_general(sys, samples, opt);
  }
  throw UnknownIdError("unknown structure");
}

namespace {

MatrixField identity_mass(int n) {
  return [n](double, const VectorXd&, const VectorXd&) { return MatrixXd::Identity(n, n); };
}

VectorXd kepler_force(const VectorXd& x) {
  const double r = x.norm();
  return -x / (r * r * r);
}

}  // namespace

SecondOrderSystem builtin_system(const std::string& id) {
  SecondOrderSystem sys;
  sys.name = id;
  if (id == "kepler") {
    sys.n = 2;
    sys.structure = Structure::ConstantMass;
    sys.mass = identity_mass(2);
    sys.force = [](double, const VectorXd& x, const VectorXd&) { return kepler_force(x); };
    sys.singular_points = {VectorXd::Zero(2)};
  } else if (id == "damped") {
    sys.n = 1;
    sys.structure = Structure::ConstantMass;
    sys.mass = identity_mass(1);
    sys.force = [](double, const VectorXd& x, const VectorXd& v) { return VectorXd(-x - v); };
  } else if (id == "magnetic") {
    sys.n = 2;
    sys.structure = Structure::ConstantMass;
    sys.mass = identity_mass(2);
    sys.force = [](double, const VectorXd& x, const VectorXd& v) {
      VectorXd f(2);
      f << 1.5 * v(1) - x(0), -1.5 * v(0) - x(1);
      return f;
    };
  } else if (id == "magnetic-time") {
    // From L = ½|ẋ|² - t x₂ ẋ₁.
    sys.n = 2;
    sys.structure = Structure::ConstantMass;
    sys.mass = identity_mass(2);
    sys.force = [](double t, const VectorXd& x, const VectorXd& v) {
      VectorXd f(2);
      f << t * v(1) + x(1), -t * v(0);
      return f;
    };
  } else if (id == "relativistic") {
    sys.n = 2;
    sys.structure = Structure::VelocityMass;
    sys.mass = [](double, const VectorXd&, const VectorXd& v) {
      return MatrixXd(MatrixXd::Identity(2, 2) / std::sqrt(1.0 - v.squaredNorm()));
    };
    sys.force = [](double, const VectorXd& x, const VectorXd&) { return kepler_force(x); };
    sys.singular_points = {VectorXd::Zero(2)};
    sys.speed_limit = 0.9;
    sys.box.v_lo = -0.7;
    sys.box.v_hi = 0.7;
  } else if (id == "velocity-mass-fail") {
    sys.n = 2;
    sys.structure = Structure::VelocityMass;
    sys.mass = [](double, const VectorXd&, const VectorXd& v) {
      MatrixXd M = MatrixXd::Identity(2, 2);
      M(0, 0) += v(1) * v(1);
      return M;
    };
    sys.force = [](double, const VectorXd& x, const VectorXd&) { return VectorXd(-x); };
  } else if (id == "conformal") {
    // From L = ½ g(x)|ẋ|², g = 1 + |x|².
    sys.n = 2;
    sys.structure = Structure::General;
    sys.mass = [](double, const VectorXd& x, const VectorXd&) {
      return MatrixXd(MatrixXd::Identity(2, 2) * (1.0 + x.squaredNorm()));
    };
    sys.force = [](double, const VectorXd& x, const VectorXd& v) { return VectorXd(x * v.squaredNorm()); };
  } else {
    throw UnknownIdError("unknown system '" + id + "'");
  }
  return sys;
}

std::vector<std::string> builtin_system_ids() {
  return {"kepler", "damped", "magnetic", "magnetic-time", "relativistic", "velocity-mass-fail", "conformal"};
}

double vainberg_lagrangian(const ResidualOperator& N, const Jet& jet) {
  const auto integrand = [&](double lambda) {
    const double val = jet.x.dot(N(lambda * jet.x, lambda * jet.xd, lambda * jet.xdd));
    if (!std::isfinite(val)) throw ConvergenceError("non-finite Vainberg integrand");
    return val;
  };
  return boost::math::quadrature::gauss<double, 16>::integrate(integrand, 0.0, 1.0);
}

VectorXd euler_lagrange_residual(const JetLagrangian& L, const std::function<Jet(double)>& path,
                                 double t, double dt, double dp) {
  // Gradient of L with respect to slot 0 (x), 1 (ẋ) or 2 (ẍ) at path(s).
  const auto partial = [&](double s, int slot) {
    Jet j = path(s);
    VectorXd& z = slot == 0 ? j.x : (slot == 1 ? j.xd : j.xdd);
    VectorXd g(z.size());
    for (int k = 0; k < z.size(); ++k) {
      const double z0 = z(k);
      z(k) = z0 + dp;
      const double lp = L(j);
      z(k) = z0 - dp;
      const double lm = L(j);
      z(k) = z0;
      g(k) = (lp - lm) / (2.0 * dp);
    }
    return g;
  };
  const auto first = [&](int slot) {
    return VectorXd((partial(t - 2 * dt, slot) - 8.0 * partial(t - dt, slot) +
                     8.0 * partial(t + dt, slot) - partial(t + 2 * dt, slot)) /
                    (12.0 * dt));
  };
  const auto second = [&](int slot) {
    return VectorXd((-partial(t - 2 * dt, slot) + 16.0 * partial(t - dt, slot) - 30.0 * partial(t, slot) +
                     16.0 * partial(t + dt, slot) - partial(t + 2 * dt, slot)) /
                    (12.0 * dt * dt));
  };
  return partial(t, 0) - first(1) + second(2);
}

}  // namespace geodyn
