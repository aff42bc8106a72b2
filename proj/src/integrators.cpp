#include "geodyn/integrators.hpp"

#include <Eigen/LU>
#include <cmath>

#include "geodyn/error.hpp"

namespace geodyn {

namespace {

// Coordinates drifted by parts 0..i form the prefix [0, end).
int prefix_end(const SplitPotential& split, std::size_t i, int dim) {
  const auto [first, width] = split.block(i, dim);
  return first + width;
}

// x̂ⁱ(a, b): b on the coordinates drifted by parts 0..i, a elsewhere.
Vec hat(const SplitPotential& split, std::size_t i, const Vec& a, const Vec& b) {
  Vec out = a;
  const int end = prefix_end(split, i, static_cast<int>(a.size()));
  out.head(end) = b.head(end);
  return out;
}

// Σ_{i: c ∉ U_i} ∂_cφⁱ(x̂ⁱ(a,b)) when before_block, else Σ_{i: c ∈ U_i}.
Vec staggered_force(const SplitPotential& split, const Vec& a, const Vec& b, bool before_block) {
  const int dim = static_cast<int>(a.size());
  Vec out = Vec::Zero(dim);
  for (std::size_t i = 0; i < split.size(); ++i) {
    const Vec g = split.part_grad(i, hat(split, i, a, b));
    const int end = prefix_end(split, i, dim);
    if (before_block)
      out.tail(dim - end) += g.tail(dim - end);
    else
      out.head(end) += g.head(end);
  }
  return out;
}

Vec first_minus(const Vec& a, const Vec& b, double h, const SplitPotential& split) {
  return (b - a) / h + h * staggered_force(split, a, b, true);
}

Vec first_plus(const Vec& a, const Vec& b, double h, const SplitPotential& split) {
  return (b - a) / h - h * staggered_force(split, a, b, false);
}

std::pair<DiscreteLagrangian, DiscreteLagrangian> halves(DiscreteLagrangian id) {
  if (id == DiscreteLagrangian::Second) return {DiscreteLagrangian::First, DiscreteLagrangian::Adjoint};
  return {DiscreteLagrangian::Adjoint, DiscreteLagrangian::First};
}

bool is_second(DiscreteLagrangian id) {
  return id == DiscreteLagrangian::Second || id == DiscreteLagrangian::SecondFlipped;
}

}  // namespace

Method parse_method(const std::string& id) {
  if (id == "sym-euler") return Method::SymEuler;
  if (id == "sv" || id == "stormer-verlet") return Method::StormerVerlet;
  if (id == "vi1") return Method::Vi1;
  if (id == "vi1-adjoint") return Method::Vi1Adjoint;
  if (id == "vi2") return Method::Vi2;
  if (id == "vi2-flipped") return Method::Vi2Flipped;
  throw UnknownIdError("unknown method '" + id + "'");
}

const char* to_string(Method m) {
  switch (m) {
    case Method::SymEuler: return "sym-euler";
    case Method::StormerVerlet: return "sv";
    case Method::Vi1: return "vi1";
    case Method::Vi1Adjoint: return "vi1-adjoint";
    case Method::Vi2: return "vi2";
    case Method::Vi2Flipped: return "vi2-flipped";
  }
  return "?";
}

Form parse_form(const std::string& id) {
  if (id == "one-step") return Form::OneStep;
  if (id == "del") return Form::Del;
  throw UnknownIdError("unknown form '" + id + "'");
}

PhaseState step_sym_euler(const PhaseState& s, double h, const GradField& grad) {
  PhaseState out;
  out.v = s.v - h * grad(s.x);
  out.x = s.x + h * out.v;
  return out;
}

Vec step_stormer_verlet(const TwoStepState& ts, const GradField& grad) {
  return 2.0 * ts.x_curr - ts.x_prev - ts.h * ts.h * grad(ts.x_curr);
}

PhaseState step_stormer_verlet(const PhaseState& s, double h, const GradField& grad) {
  const Vec half = s.v - 0.5 * h * grad(s.x);
  PhaseState out;
  out.x = s.x + h * half;
  out.v = half - 0.5 * h * grad(out.x);
  return out;
}

PhaseState substep_flow(std::size_t i, const PhaseState& s, const SplitPotential& split, double h) {
  const auto [first, width] = split.block(i, static_cast<int>(s.x.size()));
  PhaseState out = s;
  out.x.segment(first, width) += h * s.v.segment(first, width);
  out.v -= h * split.part_grad(i, out.x);
  return out;
}

PhaseState substep_flow_adjoint(std::size_t i, const PhaseState& s, const SplitPotential& split,
                                double h) {
  const auto [first, width] = split.block(i, static_cast<int>(s.x.size()));
  PhaseState out = s;
  out.v -= h * split.part_grad(i, s.x);
  out.x.segment(first, width) += h * out.v.segment(first, width);
  return out;
}

PhaseState step_vi1(const PhaseState& s, const SplitPotential& split, double h) {
  PhaseState out = s;
  for (std::size_t i = 0; i < split.size(); ++i) out = substep_flow(i, out, split, h);
  return out;
}

PhaseState step_vi1_adjoint(const PhaseState& s, const SplitPotential& split, double h) {
  PhaseState out = s;
  for (std::size_t i = split.size(); i-- > 0;) out = substep_flow_adjoint(i, out, split, h);
  return out;
}

PhaseState step_vi2(const PhaseState& s, const SplitPotential& split, double h, Vi2Order order) {
  if (order == Vi2Order::AdjointAfter)
    return step_vi1_adjoint(step_vi1(s, split, 0.5 * h), split, 0.5 * h);
  return step_vi1(step_vi1_adjoint(s, split, 0.5 * h), split, 0.5 * h);
}

PhaseState step(Method m, const PhaseState& s, const SplitPotential& split, double h) {
  const GradField grad = [&split](const Vec& x) { return split.grad(x); };
  switch (m) {
    case Method::SymEuler: return step_sym_euler(s, h, grad);
    case Method::StormerVerlet: return step_stormer_verlet(s, h, grad);
    case Method::Vi1: return step_vi1(s, split, h);
    case Method::Vi1Adjoint: return step_vi1_adjoint(s, split, h);
    case Method::Vi2: return step_vi2(s, split, h, Vi2Order::AdjointAfter);
    case Method::Vi2Flipped: return step_vi2(s, split, h, Vi2Order::AdjointBefore);
  }
  throw UnknownIdError("unknown method");
}

Vec del_step(Junction left, Junction right, const Vec& x_prev, const Vec& x_curr, double hs,
             const SplitPotential& split) {
  const int dim = static_cast<int>(x_curr.size());
  const std::size_t K = split.size();
  // Force already fixed by the known points.
  Vec force = left == Junction::First ? staggered_force(split, x_prev, x_curr, false)
                                      : staggered_force(split, x_curr, x_prev, true);
  Vec next = x_curr;
  const auto solve_block = [&](std::size_t b) {
    const auto [first, width] = split.block(b, dim);
    next.segment(first, width) = 2.0 * x_curr.segment(first, width) -
                                 x_prev.segment(first, width) -
                                 hs * hs * force.segment(first, width);
  };
  if (right == Junction::First) {
    // Part i contributes to later blocks only, at x̂ⁱ(x_curr, next).
    for (std::size_t b = 0; b < K; ++b) {
      solve_block(b);
      const int end = prefix_end(split, b, dim);
      if (end < dim) force.tail(dim - end) += split.part_grad(b, hat(split, b, x_curr, next)).tail(dim - end);
    }
  } else {
    // Part i contributes to blocks 0..i, at x̂ⁱ(next, x_curr).
    for (std::size_t b = K; b-- > 0;) {
      const int end = prefix_end(split, b, dim);
      force.head(end) += split.part_grad(b, hat(split, b, next, x_curr)).head(end);
      solve_block(b);
    }
  }
  return next;
}

Vec del_two_step_vi1(const TwoStepState& ts, const SplitPotential& split) {
  return del_step(Junction::First, Junction::First, ts.x_prev, ts.x_curr, ts.h, split);
}

DiscreteLagrangian parse_lagrangian(const std::string& id) {
  if (id == "L1") return DiscreteLagrangian::L1;
  if (id == "L2") return DiscreteLagrangian::L2;
  if (id == "1st") return DiscreteLagrangian::First;
  if (id == "adj") return DiscreteLagrangian::Adjoint;
  if (id == "2nd") return DiscreteLagrangian::Second;
  if (id == "2nd-flipped") return DiscreteLagrangian::SecondFlipped;
  throw UnknownIdError("unknown discrete Lagrangian '" + id + "'");
}

const char* to_string(DiscreteLagrangian id) {
  switch (id) {
    case DiscreteLagrangian::L1: return "L1";
    case DiscreteLagrangian::L2: return "L2";
    case DiscreteLagrangian::First: return "1st";
    case DiscreteLagrangian::Adjoint: return "adj";
    case DiscreteLagrangian::Second: return "2nd";
    case DiscreteLagrangian::SecondFlipped: return "2nd-flipped";
  }
  return "?";
}

double discrete_lagrangian(DiscreteLagrangian id, const Vec& a, const Vec& b, double h,
                           const SplitPotential& split) {
  const double kinetic = 0.5 * (b - a).squaredNorm() / (h * h);
  switch (id) {
    case DiscreteLagrangian::L1: return kinetic - split.value(a);
    case DiscreteLagrangian::L2: return kinetic - 0.5 * (split.value(a) + split.value(b));
    case DiscreteLagrangian::First:
    case DiscreteLagrangian::Adjoint: {
      const bool adj = id == DiscreteLagrangian::Adjoint;
      double pot = 0.0;
      for (std::size_t i = 0; i < split.size(); ++i)
        pot += split.part_value(i, adj ? hat(split, i, b, a) : hat(split, i, a, b));
      return kinetic - pot;
    }
    case DiscreteLagrangian::Second:
    case DiscreteLagrangian::SecondFlipped: {
      const auto [j1, j2] = halves(id);
      const Vec y = second_order_midpoint(id, a, b, h, split);
      return 0.5 * (discrete_lagrangian(j1, a, y, 0.5 * h, split) +
                    discrete_lagrangian(j2, y, b, 0.5 * h, split));
    }
  }
  throw UnknownIdError("unknown discrete Lagrangian");
}

Vec second_order_midpoint(DiscreteLagrangian id, const Vec& a, const Vec& b, double h,
                          const SplitPotential& split) {
  if (!is_second(id)) throw InvalidArgumentError("midpoint is defined for 2nd-order Lagrangians only");
  const auto [j1, j2] = halves(id);
  const double hh = 0.5 * h;
  return newton_solve(
      [&](const Vec& y) {
        return Vec(legendre_plus(j1, a, y, hh, split) - legendre_minus(j2, y, b, hh, split));
      },
      Vec(0.5 * (a + b)));
}

Vec legendre_minus(DiscreteLagrangian id, const Vec& xn, const Vec& xn1, double h,
                   const SplitPotential& split) {
  switch (id) {
    case DiscreteLagrangian::L1: return (xn1 - xn) / h + h * split.grad(xn);
    case DiscreteLagrangian::L2: return (xn1 - xn) / h + 0.5 * h * split.grad(xn);
    case DiscreteLagrangian::First: return first_minus(xn, xn1, h, split);
    case DiscreteLagrangian::Adjoint: return first_plus(xn1, xn, -h, split);
    case DiscreteLagrangian::Second:
    case DiscreteLagrangian::SecondFlipped: {
      const Vec y = second_order_midpoint(id, xn, xn1, h, split);
      return legendre_minus(halves(id).first, xn, y, 0.5 * h, split);
    }
  }
  throw UnknownIdError("unknown discrete Lagrangian");
}

Vec legendre_plus(DiscreteLagrangian id, const Vec& xn, const Vec& xn1, double h,
                  const SplitPotential& split) {
  switch (id) {
    case DiscreteLagrangian::L1: return (xn1 - xn) / h;
    case DiscreteLagrangian::L2: return (xn1 - xn) / h - 0.5 * h * split.grad(xn1);
    case DiscreteLagrangian::First: return first_plus(xn, xn1, h, split);
    case DiscreteLagrangian::Adjoint: return first_minus(xn1, xn, -h, split);
    case DiscreteLagrangian::Second:
    case DiscreteLagrangian::SecondFlipped: {
      const Vec y = second_order_midpoint(id, xn, xn1, h, split);
      return legendre_plus(halves(id).second, y, xn1, 0.5 * h, split);
    }
  }
  throw UnknownIdError("unknown discrete Lagrangian");
}

Vec newton_solve(const std::function<Vec(const Vec&)>& F, Vec y, double tol, int max_iter) {
  const int n = static_cast<int>(y.size());
  Vec r = F(y);
  for (int it = 0; it < max_iter; ++it) {
    const double rn = r.norm();
    if (rn < tol) return y;
    Eigen::MatrixXd J(n, n);
    for (int j = 0; j < n; ++j) {
      const double d = 1e-7 * (1.0 + std::abs(y(j)));
      Vec yp = y, ym = y;
      yp(j) += d;
      ym(j) -= d;
      J.col(j) = (F(yp) - F(ym)) / (2.0 * d);
    }
    const Eigen::VectorXd dy = J.partialPivLu().solve(Eigen::VectorXd(r));
    double lambda = 1.0;
    Vec trial;
    Vec rt;
    for (int k = 0; k < 30; ++k, lambda *= 0.5) {
      trial = y - lambda * Vec(dy);
      rt = F(trial);
      if (rt.norm() < rn) break;
    }
    const bool stalled = (trial - y).norm() <= 4e-16 * (1.0 + y.norm());
    y = trial;
    r = rt;
    // Residual at round-off level: no further progress is possible.
    if (stalled && r.norm() <= rn) return y;
  }
  if (r.norm() < tol) return y;
  throw ConvergenceError("Newton iteration did not converge in " + std::to_string(max_iter) +
                         " iterations (residual " + std::to_string(r.norm()) + ")");
}

Vec bootstrap_first_point(const PhaseState& s0, DiscreteLagrangian id, double h,
                          const SplitPotential& split) {
  if (id == DiscreteLagrangian::L1) return s0.x + h * s0.v - h * h * split.grad(s0.x);
  return newton_solve(
      [&](const Vec& x1) { return Vec(legendre_minus(id, s0.x, x1, h, split) - s0.v); },
      Vec(s0.x + h * s0.v));
}

namespace {

Sample make_sample(long n, double h, const PhaseState& s, bool diagnostics) {
  Sample smp;
  smp.step = n;
  smp.t = static_cast<double>(n) * h;
  smp.s = s;
  if (diagnostics) smp.c = conserved(s);
  return smp;
}

// Two-step recurrence over a uniform grid of step hs. Junction pairs
// alternate when the method is built from half steps.
struct DelPlan {
  DiscreteLagrangian seed;  // Lagrangian of the first interval
  Junction even_left, even_right, odd_left, odd_right;
  double hs;
  int sub;  // grid intervals per step
  DiscreteLagrangian readout;  // Lagrangian of the last interval of a step
};

DelPlan plan_for(Method m, double h) {
  using J = Junction;
  using D = DiscreteLagrangian;
  switch (m) {
    case Method::SymEuler: return {D::L1, J::First, J::First, J::First, J::First, h, 1, D::L1};
    case Method::StormerVerlet: return {D::L2, J::First, J::First, J::First, J::First, h, 1, D::L2};
    case Method::Vi1: return {D::First, J::First, J::First, J::First, J::First, h, 1, D::First};
    case Method::Vi1Adjoint:
      return {D::Adjoint, J::Adjoint, J::Adjoint, J::Adjoint, J::Adjoint, h, 1, D::Adjoint};
    case Method::Vi2:
      return {D::First, J::Adjoint, J::First, J::First, J::Adjoint, 0.5 * h, 2, D::Adjoint};
    case Method::Vi2Flipped:
      return {D::Adjoint, J::First, J::Adjoint, J::Adjoint, J::First, 0.5 * h, 2, D::First};
  }
  throw UnknownIdError("unknown method");
}

}  // namespace

TrajectoryRecord run(Method method, const PhaseState& s0, double h, long steps,
                     const SplitPotential& split, Form form, bool diagnostics) {
  if (steps < 1) throw InvalidArgumentError("steps must be at least 1");
  if (!(h > 0.0)) throw InvalidArgumentError("step size must be positive");
  TrajectoryRecord rec;
  rec.method = to_string(method);
  rec.h = h;
  rec.samples.reserve(static_cast<std::size_t>(steps) + 1);
  rec.samples.push_back(make_sample(0, h, s0, diagnostics));

  if (form == Form::OneStep) {
    PhaseState s = s0;
    for (long n = 1; n <= steps; ++n) {
      try {
        s = step(method, s, split, h);
        rec.samples.push_back(make_sample(n, h, s, diagnostics));
      } catch (const Error& e) {
        throw StepError(n, e.what());
      }
    }
    return rec;
  }

  const DelPlan plan = plan_for(method, h);
  const bool central = method == Method::SymEuler || method == Method::StormerVerlet;
  const GradField grad = [&split](const Vec& x) { return split.grad(x); };
  Vec prev = s0.x;
  Vec curr;
  try {
    curr = bootstrap_first_point(s0, plan.seed, plan.hs, split);
  } catch (const Error& e) {
    throw StepError(1, e.what());
  }
  long node = 1;  // grid index of curr
  for (long n = 1; n <= steps; ++n) {
    try {
      while (node < n * plan.sub) {
        const bool even = node % 2 == 0;
        const Vec next =
            central ? step_stormer_verlet(TwoStepState{prev, curr, plan.hs}, grad)
                    : del_step(even ? plan.even_left : plan.odd_left,
                               even ? plan.even_right : plan.odd_right, prev, curr, plan.hs, split);
        prev = curr;
        curr = next;
        ++node;
      }
      PhaseState s{curr, legendre_plus(plan.readout, prev, curr, plan.hs, split)};
      rec.samples.push_back(make_sample(n, h, s, diagnostics));
    } catch (const Error& e) {
      throw StepError(n, e.what());
    }
  }
  return rec;
}

}  // namespace geodyn
