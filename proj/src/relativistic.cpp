#include "geodyn/relativistic.hpp"

#include <cmath>

#include "geodyn/error.hpp"

namespace geodyn {

ExtPhaseState on_shell(const Vec& x, const Vec& u, double t) {
  return {t, x, std::sqrt(1.0 + u.squaredNorm()), u};
}

double ext_hamiltonian(const ExtPhaseState& s) {
  return 0.5 * (-s.gamma * s.gamma + s.u.squaredNorm());
}

ExtPhaseState flow_ht(const ExtPhaseState& s, double h) {
  ExtPhaseState out = s;
  out.t += h * s.gamma;
  out.u -= h * s.gamma * grad_potential(s.x);
  return out;
}

ExtPhaseState flow_hi(std::size_t i, const ExtPhaseState& s, double h) {
  ExtPhaseState out = s;
  const int c = static_cast<int>(i);
  out.x(c) += h * s.u(c);
  // A straight drift along one axis only meets the origin if the other
  // coordinates vanish and xᵢ changes sign.
  const double rest = (s.x.squaredNorm() - s.x(c) * s.x(c));
  if (rest < 1e-24 && (s.x(c) > 0.0) != (out.x(c) > 0.0))
    throw SingularOriginError("drift crosses the origin");
  out.gamma -= potential(out.x) - potential(s.x);
  return out;
}

ExtPhaseState step_k1(const ExtPhaseState& s, double h) {
  ExtPhaseState out = flow_ht(s, h);
  for (std::size_t i = 0; i < static_cast<std::size_t>(s.x.size()); ++i) out = flow_hi(i, out, h);
  return out;
}

ExtPhaseState step_k1_adjoint(const ExtPhaseState& s, double h) {
  ExtPhaseState out = s;
  for (std::size_t i = static_cast<std::size_t>(s.x.size()); i-- > 0;) out = flow_hi(i, out, h);
  return flow_ht(out, h);
}

ExtPhaseState step_k2(const ExtPhaseState& s, double h, K2Order order) {
  if (order == K2Order::AdjointAfter) return step_k1_adjoint(step_k1(s, 0.5 * h), 0.5 * h);
  return step_k1(step_k1_adjoint(s, 0.5 * h), 0.5 * h);
}

TimePosition del_relativistic(const ExtTwoStep& ts) {
  TimePosition next;
  next.t = 2.0 * ts.t_curr - ts.t_prev - ts.h * (potential(ts.x_curr) - potential(ts.x_prev));
  next.x = 2.0 * ts.x_curr - ts.x_prev - ts.h * (next.t - ts.t_curr) * grad_potential(ts.x_curr);
  return next;
}

TimePosition del_relativistic_seed(const ExtPhaseState& s0, double h) {
  TimePosition first;
  first.t = s0.t + h * s0.gamma;
  first.x = s0.x + h * s0.u - h * (first.t - s0.t) * grad_potential(s0.x);
  return first;
}

ExtPhaseState del_relativistic_readout(const TimePosition& prev, const TimePosition& curr,
                                       double h) {
  ExtPhaseState s;
  s.t = curr.t;
  s.x = curr.x;
  s.gamma = (curr.t - prev.t) / h - (potential(curr.x) - potential(prev.x));
  s.u = (curr.x - prev.x) / h;
  return s;
}

RelMethod parse_rel_method(const std::string& id) {
  if (id == "k1") return RelMethod::K1;
  if (id == "k1-adjoint") return RelMethod::K1Adjoint;
  if (id == "k2") return RelMethod::K2;
  if (id == "k2-flipped") return RelMethod::K2Flipped;
  if (id == "del") return RelMethod::Del;
  throw UnknownIdError("unknown relativistic method '" + id + "'");
}

const char* to_string(RelMethod m) {
  switch (m) {
    case RelMethod::K1: return "k1";
    case RelMethod::K1Adjoint: return "k1-adjoint";
    case RelMethod::K2: return "k2";
    case RelMethod::K2Flipped: return "k2-flipped";
    case RelMethod::Del: return "del";
  }
  return "?";
}

std::vector<ExtSample> run_relativistic(RelMethod method, const ExtPhaseState& s0, double h,
                                        long steps) {
  if (steps < 1) throw InvalidArgumentError("steps must be at least 1");
  if (!(h > 0.0)) throw InvalidArgumentError("step size must be positive");
  std::vector<ExtSample> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  const auto push = [&](long n, const ExtPhaseState& s) {
    out.push_back({n, static_cast<double>(n) * h, s, ext_hamiltonian(s)});
  };
  push(0, s0);
  ExtPhaseState s = s0;
  TimePosition prev{s0.t, s0.x};
  TimePosition curr;
  for (long n = 1; n <= steps; ++n) {
    try {
      switch (method) {
        case RelMethod::K1: s = step_k1(s, h); break;
        case RelMethod::K1Adjoint: s = step_k1_adjoint(s, h); break;
        case RelMethod::K2: s = step_k2(s, h, K2Order::AdjointAfter); break;
        case RelMethod::K2Flipped: s = step_k2(s, h, K2Order::AdjointBefore); break;
        case RelMethod::Del: {
          if (n == 1) {
            curr = del_relativistic_seed(s0, h);
          } else {
            TimePosition next = del_relativistic({prev.t, prev.x, curr.t, curr.x, h});
            prev = std::move(curr);
            curr = std::move(next);
          }
          s = del_relativistic_readout(prev, curr, h);
          break;
        }
      }
    } catch (const Error& e) {
      throw StepError(n, e.what());
    }
    push(n, s);
  }
  return out;
}

}  // namespace geodyn
