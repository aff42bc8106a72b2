#pragma once

#include <string>
#include <vector>

#include "geodyn/kepler.hpp"

namespace geodyn {

// Extended state in proper time τ with c = 1: coordinate time t, position x,
// Lorentz factor γ and momentum u = γẋ.
struct ExtPhaseState {
  double t = 0.0;
  Vec x;
  double gamma = 1.0;
  Vec u;
};

// Mass-shell seed γ = √(1 + |u|²).
ExtPhaseState on_shell(const Vec& x, const Vec& u, double t = 0.0);

// H = ½(-γ² + |u|²).
double ext_hamiltonian(const ExtPhaseState& s);

// t += hγ, u -= hγ∇φ(x).
ExtPhaseState flow_ht(const ExtPhaseState& s, double h);
// xᵢ += h uᵢ, γ -= φ(x⁺) - φ(x). Index is 0-based.
ExtPhaseState flow_hi(std::size_t i, const ExtPhaseState& s, double h);

ExtPhaseState step_k1(const ExtPhaseState& s, double h);
ExtPhaseState step_k1_adjoint(const ExtPhaseState& s, double h);

enum class K2Order {
  AdjointAfter,   // Φ*_{h/2} ∘ Φ_{h/2}
  AdjointBefore,  // Φ_{h/2} ∘ Φ*_{h/2}
};

ExtPhaseState step_k2(const ExtPhaseState& s, double h, K2Order order = K2Order::AdjointAfter);

struct ExtTwoStep {
  double t_prev = 0.0;
  Vec x_prev;
  double t_curr = 0.0;
  Vec x_curr;
  double h = 0.0;
};

struct TimePosition {
  double t = 0.0;
  Vec x;
};

// Explicit two-step scheme in (t, x).
TimePosition del_relativistic(const ExtTwoStep& ts);

// (t₁, x₁) reproducing the first step_k1 step from s0.
TimePosition del_relativistic_seed(const ExtPhaseState& s0, double h);

// γ and u at the newer point of a step pair.
ExtPhaseState del_relativistic_readout(const TimePosition& prev, const TimePosition& curr,
                                       double h);

enum class RelMethod { K1, K1Adjoint, K2, K2Flipped, Del };

RelMethod parse_rel_method(const std::string& id);
const char* to_string(RelMethod m);

struct ExtSample {
  long step = 0;
  double tau = 0.0;
  ExtPhaseState s;
  double H = 0.0;
};

std::vector<ExtSample> run_relativistic(RelMethod method, const ExtPhaseState& s0, double h,
                                        long steps);

}  // namespace geodyn
