#pragma once

#include <functional>
#include <string>

#include "geodyn/kepler.hpp"

namespace geodyn {

using GradField = std::function<Vec(const Vec&)>;

enum class Method { SymEuler, StormerVerlet, Vi1, Vi1Adjoint, Vi2, Vi2Flipped };

Method parse_method(const std::string& id);
const char* to_string(Method m);

// Map form of a run: the one-step composition or the two-step discrete
// Euler-Lagrange recurrence with Legendre-transform seeding and readout.
enum class Form { OneStep, Del };

Form parse_form(const std::string& id);

struct TwoStepState {
  Vec x_prev;
  Vec x_curr;
  double h = 0.0;
};

// Kick then drift: p⁺ = p - h∇φ(x), x⁺ = x + h p⁺.
PhaseState step_sym_euler(const PhaseState& s, double h, const GradField& grad = grad_potential);

// x_{n+1} = 2x_n - x_{n-1} - h²∇φ(x_n).
Vec step_stormer_verlet(const TwoStepState& ts, const GradField& grad = grad_potential);
// Kick-drift-kick form of the same scheme.
PhaseState step_stormer_verlet(const PhaseState& s, double h,
                               const GradField& grad = grad_potential);

// Sub-flow of part i (0-based): drift block i by h p, then kick by -h∇φ⁽ⁱ⁾.
PhaseState substep_flow(std::size_t i, const PhaseState& s, const SplitPotential& split, double h);
// Its adjoint: kick first, then drift.
PhaseState substep_flow_adjoint(std::size_t i, const PhaseState& s, const SplitPotential& split,
                                double h);

// Sub-flows 1..K in order.
PhaseState step_vi1(const PhaseState& s, const SplitPotential& split, double h);
// Adjoint sub-flows K..1.
PhaseState step_vi1_adjoint(const PhaseState& s, const SplitPotential& split, double h);

enum class Vi2Order {
  AdjointAfter,   // Φ*_{h/2} ∘ Φ_{h/2}
  AdjointBefore,  // Φ_{h/2} ∘ Φ*_{h/2}
};

PhaseState step_vi2(const PhaseState& s, const SplitPotential& split, double h,
                    Vi2Order order = Vi2Order::AdjointAfter);

PhaseState step(Method m, const PhaseState& s, const SplitPotential& split, double h);

// Which discrete Lagrangian sits on either side of a node of the two-step
// recurrence: the split Lagrangian 𝕃¹ˢᵗ or its adjoint 𝕃*.
enum class Junction { First, Adjoint };

// Solves the discrete Euler-Lagrange equation at x_curr for x_next, with
// step hs on both sides. The update is explicit block by block.
Vec del_step(Junction left, Junction right, const Vec& x_prev, const Vec& x_curr, double hs,
             const SplitPotential& split);

Vec del_two_step_vi1(const TwoStepState& ts, const SplitPotential& split);

enum class DiscreteLagrangian { L1, L2, First, Adjoint, Second, SecondFlipped };

DiscreteLagrangian parse_lagrangian(const std::string& id);
const char* to_string(DiscreteLagrangian id);

double discrete_lagrangian(DiscreteLagrangian id, const Vec& a, const Vec& b, double h,
                           const SplitPotential& split);

// p_n = -h ∂₁𝕃(x_n, x_{n+1}).
Vec legendre_minus(DiscreteLagrangian id, const Vec& xn, const Vec& xn1, double h,
                   const SplitPotential& split = SplitPotential::kepler());
// p_{n+1} = h ∂₂𝕃(x_n, x_{n+1}).
Vec legendre_plus(DiscreteLagrangian id, const Vec& xn, const Vec& xn1, double h,
                  const SplitPotential& split = SplitPotential::kepler());

// Stationary interior point of the two half steps making up 𝕃²ⁿᵈ.
Vec second_order_midpoint(DiscreteLagrangian id, const Vec& a, const Vec& b, double h,
                          const SplitPotential& split);

// x₁ with legendre_minus(𝕃, x₀, x₁, h) = v₀.
Vec bootstrap_first_point(const PhaseState& s0, DiscreteLagrangian id, double h,
                          const SplitPotential& split = SplitPotential::kepler());

// Damped Newton with a finite-difference Jacobian for F(y) = 0.
Vec newton_solve(const std::function<Vec(const Vec&)>& F, Vec y, double tol = 1e-12,
                 int max_iter = 50);

TrajectoryRecord run(Method method, const PhaseState& s0, double h, long steps,
                     const SplitPotential& split, Form form = Form::OneStep,
                     bool diagnostics = true);

}  // namespace geodyn
