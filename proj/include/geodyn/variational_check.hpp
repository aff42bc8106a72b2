#pragma once

#include <Eigen/Core>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace geodyn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Structure { General, VelocityMass, ConstantMass };

Structure parse_structure(const std::string& id);
const char* to_string(Structure s);

using VectorField = std::function<VectorXd(double t, const VectorXd& x, const VectorXd& v)>;
using MatrixField = std::function<MatrixXd(double t, const VectorXd& x, const VectorXd& v)>;

struct SampleBox {
  double t_lo = 0.0, t_hi = 1.0;
  double x_lo = -3.0, x_hi = 3.0;
  double v_lo = -2.0, v_hi = 2.0;
};

// d/dt(M(t,x,ẋ) ẋ) = f(t,x,ẋ).
struct SecondOrderSystem {
  std::string name;
  int n = 1;
  Structure structure = Structure::General;
  MatrixField mass;
  VectorField force;
  // Points (in x) the cloud keeps at least singular_radius away from.
  std::vector<VectorXd> singular_points;
  double singular_radius = 0.1;
  // Samples need |ẋ| below this.
  double speed_limit = std::numeric_limits<double>::infinity();
  SampleBox box;
};

struct PointSample {
  double t = 0.0;
  VectorXd x;
  VectorXd v;
};

// Deterministic Halton cloud in the system's box, filtered by its domain.
std::vector<PointSample> sample_cloud(const SecondOrderSystem& sys, int count = 64);

struct CheckOptions {
  double delta = 1e-5;      // partial-derivative step
  double time_step = 1e-4;  // step of total time derivatives
  double tolerance = 1e-4;
};

struct ConditionResult {
  std::string name;
  std::string description;
  double residual = 0.0;
  bool pass = false;
};

struct CheckReport {
  std::string system;
  std::string checker;
  std::vector<ConditionResult> conditions;
  bool pass = false;
  double tolerance = 0.0;

  const ConditionResult& condition(const std::string& name) const;
};

// ∂fᵢ/∂ẋⱼ + ∂fⱼ/∂ẋᵢ = 0 and ∂fᵢ/∂xⱼ - ∂fⱼ/∂xᵢ - d/dt ∂fᵢ/∂ẋⱼ = 0.
CheckReport check_constant_mass(const SecondOrderSystem& sys, const std::vector<PointSample>& samples,
                                const CheckOptions& opt = {});
// M = M(ẋ), f = A(t,x)ẋ + φ(t,x).
CheckReport check_velocity_mass(const SecondOrderSystem& sys, const std::vector<PointSample>& samples,
                                const CheckOptions& opt = {});
CheckReport check_general(const SecondOrderSystem& sys, const std::vector<PointSample>& samples,
                          const CheckOptions& opt = {});
// Dispatch on the structure tag.
CheckReport check_system(const SecondOrderSystem& sys, const std::vector<PointSample>& samples,
                         const CheckOptions& opt = {});

// ẍ from M ẍ = f - (dM/dt) ẋ.
VectorXd acceleration(const SecondOrderSystem& sys, double t, const VectorXd& x, const VectorXd& v,
                      double delta = 1e-5);

// Built-ins: kepler, damped, magnetic, relativistic, plus the test systems
// magnetic-time, velocity-mass-fail and conformal.
SecondOrderSystem builtin_system(const std::string& id);
std::vector<std::string> builtin_system_ids();

struct Jet {
  VectorXd x;
  VectorXd xd;
  VectorXd xdd;
};

using ResidualOperator =
    std::function<VectorXd(const VectorXd& x, const VectorXd& xd, const VectorXd& xdd)>;
using JetLagrangian = std::function<double(const Jet&)>;

// L = ∫₀¹ x·N[λx] dλ by 16-node Gauss-Legendre.
double vainberg_lagrangian(const ResidualOperator& N, const Jet& jet);

// ∂L/∂x - d/dt ∂L/∂ẋ + d²/dt² ∂L/∂ẍ along a path given as jets of t.
VectorXd euler_lagrange_residual(const JetLagrangian& L, const std::function<Jet(double)>& path,
                                 double t, double dt = 1e-2, double dp = 1e-4);

}  // namespace geodyn
