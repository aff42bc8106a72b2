#pragma once

#include <memory>
#include <string>
#include <vector>

#include "geodyn/variational_check.hpp"

namespace geodyn {

// Compiled arithmetic expression over the variables t, x1..xn, v1..vn.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?
//   primary := number | variable | 'pi' | func '(' expr ')' | '(' expr ')'
//   func    := sqrt | abs | sin | cos | exp | log
//
// '^' is right-associative and binds tighter than unary minus: -x^2 = -(x^2).
class Expression {
 public:
  struct Node;

  // Columns in error messages count from column_offset + 1.
  static Expression parse(const std::string& text, int dim, int line = 1, int column_offset = 0);

  // vars = (t, x1..xn, v1..vn).
  double eval(const double* vars) const;
  double eval(double t, const VectorXd& x, const VectorXd& v) const;

 private:
  std::shared_ptr<const Node> root_;
  int dim_ = 0;
};

// Reads a system from key=value lines; '#' starts a comment.
//
//   dim = 2                          (required, first)
//   structure = constant-mass        (general | velocity-mass | constant-mass)
//   f1 = -x1/(x1^2+x2^2)^1.5         (one per component, required)
//   M11 = 1                          (mass entries, default identity; Mij mirrors Mji)
//   singular = 0 0                   (point to avoid; may repeat)
//   singular_radius = 0.1
//   speed_limit = 1
//   t_range = 0 1
//   x_range = -3 3
//   v_range = -2 2
SecondOrderSystem parse_system(const std::string& text, const std::string& name = "file");
SecondOrderSystem load_system_file(const std::string& path);

}  // namespace geodyn
