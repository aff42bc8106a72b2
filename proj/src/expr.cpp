#include "geodyn/expr.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "geodyn/error.hpp"

namespace geodyn {

struct Expression::Node {
  enum Kind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call } kind = Number;
  double value = 0.0;
  int slot = 0;
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;

  double eval(const double* v) const {
    switch (kind) {
      case Number: return value;
      case Var: return v[slot];
      case Neg: return -lhs->eval(v);
      case Add: return lhs->eval(v) + rhs->eval(v);
      case Sub: return lhs->eval(v) - rhs->eval(v);
      case Mul: return lhs->eval(v) * rhs->eval(v);
      case Div: return lhs->eval(v) / rhs->eval(v);
      case Pow: return std::pow(lhs->eval(v), rhs->eval(v));
      case Call: return fn(lhs->eval(v));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

double fn_sqrt(double x) { return std::sqrt(x); }
double fn_abs(double x) { return std::abs(x); }
double fn_sin(double x) { return std::sin(x); }
double fn_cos(double x) { return std::cos(x); }
double fn_exp(double x) { return std::exp(x); }
double fn_log(double x) { return std::log(x); }

NodePtr make(Expression::Node::Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = k;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

class Parser {
 public:
  Parser(const std::string& s, int dim, int line, int offset)
      : s_(s), dim_(dim), line_(line), offset_(offset) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line_, offset_ + static_cast<int>(pos_) + 1, msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (accept('+'))
        n = make(Expression::Node::Add, n, term());
      else if (accept('-'))
        n = make(Expression::Node::Sub, n, term());
      else
        return n;
    }
  }

  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*'))
        n = make(Expression::Node::Mul, n, unary());
      else if (accept('/'))
        n = make(Expression::Node::Div, n, unary());
      else
        return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Expression::Node::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Expression::Node::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return name();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    auto n = std::make_shared<Expression::Node>();
    n->kind = Expression::Node::Number;
    n->value = v;
    return n;
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string id = s_.substr(start, pos_ - start);
    static const std::map<std::string, double (*)(double)> funcs{
        {"sqrt", fn_sqrt}, {"abs", fn_abs}, {"sin", fn_sin},
        {"cos", fn_cos},   {"exp", fn_exp}, {"log", fn_log}};
    if (auto it = funcs.find(id); it != funcs.end()) {
      if (!accept('(')) fail("expected '(' after " + id);
      NodePtr arg = expr();
      if (!accept(')')) fail("expected ')'");
      auto n = std::make_shared<Expression::Node>();
      n->kind = Expression::Node::Call;
      n->fn = it->second;
      n->lhs = arg;
      return n;
    }
    auto n = std::make_shared<Expression::Node>();
    if (id == "pi") {
      n->kind = Expression::Node::Number;
      n->value = std::numbers::pi;
      return n;
    }
    n->kind = Expression::Node::Var;
    if (id == "t") {
      n->slot = 0;
      return n;
    }
    if ((id[0] == 'x' || id[0] == 'v') && id.size() > 1 &&
        id.find_first_not_of("0123456789", 1) == std::string::npos) {
      const int k = std::stoi(id.substr(1));
      if (k >= 1 && k <= dim_) {
        n->slot = (id[0] == 'x' ? 0 : dim_) + k;
        return n;
      }
    }
    pos_ = start;
    fail("unknown identifier '" + id + "'");
  }

  const std::string& s_;
  int dim_;
  int line_;
  int offset_;
  std::size_t pos_ = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& value, int line, int col, std::size_t expect) {
  std::istringstream in(value);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ParseError(line, col, "malformed number '" + tok + "'");
    }
  }
  if (expect && out.size() != expect)
    throw ParseError(line, col, "expected " + std::to_string(expect) + " numbers");
  return out;
}

}  // namespace

Expression Expression::parse(const std::string& text, int dim, int line, int column_offset) {
  Expression e;
  e.dim_ = dim;
  e.root_ = Parser(text, dim, line, column_offset).parse();
  return e;
}

double Expression::eval(const double* vars) const { return root_->eval(vars); }

double Expression::eval(double t, const VectorXd& x, const VectorXd& v) const {
  double buf[1 + 2 * 6];
  buf[0] = t;
  for (int k = 0; k < dim_; ++k) {
    buf[1 + k] = x(k);
    buf[1 + dim_ + k] = v(k);
  }
  return eval(buf);
}

SecondOrderSystem parse_system(const std::string& text, const std::string& name) {
  SecondOrderSystem sys;
  sys.name = name;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  int dim = 0;
  std::map<int, Expression> forces;
  std::map<std::pair<int, int>, Expression> mass;
  while (std::getline(in, raw)) {
    ++line;
    const std::string content = raw.substr(0, raw.find('#'));
    if (trim(content).empty()) continue;
    const auto eq = content.find('=');
    const int key_col = static_cast<int>(content.find_first_not_of(" \t")) + 1;
    if (eq == std::string::npos) throw ParseError(line, key_col, "expected key = value");
    const std::string key = trim(content.substr(0, eq));
    const std::string value = content.substr(eq + 1);
    const int value_col = static_cast<int>(eq) + 1;
    const int first_value_col =
        value_col + static_cast<int>(std::min(value.size(), value.find_first_not_of(" \t"))) + 1;
    if (key == "dim") {
      const auto v = parse_numbers(value, line, first_value_col, 1);
      dim = static_cast<int>(v[0]);
      if (dim < 1 || dim > 6 || dim != v[0]) throw ParseError(line, first_value_col, "dim must be an integer in 1..6");
      sys.n = dim;
      continue;
    }
    if (dim == 0) throw ParseError(line, key_col, "dim must be given before '" + key + "'");
    if (key == "structure") {
      try {
        sys.structure = parse_structure(trim(value));
      } catch (const UnknownIdError& e) {
        throw ParseError(line, first_value_col, e.what());
      }
    } else if (key == "singular") {
      const auto v = parse_numbers(value, line, first_value_col, static_cast<std::size_t>(dim));
      sys.singular_points.push_back(Eigen::Map<const VectorXd>(v.data(), dim));
    } else if (key == "singular_radius") {
      sys.singular_radius = parse_numbers(value, line, first_value_col, 1)[0];
    } else if (key == "speed_limit") {
      sys.speed_limit = parse_numbers(value, line, first_value_col, 1)[0];
    } else if (key == "t_range" || key == "x_range" || key == "v_range") {
      const auto v = parse_numbers(value, line, first_value_col, 2);
      if (!(v[0] < v[1])) throw ParseError(line, first_value_col, "range must be increasing");
      double* lo = key[0] == 't' ? &sys.box.t_lo : key[0] == 'x' ? &sys.box.x_lo : &sys.box.v_lo;
      double* hi = key[0] == 't' ? &sys.box.t_hi : key[0] == 'x' ? &sys.box.x_hi : &sys.box.v_hi;
      *lo = v[0];
      *hi = v[1];
    } else if (key.size() >= 2 && key[0] == 'f' &&
               key.find_first_not_of("0123456789", 1) == std::string::npos) {
      const int i = std::stoi(key.substr(1));
      if (i < 1 || i > dim) throw ParseError(line, key_col, "force index out of range in '" + key + "'");
      forces.insert_or_assign(i - 1, Expression::parse(value, dim, line, value_col));
    } else if (key.size() == 3 && key[0] == 'M' && std::isdigit(static_cast<unsigned char>(key[1])) &&
               std::isdigit(static_cast<unsigned char>(key[2]))) {
      const int i = key[1] - '1';
      const int j = key[2] - '1';
      if (i < 0 || j < 0 || i >= dim || j >= dim)
        throw ParseError(line, key_col, "mass index out of range in '" + key + "'");
      mass.insert_or_assign({i, j}, Expression::parse(value, dim, line, value_col));
    } else {
      throw ParseError(line, key_col, "unknown key '" + key + "'");
    }
  }
  if (dim == 0) throw ParseError(line + 1, 1, "missing 'dim'");
  for (int i = 0; i < dim; ++i)
    if (!forces.count(i)) throw ParseError(line + 1, 1, "missing 'f" + std::to_string(i + 1) + "'");
  std::vector<Expression> f;
  for (int i = 0; i < dim; ++i) f.push_back(forces.at(i));
  sys.force = [f, dim](double t, const VectorXd& x, const VectorXd& v) {
    VectorXd out(dim);
    for (int i = 0; i < dim; ++i) out(i) = f[static_cast<std::size_t>(i)].eval(t, x, v);
    return out;
  };
  // Missing entries mirror their transpose, else default to the identity.
  std::vector<std::vector<std::shared_ptr<Expression>>> m(
      static_cast<std::size_t>(dim), std::vector<std::shared_ptr<Expression>>(static_cast<std::size_t>(dim)));
  for (const auto& [ij, e] : mass) {
    m[static_cast<std::size_t>(ij.first)][static_cast<std::size_t>(ij.second)] = std::make_shared<Expression>(e);
    if (!mass.count({ij.second, ij.first}))
      m[static_cast<std::size_t>(ij.second)][static_cast<std::size_t>(ij.first)] = std::make_shared<Expression>(e);
  }
  sys.mass = [m, dim](double t, const VectorXd& x, const VectorXd& v) {
    MatrixXd M = MatrixXd::Identity(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        if (const auto& e = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) M(i, j) = e->eval(t, x, v);
        else if (i != j) M(i, j) = 0.0;
    return M;
  };
  return sys;
}

SecondOrderSystem load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgumentError("cannot open system file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_system(ss.str(), path);
}

}  // namespace geodyn
