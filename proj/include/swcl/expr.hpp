#pragma once
#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "dual.hpp"
#include "errors.hpp"

// small recursive-descent expression language, evaluated over double or Dual
namespace swcl {

class Profile;

struct ExprNode {
  enum Op { num, var, neg, add, sub, mul, div, pow, call, profile } op = num;
  double value = 0;
  int index = 0;  // variable slot or function id
  std::vector<std::shared_ptr<const ExprNode>> args;
  std::shared_ptr<const Profile> prof;
};
using ExprPtr = std::shared_ptr<const ExprNode>;

enum Fn { f_sin, f_cos, f_tan, f_exp, f_log, f_sqrt, f_abs, f_atan, f_atan2, f_sinh, f_cosh, f_tanh };

// natural cubic spline through (s_i, f_i)
class CubicSpline {
 public:
  CubicSpline(std::vector<double> s, std::vector<double> f) : s_(std::move(s)), f_(std::move(f)) {
    const size_t n = s_.size();
    if (n < 4 || f_.size() != n) fail(ErrorKind::parameter, "spline needs >= 4 matching samples");
    for (size_t i = 1; i < n; ++i)
      if (!(s_[i] > s_[i - 1])) fail(ErrorKind::parameter, "spline abscissae must increase");
    // tridiagonal solve for second derivatives, natural ends
    m_.assign(n, 0.0);
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (size_t i = 1; i + 1 < n; ++i) {
      double h0 = s_[i] - s_[i - 1], h1 = s_[i + 1] - s_[i];
      double a = h0 / 6, b = (h0 + h1) / 3, cc = h1 / 6;
      double r = (f_[i + 1] - f_[i]) / h1 - (f_[i] - f_[i - 1]) / h0;
      double den = b - a * c[i - 1];
      c[i] = cc / den;
      d[i] = (r - a * d[i - 1]) / den;
    }
    for (size_t i = n - 2; i >= 1; --i) m_[i] = d[i] - c[i] * m_[i + 1];
  }
  // value and first derivative
  std::pair<double, double> eval(double x) const {
    size_t n = s_.size();
    size_t i = std::upper_bound(s_.begin(), s_.end(), x) - s_.begin();
    i = std::clamp<size_t>(i, 1, n - 1);
    double h = s_[i] - s_[i - 1];
    double A = (s_[i] - x) / h, B = (x - s_[i - 1]) / h;
    double val = A * f_[i - 1] + B * f_[i] + ((A * A * A - A) * m_[i - 1] + (B * B * B - B) * m_[i]) * h * h / 6;
    double der = (f_[i] - f_[i - 1]) / h + (-(3 * A * A - 1) * m_[i - 1] + (3 * B * B - 1) * m_[i]) * h / 6;
    return {val, der};
  }
  double lo() const { return s_.front(); }
  double hi() const { return s_.back(); }

 private:
  std::vector<double> s_, f_, m_;
};

class Expr;

// one-variable profile f(s): an expression in s or a spline
class Profile {
 public:
  static std::shared_ptr<const Profile> from_expr(const std::string& src);
  static std::shared_ptr<const Profile> from_spline(std::vector<double> s, std::vector<double> f) {
    auto p = std::make_shared<Profile>();
    p->spline_ = std::make_shared<CubicSpline>(std::move(s), std::move(f));
    return p;
  }
  bool is_spline() const { return static_cast<bool>(spline_); }

  template <class T>
  T operator()(const T& s) const;

 private:
  std::shared_ptr<const Expr> expr_;
  std::shared_ptr<const CubicSpline> spline_;
};

class Expr {
 public:
  Expr() = default;
  // vars: names bound to slots 0..n-1 at evaluation time
  Expr(const std::string& src, std::vector<std::string> vars,
       std::map<std::string, double> params = {}, std::shared_ptr<const Profile> f = nullptr)
      : src_(src), vars_(std::move(vars)), params_(std::move(params)), f_(std::move(f)) {
    pos_ = 0;
    root_ = parse_sum();
    skip();
    if (pos_ != src_.size()) bad("unexpected '" + std::string(1, src_[pos_]) + "'");
  }

  const std::string& source() const { return src_; }
  bool uses_profile() const { return static_cast<bool>(f_); }

  template <class T>
  T operator()(const std::vector<T>& slots) const { return eval(*root_, slots); }

 private:
  template <class T>
  static T eval(const ExprNode& n, const std::vector<T>& slots) {
    using std::sin, std::cos, std::tan, std::exp, std::log, std::sqrt, std::abs, std::atan, std::atan2,
        std::sinh, std::cosh, std::tanh;
    switch (n.op) {
      case ExprNode::num: return T(n.value);
      case ExprNode::var: return slots[n.index];
      case ExprNode::neg: return -eval(*n.args[0], slots);
      case ExprNode::add: return eval(*n.args[0], slots) + eval(*n.args[1], slots);
      case ExprNode::sub: return eval(*n.args[0], slots) - eval(*n.args[1], slots);
      case ExprNode::mul: return eval(*n.args[0], slots) * eval(*n.args[1], slots);
      case ExprNode::div: return eval(*n.args[0], slots) / eval(*n.args[1], slots);
      case ExprNode::pow: {
        T base = eval(*n.args[0], slots);
        const ExprNode& e = *n.args[1];
        if (e.op == ExprNode::num && e.value == std::round(e.value) && std::abs(e.value) <= 64) {
          int k = static_cast<int>(e.value);
          T r(1.0);
          for (int i = 0; i < std::abs(k); ++i) r = r * base;
          return k < 0 ? T(1.0) / r : r;
        }
        if (e.op == ExprNode::num) {
          if constexpr (std::is_same_v<T, double>) return std::pow(base, e.value);
          else return pow(base, e.value);
        }
        return exp(eval(e, slots) * log(base));
      }
      case ExprNode::call: {
        T a = eval(*n.args[0], slots);
        switch (n.index) {
          case f_sin: return sin(a);
          case f_cos: return cos(a);
          case f_tan: return tan(a);
          case f_exp: return exp(a);
          case f_log: return log(a);
          case f_sqrt: return sqrt(a);
          case f_abs: return abs(a);
          case f_atan: return atan(a);
          case f_atan2: return atan2(a, eval(*n.args[1], slots));
          case f_sinh: return sinh(a);
          case f_cosh: return cosh(a);
          case f_tanh: return tanh(a);
        }
        return a;
      }
      case ExprNode::profile: return (*n.prof)(eval(*n.args[0], slots));
    }
    return T(0.0);
  }

  [[noreturn]] void bad(const std::string& m) const {
    fail(ErrorKind::parameter, "expression '" + src_ + "' at " + std::to_string(pos_) + ": " + m);
  }
  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) return ++pos_, true;
    return false;
  }
  static ExprPtr node(ExprNode::Op op, std::vector<ExprPtr> args) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->args = std::move(args);
    return n;
  }
  static ExprPtr number(double v) {
    auto n = std::make_shared<ExprNode>();
    n->value = v;
    return n;
  }

  ExprPtr parse_sum() {
    ExprPtr l = parse_product();
    for (;;) {
      if (eat('+')) l = node(ExprNode::add, {l, parse_product()});
      else if (eat('-')) l = node(ExprNode::sub, {l, parse_product()});
      else return l;
    }
  }
  ExprPtr parse_product() {
    ExprPtr l = parse_unary();
    for (;;) {
      if (eat('*')) l = node(ExprNode::mul, {l, parse_unary()});
      else if (eat('/')) l = node(ExprNode::div, {l, parse_unary()});
      else return l;
    }
  }
  ExprPtr parse_unary() {
    if (eat('-')) {
      ExprPtr a = parse_unary();
      // fold literals so y^(-2) keeps the integer-power path
      if (a->op == ExprNode::num) return number(-a->value);
      return node(ExprNode::neg, {a});
    }
    if (eat('+')) return parse_unary();
    return parse_power();
  }
  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    if (eat('^')) return node(ExprNode::pow, {base, parse_unary()});
    return base;
  }
  ExprPtr parse_primary() {
    skip();
    if (pos_ >= src_.size()) bad("unexpected end");
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr e = parse_sum();
      if (!eat(')')) bad("missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      double v = std::stod(src_.substr(pos_), &used);
      pos_ += used;
      return number(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
      std::string id = src_.substr(start, pos_ - start);
      skip();
      if (pos_ < src_.size() && src_[pos_] == '(') {
        ++pos_;
        std::vector<ExprPtr> args{parse_sum()};
        while (eat(',')) args.push_back(parse_sum());
        if (!eat(')')) bad("missing ')'");
        return call(id, std::move(args));
      }
      for (size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i] == id) {
          auto n = std::make_shared<ExprNode>();
          n->op = ExprNode::var;
          n->index = static_cast<int>(i);
          return n;
        }
      if (auto it = params_.find(id); it != params_.end()) return number(it->second);
      if (id == "pi") return number(std::numbers::pi);
      if (id == "e") return number(std::numbers::e);
      bad("unknown name '" + id + "'");
    }
    bad("unexpected '" + std::string(1, c) + "'");
  }
  ExprPtr call(const std::string& id, std::vector<ExprPtr> args) {
    static const std::map<std::string, int> fns = {
        {"sin", f_sin}, {"cos", f_cos}, {"tan", f_tan}, {"exp", f_exp}, {"log", f_log}, {"ln", f_log},
        {"sqrt", f_sqrt}, {"abs", f_abs}, {"atan", f_atan}, {"atan2", f_atan2}, {"sinh", f_sinh},
        {"cosh", f_cosh}, {"tanh", f_tanh}};
    if (id == "f") {
      if (!f_) bad("profile f not supplied");
      if (args.size() != 1) bad("f takes one argument");
      auto n = std::make_shared<ExprNode>();
      n->op = ExprNode::profile;
      n->args = std::move(args);
      n->prof = f_;
      return n;
    }
    auto it = fns.find(id);
    if (it == fns.end()) bad("unknown function '" + id + "'");
    size_t want = it->second == f_atan2 ? 2 : 1;
    if (args.size() != want) bad("wrong argument count for " + id);
    auto n = node(ExprNode::call, std::move(args));
    std::const_pointer_cast<ExprNode>(n)->index = it->second;
    return n;
  }

  std::string src_;
  std::vector<std::string> vars_;
  std::map<std::string, double> params_;
  std::shared_ptr<const Profile> f_;
  ExprPtr root_;
  size_t pos_ = 0;
};

inline std::shared_ptr<const Profile> Profile::from_expr(const std::string& src) {
  auto p = std::make_shared<Profile>();
  p->expr_ = std::make_shared<Expr>(src, std::vector<std::string>{"s"});
  return p;
}

template <class T>
T Profile::operator()(const T& s) const {
  if (spline_) {
    auto [v, d] = spline_->eval(value_of(s));
    return lift(s, v, d);
  }
  return (*expr_)(std::vector<T>{s});
}

}  // namespace swcl
