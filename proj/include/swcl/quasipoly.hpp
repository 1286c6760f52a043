#pragma once
#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include "dual.hpp"

namespace swcl {

// one term t^deg e^{rate t} (c cos(freq t) + s sin(freq t))
struct QpTerm {
  double rate = 0;
  double freq = 0;
  int deg = 0;
  double c = 0;
  double s = 0;
};

class QuasiPoly {
 public:
  static constexpr double key_tol = 1e-12;

  QuasiPoly() = default;
  QuasiPoly(double a) {  // NOLINT: constants are quasi-polynomials
    if (a != 0) terms_.push_back({0, 0, 0, a, 0});
  }
  explicit QuasiPoly(std::vector<QpTerm> ts) : terms_(std::move(ts)) { normalize(); }

  static QuasiPoly term(int deg, double rate, double freq, double c, double s) {
    return QuasiPoly(std::vector<QpTerm>{{rate, freq, deg, c, s}});
  }
  static QuasiPoly mono(int deg, double coef = 1) { return term(deg, 0, 0, coef, 0); }
  static QuasiPoly expo(double rate, double coef = 1) { return term(0, rate, 0, coef, 0); }
  static QuasiPoly cosine(double freq, double coef = 1) { return term(0, 0, freq, coef, 0); }
  static QuasiPoly sine(double freq, double coef = 1) { return term(0, 0, freq, 0, coef); }

  const std::vector<QpTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  double operator()(double t) const {
    double acc = 0;
    for (const auto& q : terms_) acc += eval_term(q, t);
    return acc;
  }
  // generic evaluation: dual arguments pick up the first derivative
  template <class T>
  T at(const T& t) const {
    double tv = value_of(t);
    return lift(t, (*this)(tv), derivative()(tv));
  }

  QuasiPoly derivative() const {
    std::vector<QpTerm> out;
    out.reserve(2 * terms_.size());
    for (const auto& q : terms_) {
      if (q.deg > 0) out.push_back({q.rate, q.freq, q.deg - 1, q.deg * q.c, q.deg * q.s});
      out.push_back({q.rate, q.freq, q.deg, q.rate * q.c + q.freq * q.s, q.rate * q.s - q.freq * q.c});
    }
    return QuasiPoly(std::move(out));
  }
  QuasiPoly derivative(int order) const {
    QuasiPoly r = *this;
    for (int i = 0; i < order; ++i) r = r.derivative();
    return r;
  }

  // P with P' = *this; no constant term is added
  QuasiPoly antiderivative() const {
    std::vector<QpTerm> out;
    for (const auto& q : terms_) {
      if (q.rate == 0 && q.freq == 0) {
        out.push_back({0, 0, q.deg + 1, q.c / (q.deg + 1), 0});
        continue;
      }
      // term = Re(C t^n e^{zt}), C = c - i s
      std::complex<double> z(q.rate, q.freq), C(q.c, -q.s);
      double fact = 1;  // n!/(n-k)!
      std::complex<double> zp = z;
      for (int k = 0; k <= q.deg; ++k) {
        std::complex<double> D = C * ((k % 2 ? -1.0 : 1.0) * fact) / zp;
        out.push_back({q.rate, q.freq, q.deg - k, D.real(), -D.imag()});
        fact *= (q.deg - k);
        zp *= z;
      }
    }
    return QuasiPoly(std::move(out));
  }

  friend QuasiPoly operator+(const QuasiPoly& a, const QuasiPoly& b) {
    std::vector<QpTerm> ts = a.terms_;
    ts.insert(ts.end(), b.terms_.begin(), b.terms_.end());
    return QuasiPoly(std::move(ts));
  }
  friend QuasiPoly operator-(const QuasiPoly& a) {
    QuasiPoly r = a;
    for (auto& q : r.terms_) q.c = -q.c, q.s = -q.s;
    return r;
  }
  friend QuasiPoly operator-(const QuasiPoly& a, const QuasiPoly& b) { return a + (-b); }
  friend QuasiPoly operator*(double k, const QuasiPoly& a) {
    if (k == 0) return {};
    QuasiPoly r = a;
    for (auto& q : r.terms_) q.c *= k, q.s *= k;
    return r;
  }
  friend QuasiPoly operator*(const QuasiPoly& a, double k) { return k * a; }
  friend QuasiPoly operator*(const QuasiPoly& a, const QuasiPoly& b) {
    std::vector<QpTerm> out;
    for (const auto& p : a.terms_)
      for (const auto& q : b.terms_) {
        double rate = p.rate + q.rate;
        int deg = p.deg + q.deg;
        double cc = p.c * q.c, ss = p.s * q.s, sc = p.s * q.c, cs = p.c * q.s;
        out.push_back({rate, p.freq + q.freq, deg, 0.5 * (cc - ss), 0.5 * (sc + cs)});
        double fm = p.freq - q.freq, sm = 0.5 * (sc - cs);
        if (fm < 0) fm = -fm, sm = -sm;
        out.push_back({rate, fm, deg, 0.5 * (cc + ss), sm});
      }
    return QuasiPoly(std::move(out));
  }
  QuasiPoly& operator+=(const QuasiPoly& o) { return *this = *this + o; }
  QuasiPoly& operator-=(const QuasiPoly& o) { return *this = *this - o; }

  // structural equality; coefficients compared relative to the larger magnitude
  bool approx_equal(const QuasiPoly& o, double tol = 1e-12) const {
    QuasiPoly d = *this - o;
    double scale = std::max({1.0, max_coef(), o.max_coef()});
    return d.max_coef() <= tol * scale;
  }
  friend bool operator==(const QuasiPoly& a, const QuasiPoly& b) { return a.approx_equal(b); }

  double max_coef() const {
    double m = 0;
    for (const auto& q : terms_) m = std::max({m, std::abs(q.c), std::abs(q.s)});
    return m;
  }
  // drop terms whose coefficients are below tol relative to the largest
  QuasiPoly pruned(double rel_tol) const {
    double cut = rel_tol * max_coef();
    std::vector<QpTerm> out;
    for (auto q : terms_) {
      if (std::abs(q.c) <= cut) q.c = 0;
      if (std::abs(q.s) <= cut) q.s = 0;
      out.push_back(q);
    }
    return QuasiPoly(std::move(out));
  }
  // the constant (0,0,0) coefficient
  double constant_part() const {
    for (const auto& q : terms_)
      if (q.rate == 0 && q.freq == 0 && q.deg == 0) return q.c;
    return 0;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(6);
    bool first = true;
    for (const auto& q : terms_) {
      auto piece = [&](double coef, const char* trig) {
        if (coef == 0) return;
        os << (first ? (coef < 0 ? "-" : "") : (coef < 0 ? " - " : " + ")) << std::abs(coef);
        first = false;
        if (q.deg == 1) os << "*t";
        if (q.deg > 1) os << "*t^" << q.deg;
        if (q.rate != 0) os << "*exp(" << q.rate << "t)";
        if (q.freq != 0) os << "*" << trig << "(" << q.freq << "t)";
      };
      piece(q.c, "cos");
      piece(q.s, "sin");
    }
    return os.str();
  }

 private:
  static double eval_term(const QpTerm& q, double t) {
    double v = q.c;
    if (q.freq != 0) v = q.c * std::cos(q.freq * t) + q.s * std::sin(q.freq * t);
    if (q.rate != 0) v *= std::exp(q.rate * t);
    if (q.deg > 0) v *= std::pow(t, q.deg);
    return v;
  }
  static bool same_key(const QpTerm& a, const QpTerm& b) {
    return a.deg == b.deg && std::abs(a.rate - b.rate) < key_tol && std::abs(a.freq - b.freq) < key_tol;
  }

  void normalize() {
    std::vector<QpTerm> merged;
    for (auto q : terms_) {
      if (std::abs(q.rate) < key_tol) q.rate = 0;
      if (std::abs(q.freq) < key_tol) q.freq = 0, q.s = 0;
      if (q.freq < 0) q.freq = -q.freq, q.s = -q.s;
      auto it = std::find_if(merged.begin(), merged.end(), [&](const QpTerm& m) { return same_key(m, q); });
      if (it == merged.end()) {
        merged.push_back(q);
      } else {
        it->c += q.c;
        it->s += q.s;
      }
    }
    std::erase_if(merged, [](const QpTerm& q) { return q.c == 0 && q.s == 0; });
    std::sort(merged.begin(), merged.end(), [](const QpTerm& a, const QpTerm& b) {
      if (a.rate != b.rate) return a.rate < b.rate;
      if (a.freq != b.freq) return a.freq < b.freq;
      return a.deg < b.deg;
    });
    terms_ = std::move(merged);
  }

  std::vector<QpTerm> terms_;
};

}  // namespace swcl
