#pragma once
#include <array>
#include <cmath>

// forward-mode dual numbers with N seed directions
namespace swcl {

template <int N>
struct Dual {
  double v = 0;
  std::array<double, N> d{};

  Dual() = default;
  Dual(double x) : v(x) {}  // NOLINT: constants promote implicitly
  static Dual var(double x, int i) {
    Dual r(x);
    r.d[i] = 1;
    return r;
  }
  // value plus chain rule through a scalar function with derivative fp
  Dual chain(double fv, double fp) const {
    Dual r(fv);
    for (int i = 0; i < N; ++i) r.d[i] = fp * d[i];
    return r;
  }
  Dual& operator+=(const Dual& o) { v += o.v; for (int i = 0; i < N; ++i) d[i] += o.d[i]; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; for (int i = 0; i < N; ++i) d[i] -= o.d[i]; return *this; }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    double inv = 1.0 / o.v;
    for (int i = 0; i < N; ++i) d[i] = (d[i] - v * inv * o.d[i]) * inv;
    v *= inv;
    return *this;
  }
};

template <int N> Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <int N> Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <int N> Dual<N> operator*(Dual<N> a, const Dual<N>& b) { return a *= b; }
template <int N> Dual<N> operator/(Dual<N> a, const Dual<N>& b) { return a /= b; }
template <int N> Dual<N> operator+(Dual<N> a, double b) { a.v += b; return a; }
template <int N> Dual<N> operator+(double b, Dual<N> a) { a.v += b; return a; }
template <int N> Dual<N> operator-(Dual<N> a, double b) { a.v -= b; return a; }
template <int N> Dual<N> operator-(double b, const Dual<N>& a) { return Dual<N>(b) - a; }
template <int N> Dual<N> operator*(Dual<N> a, double b) { a.v *= b; for (auto& x : a.d) x *= b; return a; }
template <int N> Dual<N> operator*(double b, Dual<N> a) { return a * b; }
template <int N> Dual<N> operator/(Dual<N> a, double b) { return a * (1.0 / b); }
template <int N> Dual<N> operator/(double b, const Dual<N>& a) { return Dual<N>(b) / a; }
template <int N> Dual<N> operator-(Dual<N> a) { a.v = -a.v; for (auto& x : a.d) x = -x; return a; }

template <int N> Dual<N> sin(const Dual<N>& a) { return a.chain(std::sin(a.v), std::cos(a.v)); }
template <int N> Dual<N> cos(const Dual<N>& a) { return a.chain(std::cos(a.v), -std::sin(a.v)); }
template <int N> Dual<N> tan(const Dual<N>& a) { double c = std::cos(a.v); return a.chain(std::tan(a.v), 1 / (c * c)); }
template <int N> Dual<N> exp(const Dual<N>& a) { double e = std::exp(a.v); return a.chain(e, e); }
template <int N> Dual<N> log(const Dual<N>& a) { return a.chain(std::log(a.v), 1 / a.v); }
template <int N> Dual<N> sqrt(const Dual<N>& a) { double s = std::sqrt(a.v); return a.chain(s, 0.5 / s); }
template <int N> Dual<N> abs(const Dual<N>& a) { return a.v < 0 ? -a : a; }
template <int N> Dual<N> atan(const Dual<N>& a) { return a.chain(std::atan(a.v), 1 / (1 + a.v * a.v)); }
template <int N> Dual<N> sinh(const Dual<N>& a) { return a.chain(std::sinh(a.v), std::cosh(a.v)); }
template <int N> Dual<N> cosh(const Dual<N>& a) { return a.chain(std::cosh(a.v), std::sinh(a.v)); }
template <int N> Dual<N> tanh(const Dual<N>& a) { double t = std::tanh(a.v); return a.chain(t, 1 - t * t); }
template <int N> Dual<N> atan2(const Dual<N>& y, const Dual<N>& x) {
  double r2 = x.v * x.v + y.v * y.v;
  Dual<N> r(std::atan2(y.v, x.v));
  for (int i = 0; i < N; ++i) r.d[i] = (x.v * y.d[i] - y.v * x.d[i]) / r2;
  return r;
}
template <int N> Dual<N> pow(const Dual<N>& a, double p) {
  return a.chain(std::pow(a.v, p), p * std::pow(a.v, p - 1));
}

inline double value_of(double x) { return x; }
template <int N> double value_of(const Dual<N>& x) { return x.v; }

// lift a scalar function known by value and derivative at value_of(arg)
inline double lift(double, double fv, double) { return fv; }
template <int N> Dual<N> lift(const Dual<N>& a, double fv, double fp) { return a.chain(fv, fp); }

}  // namespace swcl
