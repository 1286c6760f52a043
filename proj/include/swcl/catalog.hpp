#pragma once
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "chartuple.hpp"
#include "topography.hpp"

// fixture catalog: one or more instances of every classification case, with the
// expected k, dimension and a reference basis of the characteristic space
namespace swcl {

struct Fixture {
  std::string name;
  std::string case_id;  // expected label
  int k = 0;
  int dim = 0;
  std::function<Topography()> make;
  std::vector<CharTuple> basis;  // reference span (sign-corrected)
  bool spline = false;
};

namespace detail {

using QP = QuasiPoly;
inline QP tn(int n, double c = 1) { return QP::mono(n, c); }

inline std::shared_ptr<const Profile> sin_spline() {
  std::vector<double> s, f;
  for (int i = 0; i <= 400; ++i) {
    s.push_back(-8 + 16.0 * i / 400);
    f.push_back(std::sin(s.back()));
  }
  return Profile::from_spline(s, f);
}

inline std::vector<CharTuple> with_trivial(std::vector<CharTuple> extra) {
  extra.insert(extra.begin(), {lam4(1), lam1(1)});
  return extra;
}

inline std::vector<CharTuple> radial_part(char sub) {
  if (sub == 'a') return {lam1(tn(1)), lam1(tn(2))};
  if (sub == 'b') return {lam1(QP::expo(2)), lam1(QP::expo(-2))};
  return {lam1(QP::cosine(2)), lam1(QP::sine(2))};
}

}  // namespace detail

inline std::vector<CharTuple> reference_basis(const std::string& id, const CaseParams& p = {}) {
  using detail::QP;
  using detail::tn;
  using detail::with_trivial;
  const double be = p.beta, de = p.delta;
  if (id == "generic") return with_trivial({});
  if (id == "1") return with_trivial({lam1(tn(1)) - be * lam0()});
  if (id == "2") return with_trivial({lam0() - de * lam4(tn(1))});
  if (id.size() == 2 && id[0] == '3') return with_trivial(detail::radial_part(id[1]));
  if (id == "4") return with_trivial({lam2(1) - de * lam4(tn(1)), lam2(tn(1)) - 0.5 * de * lam4(tn(2))});
  if (id == "5") return with_trivial({lam2(QP::expo(1)), lam2(QP::expo(-1))});
  if (id == "6") return with_trivial({lam2(QP::cosine(1)), lam2(QP::sine(1))});
  if (id.size() == 2 && id[0] == '7') {
    auto v = detail::radial_part(id[1]);
    v.push_back(lam0());
    return with_trivial(v);
  }
  if (id == "8a")
    return with_trivial({lam1(tn(1)) + 1.5 * de * lam2(tn(2)) - 0.5 * de * de * lam4(tn(3)),
                         lam1(tn(2)) + de * lam2(tn(3)) - 0.25 * de * de * lam4(tn(4)),
                         lam2(1) - de * lam4(tn(1)), lam2(tn(1)) - 0.5 * de * lam4(tn(2))});
  if (id == "8b")
    return with_trivial({lam1(QP::expo(2)), lam1(QP::expo(-2)), lam2(QP::expo(1)), lam2(QP::expo(-1))});
  if (id == "8c")
    return with_trivial({lam1(QP::cosine(2)), lam1(QP::sine(2)), lam2(QP::cosine(1)), lam2(QP::sine(1))});
  if (id == "9")
    return with_trivial({lam2(QP::expo(1)), lam2(QP::expo(-1)), lam3(QP::expo(be)), lam3(QP::expo(-be))});
  if (id == "10")
    return with_trivial({lam2(QP::expo(1)), lam2(QP::expo(-1)), lam3(1) - de * lam4(tn(1)),
                         lam3(tn(1)) - 0.5 * de * lam4(tn(2))});
  if (id == "11")
    return with_trivial({lam2(QP::expo(1)), lam2(QP::expo(-1)), lam3(QP::cosine(be)), lam3(QP::sine(be))});
  if (id == "12")
    return with_trivial({lam2(QP::cosine(1)), lam2(QP::sine(1)), lam3(1) - de * lam4(tn(1)),
                         lam3(tn(1)) - 0.5 * de * lam4(tn(2))});
  if (id == "13")
    return with_trivial({lam2(QP::cosine(1)), lam2(QP::sine(1)), lam3(QP::cosine(be)), lam3(QP::sine(be))});
  if (id == "14a")
    return with_trivial({lam1(tn(1)), lam1(tn(2)), lam0(), lam2(1), lam2(tn(1)), lam3(1), lam3(tn(1))});
  if (id == "14b")
    return with_trivial({lam1(tn(1)) + 1.5 * lam2(tn(2)) - 0.5 * lam4(tn(3)),
                         lam1(tn(2)) + lam2(tn(3)) - 0.25 * lam4(tn(4)), lam0() - 0.5 * lam3(tn(2)),
                         lam2(1) - lam4(tn(1)), lam2(tn(1)) - 0.5 * lam4(tn(2)), lam3(1), lam3(tn(1))});
  if (id == "14c")
    return with_trivial({lam1(QP::expo(2)), lam1(QP::expo(-2)), lam0(), lam2(QP::expo(1)), lam2(QP::expo(-1)),
                         lam3(QP::expo(1)), lam3(QP::expo(-1))});
  if (id == "14d")
    return with_trivial({lam1(QP::cosine(2)), lam1(QP::sine(2)), lam0(), lam2(QP::cosine(1)), lam2(QP::sine(1)),
                         lam3(QP::cosine(1)), lam3(QP::sine(1))});
  fail(ErrorKind::parameter, "no reference basis for case '" + id + "'");
}

inline int expected_k(const std::string& id) {
  if (id == "generic") return 0;
  if (id.rfind("14", 0) == 0) return 4;
  if (id[0] >= '7' || (id.size() >= 2 && id[0] == '1' && std::isdigit(static_cast<unsigned char>(id[1])))) return 2;
  return 1;
}

inline std::vector<Fixture> fixture_catalog() {
  std::vector<Fixture> out;
  auto add = [&](std::string name, std::string id, CaseParams p, std::shared_ptr<const Profile> f = nullptr,
                 bool spline = false) {
    Fixture fx;
    fx.name = std::move(name);
    fx.case_id = id;
    fx.k = expected_k(id);
    fx.basis = reference_basis(id, p);
    fx.dim = static_cast<int>(fx.basis.size());
    fx.make = [id, p, f] { return make_case(id, p, f); };
    fx.spline = spline;
    out.push_back(std::move(fx));
  };
  add("generic", "generic", {});
  add("1 beta=1 f=sin", "1", {1, 0, 1});
  add("2 delta=0 f=exp(-s^2)", "2", {1, 0, 1});
  add("2 delta=1 f=s^2", "2", {1, 1, 1}, Profile::from_expr("s^2"));
  for (const char* s : {"3a", "3b", "3c"}) add(std::string(s) + " f=sin", s, {});
  add("3a f=sin spline", "3a", {}, detail::sin_spline(), true);
  add("4 delta=0 f=cos", "4", {1, 0, 1});
  add("4 delta=1 f=cos", "4", {1, 1, 1});
  add("5 f=cos", "5", {});
  add("6 f=cos", "6", {});
  for (const char* s : {"7a", "7b", "7c"})
    for (int e : {1, -1}) add(std::string(s) + " eps=" + std::to_string(e), s, {1, 0, double(e)});
  add("8a delta=0", "8a", {1, 0, 1});
  add("8a delta=1", "8a", {1, 1, 1});
  add("8b", "8b", {1, 0, 1});
  add("8c", "8c", {1, 0, 1});
  add("9 beta=1/2", "9", {0.5, 0, 1});
  add("10 delta=0", "10", {1, 0, 1});
  add("10 delta=1", "10", {1, 1, 1});
  add("11 beta=0.7", "11", {0.7, 0, 1});
  add("12 delta=0", "12", {1, 0, 1});
  add("12 delta=1", "12", {1, 1, 1});
  add("13 beta=1/2", "13", {0.5, 0, 1});
  for (const char* s : {"14a", "14b", "14c", "14d"}) add(s, s, {});
  // f = r^2 in the Case 2 form degenerates to a scaled 14c
  {
    Fixture fx;
    fx.name = "2 delta=0 f=s^2 (degenerate)";
    fx.case_id = "14c";
    fx.k = 4;
    using detail::QP;
    const double a = 2 * std::sqrt(2.0), c = std::sqrt(2.0);
    fx.basis = detail::with_trivial({lam1(QP::expo(a)), lam1(QP::expo(-a)), lam0(), lam2(QP::expo(c)),
                                     lam2(QP::expo(-c)), lam3(QP::expo(c)), lam3(QP::expo(-c))});
    fx.dim = 9;
    fx.make = [] { return make_case("2", {1, 0, 1}, Profile::from_expr("s^2")); };
    out.push_back(std::move(fx));
  }
  return out;
}

}  // namespace swcl
