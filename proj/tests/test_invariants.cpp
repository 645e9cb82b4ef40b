#include <algorithm>
#include <functional>

#include "doctest.h"
#include "oracles.hpp"
#include "tubecheck/error.hpp"
#include "tubecheck/invariants.hpp"

using namespace tubecheck;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::PreconditionViolated;
}

TowerElement q(long n, long d = 1) { return TowerElement(make_rational(n, d)); }

BinaryQuartic quartic(std::array<Rational, 5> c) {
  BinaryQuartic f;
  for (int k = 0; k < 5; ++k) f.p[k] = TowerElement(c[k]);
  return f;
}

// Substitutes xi -> a xi + b eta, eta -> c xi + d eta by expanding in MPoly.
BinaryQuartic substitute(const BinaryQuartic& f, const Rational& a, const Rational& b, const Rational& c,
                         const Rational& d) {
  auto space = VariableSpace::make({{"xi"}, {"eta"}});
  MPoly xi = MPoly::variable(space, 0), eta = MPoly::variable(space, 1);
  auto k = [&](const Rational& v) { return MPoly(space, TowerElement(v)); };
  MPoly X = k(a) * xi + k(b) * eta, Y = k(c) * xi + k(d) * eta;
  MPoly g(space);
  for (int e = 0; e <= 4; ++e) g += MPoly(space, f.p[4 - e]) * X.pow(e) * Y.pow(4 - e);
  BinaryQuartic out;
  for (int e = 0; e <= 4; ++e) {
    out.p[4 - e] = g.coefficient({static_cast<std::int16_t>(e), static_cast<std::int16_t>(4 - e)});
  }
  return out;
}

ProjectivePoint affine(const TowerElement& x) { return {x, TowerElement(1)}; }

}  // namespace

TEST_SUITE("invariants") {
  TEST_CASE("quartic invariant examples") {
    auto inv = quartic_invariants(q_t(RatFunc(1)));
    CHECK(inv.I == q(4, 3));
    CHECK(inv.J == q(8, 27));
    CHECK(inv.disc.is_zero());
    CHECK(quartic_invariants(quartic({1, 0, 1, 0, 0})).disc.is_zero());

    const RatFunc t = RatFunc::t();
    auto sym = quartic_invariants(q_t(t));
    CHECK(sym.I == TowerElement(t + (RatFunc(1) + t).pow(2) / RatFunc(12)));
    CHECK(sym.J == TowerElement((RatFunc(1) + t) * t / RatFunc(6) - (RatFunc(1) + t).pow(3) / RatFunc(216)));
  }

  TEST_CASE("discriminant vanishes exactly when q_t has a repeated root") {
    for (long n = 0; n <= 40; ++n) {
      const Rational t = make_rational(n, 4);
      auto roots = quartic_root_lines(t);
      bool repeated = false;
      for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = a + 1; b < 4; ++b) repeated = repeated || roots[a].xi == roots[b].xi;
      }
      CHECK(quartic_invariants(q_t(RatFunc(t))).disc.is_zero() == repeated);
    }
  }

  TEST_CASE("I and J are covariant under GL2 substitutions") {
    oracle::Rng rng(77);
    for (int rep = 0; rep < 30; ++rep) {
      auto f = quartic({rng.rational(), rng.rational(), rng.rational(), rng.rational(), rng.rational()});
      Rational a, b, c, d, det;
      do {
        a = rng.rational(5), b = rng.rational(5), c = rng.rational(5), d = rng.rational(5);
        det = a * d - b * c;
      } while (det == 0);
      auto u = quartic_invariants(f);
      auto v = quartic_invariants(substitute(f, a, b, c, d));
      const TowerElement D(det);
      CHECK(v.I == D.pow(4) * u.I);
      CHECK(v.J == D.pow(6) * u.J);
      CHECK(v.I.pow(3) * u.J * u.J == u.I.pow(3) * v.J * v.J);
    }
  }

  TEST_CASE("gl2r separation") {
    auto s = gl2r_separate(Rational(1), Rational(2));
    CHECK(s.verdict == Verdict::NonEquivalent);
    CHECK(s.witness.find("disc") != std::string::npos);
    CHECK(gl2r_separate(Rational(5), Rational(5)).verdict == Verdict::Inconclusive);
    s = gl2r_separate(Rational(2), Rational(3));
    CHECK(s.verdict == Verdict::NonEquivalent);
    CHECK(s.witness.find("I^3/J^2") != std::string::npos);
    CHECK_THROWS_AS(gl2r_separate(Rational(2), Rational(34)), Error);

    // Absolute invariants from the closed forms, evaluated directly.
    auto absolute = [](const Rational& t) {
      Rational I = t + (1 + t) * (1 + t) / 12;
      Rational J = (1 + t) * t / 6 - (1 + t) * (1 + t) * (1 + t) / 216;
      return Rational(I * I * I / (J * J));
    };
    CHECK(absolute(2) != absolute(3));
  }

  TEST_CASE("quartic root lines") {
    auto spec = TowerSpec::make({}, true);
    const TowerElement i = TowerElement::imaginary_unit(spec);
    auto r4 = quartic_root_lines(Rational(4));
    CHECK(r4[0].xi == i);
    CHECK(r4[1].xi == -i);
    CHECK(r4[2].xi == q(2) * i);
    CHECK(r4[3].xi == q(-2) * i);
    auto r1 = quartic_root_lines(Rational(1));
    CHECK(r1[0].xi == r1[2].xi);
    CHECK(r1[1].xi == r1[3].xi);
    for (const auto& p : quartic_root_lines(Rational(2))) {
      CHECK((p.xi.pow(4) + q(3) * p.xi * p.xi + q(2)).is_zero());
    }
    CHECK(code_of([] { quartic_root_lines(Rational(-1)); }) == ErrorCode::NegativeParameter);
  }

  TEST_CASE("cross-ratio j") {
    const ProjectivePoint inf{TowerElement(1), TowerElement(0)};
    std::array<ProjectivePoint, 4> harmonic{affine(q(0)), inf, affine(q(1)), affine(q(-1))};
    CHECK(cross_ratio_j(harmonic) == q(1728));

    std::array<int, 4> perm{0, 1, 2, 3};
    std::array<ProjectivePoint, 4> pts{affine(q(0)), affine(q(1)), affine(q(3)), affine(q(-5, 2))};
    const TowerElement ref = cross_ratio_j(pts);
    int count = 0;
    do {
      std::array<ProjectivePoint, 4> p{pts[perm[0]], pts[perm[1]], pts[perm[2]], pts[perm[3]]};
      CHECK(cross_ratio_j(p) == ref);
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(count == 24);

    // 1, omega, omega^2 and infinity are equianharmonic.
    RadicalBuilder rb;
    auto h = rb.sqrt(RatFunc(-3));
    rb.build();
    const TowerElement w = (q(-1) + rb.root(h)) * q(1, 2);
    std::array<ProjectivePoint, 4> equi{affine(q(1)), affine(w), affine(w * w), inf};
    CHECK(cross_ratio_j(equi).is_zero());

    auto roots = quartic_root_lines(Rational(4));
    std::array<ProjectivePoint, 4> a{roots[0], roots[1], roots[2], roots[3]};
    std::array<ProjectivePoint, 4> b{roots[2], roots[0], roots[3], roots[1]};
    CHECK(cross_ratio_j(a) == cross_ratio_j(b));

    std::array<ProjectivePoint, 4> bad{affine(q(0)), affine(q(1)), affine(q(1)), inf};
    CHECK(code_of([&] { cross_ratio_j(bad); }) == ErrorCode::CoincidentPoints);
  }

  TEST_CASE("singular locus of c_t") {
    auto space = VariableSpace::make({{"u1"}, {"u2"}, {"u3"}});
    MPoly u1 = MPoly::variable(space, 0), u2 = MPoly::variable(space, 1), u3 = MPoly::variable(space, 2);
    MPoly c = u1.pow(3) + u2.pow(3) + u3.pow(3) + MPoly(space, q(-3)) * u1 * u2 * u3;

    auto locus = cubic_singular_locus(Rational(-3));
    REQUIRE(locus.size() == 3);
    bool has_111 = false;
    for (const auto& p : locus) {
      has_111 = has_111 || (p.u1 == q(1) && p.u2 == q(1) && p.u3 == q(1));
      Bindings at{{0, MPoly(space, p.u1)}, {1, MPoly(space, p.u2)}, {2, MPoly(space, p.u3)}};
      CHECK(mpoly_substitute(c, at).is_zero());
      for (std::size_t v = 0; v < 3; ++v) CHECK(mpoly_substitute(c.derivative(v), at).is_zero());
    }
    CHECK(has_111);

    for (long t : {0, 1, 2}) {
      CHECK(cubic_singular_locus(Rational(t)).empty());
      // No singular point on a small integer grid either.
      for (long a = -3; a <= 3; ++a) {
        for (long b = -3; b <= 3; ++b) {
          for (long d = -3; d <= 3; ++d) {
            if (a == 0 && b == 0 && d == 0) continue;
            auto g = cubic_value_and_gradient(q(t), {q(a), q(b), q(d)});
            CHECK_FALSE((g[0].is_zero() && g[1].is_zero() && g[2].is_zero() && g[3].is_zero()));
          }
        }
      }
    }
  }

  TEST_CASE("Weierstrass reduction") {
    auto sym = weierstrass_reduce(std::nullopt);
    CHECK(sym.scale == q(1, 3));
    CHECK(sym.model.C.pow(3) == TowerElement(-(RatFunc::t().pow(3) + RatFunc(27)) / RatFunc(81)));

    auto zero = weierstrass_reduce(Rational(0));
    CHECK(zero.model.a1.is_zero());
    CHECK(zero.model.a2.is_zero());
    CHECK(zero.model.a3 == q(1));
    CHECK(zero.model.a4.is_zero());
    CHECK(zero.model.a6 == q(-1, 3));
    CHECK(code_of([] { weierstrass_reduce(Rational(-3)); }) == ErrorCode::SingularCubic);
    for (long t : {1, 2, 6, -1}) CHECK_NOTHROW(weierstrass_reduce(Rational(t)));
  }

  TEST_CASE("Tate invariants of the c_t model") {
    auto w = weierstrass_reduce(std::nullopt);
    auto tate = tate_invariants(w.model);
    const TowerElement t(RatFunc::t());
    const TowerElement C = w.model.C;
    CHECK(tate.c4 == t * (q(9) * C.pow(4)).inv() * (t.pow(3) + q(72) * C.pow(3)));
    CHECK(tate.delta == C.pow(3).inv());
    CHECK(q(1728) * tate.delta == tate.c4.pow(3) - tate.c6 * tate.c6);
    REQUIRE(tate.j.in_base_field());
    const RatFunc t3 = RatFunc::t().pow(3);
    CHECK(tate.j.base_value() == -t3 * (t3 - RatFunc(216)).pow(3) / (t3 + RatFunc(27)).pow(3));

    WeierstrassModel bad;
    bad.a1 = bad.a2 = bad.a3 = bad.a4 = bad.a6 = q(0);
    CHECK(code_of([&] { tate_invariants(bad); }) == ErrorCode::SingularModel);
  }

  TEST_CASE("j of c_t") {
    CHECK(j_of_ct(Rational(0)).is_zero());
    CHECK(j_of_ct(Rational(6)).is_zero());
    CHECK(j_of_ct(Rational(1)) == RatFunc(make_rational(9938375, 21952)));
    CHECK(code_of([] { j_of_ct(Rational(-3)); }) == ErrorCode::SingularCubic);
    CHECK_NOTHROW(j_of_ct(std::nullopt));
    for (long t : {1, 2, 5}) {
      auto tate = tate_invariants(weierstrass_reduce(Rational(t)).model);
      CHECK(tate.j == TowerElement(j_of_ct(Rational(t))));
    }
  }

  TEST_CASE("Phi") {
    CHECK(phi(Rational(0)) == 0);
    CHECK(phi_derivative_at_zero() == 512);
    // Difference quotient oracle.
    const Rational h = make_rational(1, 1000000);
    const Rational dq = (phi(h) - phi(Rational(0))) / h;
    CHECK(std::abs(dq.get_d() - 512.0) < 0.01);
    auto scan = phi_monotone_scan(Rational(-1), Rational(1), 1000);
    CHECK(scan.increasing);
    CHECK(scan.samples == 1000);
    CHECK_FALSE(phi_monotone_scan(Rational(0), Rational(300), 50).increasing);
    CHECK(code_of([] { phi(Rational(-27)); }) == ErrorCode::PoleAt);
    CHECK(code_of([] { phi_monotone_scan(Rational(-30), Rational(0), 10); }) == ErrorCode::PoleAt);
    for (long t : {1, 2, -4}) {
      CHECK(RatFunc(phi(Rational(t * t * t))) == j_of_ct(Rational(t)));
    }
  }

  TEST_CASE("j reciprocity evaluates to 1728 squared") {
    CHECK(phi_reciprocity_product() == RatFunc(Rational(2985984)));
    for (long t : {1, 2, 5, -1}) {
      CHECK(reciprocity_product(Rational(t)) == 2985984);
      CHECK_FALSE(reciprocity_check(Rational(t)));
      CHECK(reciprocity_check_normalized(Rational(t)));
    }
    for (long t : {0, 6, -3}) {
      CHECK(code_of([t] { reciprocity_check(Rational(t)); }) == ErrorCode::ExcludedParameter);
    }
  }

  TEST_CASE("chi") {
    CHECK(chi(Rational(1)) == q(-6));
    CHECK(chi(Rational(4)) == q(-24, 5));
    RadicalBuilder rb;
    auto h = rb.sqrt(RatFunc(2));
    rb.build();
    const TowerElement r2 = rb.root(h);
    CHECK(chi_with_root(q(17) + q(12) * r2, q(3) + q(2) * r2) == q(-2));
    CHECK(code_of([] { chi(make_rational(1, 2)); }) == ErrorCode::OutOfRange);

    TowerElement prev = chi(Rational(1));
    for (long k = 1; k < 100; ++k) {
      const Rational t = 1 + make_rational(49 * k, 99);
      TowerElement v = chi(t);
      auto joint = TowerSpec::join(v.spec(), prev.spec());
      CHECK((v.embed(joint) - prev.embed(joint)).eval_real(Rational(0)).sign == Sign::Positive);
      CHECK(oracle::numeric(v, 0) == doctest::Approx(-12 * std::sqrt(t.get_d()) / (t.get_d() + 1)));
      prev = v;
    }
  }

  TEST_CASE("chi_inverse") {
    auto one = chi_inverse(Rational(-6), ChiBranch::Lower);
    CHECK(one.t == q(1));
    for (long k = 0; k < 24; ++k) {
      const Rational tau = -6 + make_rational(k, 4);
      if (tau == -2) continue;
      for (auto branch : {ChiBranch::Lower, ChiBranch::Upper}) {
        auto pre = chi_inverse(tau, branch);
        CHECK(chi_with_root(pre.t, pre.root) == TowerElement(tau));
        const Sign side = (pre.t - q(1)).eval_real(Rational(0)).sign;
        CHECK(side != (branch == ChiBranch::Upper ? Sign::Negative : Sign::Positive));
      }
      auto up = chi_inverse(tau, ChiBranch::Upper), lo = chi_inverse(tau, ChiBranch::Lower);
      CHECK(up.t * lo.t == q(1));
    }
    CHECK(code_of([] { chi_inverse(Rational(-2), ChiBranch::Upper); }) == ErrorCode::OutOfRange);
    CHECK(code_of([] { chi_inverse(Rational(-7), ChiBranch::Upper); }) == ErrorCode::OutOfRange);
    CHECK(code_of([] { chi_inverse(Rational(0), ChiBranch::Upper); }) == ErrorCode::OutOfRange);
  }
}
