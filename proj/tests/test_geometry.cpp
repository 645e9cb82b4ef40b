#include <cmath>
#include <functional>
#include <tuple>

#include "doctest.h"
#include "oracles.hpp"
#include "tubecheck/error.hpp"
#include "tubecheck/geometry.hpp"

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

MPoly xv(const TubeBase& b, int j) { return MPoly::variable(b.space, b.space->x(j)); }
MPoly kv(const TubeBase& b, const TowerElement& c) { return MPoly(b.space, c); }

SymMatrix rational_matrix(const std::vector<std::vector<long>>& rows) {
  SymMatrix m;
  for (const auto& r : rows) {
    m.emplace_back();
    for (long v : r) m.back().emplace_back(v);
  }
  return m;
}

// Hessian at the origin read straight off the quadratic coefficients.
SymMatrix origin_hessian_oracle(const TubeBase& b) {
  const int n = b.n();
  SymMatrix H(n, std::vector<TowerElement>(n));
  for (const auto& [e, c] : b.F.terms()) {
    int deg = 0;
    std::vector<int> idx;
    for (int j = 1; j <= n; ++j) {
      for (int r = 0; r < e[b.space->x(j)]; ++r) idx.push_back(j - 1);
      deg += e[b.space->x(j)];
    }
    if (deg != 2) continue;
    if (idx[0] == idx[1]) {
      H[idx[0]][idx[0]] = c * TowerElement(2);
    } else {
      H[idx[0]][idx[1]] = H[idx[1]][idx[0]] = c;
    }
  }
  return H;
}

// Numerical F via long double, for finite-difference Hessians.
long double numeric_F(const TubeBase& b, const std::vector<long double>& x, long double t) {
  long double sum = 0;
  for (const auto& [e, c] : b.F.terms()) {
    long double v = oracle::numeric(c, t);
    for (int j = 1; j <= b.n(); ++j) v *= std::pow(x[j - 1], static_cast<long double>(e[b.space->x(j)]));
    sum += v;
  }
  return sum;
}

SymMatrix congruent(const SymMatrix& A, const SymMatrix& P) {
  const std::size_t n = A.size();
  SymMatrix out(n, std::vector<TowerElement>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t c = 0; c < n; ++c) out[i][j] += P[a][i] * A[a][c] * P[c][j];
      }
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("St family polynomial") {
    auto b = instantiate_family(FamilyTag::St, {6, 0, 0, std::nullopt});
    auto x = [&](int j) { return xv(b, j); };
    MPoly expected = x(1) * x(6) + x(2) * x(5) + x(3) * x(4) + x(4).pow(3) + x(5).pow(3) + x(6).pow(3) +
                     kv(b, TowerElement(RatFunc::t())) * x(4) * x(5) * x(6);
    CHECK(b.F == expected);
  }

  TEST_CASE("family domains") {
    CHECK(code_of([] { instantiate_family(FamilyTag::Pt, {7, 5, 0, Rational(0)}); }) ==
          ErrorCode::ParameterOutOfDomain);
    CHECK(code_of([] { instantiate_family(FamilyTag::Pt, {7, 5, 0, Rational(34)}); }) ==
          ErrorCode::ParameterOutOfDomain);
    CHECK(code_of([] { instantiate_family(FamilyTag::Pt, {7, 6, 0, Rational(2)}); }) ==
          ErrorCode::ParameterOutOfDomain);
    CHECK(code_of([] { instantiate_family(FamilyTag::CalPt, {7, 4, 0, Rational(33)}); }) ==
          ErrorCode::ParameterOutOfDomain);
    CHECK(code_of([] { instantiate_family(FamilyTag::FrakP, {7, 0, 0, Rational(-2)}); }) ==
          ErrorCode::ParameterOutOfDomain);
    CHECK(code_of([] { instantiate_family(FamilyTag::FrakP, {8, 0, 2, Rational(1)}); }) ==
          ErrorCode::ParameterOutOfDomain);
    CHECK_NOTHROW(instantiate_family(FamilyTag::Pt, {7, 5, 0, Rational(33)}));
    CHECK_NOTHROW(instantiate_family(FamilyTag::CalPt, {7, 4, 0, Rational(34)}));
    CHECK(below_pt_bound(make_rational(3397, 100)));
    CHECK_FALSE(below_pt_bound(make_rational(3398, 100)));
  }

  TEST_CASE("FrakP at p = 0, tau = 0 has empty square blocks") {
    auto b = instantiate_family(FamilyTag::FrakP, {7, 0, 0, Rational(0)});
    auto x = [&](int j) { return xv(b, j); };
    auto k = [&](long v) { return kv(b, TowerElement(v)); };
    MPoly expected = k(4) * x(1) * x(7) + k(4) * x(2) * x(6) + k(2) * x(4) * x(4) + k(4) * x(3) * x(5) +
                     k(4) * x(1) * x(1) * x(5) + k(4) * x(2) * x(2) * x(3) + k(8) * x(1) * x(2) * x(4) +
                     k(4) * x(1) * x(1) * x(2) * x(2);
    CHECK(b.F == expected);
    CHECK(b.space->field_parameter() == "tau");
  }

  TEST_CASE("Pt coefficients agree with the printed radicals numerically") {
    const long double t = 3;
    auto b = instantiate_family(FamilyTag::Pt, {7, 5, 0, std::nullopt});
    auto coeff = [&](std::vector<std::pair<int, int>> powers) {
      MPoly::Exponents e(b.space->size(), 0);
      for (auto [j, p] : powers) e[b.space->x(j)] = static_cast<std::int16_t>(p);
      return oracle::numeric(b.F.coefficient(e), t);
    };
    CHECK(coeff({{1, 1}, {4, 1}, {6, 1}}) == doctest::Approx(2 * std::sqrt(2 * (1 + t))));
    CHECK(coeff({{2, 1}, {6, 2}}) == doctest::Approx(2 * std::sqrt(3 * t)));
    CHECK(coeff({{2, 1}, {4, 2}}) == doctest::Approx((1 + t) / std::sqrt(3 * t)));
    CHECK(coeff({{3, 1}, {4, 2}}) == doctest::Approx(std::sqrt((-t * t + 34 * t - 1) / (3 * t))));
    CHECK(coeff({{4, 2}, {6, 2}}) == doctest::Approx(1 + t));
    CHECK(coeff({{6, 4}}) == doctest::Approx(t));
  }

  TEST_CASE("hessian examples") {
    for (int n : {2, 3, 5}) {
      auto b = instantiate_family(FamilyTag::M1, {n, 0, 0, std::nullopt});
      std::vector<Rational> pt(n, make_rational(3, 7));
      auto H = hessian(b, pt);
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          CHECK(H[j][k] == TowerElement(j != k ? 0 : (j == n - 1 ? -2 : 2)));
        }
      }
    }
    auto st = instantiate_family(FamilyTag::St, {6, 0, 0, std::nullopt});
    auto Hs = hessian(st, std::vector<Rational>(6));
    CHECK(Hs == origin_hessian_oracle(st));
    CHECK(Hs[0][5] == TowerElement(1));
    CHECK(Hs[3][3].is_zero());

    auto fp = instantiate_family(FamilyTag::FrakP, {7, 0, 0, Rational(1)});
    auto Hf = hessian(fp, std::vector<Rational>(7));
    CHECK(Hf == origin_hessian_oracle(fp));
    CHECK(Hf[2][2] == TowerElement(-2));
    CHECK(Hf[2][4] == TowerElement(4));
    CHECK_THROWS_AS(hessian(fp, std::vector<Rational>(6)), Error);
  }

  TEST_CASE("hessian agrees with finite differences at random points") {
    oracle::Rng rng(11);
    auto b = instantiate_family(FamilyTag::Pt, {7, 5, 0, Rational(2)});
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<Rational> pt;
      std::vector<long double> x;
      for (int j = 0; j < 7; ++j) {
        pt.push_back(rng.rational(3));
        x.push_back(oracle::to_ld(pt.back()));
      }
      auto H = hessian(b, pt);
      const long double h = 1e-3L;
      for (int j = 0; j < 7; ++j) {
        for (int k = 0; k < 7; ++k) {
          auto at = [&](int sj, int sk) {
            auto y = x;
            y[j] += sj * h;
            y[k] += sk * h;
            return numeric_F(b, y, 2);
          };
          long double fd = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * h * h);
          CHECK(oracle::numeric(H[j][k], 2) == doctest::Approx(fd).epsilon(1e-4));
        }
      }
    }
  }

  TEST_CASE("hessian of a quadratic form is constant") {
    oracle::Rng rng(5);
    auto b = instantiate_family(FamilyTag::QuadricTube, {5, 2, 0, std::nullopt});
    auto H0 = hessian(b, std::vector<Rational>(5));
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<Rational> pt;
      for (int j = 0; j < 5; ++j) pt.push_back(rng.rational());
      CHECK(hessian(b, pt) == H0);
    }
  }

  TEST_CASE("signature examples") {
    auto m1 = instantiate_family(FamilyTag::M1, {6, 0, 0, std::nullopt});
    auto s = signature(hessian(m1, std::vector<Rational>(6)), std::nullopt);
    CHECK(s.positives == 5);
    CHECK(s.negatives == 1);
    CHECK(s.zeros == 0);

    auto st = instantiate_family(FamilyTag::St, {6, 0, 0, std::nullopt});
    s = signature(hessian(st, std::vector<Rational>(6)), std::nullopt);
    CHECK(s.positives == 3);
    CHECK(s.negatives == 3);

    auto fp = instantiate_family(FamilyTag::FrakP, {7, 0, 0, Rational(0)});
    s = signature(hessian(fp, std::vector<Rational>(7)), std::nullopt);
    CHECK(s.positives == 4);
    CHECK(s.negatives == 3);

    s = signature(rational_matrix({{0, 0}, {0, 0}}), std::nullopt);
    CHECK(s.zeros == 2);
    s = signature(rational_matrix({{1, 1}, {1, 1}}), std::nullopt);
    CHECK(s.positives == 1);
    CHECK(s.zeros == 1);
  }

  TEST_CASE("signature with radical entries and parameter values") {
    RadicalBuilder rb;
    auto h = rb.sqrt(RatFunc::t());
    rb.build();
    TowerElement r = rb.root(h);
    // [[sqrt(t) - 2, 1], [1, 1]]: det = sqrt(t) - 3.
    SymMatrix m{{r - TowerElement(2), TowerElement(1)}, {TowerElement(1), TowerElement(1)}};
    CHECK_THROWS_AS(signature(m, std::nullopt), Error);
    auto s = signature(m, Rational(16));
    CHECK((s.positives == 2 && s.negatives == 0));
    s = signature(m, Rational(4));
    CHECK((s.positives == 1 && s.negatives == 1));
    s = signature(m, Rational(9));
    CHECK((s.positives == 1 && s.zeros == 1));
    CHECK(code_of([&] { signature(m, Rational(-1)); }) == ErrorCode::NegativeRadicand);
  }

  TEST_CASE("signature is stable under random congruences") {
    oracle::Rng rng(2024);
    auto fp = instantiate_family(FamilyTag::FrakP, {7, 0, 0, Rational(-3)});
    const SymMatrix base7 = hessian(fp, std::vector<Rational>(7));
    const auto ref7 = signature(base7, std::nullopt);
    for (int rep = 0; rep < 50; ++rep) {
      const int n = rep % 2 ? 7 : 4;
      SymMatrix A;
      if (n == 7) {
        A = base7;
      } else {
        A.assign(n, std::vector<TowerElement>(n));
        for (int j = 0; j < n; ++j) {
          for (int k = j; k < n; ++k) A[j][k] = A[k][j] = TowerElement(rng.range(0, 2) ? rng.rational() : Rational(0));
        }
      }
      SymMatrix P;
      do {
        P.assign(n, std::vector<TowerElement>(n));
        for (auto& row : P) {
          for (auto& e : row) e = TowerElement(rng.range(0, 1) ? rng.rational(4) : Rational(0));
        }
      } while (determinant(P).is_zero());
      const auto a = n == 7 ? ref7 : signature(A, std::nullopt);
      const auto b = signature(congruent(A, P), std::nullopt);
      CHECK(a.positives == b.positives);
      CHECK(a.negatives == b.negatives);
      CHECK(a.zeros == b.zeros);
    }
  }

  TEST_CASE("levi signatures") {
    auto fp = instantiate_family(FamilyTag::FrakP, {7, 0, 0, Rational(-3)});
    auto s = levi_signature(fp, std::vector<Rational>(7), std::nullopt);
    CHECK((s.positives == 5 && s.negatives == 2 && s.zeros == 0));
    auto fp8 = instantiate_family(FamilyTag::FrakP, {8, 0, 1, Rational(1)});
    s = levi_signature(fp8, std::vector<Rational>(8), std::nullopt);
    CHECK((s.positives == 5 && s.negatives == 3 && s.zeros == 0));
    auto st = instantiate_family(FamilyTag::St, {6, 0, 0, std::nullopt});
    for (long t : {-3, 0, 5}) {
      s = levi_signature(st, std::vector<Rational>(6), Rational(t));
      CHECK((s.positives == 3 && s.negatives == 3));
    }
  }

  TEST_CASE("cubic traces of the catalog vanish") {
    for (auto [tag, n, k] : {std::tuple{FamilyTag::St, 6, 0}, {FamilyTag::Pt, 7, 5}, {FamilyTag::CalPt, 7, 4},
                             {FamilyTag::FrakP, 7, 0}, {FamilyTag::M1, 4, 0}}) {
      auto b = instantiate_family(tag, {n, k, 0, std::nullopt});
      for (const auto& v : cubic_trace(b)) CHECK(v.is_zero());
    }
    auto m2 = instantiate_family(FamilyTag::M2, {3, 0, 0, std::nullopt});
    auto v = cubic_trace(m2);
    // A^-1 for x1^2 + x2 x3 is diag(1) + 2*(pairing); C_333 = 1 gives v = 0
    // because (A^-1)_33 = 0.
    CHECK(v[2].is_zero());
  }

  TEST_CASE("cubic trace counterexample and degeneracy") {
    auto space = VariableSpace::tube(2);
    auto x1 = MPoly::variable(space, "x1"), x2 = MPoly::variable(space, "x2");
    auto b = custom_base(space, x1 * x1 + x2 * x2 + x1.pow(3) + x2.pow(3));
    auto v = cubic_trace(b);
    CHECK(v[0] == TowerElement(1));
    CHECK(v[1] == TowerElement(1));
    auto d = custom_base(space, x1 * x1 + x2.pow(3));
    CHECK(code_of([&] { cubic_trace(d); }) == ErrorCode::DegenerateQuadraticPart);
  }

  TEST_CASE("cubic trace is equivariant under linear changes") {
    oracle::Rng rng(99);
    auto space = VariableSpace::tube(3);
    std::vector<MPoly> x;
    for (int j = 1; j <= 3; ++j) x.push_back(MPoly::variable(space, space->x(j)));
    for (int rep = 0; rep < 10; ++rep) {
      MPoly F = x[0] * x[0] - x[1] * x[1] + x[1] * x[2] + MPoly(space, TowerElement(2)) * x[2] * x[2];
      for (int a = 0; a < 3; ++a) {
        for (int b = a; b < 3; ++b) {
          for (int c = b; c < 3; ++c) F += MPoly(space, TowerElement(rng.rational())) * x[a] * x[b] * x[c];
        }
      }
      SymMatrix C;
      do {
        C.assign(3, std::vector<TowerElement>(3));
        for (auto& row : C) {
          for (auto& e : row) e = TowerElement(rng.rational(3));
        }
      } while (determinant(C).is_zero());
      Bindings sub;
      for (int i = 0; i < 3; ++i) {
        MPoly img(space);
        for (int j = 0; j < 3; ++j) img += MPoly(space, C[i][j]) * x[j];
        sub.emplace(space->x(i + 1), img);
      }
      auto v = cubic_trace(custom_base(space, F));
      auto w = cubic_trace(custom_base(space, mpoly_substitute(F, sub)));
      for (int i = 0; i < 3; ++i) {
        TowerElement expect;
        for (int a = 0; a < 3; ++a) expect += C[a][i] * v[a];
        CHECK(w[i] == expect);
      }
    }
  }

  TEST_CASE("catalog bases vanish at the origin with nondegenerate quadratic parts") {
    std::vector<std::pair<FamilyTag, FamilyParams>> cases{
        {FamilyTag::M1, {4, 0, 0, std::nullopt}},    {FamilyTag::M2, {4, 0, 0, std::nullopt}},
        {FamilyTag::QuadricTube, {5, 3, 0, std::nullopt}}, {FamilyTag::Pt, {8, 6, 0, std::nullopt}},
        {FamilyTag::CalPt, {8, 4, 0, std::nullopt}}, {FamilyTag::FrakP, {9, 0, 1, std::nullopt}},
        {FamilyTag::St, {6, 0, 0, std::nullopt}}};
    for (const auto& [tag, params] : cases) {
      auto b = instantiate_family(tag, params);
      CHECK(b.F.constant_term().is_zero());
      CHECK_FALSE(determinant(quadratic_matrix(b)).is_zero());
    }
  }

  TEST_CASE("hermitian quadrics") {
    auto q = HermitianQuadric::primed33();
    CHECK(q.H[0][5] == TowerElement(make_rational(1, 4)));
    CHECK(determinant(q.H) == TowerElement(make_rational(-1, 4096)));
    auto s = HermitianQuadric::standard(2, 3);
    CHECK(determinant(s.H) == TowerElement(-1));
    CHECK(code_of([] { HermitianQuadric::from_matrix(rational_matrix({{1, 1}, {1, 1}})); }) ==
          ErrorCode::SingularMatrix);
    CHECK(code_of([] { HermitianQuadric::from_matrix(rational_matrix({{1, 2}, {1, 1}})); }) ==
          ErrorCode::PreconditionViolated);
  }
}
