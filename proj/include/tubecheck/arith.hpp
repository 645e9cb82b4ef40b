#pragma once

// Exact base arithmetic: arbitrary-precision rationals, univariate
// polynomials over Q and the rational function field Q(t).

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace tubecheck {

using Integer = mpz_class;
// mpq_class keeps numerator/denominator coprime with a positive denominator
// once canonicalized; every Rational produced by this library is canonical.
using Rational = mpq_class;

Rational make_rational(long num, long den = 1);
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);
int sign(const Rational& q);

// n = root^k * core where core has no k-th power factor found by trial
// division (bound 10^4) or by an exact perfect-power test on the cofactor.
// For k = 2 the input must be non-negative; for k = 3 the sign stays in core.
struct PowerSplit {
  Integer root;
  Integer core;
};
PowerSplit split_power(const Integer& n, unsigned k);

bool is_rational_square(const Rational& q);
bool is_rational_cube(const Rational& q);

// Dense univariate polynomial in t with rational coefficients, index = degree.
class UniPoly {
 public:
  UniPoly() = default;
  UniPoly(const Rational& c);  // NOLINT: constants convert implicitly
  UniPoly(long c) : UniPoly(Rational(c)) {}  // NOLINT
  UniPoly(std::initializer_list<Rational> coeffs);
  explicit UniPoly(std::vector<Rational> coeffs);

  static UniPoly monomial(const Rational& c, std::size_t degree);
  static UniPoly t() { return monomial(1, 1); }

  bool is_zero() const noexcept { return c_.empty(); }
  bool is_constant() const noexcept { return c_.size() <= 1; }
  bool is_one() const;
  // -1 for the zero polynomial.
  long degree() const noexcept { return static_cast<long>(c_.size()) - 1; }
  const Rational& lead() const;
  Rational coeff(std::size_t i) const;
  const std::vector<Rational>& coeffs() const noexcept { return c_; }

  UniPoly operator-() const;
  UniPoly& operator+=(const UniPoly& o);
  UniPoly& operator-=(const UniPoly& o);
  UniPoly& operator*=(const UniPoly& o);
  UniPoly& operator*=(const Rational& s);

  friend UniPoly operator+(UniPoly a, const UniPoly& b) { return a += b; }
  friend UniPoly operator-(UniPoly a, const UniPoly& b) { return a -= b; }
  friend UniPoly operator*(const UniPoly& a, const UniPoly& b);
  friend UniPoly operator*(UniPoly a, const Rational& s) { return a *= s; }
  friend bool operator==(const UniPoly& a, const UniPoly& b) { return a.c_ == b.c_; }

  UniPoly pow(unsigned e) const;
  UniPoly derivative() const;
  UniPoly monic() const;
  Rational eval(const Rational& x) const;
  UniPoly compose(const UniPoly& inner) const;

  // lcm of denominators times gcd-free numerators: p = content * primitive
  // with primitive integral, gcd of coefficients 1 and positive leading term.
  std::pair<Rational, std::vector<Integer>> content_primitive() const;

  std::string to_string(const std::string& var = "t") const;

 private:
  void trim();
  std::vector<Rational> c_;
};

std::pair<UniPoly, UniPoly> divmod(const UniPoly& a, const UniPoly& b);
UniPoly exact_div(const UniPoly& a, const UniPoly& b);
// Monic gcd (zero when both are zero), computed by the primitive
// pseudo-remainder sequence over Z.
UniPoly gcd(const UniPoly& a, const UniPoly& b);

// Yun decomposition: p = lead * prod factors[i].first ^ factors[i].second,
// factors monic, squarefree and pairwise coprime.
struct SquarefreeDecomposition {
  Rational lead;
  std::vector<std::pair<UniPoly, unsigned>> factors;
};
SquarefreeDecomposition squarefree_decomposition(const UniPoly& p);

// The square class representative of p: s with p = s * m^2, s squarefree.
// s is the product of the odd-multiplicity factors times the squarefree core
// of the rational leading coefficient (sign kept), e.g. 12t -> 3t, t^2 -> 1.
UniPoly squarefree_part(const UniPoly& p);

// Element of Q(t) in canonical form: gcd(num, den) = 1, den monic.
class RatFunc {
 public:
  RatFunc() : den_(1) {}
  RatFunc(const Rational& c) : num_(c), den_(1) {}  // NOLINT
  RatFunc(long c) : RatFunc(Rational(c)) {}         // NOLINT
  RatFunc(UniPoly num) : num_(std::move(num)), den_(1) {}  // NOLINT
  RatFunc(UniPoly num, UniPoly den);

  static RatFunc t() { return RatFunc(UniPoly::t()); }

  const UniPoly& num() const noexcept { return num_; }
  const UniPoly& den() const noexcept { return den_; }
  bool is_zero() const noexcept { return num_.is_zero(); }
  bool is_one() const { return num_.is_one() && den_.is_one(); }
  bool is_polynomial() const { return den_.is_one(); }
  bool is_constant() const { return num_.is_constant() && den_.is_one(); }
  // Only meaningful when is_constant().
  Rational constant_value() const { return num_.coeff(0); }

  RatFunc operator-() const;
  RatFunc& operator+=(const RatFunc& o);
  RatFunc& operator-=(const RatFunc& o);
  RatFunc& operator*=(const RatFunc& o);
  RatFunc& operator/=(const RatFunc& o);

  friend RatFunc operator+(RatFunc a, const RatFunc& b) { return a += b; }
  friend RatFunc operator-(RatFunc a, const RatFunc& b) { return a -= b; }
  friend RatFunc operator*(RatFunc a, const RatFunc& b) { return a *= b; }
  friend RatFunc operator/(RatFunc a, const RatFunc& b) { return a /= b; }
  friend bool operator==(const RatFunc& a, const RatFunc& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  RatFunc inv() const;
  RatFunc pow(int e) const;
  RatFunc derivative() const;
  // Throws PoleAtParameter when the denominator vanishes at x.
  Rational eval(const Rational& x) const;
  // Substitutes t -> inner.
  RatFunc compose(const RatFunc& inner) const;

  std::string to_string(const std::string& var = "t") const;

 private:
  void normalize();
  UniPoly num_;
  UniPoly den_;
};

enum class ArithOp { Add, Sub, Mul, Div };
RatFunc ratfunc_arith(const RatFunc& a, const RatFunc& b, ArithOp op);

bool is_square(const RatFunc& r);
bool is_cube(const RatFunc& r);

}  // namespace tubecheck
