#include "tubecheck/arith.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>

#include "tubecheck/error.hpp"

namespace tubecheck {

Rational make_rational(long num, long den) {
  if (den == 0) raise(ErrorCode::DivisionByZero, "rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational parse_rational(const std::string& text) {
  Rational q;
  if (q.set_str(text, 10) != 0) raise(ErrorCode::SyntaxError, "not a rational literal: " + text);
  if (q.get_den() == 0) raise(ErrorCode::DivisionByZero, "rational with zero denominator: " + text);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

int sign(const Rational& q) { return sgn(q); }

namespace {

constexpr unsigned long kTrialBound = 10000;

bool exact_root(const Integer& n, unsigned k, Integer& root) {
  if (n < 0) {
    if (k % 2 == 0) return false;
    Integer r;
    Integer m = -n;
    if (!exact_root(m, k, r)) return false;
    root = -r;
    return true;
  }
  return mpz_root(root.get_mpz_t(), n.get_mpz_t(), k) != 0;
}

}  // namespace

PowerSplit split_power(const Integer& n, unsigned k) {
  if (n == 0) return {0, 0};
  if (k % 2 == 0 && n < 0) raise(ErrorCode::NegativeRadicand, "even root of a negative integer");
  Integer m = abs(n);
  Integer root = 1;
  Integer core = 1;
  for (unsigned long p = 2; p <= kTrialBound; ++p) {
    if (Integer(p) * p > m) break;
    unsigned e = 0;
    while (mpz_divisible_ui_p(m.get_mpz_t(), p) != 0) {
      m /= p;
      ++e;
    }
    for (unsigned i = 0; i < e / k; ++i) root *= p;
    for (unsigned i = 0; i < e % k; ++i) core *= p;
  }
  if (m > 1) {
    Integer r;
    if (exact_root(m, k, r)) {
      root *= r;
    } else {
      core *= m;
    }
  }
  if (n < 0) core = -core;
  return {root, core};
}

bool is_rational_square(const Rational& q) {
  if (sgn(q) < 0) return false;
  return mpz_perfect_square_p(q.get_num_mpz_t()) != 0 &&
         mpz_perfect_square_p(q.get_den_mpz_t()) != 0;
}

bool is_rational_cube(const Rational& q) {
  Integer r;
  return exact_root(q.get_num(), 3, r) && exact_root(q.get_den(), 3, r);
}

// ---------------------------------------------------------------- UniPoly

UniPoly::UniPoly(const Rational& c) {
  if (c != 0) c_.push_back(c);
}

UniPoly::UniPoly(std::initializer_list<Rational> coeffs) : c_(coeffs) { trim(); }

UniPoly::UniPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

UniPoly UniPoly::monomial(const Rational& c, std::size_t degree) {
  if (c == 0) return {};
  std::vector<Rational> v(degree + 1);
  v[degree] = c;
  return UniPoly(std::move(v));
}

void UniPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

bool UniPoly::is_one() const { return c_.size() == 1 && c_[0] == 1; }

const Rational& UniPoly::lead() const {
  if (c_.empty()) raise(ErrorCode::ZeroPolynomial, "leading coefficient of zero polynomial");
  return c_.back();
}

Rational UniPoly::coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }

UniPoly UniPoly::operator-() const {
  UniPoly r = *this;
  for (auto& c : r.c_) c = -c;
  return r;
}

UniPoly& UniPoly::operator+=(const UniPoly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  trim();
  return *this;
}

UniPoly& UniPoly::operator-=(const UniPoly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  trim();
  return *this;
}

UniPoly operator*(const UniPoly& a, const UniPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> r(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i] == 0) continue;
    for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
  }
  return UniPoly(std::move(r));
}

UniPoly& UniPoly::operator*=(const UniPoly& o) { return *this = *this * o; }

UniPoly& UniPoly::operator*=(const Rational& s) {
  if (s == 0) {
    c_.clear();
    return *this;
  }
  for (auto& c : c_) c *= s;
  return *this;
}

UniPoly UniPoly::pow(unsigned e) const {
  UniPoly result(1);
  UniPoly base = *this;
  while (e > 0) {
    if (e & 1U) result *= base;
    e >>= 1U;
    if (e > 0) base *= base;
  }
  return result;
}

UniPoly UniPoly::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<Rational> r(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * static_cast<long>(i);
  return UniPoly(std::move(r));
}

UniPoly UniPoly::monic() const {
  if (is_zero()) return {};
  UniPoly r = *this;
  Rational inv = 1 / lead();
  return r *= inv;
}

Rational UniPoly::eval(const Rational& x) const {
  Rational acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

UniPoly UniPoly::compose(const UniPoly& inner) const {
  UniPoly acc;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
    acc *= inner;
    acc += UniPoly(*it);
  }
  return acc;
}

std::pair<Rational, std::vector<Integer>> UniPoly::content_primitive() const {
  if (is_zero()) return {Rational(0), {}};
  Integer l = 1;
  for (const auto& c : c_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  std::vector<Integer> v(c_.size());
  Integer g = 0;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    v[i] = c_[i].get_num() * (l / c_[i].get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v[i].get_mpz_t());
  }
  if (v.back() < 0) g = -g;
  for (auto& x : v) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
  Rational content(g, l);
  content.canonicalize();
  return {content, std::move(v)};
}

std::string UniPoly::to_string(const std::string& var) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t k = c_.size(); k-- > 0;) {
    const Rational& c = c_[k];
    if (c == 0) continue;
    Rational mag = abs(c);
    if (first) {
      if (c < 0) os << '-';
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    if (k == 0) {
      os << mag.get_str();
      continue;
    }
    if (mag != 1) os << mag.get_str() << '*';
    os << var;
    if (k > 1) os << '^' << k;
  }
  return os.str();
}

std::pair<UniPoly, UniPoly> divmod(const UniPoly& a, const UniPoly& b) {
  if (b.is_zero()) raise(ErrorCode::DivisionByZero, "polynomial division by zero");
  if (a.degree() < b.degree()) return {UniPoly(), a};
  std::vector<Rational> r = a.coeffs();
  const auto& bc = b.coeffs();
  const std::size_t db = bc.size() - 1;
  std::vector<Rational> q(r.size() - db);
  Rational inv_lead = 1 / bc.back();
  for (std::size_t k = r.size(); k-- > db;) {
    if (r[k] == 0) continue;
    Rational f = r[k] * inv_lead;
    q[k - db] = f;
    for (std::size_t j = 0; j <= db; ++j) r[k - db + j] -= f * bc[j];
  }
  r.resize(db);
  return {UniPoly(std::move(q)), UniPoly(std::move(r))};
}

UniPoly exact_div(const UniPoly& a, const UniPoly& b) {
  auto [q, r] = divmod(a, b);
  if (!r.is_zero()) raise(ErrorCode::DivisionByZero, "inexact polynomial division");
  return q;
}

namespace {

using IntPoly = std::vector<Integer>;  // index = degree, trimmed

void trim(IntPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

void make_primitive(IntPoly& p) {
  trim(p);
  if (p.empty()) return;
  Integer g = 0;
  for (const auto& c : p) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  if (p.back() < 0) g = -g;
  for (auto& c : p) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
}

// lead(b)^(deg a - deg b + 1) * a  mod  b, over Z.
IntPoly pseudo_remainder(IntPoly a, const IntPoly& b) {
  const std::size_t db = b.size() - 1;
  const Integer& lb = b.back();
  while (!a.empty() && a.size() - 1 >= db) {
    const std::size_t shift = a.size() - 1 - db;
    Integer la = a.back();
    for (auto& c : a) c *= lb;
    for (std::size_t j = 0; j <= db; ++j) a[shift + j] -= la * b[j];
    trim(a);
  }
  return a;
}

// Euclid over Z/p. Returns true when the images are provably coprime: with
// leading coefficients nonzero mod p, deg gcd over Q <= deg gcd mod p.
bool coprime_mod_p(const IntPoly& a, const IntPoly& b) {
  constexpr std::uint64_t p = 2147483629;  // prime below 2^31
  auto reduce = [](const IntPoly& f) {
    std::vector<std::uint64_t> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = mpz_fdiv_ui(f[i].get_mpz_t(), p);
    return out;
  };
  auto mod_inverse = [](std::uint64_t x) {
    std::uint64_t r = 1, e = p - 2;
    while (e) {
      if (e & 1) r = r * x % p;
      x = x * x % p;
      e >>= 1;
    }
    return r;
  };
  auto strip = [](std::vector<std::uint64_t>& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
  };
  std::vector<std::uint64_t> f = reduce(a), g = reduce(b);
  if (f.size() != a.size() || g.size() != b.size()) return false;
  if (f.size() < g.size()) std::swap(f, g);
  while (g.size() > 1) {
    const std::uint64_t inv = mod_inverse(g.back());
    while (f.size() >= g.size()) {
      const std::uint64_t q = f.back() * inv % p;
      const std::size_t shift = f.size() - g.size();
      for (std::size_t j = 0; j < g.size(); ++j) f[shift + j] = (f[shift + j] + (p - q) * g[j]) % p;
      strip(f);
    }
    std::swap(f, g);
  }
  return g.size() == 1;
}

}  // namespace

UniPoly gcd(const UniPoly& a, const UniPoly& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return UniPoly(1);
  IntPoly A = a.content_primitive().second;
  IntPoly B = b.content_primitive().second;
  if (coprime_mod_p(A, B)) return UniPoly(1);
  if (A.size() < B.size()) std::swap(A, B);
  while (!B.empty()) {
    IntPoly R = pseudo_remainder(A, B);
    make_primitive(R);
    A = std::move(B);
    B = std::move(R);
  }
  std::vector<Rational> c(A.size());
  for (std::size_t i = 0; i < A.size(); ++i) c[i] = Rational(A[i]);
  return UniPoly(std::move(c)).monic();
}

SquarefreeDecomposition squarefree_decomposition(const UniPoly& p) {
  if (p.is_zero()) raise(ErrorCode::ZeroPolynomial, "squarefree decomposition of 0");
  SquarefreeDecomposition out{p.lead(), {}};
  UniPoly f = p.monic();
  if (f.is_constant()) return out;
  UniPoly df = f.derivative();
  UniPoly a0 = gcd(f, df);
  UniPoly b = exact_div(f, a0);
  UniPoly c = exact_div(df, a0);
  UniPoly d = c - b.derivative();
  for (unsigned i = 1; !b.is_constant(); ++i) {
    UniPoly a = gcd(b, d);
    if (!a.is_constant()) out.factors.emplace_back(a, i);
    b = exact_div(b, a);
    c = exact_div(d, a);
    d = c - b.derivative();
  }
  return out;
}

UniPoly squarefree_part(const UniPoly& p) {
  SquarefreeDecomposition sq = squarefree_decomposition(p);
  Integer n = sq.lead.get_num() * sq.lead.get_den();
  Integer core = split_power(abs(n), 2).core;
  if (n < 0) core = -core;
  UniPoly s{Rational(core)};
  for (const auto& [f, m] : sq.factors) {
    if (m % 2 == 1) s *= f;
  }
  return s;
}

// ---------------------------------------------------------------- RatFunc

RatFunc::RatFunc(UniPoly num, UniPoly den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) raise(ErrorCode::DivisionByZero, "rational function with zero denominator");
  normalize();
}

void RatFunc::normalize() {
  if (num_.is_zero()) {
    den_ = UniPoly(1);
    return;
  }
  if (!den_.is_constant()) {
    UniPoly g = gcd(num_, den_);
    if (!g.is_one()) {
      num_ = exact_div(num_, g);
      den_ = exact_div(den_, g);
    }
  }
  Rational l = den_.lead();
  if (l != 1) {
    Rational inv = 1 / l;
    num_ *= inv;
    den_ *= inv;
  }
}

RatFunc RatFunc::operator-() const {
  RatFunc r = *this;
  r.num_ = -r.num_;
  return r;
}

RatFunc& RatFunc::operator+=(const RatFunc& o) {
  if (o.num_.is_zero()) return *this;
  if (num_.is_zero()) return *this = o;
  if (den_.is_one() && o.den_.is_one()) {
    num_ += o.num_;
    return *this;
  }
  if (den_ == o.den_) {
    num_ += o.num_;
    normalize();
    return *this;
  }
  UniPoly g = gcd(den_, o.den_);
  if (g.is_one()) {
    // Coprime monic denominators: the sum is already reduced.
    num_ = num_ * o.den_ + o.num_ * den_;
    den_ = den_ * o.den_;
    if (num_.is_zero()) den_ = UniPoly(1);
    return *this;
  }
  num_ = num_ * o.den_ + o.num_ * den_;
  den_ = den_ * o.den_;
  normalize();
  return *this;
}

RatFunc& RatFunc::operator-=(const RatFunc& o) { return *this += -o; }

RatFunc& RatFunc::operator*=(const RatFunc& o) {
  if (num_.is_zero()) return *this;
  if (o.num_.is_zero()) return *this = RatFunc();
  if (den_.is_one() && o.den_.is_one()) {
    num_ *= o.num_;
    return *this;
  }
  if (o.is_constant()) {
    num_ *= o.num_.coeff(0);
    return *this;
  }
  if (is_constant()) {
    Rational c = num_.coeff(0);
    *this = o;
    num_ *= c;
    return *this;
  }
  UniPoly g1 = gcd(num_, o.den_);
  UniPoly g2 = gcd(o.num_, den_);
  UniPoly n1 = g1.is_one() ? num_ : exact_div(num_, g1);
  UniPoly d2 = g1.is_one() ? o.den_ : exact_div(o.den_, g1);
  UniPoly n2 = g2.is_one() ? o.num_ : exact_div(o.num_, g2);
  UniPoly d1 = g2.is_one() ? den_ : exact_div(den_, g2);
  num_ = n1 * n2;
  den_ = d1 * d2;
  return *this;
}

RatFunc RatFunc::inv() const {
  if (num_.is_zero()) raise(ErrorCode::DivisionByZero, "inverse of the zero rational function");
  RatFunc r;
  r.num_ = den_;
  r.den_ = num_;
  r.normalize();
  return r;
}

RatFunc& RatFunc::operator/=(const RatFunc& o) { return *this *= o.inv(); }

RatFunc RatFunc::pow(int e) const {
  if (e < 0) return inv().pow(-e);
  RatFunc r;
  r.num_ = num_.pow(static_cast<unsigned>(e));
  r.den_ = den_.pow(static_cast<unsigned>(e));
  return r;
}

RatFunc RatFunc::derivative() const {
  return RatFunc(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
}

Rational RatFunc::eval(const Rational& x) const {
  Rational d = den_.eval(x);
  if (d == 0) raise(ErrorCode::PoleAtParameter, "denominator " + den_.to_string() + " vanishes at t = " + x.get_str());
  return num_.eval(x) / d;
}

RatFunc RatFunc::compose(const RatFunc& inner) const {
  auto horner = [&inner](const UniPoly& p) {
    RatFunc acc;
    for (auto it = p.coeffs().rbegin(); it != p.coeffs().rend(); ++it) {
      acc *= inner;
      acc += RatFunc(*it);
    }
    return acc;
  };
  return horner(num_) / horner(den_);
}

std::string RatFunc::to_string(const std::string& var) const {
  if (den_.is_one()) return num_.to_string(var);
  auto wrap = [&var](const UniPoly& p) {
    std::string s = p.to_string(var);
    std::size_t nonzero = 0;
    for (const auto& c : p.coeffs()) nonzero += (c != 0);
    const bool bare = nonzero == 1 && p.lead() > 0 && (p.is_constant() || p.lead() == 1);
    return bare ? s : "(" + s + ")";
  };
  return wrap(num_) + "/" + wrap(den_);
}

RatFunc ratfunc_arith(const RatFunc& a, const RatFunc& b, ArithOp op) {
  switch (op) {
    case ArithOp::Add: return a + b;
    case ArithOp::Sub: return a - b;
    case ArithOp::Mul: return a * b;
    case ArithOp::Div:
      if (b.is_zero()) raise(ErrorCode::DivisionByZero, "division by the zero rational function");
      return a / b;
  }
  return {};
}

namespace {

bool all_multiplicities_divisible(const UniPoly& monic_poly, unsigned k) {
  if (monic_poly.is_constant()) return true;
  for (const auto& [f, m] : squarefree_decomposition(monic_poly).factors) {
    if (m % k != 0) return false;
  }
  return true;
}

}  // namespace

bool is_square(const RatFunc& r) {
  if (r.is_zero()) return true;
  const Rational& c = r.num().lead();
  return is_rational_square(c) && all_multiplicities_divisible(r.num().monic(), 2) &&
         all_multiplicities_divisible(r.den(), 2);
}

bool is_cube(const RatFunc& r) {
  if (r.is_zero()) return true;
  const Rational& c = r.num().lead();
  return is_rational_cube(c) && all_multiplicities_divisible(r.num().monic(), 3) &&
         all_multiplicities_divisible(r.den(), 3);
}

}  // namespace tubecheck
