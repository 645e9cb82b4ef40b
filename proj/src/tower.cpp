#include "tubecheck/tower.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "tubecheck/error.hpp"

namespace tubecheck {

namespace {

constexpr std::size_t kMaxGenerators = 16;
constexpr std::uint32_t kTableLimit = 256;

UniPoly square_class(const RatFunc& r) { return squarefree_part(r.num() * r.den()); }

}  // namespace

IndependenceResult validate_independence(const std::vector<Generator>& generators,
                                         bool includes_imaginary_unit) {
  IndependenceResult result;
  std::vector<std::pair<std::string, UniPoly>> quadratic;
  std::size_t cubic = 0;
  for (const auto& g : generators) {
    if (g.radicand.is_zero()) {
      return {false, g.name};
    }
    if (g.exponent == 3) {
      ++cubic;
      if (cubic > 1 || is_cube(g.radicand)) return {false, g.name};
    } else {
      quadratic.emplace_back(g.name, square_class(g.radicand));
    }
  }
  if (includes_imaginary_unit) quadratic.emplace_back("i", UniPoly(-1));
  // Pairwise distinctness is not enough (2, 3, 6 are pairwise distinct), so
  // every nonempty subset product is tested against the trivial class.
  const std::size_t m = quadratic.size();
  if (m > kMaxGenerators) return {false, "too many generators"};
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    UniPoly prod(1);
    for (std::size_t k = 0; k < m; ++k) {
      if (mask & (1u << k)) prod = squarefree_part(prod * quadratic[k].second);
    }
    if (prod.is_one()) {
      std::string names;
      for (std::size_t k = 0; k < m; ++k) {
        if (!(mask & (1u << k))) continue;
        if (!names.empty()) names += ", ";
        names += quadratic[k].first;
      }
      return {false, names};
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// TowerSpec

TowerSpecPtr TowerSpec::make(std::vector<Generator> generators, bool includes_imaginary_unit) {
  for (const auto& g : generators) {
    if (g.exponent != 2 && g.exponent != 3) {
      raise(ErrorCode::DependentGenerators, "generator " + g.name + " has exponent other than 2 or 3");
    }
    if (g.name == "i") raise(ErrorCode::DependentGenerators, "the name i is reserved for the imaginary unit");
  }
  for (std::size_t a = 0; a < generators.size(); ++a) {
    for (std::size_t b = a + 1; b < generators.size(); ++b) {
      if (generators[a].name == generators[b].name) {
        raise(ErrorCode::DependentGenerators, "duplicate generator name " + generators[a].name);
      }
    }
  }
  auto check = validate_independence(generators, includes_imaginary_unit);
  if (!check.independent) raise(ErrorCode::DependentGenerators, "dependent radicals: " + check.offending);

  std::shared_ptr<TowerSpec> spec(new TowerSpec());
  spec->gens_ = std::move(generators);
  if (includes_imaginary_unit) {
    spec->imaginary_ = spec->gens_.size();
    spec->gens_.push_back(Generator{"i", 2, RatFunc(-1)});
  }
  if (spec->gens_.size() > kMaxGenerators) raise(ErrorCode::DependentGenerators, "too many generators");
  spec->build_tables();
  return spec;
}

const TowerSpecPtr& TowerSpec::rational() {
  static const TowerSpecPtr instance = make({}, false);
  return instance;
}

void TowerSpec::build_tables() {
  stride_.assign(gens_.size(), 1);
  dim_ = 1;
  for (std::size_t k = 0; k < gens_.size(); ++k) {
    stride_[k] = dim_;
    dim_ *= gens_[k].exponent;
  }
  // factors_[mask] = product of radicands of the generators in mask.
  const std::size_t masks = std::size_t{1} << gens_.size();
  factors_.assign(masks, RatFunc(1));
  for (std::size_t mask = 1; mask < masks; ++mask) {
    std::size_t low = 0;
    while (!(mask & (std::size_t{1} << low))) ++low;
    factors_[mask] = factors_[mask & (mask - 1)] * gens_[low].radicand;
  }
  table_.clear();
  if (dim_ > kTableLimit) return;
  table_.resize(std::size_t{dim_} * dim_);
  for (std::uint32_t i = 0; i < dim_; ++i) {
    for (std::uint32_t j = 0; j < dim_; ++j) {
      std::uint32_t index = 0;
      std::size_t mask = 0;
      for (std::size_t k = 0; k < gens_.size(); ++k) {
        unsigned e = (i / stride_[k]) % gens_[k].exponent + (j / stride_[k]) % gens_[k].exponent;
        if (e >= gens_[k].exponent) {
          e -= gens_[k].exponent;
          mask |= std::size_t{1} << k;
        }
        index += e * stride_[k];
      }
      table_[std::size_t{i} * dim_ + j] = {index, mask == 0 ? -1 : static_cast<int>(mask)};
    }
  }
}

std::optional<std::size_t> TowerSpec::find(const std::string& name) const {
  for (std::size_t k = 0; k < gens_.size(); ++k) {
    if (gens_[k].name == name) return k;
  }
  return std::nullopt;
}

std::optional<std::size_t> TowerSpec::find(unsigned exponent, const RatFunc& radicand) const {
  for (std::size_t k = 0; k < gens_.size(); ++k) {
    if (gens_[k].exponent == exponent && gens_[k].radicand == radicand) return k;
  }
  return std::nullopt;
}

std::vector<unsigned> TowerSpec::exponents(std::uint32_t index) const {
  std::vector<unsigned> out(gens_.size());
  for (std::size_t k = 0; k < gens_.size(); ++k) out[k] = (index / stride_[k]) % gens_[k].exponent;
  return out;
}

std::uint32_t TowerSpec::index_of(const std::vector<unsigned>& exponents) const {
  if (exponents.size() != gens_.size()) raise(ErrorCode::DimensionMismatch, "exponent vector length");
  std::uint32_t index = 0;
  for (std::size_t k = 0; k < gens_.size(); ++k) {
    if (exponents[k] >= gens_[k].exponent) raise(ErrorCode::OutOfRange, "unreduced exponent vector");
    index += exponents[k] * stride_[k];
  }
  return index;
}

TowerSpec::Product TowerSpec::multiply(std::uint32_t i, std::uint32_t j) const {
  if (!table_.empty()) {
    const auto& [index, slot] = table_[std::size_t{i} * dim_ + j];
    return {index, slot < 0 ? nullptr : &factors_[static_cast<std::size_t>(slot)]};
  }
  std::uint32_t index = 0;
  std::size_t mask = 0;
  for (std::size_t k = 0; k < gens_.size(); ++k) {
    unsigned e = (i / stride_[k]) % gens_[k].exponent + (j / stride_[k]) % gens_[k].exponent;
    if (e >= gens_[k].exponent) {
      e -= gens_[k].exponent;
      mask |= std::size_t{1} << k;
    }
    index += e * stride_[k];
  }
  return {index, mask == 0 ? nullptr : &factors_[mask]};
}

bool TowerSpec::same_as(const TowerSpec& other) const {
  if (this == &other) return true;
  if (gens_.size() != other.gens_.size() || imaginary_ != other.imaginary_) return false;
  for (std::size_t k = 0; k < gens_.size(); ++k) {
    const auto& a = gens_[k];
    const auto& b = other.gens_[k];
    if (a.name != b.name || a.exponent != b.exponent || !(a.radicand == b.radicand)) return false;
  }
  return true;
}

std::string TowerSpec::describe() const {
  if (gens_.empty()) return "Q(t)";
  std::ostringstream os;
  os << "Q(t)[";
  for (std::size_t k = 0; k < gens_.size(); ++k) {
    if (k) os << ", ";
    const auto& g = gens_[k];
    os << g.name << "^" << g.exponent << " = " << g.radicand.to_string();
  }
  os << "]";
  return os.str();
}

TowerSpecPtr TowerSpec::join(const TowerSpecPtr& a, const TowerSpecPtr& b) {
  if (a->same_as(*b) || b->gens_.empty()) return a;
  if (a->gens_.empty()) return b;
  std::vector<Generator> gens;
  for (std::size_t k = 0; k < a->gens_.size(); ++k) {
    if (a->imaginary_ != k) gens.push_back(a->gens_[k]);
  }
  for (std::size_t k = 0; k < b->gens_.size(); ++k) {
    if (b->imaginary_ == k) continue;
    const auto& g = b->gens_[k];
    if (a->find(g.exponent, g.radicand)) continue;
    Generator copy = g;
    while (std::any_of(gens.begin(), gens.end(), [&](const Generator& h) { return h.name == copy.name; })) {
      copy.name += "'";
    }
    gens.push_back(std::move(copy));
  }
  return make(std::move(gens), a->has_imaginary() || b->has_imaginary());
}

// ---------------------------------------------------------------------------
// TowerElement

namespace {

// The tower both operands live in. Base-field elements carry no generator
// information and adapt to the other operand's tower.
const TowerSpecPtr& common_spec(const TowerElement& a, const TowerElement& b) {
  if (a.spec() == b.spec() || a.spec()->same_as(*b.spec())) return a.spec();
  if (b.in_base_field()) return a.spec();
  if (a.in_base_field()) return b.spec();
  raise(ErrorCode::SpecMismatch, a.spec()->describe() + " vs " + b.spec()->describe());
}

}  // namespace

TowerElement::TowerElement(TowerSpecPtr spec, const RatFunc& value) : spec_(std::move(spec)) {
  if (!value.is_zero()) terms_.emplace_back(0, value);
}

TowerElement TowerElement::basis(const TowerSpecPtr& spec, std::uint32_t index, const RatFunc& coeff) {
  if (index >= spec->dimension()) raise(ErrorCode::OutOfRange, "basis index");
  TowerElement e(spec);
  if (!coeff.is_zero()) e.terms_.emplace_back(index, coeff);
  return e;
}

TowerElement TowerElement::generator(const TowerSpecPtr& spec, const std::string& name) {
  auto k = spec->find(name);
  if (!k) raise(ErrorCode::UnknownVariable, "no generator named " + name);
  std::vector<unsigned> ex(spec->generators().size(), 0);
  ex[*k] = 1;
  return basis(spec, spec->index_of(ex), RatFunc(1));
}

TowerElement TowerElement::imaginary_unit(const TowerSpecPtr& spec) {
  if (!spec->has_imaginary()) raise(ErrorCode::SpecMismatch, "tower lacks the imaginary unit");
  return generator(spec, "i");
}

RatFunc TowerElement::coefficient(std::uint32_t index) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), index,
                             [](const Term& t, std::uint32_t i) { return t.first < i; });
  if (it != terms_.end() && it->first == index) return it->second;
  return RatFunc();
}

bool TowerElement::is_one() const {
  return terms_.size() == 1 && terms_[0].first == 0 && terms_[0].second.is_one();
}

RatFunc TowerElement::base_value() const {
  if (!in_base_field()) raise(ErrorCode::PreconditionViolated, "element is not in the base field");
  return terms_.empty() ? RatFunc() : terms_[0].second;
}

bool TowerElement::involves_imaginary() const {
  auto k = spec_->imaginary_index();
  if (!k) return false;
  for (const auto& [index, c] : terms_) {
    if (spec_->exponents(index)[*k] != 0) return true;
  }
  return false;
}

void TowerElement::add_term(std::uint32_t index, const RatFunc& c) {
  if (c.is_zero()) return;
  auto it = std::lower_bound(terms_.begin(), terms_.end(), index,
                             [](const Term& t, std::uint32_t i) { return t.first < i; });
  if (it != terms_.end() && it->first == index) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  } else {
    terms_.insert(it, Term{index, c});
  }
}

TowerElement TowerElement::operator-() const {
  TowerElement r = *this;
  for (auto& term : r.terms_) term.second = -term.second;
  return r;
}

TowerElement& TowerElement::operator+=(const TowerElement& o) {
  const TowerSpecPtr spec = common_spec(*this, o);
  std::vector<Term> merged;
  merged.reserve(terms_.size() + o.terms_.size());
  auto a = terms_.begin();
  auto b = o.terms_.begin();
  while (a != terms_.end() || b != o.terms_.end()) {
    if (b == o.terms_.end() || (a != terms_.end() && a->first < b->first)) {
      merged.push_back(*a++);
    } else if (a == terms_.end() || b->first < a->first) {
      merged.push_back(*b++);
    } else {
      RatFunc s = a->second + b->second;
      if (!s.is_zero()) merged.emplace_back(a->first, std::move(s));
      ++a;
      ++b;
    }
  }
  terms_ = std::move(merged);
  spec_ = spec;
  return *this;
}

TowerElement& TowerElement::operator-=(const TowerElement& o) { return *this += -o; }

TowerElement operator*(const TowerElement& a, const TowerElement& b) {
  const TowerSpecPtr& spec = common_spec(a, b);
  TowerElement r(spec);
  if (a.is_zero() || b.is_zero()) return r;
  // Contributions sharing a denominator are summed as polynomials first, so
  // the gcd-based normalization runs once per distinct denominator.
  std::map<std::uint32_t, std::vector<std::pair<UniPoly, UniPoly>>> acc;  // den -> num
  for (const auto& [i, ci] : a.terms_) {
    for (const auto& [j, cj] : b.terms_) {
      auto p = spec->multiply(i, j);
      RatFunc c = ci * cj;
      if (p.factor) c *= *p.factor;
      auto& groups = acc[p.index];
      auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == c.den(); });
      if (it == groups.end()) {
        groups.emplace_back(c.den(), c.num());
      } else {
        it->second += c.num();
      }
    }
  }
  for (auto& [index, groups] : acc) {
    RatFunc sum;
    for (auto& [den, num] : groups) sum += RatFunc(std::move(num), std::move(den));
    if (!sum.is_zero()) r.terms_.emplace_back(index, std::move(sum));
  }
  return r;
}

TowerElement& TowerElement::operator*=(const TowerElement& o) { return *this = *this * o; }

TowerElement& TowerElement::operator*=(const RatFunc& s) {
  if (s.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& term : terms_) term.second *= s;
  return *this;
}

bool operator==(const TowerElement& a, const TowerElement& b) {
  if (!(a.spec_ == b.spec_ || a.spec_->same_as(*b.spec_) || a.in_base_field() || b.in_base_field())) {
    return false;
  }
  return a.terms_ == b.terms_;
}

TowerElement TowerElement::pow(unsigned e) const {
  TowerElement result(spec_, RatFunc(1));
  TowerElement base = *this;
  while (e) {
    if (e & 1u) result *= base;
    e >>= 1u;
    if (e) base *= base;
  }
  return result;
}

TowerElement TowerElement::inv() const {
  if (is_zero()) raise(ErrorCode::ZeroDivisor, "inverse of zero");
  if (in_base_field()) return TowerElement(spec_, terms_[0].second.inv());
  const auto& gens = spec_->generators();
  if (terms_.size() == 1) {
    // c * m: multiply by the complementary monomial m' so that m * m' lies in Q(t).
    auto ex = spec_->exponents(terms_[0].first);
    RatFunc norm = terms_[0].second;
    for (std::size_t k = 0; k < ex.size(); ++k) {
      if (ex[k] == 0) continue;
      ex[k] = gens[k].exponent - ex[k];
      norm *= gens[k].radicand;
    }
    return basis(spec_, spec_->index_of(ex), norm.inv());
  }

  // Norm descent: for a quadratic generator g, a * sigma_g(a) no longer
  // involves g, so inv(a) = sigma_g(a) * inv(a * sigma_g(a)).
  std::vector<bool> used(gens.size(), false);
  for (const auto& [index, c] : terms_) {
    auto ex = spec_->exponents(index);
    for (std::size_t k = 0; k < ex.size(); ++k) used[k] = used[k] || ex[k] != 0;
  }
  for (std::size_t k = 0; k < gens.size(); ++k) {
    if (!used[k] || gens[k].exponent != 2) continue;
    TowerElement sigma = *this;
    for (auto& [index, c] : sigma.terms_) {
      if (spec_->exponents(index)[k] != 0) c = -c;
    }
    TowerElement norm = *this * sigma;
    if (norm.is_zero()) raise(ErrorCode::ZeroDivisor, "zero divisor " + to_string());
    return sigma * norm.inv();
  }

  // Only the cubic generator remains: solve the regular representation.
  std::vector<std::uint32_t> sub{0};
  for (std::size_t k = 0; k < gens.size(); ++k) {
    if (!used[k]) continue;
    std::vector<unsigned> unit(gens.size(), 0);
    unit[k] = 1;
    const std::uint32_t step = spec_->index_of(unit);
    const std::size_t n = sub.size();
    for (unsigned e = 1; e < gens[k].exponent; ++e) {
      for (std::size_t s = 0; s < n; ++s) sub.push_back(sub[s] + e * step);
    }
  }
  const std::size_t d = sub.size();
  std::map<std::uint32_t, std::size_t> position;
  for (std::size_t s = 0; s < d; ++s) position[sub[s]] = s;

  // Augmented matrix [M | e0], column j = this * basis[sub[j]].
  std::vector<std::vector<RatFunc>> m(d, std::vector<RatFunc>(d + 1));
  for (std::size_t j = 0; j < d; ++j) {
    for (const auto& [index, c] : terms_) {
      auto p = spec_->multiply(index, sub[j]);
      RatFunc v = p.factor ? c * *p.factor : c;
      m[position.at(p.index)][j] += v;
    }
  }
  m[0][d] = RatFunc(1);

  // Fraction-free (Bareiss) forward elimination.
  RatFunc prev(1);
  for (std::size_t k = 0; k < d; ++k) {
    std::size_t piv = k;
    while (piv < d && m[piv][k].is_zero()) ++piv;
    if (piv == d) raise(ErrorCode::ZeroDivisor, "singular regular representation for " + to_string());
    std::swap(m[k], m[piv]);
    for (std::size_t i = k + 1; i < d; ++i) {
      for (std::size_t j = k + 1; j <= d; ++j) {
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
      }
      m[i][k] = RatFunc();
    }
    prev = m[k][k];
  }
  std::vector<RatFunc> x(d);
  for (std::size_t k = d; k-- > 0;) {
    RatFunc s = m[k][d];
    for (std::size_t j = k + 1; j < d; ++j) s -= m[k][j] * x[j];
    x[k] = s / m[k][k];
  }
  TowerElement r(spec_);
  for (std::size_t j = 0; j < d; ++j) r.add_term(sub[j], x[j]);
  return r;
}

TowerElement TowerElement::conj() const {
  auto k = spec_->imaginary_index();
  if (!k) return *this;
  TowerElement r = *this;
  for (auto& [index, c] : r.terms_) {
    if (spec_->exponents(index)[*k] != 0) c = -c;
  }
  return r;
}

TowerElement TowerElement::embed(const TowerSpecPtr& target) const {
  if (spec_ == target || spec_->same_as(*target)) {
    TowerElement r = *this;
    r.spec_ = target;
    return r;
  }
  const auto& gens = spec_->generators();
  std::vector<std::size_t> map(gens.size());
  for (std::size_t k = 0; k < gens.size(); ++k) {
    std::optional<std::size_t> found = spec_->imaginary_index() == k
                                           ? target->imaginary_index()
                                           : target->find(gens[k].exponent, gens[k].radicand);
    if (!found) raise(ErrorCode::SpecMismatch, "generator " + gens[k].name + " missing from target tower");
    map[k] = *found;
  }
  TowerElement r(target);
  for (const auto& [index, c] : terms_) {
    auto ex = spec_->exponents(index);
    std::vector<unsigned> out(target->generators().size(), 0);
    for (std::size_t k = 0; k < ex.size(); ++k) out[map[k]] = ex[k];
    r.add_term(target->index_of(out), c);
  }
  return r;
}

namespace {

// Enclosure [lo, hi] of the positive real root x^(1/k) at `bits` binary digits.
std::pair<Rational, Rational> root_enclosure(const Integer& x, unsigned k, unsigned bits) {
  Integer scaled = x;
  mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), static_cast<mp_bitcnt_t>(k) * bits);
  Integer r;
  const bool exact = mpz_root(r.get_mpz_t(), scaled.get_mpz_t(), k) != 0;
  Rational scale;
  mpq_set_ui(scale.get_mpq_t(), 1, 1);
  mpq_mul_2exp(scale.get_mpq_t(), scale.get_mpq_t(), bits);
  Rational lo(r);
  lo /= scale;
  Rational hi(exact ? r : Integer(r + 1));
  hi /= scale;
  return {lo, hi};
}

}  // namespace

RealEvaluation TowerElement::eval_real(const Rational& t0, unsigned precision_bits) const {
  if (precision_bits == 0) raise(ErrorCode::PreconditionViolated, "precision must be positive");
  if (involves_imaginary()) raise(ErrorCode::ImaginaryPresent, to_string());
  const auto& gens = spec_->generators();

  std::vector<std::optional<Rational>> value(gens.size());
  auto radicand_at = [&](std::size_t k) -> const Rational& {
    if (!value[k]) {
      Rational r = gens[k].radicand.eval(t0);
      if (gens[k].exponent == 2 && r < 0) {
        raise(ErrorCode::NegativeRadicand, gens[k].name + " at t = " + tubecheck::to_string(t0));
      }
      value[k] = r;
    }
    return *value[k];
  };

  // Canonical form over Q: sum of f * sqrt(s) * cbrt(u), s squarefree-ish and
  // u cube-free-ish positive integers. Equal keys merge exactly; distinct keys
  // are only treated as independent by the interval stage, which keeps the
  // zero decision sound even if factoring left composite cores.
  std::map<std::pair<Integer, Integer>, Rational> canon;
  for (const auto& [index, c] : terms_) {
    Rational f = c.eval(t0);
    Integer s = 1;
    Integer u = 1;
    auto ex = spec_->exponents(index);
    for (std::size_t k = 0; k < ex.size() && f != 0; ++k) {
      if (ex[k] == 0) continue;
      const Rational& r = radicand_at(k);
      if (r == 0) {
        f = 0;
        break;
      }
      if (gens[k].exponent == 2) {
        // sqrt(p/q) = sqrt(p q) / q
        Integer pq = r.get_num() * r.get_den();
        PowerSplit sp = split_power(pq, 2);
        f *= Rational(sp.root, r.get_den());
        Integer g;
        mpz_gcd(g.get_mpz_t(), s.get_mpz_t(), sp.core.get_mpz_t());
        s = s * sp.core / (g * g);
        f *= g;
      } else {
        Rational rm = ex[k] == 1 ? r : Rational(r * r);
        // cbrt(P/Q) = cbrt(P Q^2) / Q
        Integer pq2 = rm.get_num() * rm.get_den() * rm.get_den();
        PowerSplit sp = split_power(pq2, 3);
        f *= Rational(sp.root, rm.get_den());
        Integer core = sp.core;
        if (core < 0) {
          f = -f;
          core = -core;
        }
        u = core;
      }
      f.canonicalize();
    }
    if (f != 0) canon[{s, u}] += f;
  }
  for (auto it = canon.begin(); it != canon.end();) {
    it = it->second == 0 ? canon.erase(it) : std::next(it);
  }
  RealEvaluation out;
  if (canon.empty()) return out;
  if (canon.size() == 1 && canon.begin()->first == std::pair<Integer, Integer>(1, 1)) {
    const Rational& v = canon.begin()->second;
    out.sign = v > 0 ? Sign::Positive : Sign::Negative;
    out.lower = out.upper = v;
    return out;
  }

  for (unsigned bits = std::min(32u, precision_bits);; bits = std::min(2 * bits, precision_bits)) {
    Rational lo(0), hi(0);
    for (const auto& [key, f] : canon) {
      auto [slo, shi] = root_enclosure(key.first, 2, bits);
      auto [ulo, uhi] = root_enclosure(key.second, 3, bits);
      Rational a = slo * ulo;
      Rational b = shi * uhi;
      if (f > 0) {
        lo += f * a;
        hi += f * b;
      } else {
        lo += f * b;
        hi += f * a;
      }
    }
    out.lower = lo;
    out.upper = hi;
    if (lo > 0) {
      out.sign = Sign::Positive;
      return out;
    }
    if (hi < 0) {
      out.sign = Sign::Negative;
      return out;
    }
    if (bits >= precision_bits) break;
  }
  raise(ErrorCode::PrecisionExhausted, "sign of " + to_string() + " undecided at t = " + tubecheck::to_string(t0));
}

std::string TowerElement::to_string(const std::string& var) const {
  if (terms_.empty()) return "0";
  const auto& gens = spec_->generators();
  std::string out;
  for (const auto& [index, c] : terms_) {
    std::string mono;
    auto ex = spec_->exponents(index);
    for (std::size_t k = 0; k < ex.size(); ++k) {
      if (ex[k] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += gens[k].name;
      if (ex[k] > 1) mono += "^" + std::to_string(ex[k]);
    }
    std::string cs = c.to_string(var);
    std::string term;
    if (mono.empty()) {
      term = cs;
    } else if (c.is_one()) {
      term = mono;
    } else if ((-c).is_one()) {
      term = "-" + mono;
    } else {
      bool bare = c.is_constant() && cs.find_first_of("+ ") == std::string::npos;
      term = (bare ? cs : "(" + cs + ")") + "*" + mono;
    }
    if (out.empty()) {
      out = term;
    } else if (term[0] == '-') {
      out += " - " + term.substr(1);
    } else {
      out += " + " + term;
    }
  }
  return out;
}

TowerElement tower_mul(const TowerElement& a, const TowerElement& b) { return a * b; }
TowerElement tower_inv(const TowerElement& a) { return a.inv(); }
bool tower_is_zero(const TowerElement& a) { return a.is_zero(); }
RealEvaluation tower_eval_real(const TowerElement& a, const Rational& t0, unsigned precision_bits) {
  return a.eval_real(t0, precision_bits);
}

// ---------------------------------------------------------------------------
// RadicalBuilder

std::string radical_name(unsigned exponent, const RatFunc& radicand) {
  return std::string(exponent == 3 ? "cbrt(" : "sqrt(") + radicand.to_string() + ")";
}

std::size_t RadicalBuilder::intern(unsigned exponent, const RatFunc& radicand, const std::string& name) {
  for (std::size_t k = 0; k < gens_.size(); ++k) {
    if (gens_[k].exponent == exponent && gens_[k].radicand == radicand) return k;
  }
  gens_.push_back(Generator{name.empty() ? radical_name(exponent, radicand) : name, exponent, radicand});
  return gens_.size() - 1;
}

RadicalBuilder::Handle RadicalBuilder::add(Recipe recipe) {
  if (spec_) raise(ErrorCode::PreconditionViolated, "radical registered after build");
  recipes_.push_back(std::move(recipe));
  return recipes_.size() - 1;
}

RadicalBuilder::Handle RadicalBuilder::sqrt(const RatFunc& radicand, const std::string& name) {
  if (radicand.is_zero()) return add({Rational(0), {}, false});
  if (!radicand.is_constant()) return add({Rational(1), {intern(2, radicand, name)}, false});
  const Rational r = radicand.constant_value();
  // sqrt(p/q) = sqrt(|p q|) / q, times i when negative.
  Integer pq = r.get_num() * r.get_den();
  const bool negative = pq < 0;
  if (negative) pq = -pq;
  PowerSplit sp = split_power(pq, 2);
  Recipe recipe{Rational(sp.root, r.get_den()), {}, negative};
  recipe.factor.canonicalize();
  Integer core = sp.core;
  for (unsigned long p = 2; p <= 10000 && core > 1; ++p) {
    if (mpz_divisible_ui_p(core.get_mpz_t(), p)) {
      core /= p;
      recipe.generators.push_back(intern(2, RatFunc(Rational(static_cast<long>(p))), {}));
    }
  }
  if (core > 1) recipe.generators.push_back(intern(2, RatFunc(Rational(core)), {}));
  return add(std::move(recipe));
}

RadicalBuilder::Handle RadicalBuilder::cbrt(const RatFunc& radicand, const std::string& name) {
  if (radicand.is_zero()) return add({Rational(0), {}, false});
  if (!radicand.is_constant()) return add({Rational(1), {intern(3, radicand, name)}, false});
  const Rational r = radicand.constant_value();
  // cbrt(p/q) = cbrt(p q^2) / q with the real branch.
  PowerSplit sp = split_power(r.get_num() * r.get_den() * r.get_den(), 3);
  Recipe recipe{Rational(sp.root, r.get_den()), {}, false};
  Integer core = sp.core;
  if (core < 0) {
    recipe.factor = -recipe.factor;
    core = -core;
  }
  recipe.factor.canonicalize();
  if (core != 1) recipe.generators.push_back(intern(3, RatFunc(Rational(core)), {}));
  return add(std::move(recipe));
}

TowerSpecPtr RadicalBuilder::build() {
  if (spec_) return spec_;
  bool imaginary = imaginary_;
  for (const auto& r : recipes_) imaginary = imaginary || r.imaginary;
  spec_ = TowerSpec::make(gens_, imaginary);
  roots_.clear();
  for (const auto& r : recipes_) {
    TowerElement v(spec_, RatFunc(r.factor));
    for (std::size_t g : r.generators) v *= TowerElement::generator(spec_, gens_[g].name);
    if (r.imaginary) v *= TowerElement::imaginary_unit(spec_);
    roots_.push_back(std::move(v));
  }
  return spec_;
}

TowerElement RadicalBuilder::root(Handle h) const {
  if (!spec_) raise(ErrorCode::PreconditionViolated, "tower not built yet");
  if (h >= roots_.size()) raise(ErrorCode::OutOfRange, "unknown radical handle");
  return roots_[h];
}

std::vector<TowerElement> specialize(const std::vector<TowerElement>& elems, const Rational& t0) {
  TowerSpecPtr spec = TowerSpec::rational();
  for (const auto& e : elems) {
    if (!e.in_base_field() && !e.spec()->same_as(*spec)) spec = TowerSpec::join(spec, e.spec());
  }
  std::vector<TowerElement> lifted;
  lifted.reserve(elems.size());
  for (const auto& e : elems) lifted.push_back(e.in_base_field() ? e : e.embed(spec));

  const auto& gens = spec->generators();
  std::vector<bool> used(gens.size(), false);
  for (const auto& e : lifted) {
    for (const auto& [index, c] : e.terms()) {
      auto ex = spec->exponents(index);
      for (std::size_t k = 0; k < ex.size(); ++k) used[k] = used[k] || ex[k] != 0;
    }
  }
  RadicalBuilder builder;
  std::vector<std::optional<RadicalBuilder::Handle>> handle(gens.size());
  for (std::size_t k = 0; k < gens.size(); ++k) {
    if (!used[k]) continue;
    if (spec->imaginary_index() == k) {
      builder.use_imaginary_unit();
      continue;
    }
    const Rational r = gens[k].radicand.eval(t0);
    if (gens[k].exponent == 2 && r < 0) {
      raise(ErrorCode::NegativeRadicand, gens[k].name + " at t = " + tubecheck::to_string(t0));
    }
    handle[k] = gens[k].exponent == 2 ? builder.sqrt(RatFunc(r)) : builder.cbrt(RatFunc(r));
  }
  const TowerSpecPtr target = builder.build();
  std::vector<TowerElement> roots(gens.size(), TowerElement(target, RatFunc(1)));
  for (std::size_t k = 0; k < gens.size(); ++k) {
    if (handle[k]) roots[k] = builder.root(*handle[k]);
    if (used[k] && spec->imaginary_index() == k) roots[k] = TowerElement::imaginary_unit(target);
  }
  std::vector<TowerElement> out;
  out.reserve(lifted.size());
  for (const auto& e : lifted) {
    TowerElement v(target);
    for (const auto& [index, c] : e.terms()) {
      TowerElement term(target, RatFunc(c.eval(t0)));
      auto ex = spec->exponents(index);
      for (std::size_t k = 0; k < ex.size() && !term.is_zero(); ++k) {
        if (ex[k]) term *= roots[k].pow(ex[k]);
      }
      v += term;
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace tubecheck
