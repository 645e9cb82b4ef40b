#pragma once

// Finite radical extensions of Q(t): adjoined square roots, at most one cube
// root and optionally the imaginary unit. Elements are stored in the basis
// of reduced generator monomials, so zero-testing is coefficient comparison.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tubecheck/arith.hpp"

namespace tubecheck {

struct Generator {
  std::string name;
  unsigned exponent = 2;  // 2 or 3
  RatFunc radicand;
};

struct IndependenceResult {
  bool independent = true;
  std::string offending;  // names of a dependent subset when !independent
};

// Quadratic radicands (together with -1 when the imaginary unit is present)
// must be multiplicatively independent modulo squares of Q(t): no product
// over a nonempty subset may be a square. A cubic radicand must not be a cube.
IndependenceResult validate_independence(const std::vector<Generator>& generators,
                                         bool includes_imaginary_unit);

class TowerSpec {
 public:
  // Validates independence and throws DependentGenerators on failure. The
  // imaginary unit, when requested, is appended as the generator "i" with
  // relation i^2 = -1.
  static std::shared_ptr<const TowerSpec> make(std::vector<Generator> generators,
                                               bool includes_imaginary_unit);
  // The trivial tower Q(t) itself; a process-wide singleton.
  static const std::shared_ptr<const TowerSpec>& rational();

  // Smallest tower containing the generators of both (matched by exponent
  // and radicand). Throws DependentGenerators when the union is dependent.
  static std::shared_ptr<const TowerSpec> join(const std::shared_ptr<const TowerSpec>& a,
                                               const std::shared_ptr<const TowerSpec>& b);

  const std::vector<Generator>& generators() const noexcept { return gens_; }
  bool has_imaginary() const noexcept { return imaginary_.has_value(); }
  std::optional<std::size_t> imaginary_index() const noexcept { return imaginary_; }
  std::optional<std::size_t> find(const std::string& name) const;
  std::optional<std::size_t> find(unsigned exponent, const RatFunc& radicand) const;
  std::uint32_t dimension() const noexcept { return dim_; }

  std::vector<unsigned> exponents(std::uint32_t index) const;
  std::uint32_t index_of(const std::vector<unsigned>& exponents) const;

  // basis[i] * basis[j] = factor * basis[result].
  struct Product {
    std::uint32_t index;
    const RatFunc* factor;  // nullptr means 1
  };
  Product multiply(std::uint32_t i, std::uint32_t j) const;

  bool same_as(const TowerSpec& other) const;
  std::string describe() const;

 private:
  TowerSpec() = default;
  void build_tables();

  std::vector<Generator> gens_;
  std::optional<std::size_t> imaginary_;
  std::vector<std::uint32_t> stride_;
  std::uint32_t dim_ = 1;
  std::vector<std::pair<std::uint32_t, int>> table_;  // dim*dim entries, factor slot or -1
  std::vector<RatFunc> factors_;
};

using TowerSpecPtr = std::shared_ptr<const TowerSpec>;

enum class Sign { Negative = -1, Zero = 0, Positive = 1 };

struct RealEvaluation {
  Sign sign = Sign::Zero;
  Rational lower;  // enclosing interval of the real value
  Rational upper;
};

class TowerElement {
 public:
  using Term = std::pair<std::uint32_t, RatFunc>;

  TowerElement() : spec_(TowerSpec::rational()) {}
  explicit TowerElement(TowerSpecPtr spec) : spec_(std::move(spec)) {}
  TowerElement(TowerSpecPtr spec, const RatFunc& value);
  TowerElement(const RatFunc& value) : TowerElement(TowerSpec::rational(), value) {}  // NOLINT
  TowerElement(const Rational& value) : TowerElement(RatFunc(value)) {}               // NOLINT
  TowerElement(long value) : TowerElement(RatFunc(value)) {}                          // NOLINT

  static TowerElement generator(const TowerSpecPtr& spec, const std::string& name);
  static TowerElement imaginary_unit(const TowerSpecPtr& spec);
  static TowerElement basis(const TowerSpecPtr& spec, std::uint32_t index, const RatFunc& coeff);

  const TowerSpecPtr& spec() const noexcept { return spec_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  RatFunc coefficient(std::uint32_t index) const;

  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_one() const;
  // True when the element lies in Q(t) (only the unit basis vector is used).
  bool in_base_field() const noexcept { return terms_.empty() || (terms_.size() == 1 && terms_[0].first == 0); }
  RatFunc base_value() const;  // requires in_base_field()
  bool involves_imaginary() const;

  TowerElement operator-() const;
  TowerElement& operator+=(const TowerElement& o);
  TowerElement& operator-=(const TowerElement& o);
  TowerElement& operator*=(const TowerElement& o);
  TowerElement& operator*=(const RatFunc& s);

  friend TowerElement operator+(TowerElement a, const TowerElement& b) { return a += b; }
  friend TowerElement operator-(TowerElement a, const TowerElement& b) { return a -= b; }
  friend TowerElement operator*(const TowerElement& a, const TowerElement& b);
  friend bool operator==(const TowerElement& a, const TowerElement& b);

  TowerElement pow(unsigned e) const;
  // Inverse via the regular representation; throws ZeroDivisor when singular.
  TowerElement inv() const;
  // Complex conjugation: i -> -i, real generators fixed.
  TowerElement conj() const;
  // Re-expresses the element in a tower containing all of its generators.
  TowerElement embed(const TowerSpecPtr& target) const;

  // Real value at t = t0 under the real-branch convention: square roots are
  // non-negative, the cube root is the real one. Exact sign via a canonical
  // form over Q, enclosure by interval refinement up to `precision_bits`.
  RealEvaluation eval_real(const Rational& t0, unsigned precision_bits = 256) const;

  std::string to_string(const std::string& var = "t") const;

 private:
  void add_term(std::uint32_t index, const RatFunc& c);
  TowerSpecPtr spec_;
  std::vector<Term> terms_;  // sorted by index, no zero coefficients
};

TowerElement tower_mul(const TowerElement& a, const TowerElement& b);
TowerElement tower_inv(const TowerElement& a);
bool tower_is_zero(const TowerElement& a);
RealEvaluation tower_eval_real(const TowerElement& a, const Rational& t0, unsigned precision_bits);

// Builds a tower from a list of radicals. Radicands that depend on t become
// generators as given; constant radicands are reduced to square roots of
// primes (resp. one cube-free integer) so that, e.g., sqrt(6) and sqrt(2)
// share the generator sqrt(2).
class RadicalBuilder {
 public:
  using Handle = std::size_t;

  Handle sqrt(const RatFunc& radicand, const std::string& name = {});
  Handle cbrt(const RatFunc& radicand, const std::string& name = {});
  void use_imaginary_unit() { imaginary_ = true; }

  // Freezes the tower; throws DependentGenerators when independence fails.
  TowerSpecPtr build();
  // Value of a registered radical in the built tower.
  TowerElement root(Handle h) const;

 private:
  // value = factor * (product of listed generators) * (i when imaginary)
  struct Recipe {
    Rational factor;
    std::vector<std::size_t> generators;
    bool imaginary = false;
  };
  std::size_t intern(unsigned exponent, const RatFunc& radicand, const std::string& name);
  Handle add(Recipe recipe);

  std::vector<Generator> gens_;
  std::vector<Recipe> recipes_;
  bool imaginary_ = false;
  TowerSpecPtr spec_;
  std::vector<TowerElement> roots_;
};

std::string radical_name(unsigned exponent, const RatFunc& radicand);

// Substitutes t = t0, mapping elements into a tower of constant radicals
// (square roots of primes, at most one cube-free integer, i for the
// imaginary unit) where independence holds by construction. Throws
// NegativeRadicand when a used real quadratic radicand is negative at t0 and
// PoleAtParameter at poles.
std::vector<TowerElement> specialize(const std::vector<TowerElement>& elems, const Rational& t0);

}  // namespace tubecheck
