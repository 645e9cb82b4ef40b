#pragma once

// Sparse multivariate polynomials with TowerElement coefficients over a
// named variable space: real coordinates x_j, y_j, formal complex
// coordinates z_j and their conjugates, and auxiliary scalar parameters.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tubecheck/tower.hpp"

namespace tubecheck {

enum class VarKind { Real, Parameter, Complex, ComplexConj };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Real;
  // Laurent variable: negative exponents allowed (symbolic nonzero scalars).
  bool invertible = false;
};

class VariableSpace {
 public:
  static std::shared_ptr<const VariableSpace> make(std::vector<Variable> vars,
                                                   std::string field_parameter = "t");
  // x0..xn, y0..yn, z0..zn, zb0..zbn followed by the given parameters.
  static std::shared_ptr<const VariableSpace> tube(int n, std::vector<Variable> params = {},
                                                   std::string field_parameter = "t");

  std::size_t size() const noexcept { return vars_.size(); }
  const Variable& var(std::size_t i) const { return vars_.at(i); }
  const std::vector<Variable>& vars() const noexcept { return vars_; }
  std::optional<std::size_t> find(const std::string& name) const;
  std::size_t index(const std::string& name) const;  // throws UnknownVariable
  // Name of the indeterminate of Q(t) used when rendering coefficients.
  const std::string& field_parameter() const noexcept { return field_parameter_; }
  // Tube dimension n, or -1 when the space is not a tube space.
  int dimension() const noexcept { return n_; }
  std::size_t x(int j) const;
  std::size_t y(int j) const;
  std::size_t z(int j) const;
  std::size_t zb(int j) const;

  bool same_as(const VariableSpace& other) const;

 private:
  std::vector<Variable> vars_;
  std::unordered_map<std::string, std::size_t> by_name_;
  std::string field_parameter_;
  int n_ = -1;
};

using SpacePtr = std::shared_ptr<const VariableSpace>;

class MPoly {
 public:
  using Exponents = std::vector<std::int16_t>;
  // Graded lexicographic: total degree first, then lexicographic.
  struct Grlex {
    bool operator()(const Exponents& a, const Exponents& b) const;
  };
  using TermMap = std::map<Exponents, TowerElement, Grlex>;

  explicit MPoly(SpacePtr space) : space_(std::move(space)) {}
  MPoly(SpacePtr space, const TowerElement& constant);

  static MPoly variable(const SpacePtr& space, const std::string& name);
  static MPoly variable(const SpacePtr& space, std::size_t index);
  static MPoly monomial(const SpacePtr& space, Exponents e, const TowerElement& c);

  const SpacePtr& space() const noexcept { return space_; }
  const TermMap& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const;
  TowerElement constant_term() const;
  TowerElement coefficient(const Exponents& e) const;
  // Largest total degree over the given variables (all when empty).
  int degree(const std::vector<std::size_t>& vars = {}) const;
  int degree_in(std::size_t var) const;
  bool depends_on(std::size_t var) const;
  // True when only variables of the listed kinds occur.
  bool only_kinds(std::initializer_list<VarKind> kinds) const;
  // A tower containing every coefficient's generators.
  TowerSpecPtr coefficient_spec() const;

  MPoly operator-() const;
  MPoly& operator+=(const MPoly& o);
  MPoly& operator-=(const MPoly& o);
  MPoly& operator*=(const MPoly& o);
  MPoly& operator*=(const TowerElement& c);

  friend MPoly operator+(MPoly a, const MPoly& b) { return a += b; }
  friend MPoly operator-(MPoly a, const MPoly& b) { return a -= b; }
  friend MPoly operator*(const MPoly& a, const MPoly& b);
  friend MPoly operator*(MPoly a, const TowerElement& c) { return a *= c; }
  friend MPoly operator*(const TowerElement& c, MPoly a) { return a *= c; }
  friend bool operator==(const MPoly& a, const MPoly& b);

  MPoly pow(unsigned e) const;
  // Inverse of a single term whose variables are all invertible.
  MPoly inv() const;
  MPoly derivative(std::size_t var) const;
  // i -> -i in coefficients and z_j <-> zb_j.
  MPoly conj() const;
  // Applies f to every coefficient, dropping zeros.
  template <class F>
  MPoly map_coefficients(F f) const {
    MPoly r(space_);
    for (const auto& [e, c] : terms_) {
      TowerElement v = f(c);
      if (!v.is_zero()) r.terms_.emplace(e, std::move(v));
    }
    return r;
  }

  std::string to_string() const;

 private:
  void add_term(const Exponents& e, const TowerElement& c);
  void require_same_space(const MPoly& o) const;
  SpacePtr space_;
  TermMap terms_;
};

using Bindings = std::map<std::size_t, MPoly>;

// Simultaneous substitution var -> image, fully expanded. Powers of each
// image are cached across terms.
MPoly mpoly_substitute(const MPoly& p, const Bindings& bindings);
MPoly mpoly_substitute(const MPoly& p, const std::map<std::string, MPoly>& bindings);

// Terms of total degree exactly d in the listed variables.
MPoly homogeneous_component(const MPoly& p, int d, const std::vector<std::size_t>& vars);

struct ComplexSplit {
  MPoly re;
  MPoly im;
};
// z_j = x_j + i y_j, zb_j = x_j - i y_j; expand and separate by the power of i.
ComplexSplit complex_split(const MPoly& e);

// Indices of x1..xn in a tube space.
std::vector<std::size_t> tube_x_vars(const VariableSpace& space, int from = 1);

}  // namespace tubecheck
