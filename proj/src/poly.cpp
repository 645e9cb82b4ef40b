#include "tubecheck/poly.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>

#include "tubecheck/error.hpp"

namespace tubecheck {

// ---------------------------------------------------------------------------
// VariableSpace

SpacePtr VariableSpace::make(std::vector<Variable> vars, std::string field_parameter) {
  auto space = std::make_shared<VariableSpace>();
  space->vars_ = std::move(vars);
  space->field_parameter_ = std::move(field_parameter);
  for (std::size_t i = 0; i < space->vars_.size(); ++i) {
    const auto& v = space->vars_[i];
    if (v.name.empty() || !space->by_name_.emplace(v.name, i).second) {
      raise(ErrorCode::PreconditionViolated, "variable names must be unique and nonempty: '" + v.name + "'");
    }
    if (v.invertible && v.kind != VarKind::Parameter) {
      raise(ErrorCode::PreconditionViolated, "only parameters may be invertible: " + v.name);
    }
  }
  return space;
}

SpacePtr VariableSpace::tube(int n, std::vector<Variable> params, std::string field_parameter) {
  if (n < 1) raise(ErrorCode::DimensionMismatch, "tube dimension must be positive");
  // Spaces are immutable, so equal requests share one instance and most
  // same-space checks reduce to pointer comparison.
  static std::mutex mutex;
  static std::map<std::string, SpacePtr> cache;
  std::string key = std::to_string(n) + "|" + field_parameter;
  for (const auto& p : params) key += "|" + p.name + (p.invertible ? "~" : "");
  std::lock_guard<std::mutex> lock(mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  std::vector<Variable> vars;
  const char* prefixes[] = {"x", "y", "z", "zb"};
  const VarKind kinds[] = {VarKind::Real, VarKind::Real, VarKind::Complex, VarKind::ComplexConj};
  for (int block = 0; block < 4; ++block) {
    for (int j = 0; j <= n; ++j) vars.push_back({prefixes[block] + std::to_string(j), kinds[block], false});
  }
  for (auto& p : params) {
    p.kind = VarKind::Parameter;
    vars.push_back(std::move(p));
  }
  auto space = make(std::move(vars), std::move(field_parameter));
  std::const_pointer_cast<VariableSpace>(space)->n_ = n;
  cache.emplace(key, space);
  return space;
}

std::optional<std::size_t> VariableSpace::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::size_t VariableSpace::index(const std::string& name) const {
  auto i = find(name);
  if (!i) raise(ErrorCode::UnknownVariable, name);
  return *i;
}

std::size_t VariableSpace::x(int j) const { return index("x" + std::to_string(j)); }
std::size_t VariableSpace::y(int j) const { return index("y" + std::to_string(j)); }
std::size_t VariableSpace::z(int j) const { return index("z" + std::to_string(j)); }
std::size_t VariableSpace::zb(int j) const { return index("zb" + std::to_string(j)); }

bool VariableSpace::same_as(const VariableSpace& other) const {
  if (this == &other) return true;
  if (vars_.size() != other.vars_.size() || field_parameter_ != other.field_parameter_) return false;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    const auto& a = vars_[i];
    const auto& b = other.vars_[i];
    if (a.name != b.name || a.kind != b.kind || a.invertible != b.invertible) return false;
  }
  return true;
}

std::vector<std::size_t> tube_x_vars(const VariableSpace& space, int from) {
  std::vector<std::size_t> out;
  for (int j = from; j <= space.dimension(); ++j) out.push_back(space.x(j));
  return out;
}

// ---------------------------------------------------------------------------
// MPoly

namespace {

int total(const MPoly::Exponents& e) {
  return std::accumulate(e.begin(), e.end(), 0, [](int s, std::int16_t v) { return s + v; });
}

}  // namespace

bool MPoly::Grlex::operator()(const Exponents& a, const Exponents& b) const {
  const int da = total(a), db = total(b);
  if (da != db) return da < db;
  return a < b;
}

MPoly::MPoly(SpacePtr space, const TowerElement& constant) : space_(std::move(space)) {
  if (!constant.is_zero()) terms_.emplace(Exponents(space_->size(), 0), constant);
}

MPoly MPoly::variable(const SpacePtr& space, std::size_t index) {
  if (index >= space->size()) raise(ErrorCode::UnknownVariable, "variable index out of range");
  Exponents e(space->size(), 0);
  e[index] = 1;
  return monomial(space, std::move(e), TowerElement(1));
}

MPoly MPoly::variable(const SpacePtr& space, const std::string& name) {
  return variable(space, space->index(name));
}

MPoly MPoly::monomial(const SpacePtr& space, Exponents e, const TowerElement& c) {
  if (e.size() != space->size()) raise(ErrorCode::DimensionMismatch, "exponent vector arity");
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] < 0 && !space->var(i).invertible) {
      raise(ErrorCode::PreconditionViolated, "negative exponent on " + space->var(i).name);
    }
  }
  MPoly p(space);
  if (!c.is_zero()) p.terms_.emplace(std::move(e), c);
  return p;
}

bool MPoly::is_constant() const {
  return terms_.empty() ||
         (terms_.size() == 1 && std::all_of(terms_.begin()->first.begin(), terms_.begin()->first.end(),
                                            [](std::int16_t v) { return v == 0; }));
}

TowerElement MPoly::constant_term() const { return coefficient(Exponents(space_->size(), 0)); }

TowerElement MPoly::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? TowerElement() : it->second;
}

int MPoly::degree(const std::vector<std::size_t>& vars) const {
  int best = -1;
  for (const auto& [e, c] : terms_) {
    int d = 0;
    if (vars.empty()) {
      d = total(e);
    } else {
      for (std::size_t v : vars) d += e[v];
    }
    best = std::max(best, d);
  }
  return best;
}

int MPoly::degree_in(std::size_t var) const {
  int best = -1;
  for (const auto& [e, c] : terms_) best = std::max(best, static_cast<int>(e[var]));
  return best;
}

bool MPoly::depends_on(std::size_t var) const {
  return std::any_of(terms_.begin(), terms_.end(), [&](const auto& t) { return t.first[var] != 0; });
}

bool MPoly::only_kinds(std::initializer_list<VarKind> kinds) const {
  for (const auto& [e, c] : terms_) {
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (std::find(kinds.begin(), kinds.end(), space_->var(i).kind) == kinds.end()) return false;
    }
  }
  return true;
}

TowerSpecPtr MPoly::coefficient_spec() const {
  TowerSpecPtr spec = TowerSpec::rational();
  for (const auto& [e, c] : terms_) {
    if (c.in_base_field() || c.spec() == spec) continue;
    spec = TowerSpec::join(spec, c.spec());
  }
  return spec;
}

void MPoly::require_same_space(const MPoly& o) const {
  if (space_ != o.space_ && !space_->same_as(*o.space_)) {
    raise(ErrorCode::DimensionMismatch, "polynomials live in different variable spaces");
  }
}

void MPoly::add_term(const Exponents& e, const TowerElement& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

MPoly MPoly::operator-() const {
  MPoly r = *this;
  for (auto& [e, c] : r.terms_) c = -c;
  return r;
}

MPoly& MPoly::operator+=(const MPoly& o) {
  require_same_space(o);
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

MPoly& MPoly::operator-=(const MPoly& o) {
  require_same_space(o);
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

MPoly operator*(const MPoly& a, const MPoly& b) {
  a.require_same_space(b);
  MPoly r(a.space_);
  if (a.is_zero() || b.is_zero()) return r;
  MPoly::Exponents e(a.space_->size());
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t k = 0; k < e.size(); ++k) e[k] = static_cast<std::int16_t>(ea[k] + eb[k]);
      auto [it, inserted] = r.terms_.try_emplace(e);
      if (inserted) {
        it->second = ca * cb;
      } else {
        it->second += ca * cb;
      }
    }
  }
  for (auto it = r.terms_.begin(); it != r.terms_.end();) {
    it = it->second.is_zero() ? r.terms_.erase(it) : std::next(it);
  }
  return r;
}

MPoly& MPoly::operator*=(const MPoly& o) { return *this = *this * o; }

MPoly& MPoly::operator*=(const TowerElement& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  for (auto it = terms_.begin(); it != terms_.end();) {
    it = it->second.is_zero() ? terms_.erase(it) : std::next(it);
  }
  return *this;
}

bool operator==(const MPoly& a, const MPoly& b) {
  if (a.space_ != b.space_ && !a.space_->same_as(*b.space_)) return false;
  if (a.terms_.size() != b.terms_.size()) return false;
  auto ia = a.terms_.begin();
  auto ib = b.terms_.begin();
  for (; ia != a.terms_.end(); ++ia, ++ib) {
    if (ia->first != ib->first || !(ia->second - ib->second).is_zero()) return false;
  }
  return true;
}

MPoly MPoly::pow(unsigned e) const {
  MPoly result(space_, TowerElement(1));
  MPoly base = *this;
  while (e) {
    if (e & 1u) result *= base;
    e >>= 1u;
    if (e) base *= base;
  }
  return result;
}

MPoly MPoly::inv() const {
  if (terms_.size() != 1) {
    raise(ErrorCode::ZeroDivisor, "only single-term polynomials are invertible: " + to_string());
  }
  const auto& [e, c] = *terms_.begin();
  Exponents ne(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (e[k] != 0 && !space_->var(k).invertible) {
      raise(ErrorCode::ZeroDivisor, "variable " + space_->var(k).name + " is not invertible");
    }
    ne[k] = static_cast<std::int16_t>(-e[k]);
  }
  return monomial(space_, std::move(ne), c.inv());
}

MPoly MPoly::derivative(std::size_t var) const {
  MPoly r(space_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponents ne = e;
    ne[var] = static_cast<std::int16_t>(ne[var] - 1);
    r.add_term(ne, c * TowerElement(static_cast<long>(e[var])));
  }
  return r;
}

MPoly MPoly::conj() const {
  std::vector<std::size_t> perm(space_->size());
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = 0; i < space_->size(); ++i) {
    const auto& v = space_->var(i);
    if (v.kind == VarKind::Complex) {
      if (auto j = space_->find("zb" + v.name.substr(1))) {
        perm[i] = *j;
        perm[*j] = i;
      }
    }
  }
  MPoly r(space_);
  for (const auto& [e, c] : terms_) {
    Exponents ne(e.size());
    for (std::size_t k = 0; k < e.size(); ++k) ne[perm[k]] = e[k];
    r.add_term(ne, c.conj());
  }
  return r;
}

std::string MPoly::to_string() const {
  if (terms_.empty()) return "0";
  const std::string& var = space_->field_parameter();
  std::string out;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    std::string mono;
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (e[k] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += space_->var(k).name;
      if (e[k] != 1) mono += "^" + std::to_string(e[k]);
    }
    std::string cs = c.to_string(var);
    const bool compound = cs.find(' ') != std::string::npos;
    std::string term;
    if (mono.empty()) {
      term = compound && terms_.size() > 1 ? "(" + cs + ")" : cs;
    } else if (c.is_one()) {
      term = mono;
    } else if ((-c).is_one()) {
      term = "-" + mono;
    } else {
      term = (compound ? "(" + cs + ")" : cs) + "*" + mono;
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

// ---------------------------------------------------------------------------
// Free operations

MPoly mpoly_substitute(const MPoly& p, const Bindings& bindings) {
  const SpacePtr& space = p.space();
  for (const auto& [var, image] : bindings) {
    if (var >= space->size()) raise(ErrorCode::UnknownVariable, "binding index out of range");
    if (image.space() != space && !image.space()->same_as(*space)) {
      raise(ErrorCode::DimensionMismatch, "binding image lives in a different space");
    }
  }
  std::map<std::pair<std::size_t, int>, MPoly> cache;
  auto power = [&](std::size_t var, int e) -> const MPoly& {
    auto key = std::make_pair(var, e);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const MPoly& image = bindings.at(var);
    MPoly value(space);
    if (e < 0) {
      value = image.inv().pow(static_cast<unsigned>(-e));
    } else if (e > 1 && cache.count({var, e - 1})) {
      value = cache.at({var, e - 1}) * image;
    } else {
      value = image.pow(static_cast<unsigned>(e));
    }
    return cache.emplace(key, std::move(value)).first->second;
  };

  MPoly result(space);
  for (const auto& [e, c] : p.terms()) {
    MPoly::Exponents free = e;
    std::vector<const MPoly*> factors;
    for (const auto& [var, image] : bindings) {
      if (e[var] == 0) continue;
      free[var] = 0;
      factors.push_back(&power(var, e[var]));
    }
    MPoly term = MPoly::monomial(space, std::move(free), c);
    // Multiply smaller factors first to keep intermediate sizes down.
    std::sort(factors.begin(), factors.end(), [](const MPoly* a, const MPoly* b) { return a->size() < b->size(); });
    for (const MPoly* f : factors) {
      term = term * *f;
      if (term.is_zero()) break;
    }
    result += term;
  }
  return result;
}

MPoly mpoly_substitute(const MPoly& p, const std::map<std::string, MPoly>& bindings) {
  Bindings b;
  for (const auto& [name, image] : bindings) b.emplace(p.space()->index(name), image);
  return mpoly_substitute(p, b);
}

MPoly homogeneous_component(const MPoly& p, int d, const std::vector<std::size_t>& vars) {
  MPoly r(p.space());
  for (const auto& [e, c] : p.terms()) {
    int deg = 0;
    for (std::size_t v : vars) deg += e.at(v);
    if (deg == d) r += MPoly::monomial(p.space(), e, c);
  }
  return r;
}

ComplexSplit complex_split(const MPoly& e) {
  const SpacePtr& space = e.space();
  const TowerSpecPtr spec = TowerSpec::join(e.coefficient_spec(), TowerSpec::make({}, true));
  const TowerElement i = TowerElement::imaginary_unit(spec);
  const MPoly lifted = e.map_coefficients([&](const TowerElement& c) { return c.embed(spec); });

  Bindings bindings;
  for (std::size_t v = 0; v < space->size(); ++v) {
    const auto& var = space->var(v);
    if (var.kind != VarKind::Complex && var.kind != VarKind::ComplexConj) continue;
    if (!lifted.depends_on(v)) continue;
    const std::string suffix = var.name.substr(var.kind == VarKind::Complex ? 1 : 2);
    MPoly x = MPoly::variable(space, "x" + suffix);
    MPoly y = MPoly::variable(space, "y" + suffix) * i;
    bindings.emplace(v, var.kind == VarKind::Complex ? x + y : x - y);
  }
  MPoly expanded = mpoly_substitute(lifted, bindings);

  const std::size_t ii = *spec->imaginary_index();
  ComplexSplit out{MPoly(space), MPoly(space)};
  for (const auto& [exps, c] : expanded.terms()) {
    TowerElement re(spec), im(spec);
    for (const auto& [index, coeff] : c.terms()) {
      auto ex = spec->exponents(index);
      if (ex[ii] == 0) {
        re += TowerElement::basis(spec, index, coeff);
      } else {
        ex[ii] = 0;
        im += TowerElement::basis(spec, spec->index_of(ex), coeff);
      }
    }
    out.re += MPoly::monomial(space, exps, re);
    out.im += MPoly::monomial(space, exps, im);
  }
  return out;
}

}  // namespace tubecheck
