#include "tubecheck/geometry.hpp"

#include <algorithm>
#include <map>

#include "tubecheck/error.hpp"

namespace tubecheck {

namespace {

const std::map<std::string, FamilyTag>& family_table() {
  static const std::map<std::string, FamilyTag> table{
      {"M1", FamilyTag::M1},   {"M2", FamilyTag::M2},       {"QuadricTube", FamilyTag::QuadricTube},
      {"Pt", FamilyTag::Pt},   {"CalPt", FamilyTag::CalPt}, {"FrakP", FamilyTag::FrakP},
      {"St", FamilyTag::St},   {"GenHyper", FamilyTag::GenHyper}, {"Custom", FamilyTag::Custom},
  };
  return table;
}

[[noreturn]] void out_of_domain(FamilyTag tag, const std::string& what) {
  raise(ErrorCode::ParameterOutOfDomain, family_name(tag) + ": " + what);
}

RatFunc parameter(const std::optional<Rational>& t) { return t ? RatFunc(*t) : RatFunc::t(); }

// Builds polynomials in x1..xn of one tube space.
struct Builder {
  SpacePtr space;
  MPoly x(int j) const { return MPoly::variable(space, space->x(j)); }
  MPoly k(const TowerElement& c) const { return MPoly(space, c); }
  MPoly sum_squares(int from, int to) const {
    MPoly s(space);
    for (int j = from; j <= to; ++j) s += x(j) * x(j);
    return s;
  }
};

bool depends_on_t(const TowerElement& e) {
  for (const auto& [index, c] : e.terms()) {
    if (!c.is_constant()) return true;
    auto ex = e.spec()->exponents(index);
    for (std::size_t k = 0; k < ex.size(); ++k) {
      if (ex[k] && !e.spec()->generators()[k].radicand.is_constant()) return true;
    }
  }
  return false;
}

void require_square(const SymMatrix& m) {
  for (const auto& row : m) {
    if (row.size() != m.size()) raise(ErrorCode::DimensionMismatch, "matrix is not square");
  }
}

}  // namespace

std::string family_name(FamilyTag tag) {
  for (const auto& [name, t] : family_table()) {
    if (t == tag) return name;
  }
  return "?";
}

FamilyTag parse_family(const std::string& name) {
  auto it = family_table().find(name);
  if (it == family_table().end()) raise(ErrorCode::PreconditionViolated, "unknown family: " + name);
  return it->second;
}

bool below_pt_bound(const Rational& t) {
  // 17 + 12*sqrt(2) is irrational: compare (t - 17)^2 with 288 when t > 17.
  if (t <= 17) return true;
  Rational d = t - 17;
  return d * d <= 288;
}

FamilyRadicals family_radicals(FamilyTag tag, const std::optional<Rational>& t, bool for_map) {
  if (tag != FamilyTag::Pt && tag != FamilyTag::CalPt) {
    raise(ErrorCode::PreconditionViolated, "family radicals exist only for Pt and CalPt");
  }
  const RatFunc tt = parameter(t);
  RatFunc gamma_radicand = (tt * tt - RatFunc(34) * tt + RatFunc(1)) / (RatFunc(3) * tt);
  if (tag == FamilyTag::Pt) gamma_radicand = -gamma_radicand;

  RadicalBuilder rb;
  auto ha = rb.sqrt(RatFunc(2) * (RatFunc(1) + tt));
  auto hb = rb.sqrt(RatFunc(3) * tt);
  auto hg = rb.sqrt(gamma_radicand);
  std::optional<RadicalBuilder::Handle> h2;
  if (for_map) {
    h2 = rb.sqrt(RatFunc(2));
    rb.use_imaginary_unit();
  }
  auto spec = rb.build();
  FamilyRadicals r{rb.root(ha), rb.root(hb), rb.root(hg), TowerElement(), TowerElement()};
  if (for_map) {
    r.root2_inv = rb.root(*h2) * TowerElement(make_rational(1, 2));
    r.i = TowerElement::imaginary_unit(spec);
  }
  return r;
}

TubeBase instantiate_family(FamilyTag tag, FamilyParams params) {
  const int n = params.n;
  const int k = params.k;
  const auto& t = params.t;
  auto need_n = [&](int lo) {
    if (n < lo) out_of_domain(tag, "requires n >= " + std::to_string(lo) + ", got " + std::to_string(n));
  };

  switch (tag) {
    case FamilyTag::M1:
    case FamilyTag::M2:
      need_n(2);
      break;
    case FamilyTag::QuadricTube:
      need_n(1);
      if (k < 0 || k > n) out_of_domain(tag, "requires 0 <= k <= n");
      break;
    case FamilyTag::Pt:
      need_n(7);
      if (k < 5 || k > n - 2) out_of_domain(tag, "requires 5 <= k <= n-2");
      if (t && (*t < 1 || !below_pt_bound(*t))) out_of_domain(tag, "requires 1 <= t <= 17+12*sqrt(2)");
      break;
    case FamilyTag::CalPt:
      need_n(7);
      if (k < 4 || k > n - 3) out_of_domain(tag, "requires 4 <= k <= n-3");
      if (t && below_pt_bound(*t)) out_of_domain(tag, "requires t >= 17+12*sqrt(2)");
      break;
    case FamilyTag::FrakP:
      need_n(7);
      if (params.p < 0 || params.p > n - 7) out_of_domain(tag, "requires 0 <= p <= n-7");
      if (t && (*t == 2 || *t == -2)) out_of_domain(tag, "requires tau != +-2");
      break;
    case FamilyTag::St:
      if (n != 6) out_of_domain(tag, "is defined for n = 6");
      break;
    case FamilyTag::GenHyper:
    case FamilyTag::Custom:
      raise(ErrorCode::PreconditionViolated, family_name(tag) + " is not a catalog family");
  }

  Builder b{VariableSpace::tube(n, {}, tag == FamilyTag::FrakP ? "tau" : "t")};
  const TowerElement tt(parameter(t));
  auto x = [&](int j) { return b.x(j); };
  auto c = [&](const TowerElement& v) { return b.k(v); };
  MPoly F(b.space);

  switch (tag) {
    case FamilyTag::M1:
      F = b.sum_squares(1, n - 1) - x(n) * x(n);
      break;
    case FamilyTag::M2:
      F = b.sum_squares(1, n - 2) + x(n - 1) * x(n) + x(n).pow(3);
      break;
    case FamilyTag::QuadricTube:
      F = b.sum_squares(1, k) - b.sum_squares(k + 1, n);
      break;
    case FamilyTag::Pt: {
      auto r = family_radicals(tag, t, false);
      MPoly q = x(k - 1) * x(k - 1);
      MPoly s = x(k + 1) * x(k + 1);
      F = b.sum_squares(1, k - 2) + x(k - 1) * x(k) + x(k + 1) * x(k + 2) - b.sum_squares(k + 3, n) +
          c(TowerElement(2) * r.alpha) * x(k - 4) * x(k - 1) * x(k + 1) +
          c(TowerElement(2) * r.beta) * x(k - 3) * s +
          c((TowerElement(1) + tt) * r.beta.inv()) * x(k - 3) * q + c(r.gamma) * x(k - 2) * q +
          (q + s) * (q + c(tt) * s);
      break;
    }
    case FamilyTag::CalPt: {
      auto r = family_radicals(tag, t, false);
      MPoly q = x(k) * x(k);
      MPoly s = x(k + 2) * x(k + 2);
      F = b.sum_squares(1, k - 2) - x(k - 1) * x(k - 1) + x(k) * x(k + 1) + x(k + 2) * x(k + 3) -
          b.sum_squares(k + 4, n) + c(TowerElement(2) * r.alpha) * x(k - 3) * x(k) * x(k + 2) +
          c(TowerElement(2) * r.beta) * x(k - 2) * s +
          c((TowerElement(1) + tt) * r.beta.inv()) * x(k - 2) * q + c(r.gamma) * x(k - 1) * q +
          (q + s) * (q + c(tt) * s);
      break;
    }
    case FamilyTag::FrakP: {
      const int p = params.p;
      auto k4 = c(TowerElement(4));
      F = k4 * x(1) * x(7) + k4 * x(2) * x(6) - c(tt) * x(3) * x(3) + c(TowerElement(2)) * x(4) * x(4) -
          c(tt) * x(5) * x(5) + k4 * x(3) * x(5) + b.sum_squares(8, p + 7) - b.sum_squares(p + 8, n);
      MPoly x1s = x(1) * x(1), x2s = x(2) * x(2);
      F += -c(TowerElement(2) * tt) * x1s * x(3) - c(TowerElement(2) * tt) * x2s * x(5) + k4 * x1s * x(5) +
           k4 * x2s * x(3) + c(TowerElement(8)) * x(1) * x(2) * x(4);
      const TowerElement third = tt * TowerElement(make_rational(1, 3));
      F += -c(third) * x1s * x1s + k4 * x1s * x2s - c(third) * x2s * x2s;
      break;
    }
    case FamilyTag::St:
      F = x(1) * x(6) + x(2) * x(5) + x(3) * x(4) + x(4).pow(3) + x(5).pow(3) + x(6).pow(3) +
          c(tt) * x(4) * x(5) * x(6);
      break;
    default:
      break;
  }
  return TubeBase{tag, params, b.space, std::move(F)};
}

TubeBase custom_base(SpacePtr space, MPoly F) {
  if (space->dimension() < 1) raise(ErrorCode::PreconditionViolated, "graph needs a tube space");
  if (!F.only_kinds({VarKind::Real, VarKind::Parameter}) || F.depends_on(space->x(0))) {
    raise(ErrorCode::PreconditionViolated, "graph function must involve only x1..xn and parameters");
  }
  for (int j = 0; j <= space->dimension(); ++j) {
    if (F.depends_on(space->y(j))) raise(ErrorCode::PreconditionViolated, "graph function involves y variables");
  }
  FamilyParams params;
  params.n = space->dimension();
  return TubeBase{FamilyTag::Custom, params, std::move(space), std::move(F)};
}

// ---------------------------------------------------------------------------
// Quadrics and matrices

HermitianQuadric HermitianQuadric::standard(int k, int n) {
  if (n < 1 || k < 0 || k > n) raise(ErrorCode::DimensionMismatch, "standard quadric needs 0 <= k <= n");
  SymMatrix H(n, std::vector<TowerElement>(n));
  for (int j = 0; j < n; ++j) H[j][j] = TowerElement(j < k ? 1 : -1);
  return HermitianQuadric{std::move(H)};
}

HermitianQuadric HermitianQuadric::primed33() {
  SymMatrix H(6, std::vector<TowerElement>(6));
  for (int j = 0; j < 6; ++j) H[j][5 - j] = TowerElement(make_rational(1, 4));
  return HermitianQuadric{std::move(H)};
}

HermitianQuadric HermitianQuadric::from_matrix(SymMatrix H) {
  require_square(H);
  for (std::size_t j = 0; j < H.size(); ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      if (!(H[j][k] == H[k][j])) raise(ErrorCode::PreconditionViolated, "Hermitian matrix must be symmetric");
    }
  }
  if (determinant(H).is_zero()) raise(ErrorCode::SingularMatrix, "quadric form is degenerate");
  return HermitianQuadric{std::move(H)};
}

TowerElement determinant(const SymMatrix& input) {
  require_square(input);
  SymMatrix m = input;
  const std::size_t n = m.size();
  TowerElement det(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m[pivot][col].is_zero()) ++pivot;
    if (pivot == n) return TowerElement();
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      det = -det;
    }
    det = det * m[col][col];
    const TowerElement inv = m[col][col].inv();
    for (std::size_t r = col + 1; r < n; ++r) {
      if (m[r][col].is_zero()) continue;
      const TowerElement f = m[r][col] * inv;
      for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return det;
}

SymMatrix invert(const SymMatrix& input) {
  require_square(input);
  const std::size_t n = input.size();
  SymMatrix m = input;
  SymMatrix inv(n, std::vector<TowerElement>(n));
  for (std::size_t j = 0; j < n; ++j) inv[j][j] = TowerElement(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m[pivot][col].is_zero()) ++pivot;
    if (pivot == n) raise(ErrorCode::SingularMatrix, "matrix is singular");
    std::swap(m[pivot], m[col]);
    std::swap(inv[pivot], inv[col]);
    const TowerElement p = m[col][col].inv();
    for (std::size_t c = 0; c < n; ++c) {
      m[col][c] = m[col][c] * p;
      inv[col][c] = inv[col][c] * p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col].is_zero()) continue;
      const TowerElement f = m[r][col];
      for (std::size_t c = 0; c < n; ++c) {
        if (!m[col][c].is_zero()) m[r][c] -= f * m[col][c];
        if (!inv[col][c].is_zero()) inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

// ---------------------------------------------------------------------------
// Second-order data

SymMatrix hessian(const TubeBase& base, const std::vector<Rational>& point) {
  const int n = base.n();
  if (static_cast<int>(point.size()) != n) {
    raise(ErrorCode::DimensionMismatch, "point has " + std::to_string(point.size()) + " coordinates, expected " +
                                            std::to_string(n));
  }
  Bindings at;
  for (int j = 1; j <= n; ++j) at.emplace(base.space->x(j), MPoly(base.space, TowerElement(point[j - 1])));
  SymMatrix H(n, std::vector<TowerElement>(n));
  for (int j = 1; j <= n; ++j) {
    const MPoly dj = base.F.derivative(base.space->x(j));
    for (int k = j; k <= n; ++k) {
      const MPoly v = mpoly_substitute(dj.derivative(base.space->x(k)), at);
      if (!v.is_constant()) raise(ErrorCode::PreconditionViolated, "Hessian entries depend on scalar parameters");
      H[j - 1][k - 1] = H[k - 1][j - 1] = v.constant_term();
    }
  }
  return H;
}

SignatureReport signature(const SymMatrix& input, const std::optional<Rational>& t0) {
  require_square(input);
  const std::size_t n = input.size();
  std::vector<TowerElement> flat;
  bool symbolic = false;
  for (const auto& row : input) {
    for (const auto& e : row) {
      symbolic = symbolic || depends_on_t(e);
      flat.push_back(e);
    }
  }
  if (symbolic && !t0) raise(ErrorCode::PreconditionViolated, "matrix depends on t; a value t0 is required");
  flat = specialize(flat, t0 ? *t0 : Rational(0));

  SymMatrix a(n, std::vector<TowerElement>(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) a[j][k] = flat[j * n + k];
  }

  SignatureReport report;
  report.t0 = t0;
  std::vector<std::size_t> active(n);
  for (std::size_t j = 0; j < n; ++j) active[j] = j;
  while (!active.empty()) {
    auto pivot = std::find_if(active.begin(), active.end(), [&](std::size_t j) { return !a[j][j].is_zero(); });
    if (pivot == active.end()) {
      // All diagonal entries vanish: e_i <- e_i + e_j on a nonzero pair gives
      // the diagonal entry 2 a_ij.
      std::optional<std::pair<std::size_t, std::size_t>> pair;
      for (std::size_t u = 0; u < active.size() && !pair; ++u) {
        for (std::size_t v = u + 1; v < active.size() && !pair; ++v) {
          if (!a[active[u]][active[v]].is_zero()) pair = {active[u], active[v]};
        }
      }
      if (!pair) {
        report.zeros += static_cast<int>(active.size());
        break;
      }
      const auto [i, j] = *pair;
      for (std::size_t k : active) a[i][k] += a[j][k];
      for (std::size_t k : active) a[k][i] += a[k][j];
      pivot = std::find(active.begin(), active.end(), i);
    }
    const std::size_t p = *pivot;
    const Sign s = a[p][p].eval_real(Rational(0)).sign;
    if (s == Sign::Positive) ++report.positives;
    if (s == Sign::Negative) ++report.negatives;
    if (s == Sign::Zero) raise(ErrorCode::PreconditionViolated, "nonzero pivot with zero real value");
    active.erase(pivot);
    const TowerElement inv = a[p][p].inv();
    for (std::size_t j : active) {
      if (a[j][p].is_zero()) continue;
      const TowerElement f = a[j][p] * inv;
      for (std::size_t k : active) {
        if (!a[p][k].is_zero()) a[j][k] -= f * a[p][k];
      }
    }
  }
  return report;
}

SignatureReport levi_signature(const TubeBase& base, const std::vector<Rational>& point,
                               const std::optional<Rational>& t0) {
  SignatureReport r = signature(hessian(base, point), t0);
  r.point = point;
  return r;
}

namespace {

// Coefficients of a homogeneous component over x1..xn, rejecting parameters.
std::vector<std::pair<std::vector<int>, TowerElement>> x_terms(const TubeBase& base, int degree) {
  const auto xs = tube_x_vars(*base.space);
  const MPoly part = homogeneous_component(base.F, degree, xs);
  std::vector<std::pair<std::vector<int>, TowerElement>> out;
  for (const auto& [e, c] : part.terms()) {
    std::vector<int> idx;
    for (std::size_t v = 0; v < e.size(); ++v) {
      if (e[v] == 0) continue;
      auto pos = std::find(xs.begin(), xs.end(), v);
      if (pos == xs.end()) {
        raise(ErrorCode::PreconditionViolated, "degree-" + std::to_string(degree) + " part involves parameters");
      }
      for (int r = 0; r < e[v]; ++r) idx.push_back(static_cast<int>(pos - xs.begin()));
    }
    out.emplace_back(std::move(idx), c);
  }
  return out;
}

}  // namespace

SymMatrix quadratic_matrix(const TubeBase& base) {
  const int n = base.n();
  SymMatrix A(n, std::vector<TowerElement>(n));
  const TowerElement half(make_rational(1, 2));
  for (const auto& [idx, c] : x_terms(base, 2)) {
    if (idx[0] == idx[1]) {
      A[idx[0]][idx[0]] = c;
    } else {
      A[idx[0]][idx[1]] = A[idx[1]][idx[0]] = c * half;
    }
  }
  return A;
}

std::vector<TowerElement> cubic_trace(const TubeBase& base) {
  const int n = base.n();
  SymMatrix Ainv;
  try {
    Ainv = invert(quadratic_matrix(base));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularMatrix) throw;
    raise(ErrorCode::DegenerateQuadraticPart, "quadratic part of F is degenerate");
  }
  // C[i][j][k], fully symmetric: each monomial's coefficient is split evenly
  // over its distinct index permutations.
  std::vector<TowerElement> C(static_cast<std::size_t>(n) * n * n);
  auto at = [&](int i, int j, int k) -> TowerElement& { return C[(static_cast<std::size_t>(i) * n + j) * n + k]; };
  for (auto [idx, c] : x_terms(base, 3)) {
    std::sort(idx.begin(), idx.end());
    std::vector<std::vector<int>> perms;
    do perms.push_back(idx);
    while (std::next_permutation(idx.begin(), idx.end()));
    const TowerElement share = c * TowerElement(make_rational(1, static_cast<long>(perms.size())));
    for (const auto& p : perms) at(p[0], p[1], p[2]) = share;
  }
  std::vector<TowerElement> v(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        if (!Ainv[j][k].is_zero() && !at(i, j, k).is_zero()) v[i] += Ainv[j][k] * at(i, j, k);
      }
    }
  }
  return v;
}

}  // namespace tubecheck
