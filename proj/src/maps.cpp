#include "tubecheck/maps.hpp"

#include <algorithm>
#include <set>

#include "tubecheck/error.hpp"

namespace tubecheck {

namespace {

const std::map<std::string, MapTag>& map_table() {
  static const std::map<std::string, MapTag> table{
      {"phi1", MapTag::Phi1}, {"phi2", MapTag::Phi2}, {"QuadricToTube", MapTag::QuadricToTube},
      {"Pt", MapTag::Pt},     {"CalPt", MapTag::CalPt}, {"St", MapTag::St},
  };
  return table;
}

TowerElement frac(long p, long q) { return TowerElement(make_rational(p, q)); }

TowerSpecPtr spec_of(const std::vector<const MPoly*>& polys) {
  TowerSpecPtr s = TowerSpec::rational();
  for (const MPoly* p : polys) s = TowerSpec::join(s, p->coefficient_spec());
  return s;
}

MPoly lift(const MPoly& p, const TowerSpecPtr& spec) {
  return p.map_coefficients([&](const TowerElement& c) { return c.embed(spec); });
}

// Builds polynomials in z0..zn of one tube space.
struct ZBuilder {
  SpacePtr space;
  MPoly z(int j) const { return MPoly::variable(space, space->z(j)); }
  MPoly k(const TowerElement& c) const { return MPoly(space, c); }
  MPoly sum_squares(int from, int to) const {
    MPoly s(space);
    for (int j = from; j <= to; ++j) s += z(j) * z(j);
    return s;
  }
};

// Re z*_j, Im z*_j for all components over one tower.
std::vector<ComplexSplit> split_all(const std::vector<MPoly>& comps, const TowerSpecPtr& spec) {
  std::vector<ComplexSplit> out;
  out.reserve(comps.size());
  for (const auto& c : comps) {
    auto s = complex_split(lift(c, spec));
    out.push_back({lift(s.re, spec), lift(s.im, spec)});
  }
  return out;
}

// sum H_jk (u_j u_k + v_j v_k) over components 1..n.
MPoly hermitian_value(const std::vector<ComplexSplit>& parts, const SymMatrix& H, const TowerSpecPtr& spec) {
  MPoly sum(parts.front().re.space());
  const std::size_t n = H.size();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j; k < n; ++k) {
      if (H[j][k].is_zero()) continue;
      TowerElement h = H[j][k].embed(spec);
      if (k != j) h = h + h;
      const auto& a = parts[j + 1];
      const auto& b = parts[k + 1];
      sum += (a.re * b.re + a.im * b.im) * h;
    }
  }
  return sum;
}

bool only_scalars(const MPoly& p) { return p.only_kinds({VarKind::Parameter}); }

// Inverse of a nonzero constant or of a single term in invertible parameters.
MPoly scalar_inverse(const MPoly& p, ErrorCode code, const std::string& what) {
  if (p.is_zero()) raise(code, what + " vanishes");
  if (p.is_constant()) return MPoly(p.space(), p.constant_term().inv());
  if (p.size() == 1 && only_scalars(p)) {
    try {
      return p.inv();
    } catch (const Error&) {
    }
  }
  raise(code, what + " is not an invertible scalar: " + p.to_string());
}

// Coefficient of the x-monomial prod x_j^{e_j} in F, as a scalar MPoly.
MPoly coeff_x(const MPoly& F, const std::map<int, int>& mono) {
  const auto& space = *F.space();
  const int n = space.dimension();
  MPoly out(F.space());
  for (const auto& [e, c] : F.terms()) {
    bool match = true;
    for (int j = 0; j <= n && match; ++j) {
      auto it = mono.find(j);
      const int want = it == mono.end() ? 0 : it->second;
      if (e[space.x(j)] != want || e[space.y(j)] != 0 || e[space.z(j)] != 0 || e[space.zb(j)] != 0) match = false;
    }
    if (!match) continue;
    MPoly::Exponents rest = e;
    for (int j = 0; j <= n; ++j) rest[space.x(j)] = 0;
    out += MPoly::monomial(F.space(), rest, c);
  }
  return out;
}

std::map<int, int> mono2(int a, int b) {
  if (a == b) return {{a, 2}};
  return {{a, 1}, {b, 1}};
}

MPoly xvar(const SpacePtr& s, int j) { return MPoly::variable(s, s->x(j)); }

std::vector<MPoly> linear_coefficients(const MPoly& L, int n) {
  std::vector<MPoly> out;
  for (int j = 1; j <= n; ++j) out.push_back(coeff_x(L, {{j, 1}}));
  return out;
}

std::vector<std::vector<MPoly>> identity_matrix(const SpacePtr& s, int n) {
  std::vector<std::vector<MPoly>> m(n, std::vector<MPoly>(n, MPoly(s)));
  for (int j = 0; j < n; ++j) m[j][j] = MPoly(s, TowerElement(1));
  return m;
}

}  // namespace

std::string map_name(MapTag tag) {
  for (const auto& [name, t] : map_table()) {
    if (t == tag) return name;
  }
  return "?";
}

MapTag parse_map(const std::string& name) {
  auto it = map_table().find(name);
  if (it == map_table().end()) raise(ErrorCode::PreconditionViolated, "unknown map: " + name);
  return it->second;
}

PolyAutomorphism identity_map(const SpacePtr& space) {
  ZBuilder b{space};
  PolyAutomorphism m{"identity", space, {}};
  for (int j = 0; j <= space->dimension(); ++j) m.components.push_back(b.z(j));
  return m;
}

TubeBase catalog_base(MapTag tag, const FamilyParams& params) {
  switch (tag) {
    case MapTag::Phi1:
      return instantiate_family(FamilyTag::M1, params);
    case MapTag::Phi2:
      return instantiate_family(FamilyTag::M2, params);
    case MapTag::QuadricToTube:
      return instantiate_family(FamilyTag::QuadricTube, params);
    case MapTag::Pt:
      return instantiate_family(FamilyTag::Pt, params);
    case MapTag::CalPt:
      return instantiate_family(FamilyTag::CalPt, params);
    case MapTag::St: {
      FamilyParams p = params;
      p.n = 6;
      return instantiate_family(FamilyTag::St, p);
    }
  }
  raise(ErrorCode::PreconditionViolated, "unknown map tag");
}

HermitianQuadric catalog_quadric(MapTag tag, const FamilyParams& params) {
  switch (tag) {
    case MapTag::Phi1:
    case MapTag::Phi2:
      return HermitianQuadric::standard(params.n - 1, params.n);
    case MapTag::QuadricToTube:
    case MapTag::Pt:
    case MapTag::CalPt:
      return HermitianQuadric::standard(params.k, params.n);
    case MapTag::St:
      return HermitianQuadric::primed33();
  }
  raise(ErrorCode::PreconditionViolated, "unknown map tag");
}

PolyAutomorphism catalog_map(MapTag tag, const FamilyParams& params) {
  const TubeBase base = catalog_base(tag, params);  // validates the domain
  const int n = base.n();
  const int k = params.k;
  ZBuilder b{base.space};
  auto z = [&](int j) { return b.z(j); };
  auto c = [&](const TowerElement& v) { return b.k(v); };
  const TowerElement tt(params.t ? RatFunc(*params.t) : RatFunc::t());
  std::vector<MPoly> out(n + 1, MPoly(base.space));

  switch (tag) {
    case MapTag::Phi1:
    case MapTag::Phi2:
    case MapTag::QuadricToTube: {
      RadicalBuilder rb;
      auto h2 = rb.sqrt(RatFunc(2));
      rb.use_imaginary_unit();
      auto spec = rb.build();
      const TowerElement r2 = rb.root(h2);
      const TowerElement r2i = r2 * frac(1, 2);
      const TowerElement i = TowerElement::imaginary_unit(spec);
      if (tag == MapTag::Phi1) {
        out[0] = c(i) * (z(0) - c(frac(1, 2)) * b.sum_squares(1, n - 1) + c(frac(1, 2)) * z(n) * z(n));
        for (int j = 1; j <= n; ++j) out[j] = c(r2i) * z(j);
      } else if (tag == MapTag::Phi2) {
        out[0] = c(i) * (z(0) - c(frac(1, 2)) * b.sum_squares(1, n - 2) - c(frac(1, 2)) * z(n - 1) * z(n) -
                         c(frac(1, 4)) * z(n).pow(3));
        for (int j = 1; j <= n - 2; ++j) out[j] = c(r2i) * z(j);
        MPoly tail = c(frac(1, 4)) * z(n - 1) + c(frac(3, 8)) * z(n) * z(n);
        out[n - 1] = c(r2i) * (z(n) + tail);
        out[n] = c(r2i) * (z(n) - tail);
      } else {
        out[0] = -c(i) * z(0) + b.sum_squares(1, k) - b.sum_squares(k + 1, n);
        for (int j = 1; j <= n; ++j) out[j] = c(r2) * z(j);
      }
      break;
    }
    case MapTag::Pt: {
      auto r = family_radicals(FamilyTag::Pt, params.t, true);
      const TowerElement opt = TowerElement(1) + tt;
      const TowerElement binv = r.beta.inv();
      const TowerElement mi4 = -(r.i * frac(1, 4));
      MPoly q = z(k - 1) * z(k - 1);
      MPoly s = z(k + 1) * z(k + 1);
      out[0] = c(r.i) * (z(0) - c(frac(1, 2)) * b.sum_squares(1, k - 2) - c(frac(1, 2)) * z(k - 1) * z(k) -
                         c(frac(1, 2)) * z(k + 1) * z(k + 2) + c(frac(1, 2)) * b.sum_squares(k + 3, n) -
                         c(r.alpha * frac(1, 2)) * z(k - 4) * z(k - 1) * z(k + 1) -
                         c(r.beta * frac(1, 2)) * z(k - 3) * s - c(opt * binv * frac(1, 4)) * z(k - 3) * q -
                         c(r.gamma * frac(1, 4)) * z(k - 2) * q - c(frac(1, 8)) * (q + s) * (q + c(tt) * s));
      for (int j = 1; j <= k - 5; ++j) out[j] = c(r.root2_inv) * z(j);
      for (int j = k + 3; j <= n; ++j) out[j] = c(r.root2_inv) * z(j);
      out[k - 4] = c(r.root2_inv) * (z(k - 4) + c(r.alpha * frac(1, 2)) * z(k - 1) * z(k + 1));
      out[k - 3] = c(r.root2_inv) * (z(k - 3) + c(r.beta * frac(1, 2)) * s + c(opt * binv * frac(1, 4)) * q);
      out[k - 2] = c(r.root2_inv) * (z(k - 2) + c(r.gamma * frac(1, 4)) * q);
      MPoly P = z(k) + c(r.gamma) * z(k - 2) * z(k - 1) + c(r.alpha) * z(k - 4) * z(k + 1) +
                c(opt * binv) * z(k - 3) * z(k - 1) + z(k - 1).pow(3) + c(opt * frac(1, 2)) * z(k - 1) * s;
      MPoly R = z(k + 2) + c(r.alpha) * z(k - 4) * z(k - 1) + c(TowerElement(2) * r.beta) * z(k - 3) * z(k + 1) +
                c(opt * frac(1, 2)) * q * z(k + 1) + c(tt) * z(k + 1).pow(3);
      out[k - 1] = c(mi4) * (c(TowerElement(2)) * z(k - 1) + P);
      out[k + 1] = c(mi4) * (P - c(TowerElement(2)) * z(k - 1));
      out[k] = c(mi4) * (c(TowerElement(2)) * z(k + 1) + R);
      out[k + 2] = c(mi4) * (R - c(TowerElement(2)) * z(k + 1));
      break;
    }
    case MapTag::CalPt: {
      auto r = family_radicals(FamilyTag::CalPt, params.t, true);
      const TowerElement opt = TowerElement(1) + tt;
      const TowerElement binv = r.beta.inv();
      const TowerElement mi4 = -(r.i * frac(1, 4));
      MPoly q = z(k) * z(k);
      MPoly s = z(k + 2) * z(k + 2);
      out[0] = c(r.i) * (z(0) - c(frac(1, 2)) * b.sum_squares(1, k - 2) + c(frac(1, 2)) * z(k - 1) * z(k - 1) -
                         c(frac(1, 2)) * z(k) * z(k + 1) - c(frac(1, 2)) * z(k + 2) * z(k + 3) +
                         c(frac(1, 2)) * b.sum_squares(k + 4, n) -
                         c(r.alpha * frac(1, 2)) * z(k - 3) * z(k) * z(k + 2) -
                         c(r.beta * frac(1, 2)) * z(k - 2) * s - c(opt * binv * frac(1, 4)) * z(k - 2) * q -
                         c(r.gamma * frac(1, 4)) * z(k - 1) * q - c(frac(1, 8)) * (q + s) * (q + c(tt) * s));
      for (int j = 1; j <= k - 4; ++j) out[j] = c(r.root2_inv) * z(j);
      for (int j = k + 4; j <= n; ++j) out[j] = c(r.root2_inv) * z(j);
      out[k - 3] = c(r.root2_inv) * (z(k - 3) + c(r.alpha * frac(1, 2)) * z(k) * z(k + 2));
      out[k - 2] = c(r.root2_inv) * (z(k - 2) + c(r.beta * frac(1, 2)) * s + c(opt * binv * frac(1, 4)) * q);
      MPoly R = z(k + 3) + c(r.alpha) * z(k - 3) * z(k) + c(TowerElement(2) * r.beta) * z(k - 2) * z(k + 2) +
                c(opt * frac(1, 2)) * q * z(k + 2) + c(tt) * z(k + 2).pow(3);
      MPoly P = z(k + 1) + c(r.gamma) * z(k - 1) * z(k) + c(r.alpha) * z(k - 3) * z(k + 2) +
                c(opt * binv) * z(k - 2) * z(k) + z(k).pow(3) + c(opt * frac(1, 2)) * z(k) * s;
      out[k - 1] = c(mi4) * (c(TowerElement(2)) * z(k + 2) + R);
      out[k + 3] = c(mi4) * (R - c(TowerElement(2)) * z(k + 2));
      out[k] = c(mi4) * (c(TowerElement(2)) * z(k) + P);
      out[k + 2] = c(mi4) * (P - c(TowerElement(2)) * z(k));
      out[k + 1] = c(r.root2_inv) * (z(k - 1) - c(r.gamma * frac(1, 4)) * q);
      break;
    }
    case MapTag::St: {
      const TowerElement i = TowerElement::imaginary_unit(TowerSpec::make({}, true));
      const TowerElement half_t = tt * frac(1, 2);
      out[0] = c(i) * (z(0) - c(frac(1, 2)) * (z(1) * z(6) + z(2) * z(5) + z(3) * z(4)) -
                       c(frac(1, 4)) * (z(4).pow(3) + z(5).pow(3) + z(6).pow(3) + c(tt) * z(4) * z(5) * z(6)));
      out[1] = z(1) + c(frac(3, 2)) * z(6) * z(6) + c(half_t) * z(4) * z(5);
      out[2] = z(2) + c(frac(3, 2)) * z(5) * z(5) + c(half_t) * z(4) * z(6);
      out[3] = z(3) + c(frac(3, 2)) * z(4) * z(4) + c(half_t) * z(5) * z(6);
      for (int j = 4; j <= 6; ++j) out[j] = z(j);
      break;
    }
  }
  return PolyAutomorphism{map_name(tag), base.space, std::move(out)};
}

SphericityResult verify_sphericity(const TubeBase& base, const PolyAutomorphism& map,
                                   const HermitianQuadric& quadric) {
  const int n = base.n();
  if (map.n() != n || quadric.n() != n || !map.space->same_as(*base.space)) {
    raise(ErrorCode::DimensionMismatch, "base, map and quadric dimensions differ");
  }
  for (int j = 0; j <= n; ++j) {
    if (!map.components[j].only_kinds({VarKind::Complex, VarKind::Parameter})) {
      raise(ErrorCode::NonHolomorphicComponent, "component z" + std::to_string(j) + "* involves non-holomorphic variables");
    }
  }

  std::vector<const MPoly*> all{&base.F};
  for (const auto& c : map.components) all.push_back(&c);
  TowerSpecPtr spec = TowerSpec::join(spec_of(all), TowerSpec::make({}, true));
  for (const auto& row : quadric.H) {
    for (const auto& h : row) spec = TowerSpec::join(spec, h.spec());
  }

  auto parts = split_all(map.components, spec);
  MPoly r = parts[0].im - hermitian_value(parts, quadric.H, spec);
  Bindings bind;
  bind.emplace(base.space->x(0), lift(base.F, spec));
  r = mpoly_substitute(r, bind);
  SphericityResult out{r.is_zero(), std::move(r)};
  return out;
}

SphericityResult verify_quadric_to_tube(int k, int n) {
  FamilyParams params;
  params.k = k;
  params.n = n;
  const PolyAutomorphism map = catalog_map(MapTag::QuadricToTube, params);
  const SpacePtr& space = map.space;
  std::vector<const MPoly*> all;
  for (const auto& c : map.components) all.push_back(&c);
  const TowerSpecPtr spec = TowerSpec::join(spec_of(all), TowerSpec::make({}, true));

  auto parts = split_all(map.components, spec);
  MPoly r = parts[0].re;
  for (int j = 1; j <= n; ++j) {
    MPoly sq = parts[j].re * parts[j].re;
    if (j <= k) {
      r -= sq;
    } else {
      r += sq;
    }
  }
  // On the quadric, y0 = sum_{j<=k} |z_j|^2 - sum_{j>k} |z_j|^2.
  MPoly y0(space);
  for (int j = 1; j <= n; ++j) {
    MPoly x = xvar(space, j);
    MPoly y = MPoly::variable(space, space->y(j));
    MPoly m = x * x + y * y;
    if (j <= k) {
      y0 += m;
    } else {
      y0 -= m;
    }
  }
  Bindings bind;
  bind.emplace(space->y(0), y0);
  r = mpoly_substitute(r, bind);
  return SphericityResult{r.is_zero(), std::move(r)};
}

bool quadric_convention_holds(int k, int n) { return n <= 2 * k; }

// ---------------------------------------------------------------------------
// Affine graph maps

AffineGraphMap AffineGraphMap::identity(const SpacePtr& space) {
  const int n = space->dimension();
  AffineGraphMap m{space,
                   MPoly(space, TowerElement(1)),
                   std::vector<MPoly>(n, MPoly(space)),
                   MPoly(space),
                   identity_matrix(space, n),
                   identity_matrix(space, n),
                   std::vector<MPoly>(n, MPoly(space))};
  return m;
}

AffineGraphMap AffineGraphMap::make(const SpacePtr& space, MPoly lambda, std::vector<MPoly> ell, MPoly mu,
                                    std::vector<std::vector<MPoly>> C, std::vector<MPoly> b) {
  const int n = space->dimension();
  if (static_cast<int>(ell.size()) != n || static_cast<int>(b.size()) != n || static_cast<int>(C.size()) != n) {
    raise(ErrorCode::DimensionMismatch, "affine map data does not match the tube dimension");
  }
  for (const auto& row : C) {
    if (static_cast<int>(row.size()) != n) raise(ErrorCode::DimensionMismatch, "C is not n x n");
  }
  if (lambda.is_zero()) raise(ErrorCode::SingularMatrix, "the x0 scale vanishes");

  // Gauss-Jordan over scalar polynomials with invertible pivots.
  auto M = C;
  auto inv = identity_matrix(space, n);
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    MPoly pinv(space);
    for (int r = col; r < n && pivot < 0; ++r) {
      if (M[r][col].is_zero()) continue;
      try {
        pinv = scalar_inverse(M[r][col], ErrorCode::SingularMatrix, "pivot");
        pivot = r;
      } catch (const Error&) {
      }
    }
    if (pivot < 0) raise(ErrorCode::SingularMatrix, "C has no invertible pivot in column " + std::to_string(col + 1));
    std::swap(M[pivot], M[col]);
    std::swap(inv[pivot], inv[col]);
    for (int j = 0; j < n; ++j) {
      M[col][j] = M[col][j] * pinv;
      inv[col][j] = inv[col][j] * pinv;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || M[r][col].is_zero()) continue;
      const MPoly f = M[r][col];
      for (int j = 0; j < n; ++j) {
        M[r][j] -= f * M[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return AffineGraphMap{space, std::move(lambda), std::move(ell), std::move(mu), std::move(C), std::move(inv),
                        std::move(b)};
}

AffineGraphMap compose(const AffineGraphMap& m2, const AffineGraphMap& m1) {
  const int n = m1.n();
  if (m2.n() != n) raise(ErrorCode::DimensionMismatch, "composing maps of different dimensions");
  const SpacePtr& s = m1.space;
  auto matmul = [&](const std::vector<std::vector<MPoly>>& A, const std::vector<std::vector<MPoly>>& B) {
    std::vector<std::vector<MPoly>> P(n, std::vector<MPoly>(n, MPoly(s)));
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        if (A[i][k].is_zero()) continue;
        for (int j = 0; j < n; ++j) {
          if (!B[k][j].is_zero()) P[i][j] += A[i][k] * B[k][j];
        }
      }
    }
    return P;
  };
  AffineGraphMap out{s, m2.lambda * m1.lambda, {}, MPoly(s), matmul(m2.C, m1.C), matmul(m1.Cinv, m2.Cinv), {}};
  for (int i = 0; i < n; ++i) {
    MPoly bi = m2.b[i];
    for (int k = 0; k < n; ++k) bi += m2.C[i][k] * m1.b[k];
    out.b.push_back(std::move(bi));
    MPoly li = m2.lambda * m1.ell[i];
    for (int k = 0; k < n; ++k) li += m1.C[k][i] * m2.ell[k];
    out.ell.push_back(std::move(li));
  }
  out.mu = m2.lambda * m1.mu + m2.mu;
  for (int k = 0; k < n; ++k) out.mu += m2.ell[k] * m1.b[k];
  return out;
}

TubeBase apply_affine(const TubeBase& base, const AffineGraphMap& m) {
  const int n = base.n();
  if (m.n() != n) raise(ErrorCode::DimensionMismatch, "affine map and base dimensions differ");
  const SpacePtr& s = base.space;
  // x = C^-1 (x' - b)
  std::vector<MPoly> pre;
  for (int j = 0; j < n; ++j) {
    MPoly v(s);
    for (int k = 0; k < n; ++k) {
      if (!m.Cinv[j][k].is_zero()) v += m.Cinv[j][k] * (xvar(s, k + 1) - m.b[k]);
    }
    pre.push_back(std::move(v));
  }
  Bindings bind;
  for (int j = 0; j < n; ++j) bind.emplace(s->x(j + 1), pre[j]);
  MPoly F = m.lambda * mpoly_substitute(base.F, bind) + m.mu;
  for (int j = 0; j < n; ++j) {
    if (!m.ell[j].is_zero()) F += m.ell[j] * pre[j];
  }
  FamilyParams params;
  params.n = n;
  return TubeBase{FamilyTag::Custom, params, s, std::move(F)};
}

std::vector<MPoly> apply_to_point(const AffineGraphMap& m, const std::vector<MPoly>& point) {
  const int n = m.n();
  if (static_cast<int>(point.size()) != n + 1) raise(ErrorCode::DimensionMismatch, "point has the wrong length");
  std::vector<MPoly> out;
  MPoly x0 = m.lambda * point[0] + m.mu;
  for (int j = 0; j < n; ++j) x0 += m.ell[j] * point[j + 1];
  out.push_back(std::move(x0));
  for (int i = 0; i < n; ++i) {
    MPoly v = m.b[i];
    for (int k = 0; k < n; ++k) v += m.C[i][k] * point[k + 1];
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<MPoly> point_on_base(const TubeBase& base, const std::vector<Rational>& x) {
  const int n = base.n();
  if (static_cast<int>(x.size()) != n) raise(ErrorCode::DimensionMismatch, "need n coordinates x1..xn");
  Bindings bind;
  std::vector<MPoly> out{MPoly(base.space)};
  for (int j = 0; j < n; ++j) {
    MPoly c(base.space, TowerElement(x[j]));
    bind.emplace(base.space->x(j + 1), c);
    out.push_back(std::move(c));
  }
  out[0] = mpoly_substitute(base.F, bind);
  return out;
}

// ---------------------------------------------------------------------------
// Homogenization

namespace {

enum class Template { GenHyper, St };

bool monomials_within(const MPoly& part, const SpacePtr& s, const std::set<std::map<int, int>>& allowed) {
  const int n = s->dimension();
  for (const auto& [e, c] : part.terms()) {
    std::map<int, int> mono;
    for (int j = 1; j <= n; ++j) {
      if (e[s->x(j)]) mono[j] = e[s->x(j)];
    }
    if (!allowed.count(mono)) return false;
  }
  return true;
}

bool only_x_vars(const MPoly& part, const SpacePtr& s, const std::set<int>& vars) {
  for (int j = 0; j <= s->dimension(); ++j) {
    if (!vars.count(j) && part.depends_on(s->x(j))) return false;
  }
  return true;
}

Template detect_template(const TubeBase& base) {
  const SpacePtr& s = base.space;
  const int n = base.n();
  const auto xs = tube_x_vars(*s);
  auto x = [&](int j) { return xvar(s, j); };
  const int deg = base.F.degree(xs);
  auto part = [&](int d) { return homogeneous_component(base.F, d, xs); };
  const bool low_zero = part(0).is_zero() && part(1).is_zero();

  if (n == 7 && low_zero && deg <= 4 &&
      part(2) == x(1) * x(1) + x(2) * x(2) + x(3) * x(3) + x(4) * x(5) + x(6) * x(7) &&
      monomials_within(part(3), s, {{{1, 1}, {4, 1}, {6, 1}}, {{2, 1}, {6, 2}}, {{2, 1}, {4, 2}}, {{3, 1}, {4, 2}}}) &&
      only_x_vars(part(4), s, {4, 6})) {
    return Template::GenHyper;
  }
  if (n == 6 && low_zero && deg <= 3 && part(2) == x(1) * x(6) + x(2) * x(5) + x(3) * x(4) &&
      only_x_vars(part(3), s, {4, 5, 6})) {
    return Template::St;
  }
  raise(ErrorCode::UnsupportedTemplate, "base matches neither the GenHyper (n = 7) nor the St (n = 6) template");
}

struct Pipeline {
  SpacePtr s;
  int n;
  MPoly G;
  AffineGraphMap total;
  NormalizationTrace trace;

  void push(std::string label, AffineGraphMap m, std::map<std::string, MPoly> data) {
    FamilyParams p;
    p.n = n;
    G = apply_affine(TubeBase{FamilyTag::Custom, p, s, G}, m).F;
    total = compose(m, total);
    trace.push_back({std::move(label), std::move(m), std::move(data)});
  }

  MPoly coef(const std::map<int, int>& mono) const { return coeff_x(G, mono); }

  void translate(const std::vector<MPoly>& q) {
    bool trivial = true;
    for (const auto& c : q) trivial = trivial && c.is_zero();
    if (trivial) return;
    AffineGraphMap m = AffineGraphMap::identity(s);
    m.mu = -q[0];
    for (int j = 0; j < n; ++j) m.b[j] = -q[j + 1];
    push("translate", std::move(m), {{"q0", q[0]}});
  }

  void absorb_linear() {
    MPoly L0 = homogeneous_component(G, 1, tube_x_vars(*s));
    if (L0.is_zero()) return;
    AffineGraphMap m = AffineGraphMap::identity(s);
    auto coeffs = linear_coefficients(L0, n);
    for (int j = 0; j < n; ++j) m.ell[j] = -coeffs[j];
    push("absorb L0 into x0", std::move(m), {{"L0", L0}});
  }

  // x_target -> x_target - L, L free of x_target.
  void shear(const std::string& label, int target, const MPoly& L, std::map<std::string, MPoly> data) {
    if (L.is_zero()) return;
    AffineGraphMap m = AffineGraphMap::identity(s);
    auto coeffs = linear_coefficients(L, n);
    if (!coeffs[target - 1].is_zero()) {
      raise(ErrorCode::AbsorptionFailed, label + ": linear form involves its own target");
    }
    for (int j = 0; j < n; ++j) {
      m.C[target - 1][j] += coeffs[j];
      m.Cinv[target - 1][j] -= coeffs[j];
    }
    push(label, std::move(m), std::move(data));
  }

  // Absorbs x_pivot * L into x_pivot * x_target, L collecting the listed
  // partners of x_pivot.
  void absorb(const std::string& name, int target, int pivot, const std::vector<int>& partners) {
    const MPoly inv =
        scalar_inverse(coef(mono2(pivot, target)), ErrorCode::AbsorptionFailed,
                       "coefficient of x" + std::to_string(pivot) + "*x" + std::to_string(target));
    MPoly L(s);
    for (int j : partners) {
      MPoly c = coef(mono2(pivot, j));
      if (!c.is_zero()) L += c * inv * xvar(s, j);
    }
    shear("absorb " + name + " into x" + std::to_string(target), target, L, {{name, L}});
  }

  MPoly required(const std::map<int, int>& mono, const std::string& what) const {
    MPoly c = coef(mono);
    scalar_inverse(c, ErrorCode::AbsorptionFailed, what);
    return c;
  }
};

}  // namespace

Homogenization homogenize_at(const TubeBase& base, const std::vector<MPoly>& q) {
  const int n = base.n();
  const SpacePtr& s = base.space;
  const Template tpl = detect_template(base);
  if (static_cast<int>(q.size()) != n + 1) raise(ErrorCode::DimensionMismatch, "point has the wrong length");
  for (const auto& c : q) {
    if (!only_scalars(c) || !c.space()->same_as(*s)) {
      raise(ErrorCode::PreconditionViolated, "point coordinates must be scalars of the base space");
    }
  }
  {
    Bindings bind;
    for (int j = 1; j <= n; ++j) bind.emplace(s->x(j), q[j]);
    if (!(mpoly_substitute(base.F, bind) == q[0])) {
      raise(ErrorCode::NotOnHypersurface, "x0 != F(x) at the given point");
    }
  }

  Pipeline p{s, n, base.F, AffineGraphMap::identity(s), {}};
  p.translate(q);
  p.absorb_linear();

  if (tpl == Template::GenHyper) {
    p.absorb("L1", 5, 4, {1, 2, 3, 4});
    p.absorb("L2", 7, 6, {1, 2, 4, 6});
    const MPoly a = p.required({{1, 1}, {4, 1}, {6, 1}}, "a (x1*x4*x6)");
    const MPoly b = p.required({{2, 1}, {6, 2}}, "b (x2*x6^2)");
    const MPoly c = p.required({{2, 1}, {4, 2}}, "c (x2*x4^2)");
    const MPoly ainv = scalar_inverse(a, ErrorCode::AbsorptionFailed, "a");
    const MPoly binv = scalar_inverse(b, ErrorCode::AbsorptionFailed, "b");
    const MPoly cinv = scalar_inverse(c, ErrorCode::AbsorptionFailed, "c");
    const MPoly A = p.coef({{4, 3}});
    const MPoly B = p.coef({{6, 3}});
    const MPoly C = p.coef({{4, 1}, {6, 2}});
    const MPoly D = p.coef({{4, 2}, {6, 1}});
    const MPoly C1 = C - b * A * cinv;
    const MPoly D1 = D - c * B * binv;
    p.shear("replace x2 by x2 - (A/c) x4 - (B/b) x6", 2, A * cinv * xvar(s, 4) + B * binv * xvar(s, 6),
            {{"A", A}, {"B", B}, {"C", C}, {"D", D}, {"C'", C1}, {"D'", D1}});
    // C', D' predicted from A..D must match the coefficients now present.
    if (!(p.coef({{4, 1}, {6, 2}}) == C1) || !(p.coef({{4, 2}, {6, 1}}) == D1)) {
      raise(ErrorCode::AbsorptionFailed, "C', D' disagree with the coefficients after replacing x2");
    }
    p.shear("replace x1 by x1 - (D'/a) x4 - (C'/a) x6", 1, D1 * ainv * xvar(s, 4) + C1 * ainv * xvar(s, 6),
            {{"C'", C1}, {"D'", D1}});
    p.absorb("L5", 5, 4, {1, 2, 4, 6});
    p.absorb("L6", 7, 6, {1, 2, 6});
  } else {
    p.absorb("L1", 3, 4, {4, 5, 6});
    p.absorb("L2", 2, 5, {5, 6});
    p.absorb("L3", 1, 6, {6});
  }

  if (!(p.G == base.F)) raise(ErrorCode::AbsorptionFailed, "normalized equation differs from the original");
  return Homogenization{std::move(p.total), std::move(p.trace)};
}

SpacePtr genhyper_space() {
  return VariableSpace::tube(7, {{"a", VarKind::Parameter, true},
                                 {"b", VarKind::Parameter, true},
                                 {"c", VarKind::Parameter, true},
                                 {"d", VarKind::Parameter, false}});
}

TubeBase genhyper_base(const MPoly& quartic) {
  const SpacePtr s = genhyper_space();
  if (!quartic.space()->same_as(*s)) raise(ErrorCode::DimensionMismatch, "quartic must live in the GenHyper space");
  const auto xs = tube_x_vars(*s);
  if (!(homogeneous_component(quartic, 4, xs) == quartic) || !only_x_vars(quartic, s, {4, 6})) {
    raise(ErrorCode::PreconditionViolated, "quartic must be homogeneous of degree 4 in x4, x6");
  }
  auto x = [&](int j) { return xvar(s, j); };
  auto par = [&](const std::string& n) { return MPoly::variable(s, n); };
  MPoly F = x(1) * x(1) + x(2) * x(2) + x(3) * x(3) + x(4) * x(5) + x(6) * x(7) + par("a") * x(1) * x(4) * x(6) +
            par("b") * x(2) * x(6) * x(6) + par("c") * x(2) * x(4) * x(4) + par("d") * x(3) * x(4) * x(4) + quartic;
  FamilyParams p;
  p.n = 7;
  p.k = 5;
  return TubeBase{FamilyTag::GenHyper, p, s, std::move(F)};
}

TubeBase genhyper_base() {
  const SpacePtr s = genhyper_space();
  MPoly q = xvar(s, 4) * xvar(s, 4);
  MPoly r = xvar(s, 6) * xvar(s, 6);
  return genhyper_base((q + r) * (q + MPoly(s, TowerElement(RatFunc::t())) * r));
}

// ---------------------------------------------------------------------------
// Graded separation

namespace {

std::optional<BinaryQuartic> as_binary_quartic(const MPoly& part, const SpacePtr& s) {
  std::vector<int> used;
  for (int j = 1; j <= s->dimension(); ++j) {
    if (part.depends_on(s->x(j))) used.push_back(j);
  }
  if (used.size() != 2 || !part.only_kinds({VarKind::Real})) return std::nullopt;
  BinaryQuartic f;
  for (int i = 0; i <= 4; ++i) {
    f.p[4 - i] = part.coefficient([&] {
      MPoly::Exponents e(s->size(), 0);
      e[s->x(used[0])] = static_cast<std::int16_t>(i);
      e[s->x(used[1])] = static_cast<std::int16_t>(4 - i);
      return e;
    }());
  }
  return f;
}

void require_trace_free(const TubeBase& base, const std::string& which) {
  std::vector<TowerElement> v;
  try {
    v = cubic_trace(base);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::PreconditionViolated || e.code() == ErrorCode::DegenerateQuadraticPart) return;
    throw;
  }
  for (const auto& c : v) {
    if (!c.is_zero()) raise(ErrorCode::PreconditionViolated, which + " has a cubic part that is not trace-free");
  }
}

}  // namespace

Separation graded_separation(const TubeBase& a, const TubeBase& b) {
  if (a.n() != b.n()) raise(ErrorCode::DimensionMismatch, "bases have different dimensions");
  require_trace_free(a, "first base");
  require_trace_free(b, "second base");

  const auto xa = tube_x_vars(*a.space);
  const auto xb = tube_x_vars(*b.space);
  const int top = std::max(a.F.degree(xa), b.F.degree(xb));
  for (int d = 0; d <= top; ++d) {
    const bool za = homogeneous_component(a.F, d, xa).is_zero();
    const bool zb = homogeneous_component(b.F, d, xb).is_zero();
    if (za != zb) {
      Separation out;
      out.verdict = Verdict::NonEquivalent;
      out.degree = d;
      out.witness = "degree-" + std::to_string(d) + " part vanishes for the " + (za ? "first" : "second") +
                    " base only";
      return out;
    }
  }

  auto qa = as_binary_quartic(homogeneous_component(a.F, 4, xa), a.space);
  auto qb = as_binary_quartic(homogeneous_component(b.F, 4, xb), b.space);
  if (qa && qb) {
    Separation s = separate_binary_quartics(*qa, *qb);
    if (s.verdict == Verdict::NonEquivalent) {
      s.degree = 4;
      s.witness = "quartic parts: " + s.witness;
    }
    return s;
  }
  Separation out;
  out.witness = "no graded invariant separates the bases";
  return out;
}

}  // namespace tubecheck
