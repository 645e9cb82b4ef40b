#pragma once

// Holomorphic polynomial automorphisms onto model quadrics, graph-preserving
// affine maps of tube bases, and the affine-homogeneity normalization.

#include <map>
#include <string>
#include <vector>

#include "tubecheck/geometry.hpp"
#include "tubecheck/invariants.hpp"
#include "tubecheck/poly.hpp"

namespace tubecheck {

enum class MapTag { Phi1, Phi2, QuadricToTube, Pt, CalPt, St };

std::string map_name(MapTag tag);
MapTag parse_map(const std::string& name);  // throws PreconditionViolated

// Components z0*..zn* as polynomials in z0..zn over a tube space.
struct PolyAutomorphism {
  std::string name;
  SpacePtr space;
  std::vector<MPoly> components;
  int n() const { return static_cast<int>(components.size()) - 1; }
};

PolyAutomorphism identity_map(const SpacePtr& space);
// Phi1/Phi2 need params.n; QuadricToTube needs (k, n); Pt and CalPt need
// (k, n, t); St needs t. Domains as in instantiate_family.
PolyAutomorphism catalog_map(MapTag tag, const FamilyParams& params);
// The quadric each catalog map targets.
HermitianQuadric catalog_quadric(MapTag tag, const FamilyParams& params);
// The base each catalog map starts from (QuadricToTube: the target tube).
TubeBase catalog_base(MapTag tag, const FamilyParams& params);

struct SphericityResult {
  bool verified = false;
  MPoly residual;  // Im z0* - sum H_jk z_j* conj(z_k*) with x0 = F(x)
};

// Throws DimensionMismatch, NonHolomorphicComponent.
SphericityResult verify_sphericity(const TubeBase& base, const PolyAutomorphism& map, const HermitianQuadric& quadric);

// z0* = -i z0 + sum_{j<=k} z_j^2 - sum_{j>k} z_j^2, z* = sqrt(2) z carries
// Q_{k,n-k} onto x0 = sum_{j<=k} x_j^2 - sum_{j>k} x_j^2. The residual is
// Re z0* - G(Re z*) with y0 solved from the quadric equation.
SphericityResult verify_quadric_to_tube(int k, int n);
// The customary range n <= 2k; reported, never enforced.
bool quadric_convention_holds(int k, int n);

// x0 -> lambda x0 + ell.x + mu, x -> C x + b. Entries are scalar MPolys in
// the base's parameters (constants when none); Cinv is kept alongside C.
struct AffineGraphMap {
  SpacePtr space;
  MPoly lambda;
  std::vector<MPoly> ell;
  MPoly mu;
  std::vector<std::vector<MPoly>> C, Cinv;
  std::vector<MPoly> b;
  int n() const { return static_cast<int>(b.size()); }

  static AffineGraphMap identity(const SpacePtr& space);
  // Computes Cinv by Gauss-Jordan; pivots must be invertible scalars.
  // Throws SingularMatrix.
  static AffineGraphMap make(const SpacePtr& space, MPoly lambda, std::vector<MPoly> ell, MPoly mu,
                             std::vector<std::vector<MPoly>> C, std::vector<MPoly> b);
};

// second after first.
AffineGraphMap compose(const AffineGraphMap& second, const AffineGraphMap& first);
// F'(x') = lambda F(C^-1(x'-b)) + ell.C^-1(x'-b) + mu.
TubeBase apply_affine(const TubeBase& base, const AffineGraphMap& m);
// Image of (x0, x1..xn).
std::vector<MPoly> apply_to_point(const AffineGraphMap& m, const std::vector<MPoly>& point);

// (F(x), x1..xn) as scalar MPolys.
std::vector<MPoly> point_on_base(const TubeBase& base, const std::vector<Rational>& x);

struct NormalizationStep {
  std::string label;  // "translate", "absorb L0 into x0", "absorb L1 into x5", ...
  AffineGraphMap map;
  std::map<std::string, MPoly> data;  // extracted linear forms and constants
};
using NormalizationTrace = std::vector<NormalizationStep>;

struct Homogenization {
  AffineGraphMap map;
  NormalizationTrace trace;
};

// GenHyper: n = 7 and F = x1^2 + x2^2 + x3^2 + x4 x5 + x6 x7 + a x1 x4 x6 +
// b x2 x6^2 + c x2 x4^2 + d x3 x4^2 + Q4(x4, x6) with a, b, c invertible.
// St: n = 6 and F = x1 x6 + x2 x5 + x3 x4 + a cubic in x4, x5, x6.
// Throws NotOnHypersurface, UnsupportedTemplate, AbsorptionFailed.
Homogenization homogenize_at(const TubeBase& base, const std::vector<MPoly>& q);

// The GenHyper template in tube(7) with parameters a, b, c (invertible) and
// d; the quartic must lie in genhyper_space() and involve only x4, x6.
SpacePtr genhyper_space();
TubeBase genhyper_base(const MPoly& quartic);
// Quartic (x4^2 + x6^2)(x4^2 + t x6^2) with symbolic t.
TubeBase genhyper_base();

// Graded comparison under x0 -> lambda x0, x -> C x. Throws
// PreconditionViolated when a computable cubic trace is nonzero.
Separation graded_separation(const TubeBase& a, const TubeBase& b);

}  // namespace tubecheck
