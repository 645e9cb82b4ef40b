#pragma once

// Tube hypersurfaces in graph form x0 = F(x1..xn), the model quadrics, and
// pointwise second-order data.

#include <optional>
#include <string>
#include <vector>

#include "tubecheck/poly.hpp"
#include "tubecheck/tower.hpp"

namespace tubecheck {

enum class FamilyTag { M1, M2, QuadricTube, Pt, CalPt, FrakP, St, GenHyper, Custom };

std::string family_name(FamilyTag tag);
FamilyTag parse_family(const std::string& name);  // throws PreconditionViolated

struct FamilyParams {
  int n = 0;
  int k = 0;
  int p = 0;
  // t (tau for FrakP); empty means symbolic, i.e. the indeterminate of Q(t).
  std::optional<Rational> t;
};

struct TubeBase {
  FamilyTag tag = FamilyTag::Custom;
  FamilyParams params;
  SpacePtr space;
  MPoly F;  // in x1..xn and scalar parameters only
  int n() const { return space->dimension(); }
};

// Tube bases of the catalog. Domains: M1, M2 need n >= 2; QuadricTube needs
// 0 <= k <= n; Pt needs 5 <= k <= n-2 and 1 <= t <= 17+12*sqrt(2); CalPt
// needs 4 <= k <= n-3 and t >= 17+12*sqrt(2); FrakP needs n >= 7,
// 0 <= p <= n-7 and tau != +-2; St needs n = 6. Throws ParameterOutOfDomain.
TubeBase instantiate_family(FamilyTag tag, FamilyParams params);

// Wraps an arbitrary graph function; F must not involve x0, y or z variables.
TubeBase custom_base(SpacePtr space, MPoly F);

// t <= 17+12*sqrt(2), decided exactly.
bool below_pt_bound(const Rational& t);

// Radicals shared by the P_t and CalPt families and their automorphisms:
// alpha = sqrt(2(1+t)), beta = sqrt(3t), gamma = sqrt(+-(t^2-34t+1)/(3t)) with
// the sign making the radicand nonnegative on the family's domain.
struct FamilyRadicals {
  TowerElement alpha, beta, gamma;
  TowerElement root2_inv;  // 1/sqrt(2), only when requested
  TowerElement i;          // only when requested
};
FamilyRadicals family_radicals(FamilyTag tag, const std::optional<Rational>& t, bool for_map);

using SymMatrix = std::vector<std::vector<TowerElement>>;

// Im z0 = sum H_jk z_j zb_k.
struct HermitianQuadric {
  SymMatrix H;
  int n() const { return static_cast<int>(H.size()); }

  // diag(1 x k, -1 x (n-k)).
  static HermitianQuadric standard(int k, int n);
  // 1/2 Re(z1 zb6 + z2 zb5 + z3 zb4).
  static HermitianQuadric primed33();
  // Validates symmetry and nondegeneracy; throws SingularMatrix.
  static HermitianQuadric from_matrix(SymMatrix H);
};

// Exact determinant by Gaussian elimination over the tower.
TowerElement determinant(const SymMatrix& m);

struct SignatureReport {
  int positives = 0;
  int negatives = 0;
  int zeros = 0;
  std::vector<Rational> point;
  std::optional<Rational> t0;
};

// Second partials of F in x1..xn at x = point.
SymMatrix hessian(const TubeBase& base, const std::vector<Rational>& point);

// Inertia by congruence diagonalization. Entries are first specialized at t0
// (required when they depend on t) into a constant radical tower; all sign
// decisions are exact.
SignatureReport signature(const SymMatrix& m, const std::optional<Rational>& t0);

// Signature of the Levi form at the base point over x = point, represented by
// the Hessian of F.
SignatureReport levi_signature(const TubeBase& base, const std::vector<Rational>& point,
                               const std::optional<Rational>& t0);

// Symmetric coefficient matrix A of the quadratic part: Q2(x) = x^T A x.
SymMatrix quadratic_matrix(const TubeBase& base);

// v_i = sum_jk (A^-1)_jk C_ijk for the fully symmetric cubic tensor C.
// Throws DegenerateQuadraticPart, PreconditionViolated if the quadratic or
// cubic part involves scalar parameters.
std::vector<TowerElement> cubic_trace(const TubeBase& base);

// Inverse over the tower by Gauss-Jordan; throws SingularMatrix.
SymMatrix invert(const SymMatrix& m);

}  // namespace tubecheck
