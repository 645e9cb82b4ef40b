#pragma once

// Binary quartic invariants, the Hesse cubics c_t = u1^3 + u2^3 + u3^3 +
// t u1 u2 u3, their Weierstrass reduction and j-invariant, and the scalar
// maps Phi and chi.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tubecheck/poly.hpp"
#include "tubecheck/tower.hpp"

namespace tubecheck {

// p4 xi^4 + p3 xi^3 eta + p2 xi^2 eta^2 + p1 xi eta^3 + p0 eta^4, stored as
// {p4, p3, p2, p1, p0}.
struct BinaryQuartic {
  std::array<TowerElement, 5> p;
};

// (xi^2 + eta^2)(xi^2 + t eta^2).
BinaryQuartic q_t(const RatFunc& t);

// With a = p4, b = p3/4, c = p2/6, d = p1/4, e = p0:
// I = ae - 4bd + 3c^2, J = ace + 2bcd - ad^2 - b^2 e - c^3, disc = I^3 - 27J^2.
struct QuarticInvariants {
  TowerElement I, J, disc;
};
QuarticInvariants quartic_invariants(const BinaryQuartic& f);

enum class Verdict { NonEquivalent, Inconclusive };

struct Separation {
  Verdict verdict = Verdict::Inconclusive;
  std::string witness;
  int degree = 0;  // graded degree of the witness, when one applies
};

// One-sided GL2(R) test: a vanishing discriminant on exactly one side, or
// differing I^3/J^2 (compared as I1^3 J2^2 vs I2^3 J1^2). Never claims
// equivalence.
Separation separate_binary_quartics(const BinaryQuartic& f, const BinaryQuartic& g);
// q_{t1} against q_{t2}; both t must lie in [1, 17+12*sqrt(2)].
Separation gl2r_separate(const Rational& t1, const Rational& t2);

// Projective point (xi : eta) over a tower.
struct ProjectivePoint {
  TowerElement xi;
  TowerElement eta;
};
// Zeros of q_t: xi/eta in {i, -i, i sqrt(t), -i sqrt(t)}. Throws NegativeParameter.
std::vector<ProjectivePoint> quartic_root_lines(const Rational& t);

// 256 (l^2 - l + 1)^3 / (l^2 (l - 1)^2) for the cross-ratio l of the four
// points. Throws CoincidentPoints.
TowerElement cross_ratio_j(const std::array<ProjectivePoint, 4>& points);

struct PlanePoint {
  TowerElement u1, u2, u3;
};
// Singular points of c_t. Multiplying the three gradient equations
// 3u_i^2 = -t u_j u_k gives 27 (u1u2u3)^2 = -t^3 (u1u2u3)^2, and u1u2u3 = 0
// forces the zero vector, so singular points exist iff t^3 = -27; they are
// (1 : q : q^2) with q^3 = 1.
std::vector<PlanePoint> cubic_singular_locus(const Rational& t);

// Value of c_t and its gradient at a point, for independent checks.
std::array<TowerElement, 4> cubic_value_and_gradient(const TowerElement& t, const PlanePoint& u);

struct WeierstrassModel {
  std::optional<Rational> t;  // empty: symbolic
  TowerElement C;             // C^3 = -(t^3 + 27)/81
  TowerElement a1, a2, a3, a4, a6;
};

struct WeierstrassReduction {
  WeierstrassModel model;
  TowerElement scale;  // W(forward substitution) = scale * c_t
};

// Composes w2^2 w3 + a1 w1 w2 w3 + a3 w2 w3^2 - (w1^3 + a2 w1^2 w3 + a6 w3^3)
// with w1 -> C w3, w2 -> -w2 + (t/3) w3, w3 -> w1 + w2 - (t/3) w3 and checks
// proportionality with c_t. Throws SingularCubic, ProportionalityFailed.
WeierstrassReduction weierstrass_reduce(const std::optional<Rational>& t);

struct TateInvariants {
  TowerElement b2, b4, b6, b8, c4, c6, delta, j;
};
// Throws SingularModel when delta = 0.
TateInvariants tate_invariants(const WeierstrassModel& m);

// -t^3 (t^3 - 216)^3 / (t^3 + 27)^3. The symbolic form is cross-checked
// against the Tate formulaire. Throws SingularCubic at t = -3.
RatFunc j_of_ct(const std::optional<Rational>& t);

// Phi(s) = -s (s - 216)^3 / (s + 27)^3, so j(t) = Phi(t^3).
RatFunc phi_function();
Rational phi(const Rational& s);  // throws PoleAt at s = -27
Rational phi_derivative_at_zero();

struct ScanResult {
  bool increasing = true;
  std::size_t samples = 0;
  std::optional<Rational> violation;  // first s where Phi fails to increase
};
// Evaluates Phi on `samples` equally spaced points of [lo, hi]. Throws PoleAt
// when the interval contains -27.
ScanResult phi_monotone_scan(const Rational& lo, const Rational& hi, std::size_t samples);

// Phi(s) * Phi(-5832/s) as an element of Q(s).
RatFunc phi_reciprocity_product();

// j(t) * j(-18/t) == 1 exactly; t in {0, 6, -3} throws ExcludedParameter.
bool reciprocity_check(const Rational& t);
// Same product for the normalization j/1728.
bool reciprocity_check_normalized(const Rational& t);
Rational reciprocity_product(const Rational& t);

// chi(t) = -12 sqrt(t)/(t + 1) for t >= 1; throws OutOfRange.
TowerElement chi(const Rational& t);
// The chi formula for any t > 0 given with its nonnegative square root in
// some tower; chi(1/t) = chi(t).
TowerElement chi_with_root(const TowerElement& t, const TowerElement& root);

enum class ChiBranch { Lower, Upper };
struct ChiPreimage {
  TowerElement t;
  TowerElement root;  // sqrt(t)
};
// Solves 12 sqrt(t) = -tau (t + 1) for tau in [-6, -2) or (-2, 0). The two
// solutions are reciprocal: Upper returns t >= 1, Lower returns 1/t <= 1.
ChiPreimage chi_inverse(const Rational& tau, ChiBranch branch);

}  // namespace tubecheck
