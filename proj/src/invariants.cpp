#include "tubecheck/invariants.hpp"

#include "tubecheck/error.hpp"
#include "tubecheck/geometry.hpp"

namespace tubecheck {

namespace {

TowerElement q(long num, long den = 1) { return TowerElement(make_rational(num, den)); }

RatFunc parameter(const std::optional<Rational>& t) { return t ? RatFunc(*t) : RatFunc::t(); }

// [a, b] = a.xi b.eta - a.eta b.xi
TowerElement bracket(const ProjectivePoint& a, const ProjectivePoint& b) { return a.xi * b.eta - a.eta * b.xi; }

// i and sqrt(3) for the cube roots of unity (-1 +- i sqrt(3))/2.
struct Eisenstein {
  TowerElement omega, omega2;
};
Eisenstein eisenstein() {
  RadicalBuilder rb;
  auto h3 = rb.sqrt(RatFunc(3));
  rb.use_imaginary_unit();
  auto spec = rb.build();
  const TowerElement s = TowerElement::imaginary_unit(spec) * rb.root(h3);
  return {(q(-1) + s) * q(1, 2), (q(-1) - s) * q(1, 2)};
}

}  // namespace

// ---------------------------------------------------------------------------
// Binary quartics

BinaryQuartic q_t(const RatFunc& t) {
  return BinaryQuartic{{TowerElement(1), TowerElement(0), TowerElement(RatFunc(1) + t), TowerElement(0),
                        TowerElement(t)}};
}

QuarticInvariants quartic_invariants(const BinaryQuartic& f) {
  const TowerElement a = f.p[0], b = f.p[1] * q(1, 4), c = f.p[2] * q(1, 6), d = f.p[3] * q(1, 4), e = f.p[4];
  QuarticInvariants r;
  r.I = a * e - q(4) * b * d + q(3) * c * c;
  r.J = a * c * e + q(2) * b * c * d - a * d * d - b * b * e - c * c * c;
  r.disc = r.I.pow(3) - q(27) * r.J * r.J;
  return r;
}

Separation separate_binary_quartics(const BinaryQuartic& f, const BinaryQuartic& g) {
  const auto u = quartic_invariants(f);
  const auto v = quartic_invariants(g);
  if (u.disc.is_zero() != v.disc.is_zero()) {
    return {Verdict::NonEquivalent, "repeated-root pattern differs (disc = 0 on one side only)", 4};
  }
  if (!u.disc.is_zero() && !u.J.is_zero() && !v.J.is_zero() &&
      !(u.I.pow(3) * v.J * v.J == v.I.pow(3) * u.J * u.J)) {
    return {Verdict::NonEquivalent, "absolute invariants I^3/J^2 differ", 4};
  }
  return {Verdict::Inconclusive, "", 0};
}

Separation gl2r_separate(const Rational& t1, const Rational& t2) {
  for (const auto& t : {t1, t2}) {
    if (t < 1 || !below_pt_bound(t)) {
      raise(ErrorCode::PreconditionViolated, "t = " + to_string(t) + " lies outside [1, 17+12*sqrt(2)]");
    }
  }
  return separate_binary_quartics(q_t(RatFunc(t1)), q_t(RatFunc(t2)));
}

std::vector<ProjectivePoint> quartic_root_lines(const Rational& t) {
  if (t < 0) raise(ErrorCode::NegativeParameter, "q_t roots need t >= 0, got " + to_string(t));
  RadicalBuilder rb;
  auto h = rb.sqrt(RatFunc(t));
  rb.use_imaginary_unit();
  auto spec = rb.build();
  const TowerElement i = TowerElement::imaginary_unit(spec);
  const TowerElement r = i * rb.root(h);
  const TowerElement one(spec, RatFunc(1));
  return {{i, one}, {-i, one}, {r, one}, {-r, one}};
}

TowerElement cross_ratio_j(const std::array<ProjectivePoint, 4>& pts) {
  for (std::size_t a = 0; a < 4; ++a) {
    if (pts[a].xi.is_zero() && pts[a].eta.is_zero()) raise(ErrorCode::CoincidentPoints, "(0 : 0) is not a point");
    for (std::size_t b = a + 1; b < 4; ++b) {
      if (bracket(pts[a], pts[b]).is_zero()) raise(ErrorCode::CoincidentPoints, "points must be pairwise distinct");
    }
  }
  const TowerElement l =
      bracket(pts[0], pts[2]) * bracket(pts[1], pts[3]) * (bracket(pts[0], pts[3]) * bracket(pts[1], pts[2])).inv();
  const TowerElement num = q(256) * (l * l - l + q(1)).pow(3);
  const TowerElement den = l * l * (l - q(1)).pow(2);
  return num * den.inv();
}

// ---------------------------------------------------------------------------
// Cubics

std::array<TowerElement, 4> cubic_value_and_gradient(const TowerElement& t, const PlanePoint& u) {
  return {u.u1.pow(3) + u.u2.pow(3) + u.u3.pow(3) + t * u.u1 * u.u2 * u.u3,
          q(3) * u.u1 * u.u1 + t * u.u2 * u.u3, q(3) * u.u2 * u.u2 + t * u.u1 * u.u3,
          q(3) * u.u3 * u.u3 + t * u.u1 * u.u2};
}

std::vector<PlanePoint> cubic_singular_locus(const Rational& t) {
  if (t * t * t != -27) return {};
  const auto e = eisenstein();
  const TowerElement one(e.omega.spec(), RatFunc(1));
  std::vector<PlanePoint> out{{one, one, one}, {one, e.omega, e.omega2}, {one, e.omega2, e.omega}};
  for (const auto& p : out) {
    for (const auto& v : cubic_value_and_gradient(TowerElement(t), p)) {
      if (!v.is_zero()) raise(ErrorCode::PreconditionViolated, "singular point check failed");
    }
  }
  return out;
}

WeierstrassReduction weierstrass_reduce(const std::optional<Rational>& t) {
  const RatFunc tt = parameter(t);
  const RatFunc radicand = -(tt.pow(3) + RatFunc(27)) / RatFunc(81);
  if (radicand.is_zero()) raise(ErrorCode::SingularCubic, "t^3 = -27: c_t is singular");
  RadicalBuilder rb;
  auto h = rb.cbrt(radicand, "C");
  rb.build();

  WeierstrassModel m;
  m.t = t;
  m.C = rb.root(h);
  const TowerElement T(tt);
  const TowerElement Cinv = m.C.inv();
  m.a1 = -T * q(1, 3) * Cinv;
  m.a2 = -T * T * q(1, 9) * Cinv * Cinv;
  m.a3 = q(1);
  m.a4 = q(0);
  m.a6 = q(-1, 3);

  const SpacePtr space = VariableSpace::make({{"w1"}, {"w2"}, {"w3"}});
  const MPoly w1 = MPoly::variable(space, 0), w2 = MPoly::variable(space, 1), w3 = MPoly::variable(space, 2);
  auto k = [&](const TowerElement& c) { return MPoly(space, c); };
  const MPoly W = w2 * w2 * w3 + k(m.a1) * w1 * w2 * w3 + k(m.a3) * w2 * w3 * w3 -
                  (w1.pow(3) + k(m.a2) * w1 * w1 * w3 + k(m.a4) * w1 * w3 * w3 + k(m.a6) * w3.pow(3));
  const MPoly third_t = k(T * q(1, 3));
  const MPoly composite =
      mpoly_substitute(W, Bindings{{0, k(m.C) * w3}, {1, -w2 + third_t * w3}, {2, w1 + w2 - third_t * w3}});
  const MPoly ct = w1.pow(3) + w2.pow(3) + w3.pow(3) + k(T) * w1 * w2 * w3;

  const TowerElement scale = composite.coefficient({3, 0, 0});
  if (scale.is_zero() || !(composite == k(scale) * ct)) {
    raise(ErrorCode::ProportionalityFailed, "composed Weierstrass form is not a multiple of c_t");
  }
  return {m, scale};
}

TateInvariants tate_invariants(const WeierstrassModel& m) {
  TateInvariants r;
  const auto &a1 = m.a1, &a2 = m.a2, &a3 = m.a3, &a4 = m.a4, &a6 = m.a6;
  r.b2 = a1 * a1 + q(4) * a2;
  r.b4 = q(2) * a4 + a1 * a3;
  r.b6 = a3 * a3 + q(4) * a6;
  r.b8 = a1 * a1 * a6 + q(4) * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
  r.c4 = r.b2 * r.b2 - q(24) * r.b4;
  r.c6 = -r.b2.pow(3) + q(36) * r.b2 * r.b4 - q(216) * r.b6;
  r.delta = -r.b2 * r.b2 * r.b8 - q(8) * r.b4.pow(3) - q(27) * r.b6 * r.b6 + q(9) * r.b2 * r.b4 * r.b6;
  if (r.delta.is_zero()) raise(ErrorCode::SingularModel, "discriminant vanishes");
  if (!(q(1728) * r.delta == r.c4.pow(3) - r.c6 * r.c6)) {
    raise(ErrorCode::PreconditionViolated, "1728 Delta != c4^3 - c6^2");
  }
  r.j = r.c4.pow(3) * r.delta.inv();
  return r;
}

RatFunc j_of_ct(const std::optional<Rational>& t) {
  const RatFunc tt = parameter(t);
  const RatFunc t3 = tt.pow(3);
  if (t && t3.constant_value() == -27) raise(ErrorCode::SingularCubic, "j is undefined at t = -3");
  const RatFunc j = -t3 * (t3 - RatFunc(216)).pow(3) / (t3 + RatFunc(27)).pow(3);
  if (!t) {
    const TowerElement via_tate = tate_invariants(weierstrass_reduce(std::nullopt).model).j;
    if (!via_tate.in_base_field() || !(via_tate.base_value() == j)) {
      raise(ErrorCode::PreconditionViolated, "closed-form j disagrees with the Tate formulaire");
    }
  }
  return j;
}

// ---------------------------------------------------------------------------
// Phi and reciprocity

RatFunc phi_function() {
  const RatFunc s = RatFunc::t();
  return -s * (s - RatFunc(216)).pow(3) / (s + RatFunc(27)).pow(3);
}

Rational phi(const Rational& s) {
  if (s == -27) raise(ErrorCode::PoleAt, "Phi has a pole at s = -27");
  return phi_function().eval(s);
}

Rational phi_derivative_at_zero() { return phi_function().derivative().eval(Rational(0)); }

ScanResult phi_monotone_scan(const Rational& lo, const Rational& hi, std::size_t samples) {
  if (samples < 2 || !(lo < hi)) raise(ErrorCode::PreconditionViolated, "scan needs lo < hi and >= 2 samples");
  if (lo <= -27 && -27 <= hi) raise(ErrorCode::PoleAt, "scan interval contains the pole s = -27");
  const RatFunc f = phi_function();
  ScanResult r;
  Rational prev;
  for (std::size_t k = 0; k < samples; ++k) {
    const Rational s = lo + (hi - lo) * Rational(static_cast<long>(k)) / Rational(static_cast<long>(samples - 1));
    const Rational v = f.eval(s);
    if (k > 0 && !(prev < v) && r.increasing) {
      r.increasing = false;
      r.violation = s;
    }
    prev = v;
    ++r.samples;
  }
  return r;
}

RatFunc phi_reciprocity_product() {
  const RatFunc f = phi_function();
  return f * f.compose(RatFunc(-5832) / RatFunc::t());
}

Rational reciprocity_product(const Rational& t) {
  if (t == 0 || t == 6 || t == -3) {
    raise(ErrorCode::ExcludedParameter, "reciprocity excludes t in {0, 6, -3}, got " + to_string(t));
  }
  return j_of_ct(t).constant_value() * j_of_ct(Rational(-18) / t).constant_value();
}

bool reciprocity_check(const Rational& t) { return reciprocity_product(t) == 1; }

bool reciprocity_check_normalized(const Rational& t) { return reciprocity_product(t) == Rational(1728 * 1728); }

// ---------------------------------------------------------------------------
// chi

TowerElement chi_with_root(const TowerElement& t, const TowerElement& root) {
  if (!(root * root == t) || root.eval_real(Rational(0)).sign == Sign::Negative) {
    raise(ErrorCode::PreconditionViolated, "root is not the nonnegative square root of t");
  }
  if (t.eval_real(Rational(0)).sign != Sign::Positive) raise(ErrorCode::OutOfRange, "chi needs t > 0");
  return q(-12) * root * (t + q(1)).inv();
}

TowerElement chi(const Rational& t) {
  if (t < 1) raise(ErrorCode::OutOfRange, "chi needs t >= 1, got " + to_string(t));
  RadicalBuilder rb;
  auto h = rb.sqrt(RatFunc(t));
  rb.build();
  return chi_with_root(TowerElement(t), rb.root(h));
}

ChiPreimage chi_inverse(const Rational& tau, ChiBranch branch) {
  if (!(tau >= -6 && tau < 0) || tau == -2) {
    raise(ErrorCode::OutOfRange, "chi_inverse needs tau in [-6, -2) or (-2, 0), got " + to_string(tau));
  }
  // tau s^2 + 12 s + tau = 0 with s = sqrt(t); the roots (-6 -+ r)/tau,
  // r = sqrt(36 - tau^2), are positive with product 1.
  RadicalBuilder rb;
  auto h = rb.sqrt(RatFunc(Rational(36) - tau * tau));
  rb.build();
  const TowerElement r = rb.root(h);
  const TowerElement inv_tau(Rational(1) / tau);
  const TowerElement s = (branch == ChiBranch::Upper ? q(-6) - r : q(-6) + r) * inv_tau;
  return {s * s, s};
}

}  // namespace tubecheck
