#include "cheq/projective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cheq/errors.hpp"

namespace cheq {

std::string to_string(SignatureClass c) {
  switch (c) {
    case SignatureClass::Interior: return "interior";
    case SignatureClass::Boundary: return "boundary";
    case SignatureClass::Exterior: return "exterior";
  }
  return "unknown";
}

bool ProjectivePoint::operator==(const ProjectivePoint& other) const {
  return rep_.size() == other.rep_.size() && rep_ == other.rep_;
}

namespace {

bool is_canonical(const Vector& v) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const Eigen::Index k = phase_pivot(v);
  return v[k].imag() == 0.0 && v[k].real() > 0.0 && std::abs(v.squaredNorm() - 1.0) <= 4.0 * eps;
}

}  // namespace

ProjectivePoint project(const Vector& v, double tau_null) {
  if (v.size() < 2) throw ArgumentError("project: need at least two coordinates");
  const double len = v.norm();
  if (!(len > 0.0) || !std::isfinite(len)) throw ArgumentError("project: zero or non-finite vector");

  Vector rep = is_canonical(v) ? v : canonical_phase(Vector(v / len));
  const double value = herm_norm2(rep);
  SignatureClass cls = SignatureClass::Exterior;
  if (value < -tau_null) {
    cls = SignatureClass::Interior;
  } else if (std::abs(value) <= tau_null) {
    cls = SignatureClass::Boundary;
  }
  return ProjectivePoint(std::move(rep), cls, value);
}

bool canonical_less(const ProjectivePoint& a, const ProjectivePoint& b) {
  const Vector& x = a.rep();
  const Vector& y = b.rep();
  const Eigen::Index n = std::min(x.size(), y.size());
  for (Eigen::Index k = 0; k < n; ++k) {
    if (x[k].real() != y[k].real()) return x[k].real() < y[k].real();
    if (x[k].imag() != y[k].imag()) return x[k].imag() < y[k].imag();
  }
  return x.size() < y.size();
}

namespace {

bool lexicographic_less(const Vector& a, const Vector& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a[k].real() != b[k].real()) return a[k].real() < b[k].real();
    if (a[k].imag() != b[k].imag()) return a[k].imag() < b[k].imag();
  }
  return false;
}

}  // namespace

double chordal_distance(const Vector& u_in, const Vector& v_in) {
  if (u_in.size() != v_in.size()) throw ArgumentError("chordal_distance: dimension mismatch");
  if (u_in == v_in && u_in.norm() > 0.0) return 0.0;
  // A fixed argument order makes the rounded result exactly symmetric.
  const bool swap = lexicographic_less(v_in, u_in);
  const Vector& u = swap ? v_in : u_in;
  const Vector& v = swap ? u_in : v_in;
  const double nu = u.norm();
  const double nv = v.norm();
  if (!(nu > 0.0) || !(nv > 0.0)) throw ArgumentError("chordal_distance: zero vector");
  const Vector a = u / nu;
  const Vector b = v / nv;
  const Vector residual = a - b * b.dot(a);  // b.dot(a) = sum conj(b_j) a_j
  return std::clamp(residual.norm(), 0.0, 1.0);
}

double chordal_distance(const ProjectivePoint& p, const ProjectivePoint& q) {
  return chordal_distance(p.rep(), q.rep());
}

Hyperplane Hyperplane::from_covector(const Vector& covector) {
  const double len = covector.norm();
  if (covector.size() < 2 || !(len > 0.0)) throw ArgumentError("Hyperplane: zero covector");
  return Hyperplane(canonical_phase(Vector(covector / len)), std::nullopt);
}

Hyperplane polar_hyperplane(const ProjectivePoint& p, double tau_null) {
  if (std::abs(p.signature_value()) > tau_null) {
    throw ArgumentError("polar_hyperplane: point is " + to_string(p.signature_class()) +
                        ", tangency needs a boundary point");
  }
  // Sum_j conj((Jp)_j) z_j = <z, p>.
  Vector c = p.rep().conjugate();
  c[0] = -c[0];
  return Hyperplane(canonical_phase(Vector(c / c.norm())), p);
}

double incidence_margin(const ProjectivePoint& z, const Hyperplane& h) {
  if (z.dim() != h.covector().size()) throw ArgumentError("incidence_margin: dimension mismatch");
  return std::min(1.0, std::abs(h.covector().cwiseProduct(z.rep()).sum()));
}

Vector null_cone_projection(const Vector& x) {
  if (x.size() < 2) throw ArgumentError("null_cone_projection: need at least two coordinates");
  const double tail = x.tail(x.size() - 1).norm();
  const double head = std::abs(x[0]);
  if (!(head > 0.0) || !(tail > 0.0)) {
    throw ArgumentError("null_cone_projection: degenerate vector (zero head or tail)");
  }
  Vector out = x;
  out[0] = x[0] * (tail / head);
  return out;
}

}  // namespace cheq
