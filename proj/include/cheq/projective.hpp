#pragma once

#include <optional>
#include <string>

#include "cheq/linalg.hpp"

namespace cheq {

enum class SignatureClass { Interior, Boundary, Exterior };

std::string to_string(SignatureClass c);

/// A point of complex projective space, stored by its canonical unit
/// representative: Euclidean norm 1 and pivot coordinate (largest modulus,
/// lowest index among near-ties) real positive.
class ProjectivePoint {
public:
  const Vector& rep() const { return rep_; }
  Eigen::Index dim() const { return rep_.size(); }
  SignatureClass signature_class() const { return class_; }
  /// <rep, rep>; negative inside the ball.
  double signature_value() const { return value_; }

  bool operator==(const ProjectivePoint& other) const;

private:
  friend ProjectivePoint project(const Vector& v, double tau_null);
  ProjectivePoint(Vector rep, SignatureClass c, double value)
      : rep_(std::move(rep)), class_(c), value_(value) {}

  Vector rep_;
  SignatureClass class_;
  double value_;
};

/// Quotient map onto projective space. Throws ArgumentError on the zero
/// vector. A canonical representative is returned unchanged, bit for bit.
ProjectivePoint project(const Vector& v, double tau_null = 1e-10);

/// Strict lexicographic order on (re0, im0, re1, im1, ...).
bool canonical_less(const ProjectivePoint& a, const ProjectivePoint& b);

/// sqrt(1 - |<p,q>_E|^2) for unit representatives, evaluated through the
/// orthogonal residual so small distances keep full relative precision.
double chordal_distance(const ProjectivePoint& p, const ProjectivePoint& q);
double chordal_distance(const Vector& u, const Vector& v);

/// The hyperplane {[z] : sum_j c_j z_j = 0}.
class Hyperplane {
public:
  static Hyperplane from_covector(const Vector& covector);

  const Vector& covector() const { return covector_; }
  const std::optional<ProjectivePoint>& tangency_point() const { return tangency_; }

private:
  friend Hyperplane polar_hyperplane(const ProjectivePoint& p, double tau_null);
  Hyperplane(Vector c, std::optional<ProjectivePoint> t)
      : covector_(std::move(c)), tangency_(std::move(t)) {}

  Vector covector_;
  std::optional<ProjectivePoint> tangency_;
};

/// {z : <z,p> = 0}, the complex hyperplane tangent to the sphere at the
/// boundary point p. Throws ArgumentError when p is not boundary-class.
Hyperplane polar_hyperplane(const ProjectivePoint& p, double tau_null = 1e-10);

/// |sum_j c_j z_j| with both sides unit-normalized; 0 iff z lies on H.
double incidence_margin(const ProjectivePoint& z, const Hyperplane& h);

/// Radial projection onto the null cone: keeps the tail and the phase of
/// x0, resets |x0| to the tail norm. Throws ArgumentError if x0 or the tail
/// vanishes.
Vector null_cone_projection(const Vector& x);

}  // namespace cheq
