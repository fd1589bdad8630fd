#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "cheq/isometry.hpp"
#include "cheq/linalg.hpp"
#include "cheq/projective.hpp"

namespace cheq {

/// Projectivization of a nonzero, possibly singular linear map. Defined off
/// the projectivized kernel.
class QuasiProjectiveMap {
public:
  /// Lift with sup_entry_norm 1 and canonical phase.
  const Matrix& lift() const { return lift_; }
  const std::vector<Vector>& kernel() const { return kernel_; }
  const std::vector<Vector>& image() const { return image_; }
  /// Projective dimensions; an empty kernel has dimension -1.
  int proj_ker_dim() const { return static_cast<int>(kernel_.size()) - 1; }
  int proj_im_dim() const { return static_cast<int>(image_.size()) - 1; }
  bool ill_conditioned() const { return ill_conditioned_; }
  double rank_tol() const { return rank_tol_; }
  Eigen::Index dim() const { return lift_.rows(); }

  /// Euclidean distance from a unit vector to the linear kernel.
  double kernel_residual(const Vector& unit) const;

private:
  friend QuasiProjectiveMap qp_from_matrix(const Matrix& m, double tau_rank);
  QuasiProjectiveMap() = default;

  Matrix lift_;
  std::vector<Vector> kernel_;
  std::vector<Vector> image_;
  bool ill_conditioned_ = false;
  double rank_tol_ = 0.0;
};

QuasiProjectiveMap qp_from_matrix(const Matrix& m, double tau_rank = 1e-9);

/// [lift * rep]. Throws ArgumentError naming the point when p is within
/// tau_rank of the kernel.
ProjectivePoint qp_apply(const QuasiProjectiveMap& q, const ProjectivePoint& p, double tau_null = 1e-10);

/// A pull-based stream of lifts; returns nullopt when exhausted.
using LiftStream = std::function<std::optional<Matrix>()>;

/// g, g^2, ..., g^count.
LiftStream power_stream(const GroupElement& g, int count);

/// g, g^2, g^4, ..., g^(2^(count-1)), carried as sup-normalized lifts so
/// huge exponents do not overflow.
LiftStream doubling_stream(const GroupElement& g, int count);

LiftStream element_stream(std::vector<GroupElement> elements);

/// Image point and kernel tangency point of a limit of boundary shape:
/// rank one, null image, kernel equal to the polar of a null point.
struct BoundaryForm {
  ProjectivePoint image_point;
  ProjectivePoint kernel_tangency;
  double image_null_residual = 0.0;   ///< |<q,q>| before snapping
  double kernel_null_residual = 0.0;  ///< |<p,p>| before snapping
};

struct LimitReport {
  std::optional<QuasiProjectiveMap> limit;
  bool converged = false;
  int terms_used = 0;
  double residual = 0.0;  ///< last Cauchy increment
  std::vector<double> increments;
  std::optional<BoundaryForm> boundary_form;
};

struct LimitOptions {
  double tol = 1e-9;
  int max_terms = 200;
  int window = 3;  ///< consecutive sub-tol increments required
  double tau_rank = 1e-9;
  double tau_null = 1e-10;
  /// On divergence, retry on the greedy subsequence of terms whose
  /// increments against the last kept term stay below tol.
  bool retry_subsequence = false;
};

/// Sup-norm normalized, phase-aligned Cauchy test over the stream.
LimitReport qp_limit(const LiftStream& stream, const LimitOptions& opts = {});

/// Detects the boundary shape on a limit map; nullopt if absent.
std::optional<BoundaryForm> boundary_form(const QuasiProjectiveMap& q, double shape_tol, double tau_null = 1e-10);

struct DualityResidual {
  double backward_image_to_forward_kernel = 0.0;  ///< d1
  double forward_image_to_backward_kernel = 0.0;  ///< d2
};

/// Throws PreconditionError if either report lacks a boundary form.
DualityResidual duality_check(const LimitReport& forward, const LimitReport& backward);

/// Kernel hyperplane of a limit whose kernel has projective dimension n-1.
/// Carries a tangency point when the kernel is the polar of a null point.
Hyperplane eq_of_sequence(const QuasiProjectiveMap& q, double tau_null = 1e-10);

}  // namespace cheq
