#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cheq/isometry.hpp"
#include "cheq/projective.hpp"

namespace cheq {

enum class CloudMethod { Orbit, FixedPoints, Merged };

std::string to_string(CloudMethod m);

struct CloudProvenance {
  CloudMethod method = CloudMethod::Orbit;
  int depth = 0;
  std::optional<ProjectivePoint> base;
};

/// Finite sample of the limit set: boundary points, pairwise at least
/// grid_eps apart (chordal), sorted by canonical_less.
struct LimitSetCloud {
  std::vector<ProjectivePoint> points;
  double grid_eps = 1e-6;
  CloudProvenance provenance;
  std::vector<std::string> diagnostics;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Sorts the candidates and keeps, greedily in that order, each point that
/// is at least grid_eps from every point already kept. Candidates are
/// bucketed on the affine chart z_j / z_0, where two null points at chordal
/// distance d differ by at most 2d, so only neighbouring cells are checked.
std::vector<ProjectivePoint> dedup_points(std::vector<ProjectivePoint> candidates, double grid_eps);

/// Radial projections of the orbit points g.base with Bergman displacement
/// at least r_acc, over all reduced words up to depth.
LimitSetCloud orbit_accumulate(const GroupSpec& spec, const ProjectivePoint& base, int depth, double r_acc = 10.0,
                               double grid_eps = 1e-6);

/// Boundary fixed points of every loxodromic (both) and parabolic word up
/// to depth. Words whose classification is ill-conditioned are skipped and
/// counted in the diagnostics.
LimitSetCloud fixed_point_seed(const GroupSpec& spec, int depth, double grid_eps = 1e-6);

/// Union of both methods, deduplicated.
LimitSetCloud merge_clouds(const LimitSetCloud& a, const LimitSetCloud& b);

/// Symmetric chordal Hausdorff distance; ArgumentError on empty clouds.
double hausdorff(const LimitSetCloud& a, const LimitSetCloud& b);

/// At most two points. Advisory: shallow depths under-count.
bool is_elementary(const LimitSetCloud& c);

/// Distance from p to the nearest cloud point; ArgumentError when empty.
double distance_to_cloud(const ProjectivePoint& p, const LimitSetCloud& c);

}  // namespace cheq
