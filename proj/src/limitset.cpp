#include "cheq/limitset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include "cheq/errors.hpp"

namespace cheq {

std::string to_string(CloudMethod m) {
  switch (m) {
    case CloudMethod::Orbit: return "orbit";
    case CloudMethod::FixedPoints: return "fixed_points";
    case CloudMethod::Merged: return "merged";
  }
  return "unknown";
}

namespace {

// At most four real chart coordinates are hashed; 3^4 neighbour cells.
constexpr int kHashedCoords = 4;

using CellKey = std::array<std::int64_t, kHashedCoords>;

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int64_t v : k) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

std::array<double, kHashedCoords> chart_coords(const ProjectivePoint& p) {
  std::array<double, kHashedCoords> c{};
  const Vector& r = p.rep();
  const Complex head = r[0];
  int slot = 0;
  for (Eigen::Index j = 1; j < r.size() && slot < kHashedCoords; ++j) {
    const Complex w = std::abs(head) > 0.0 ? r[j] / head : Complex(0.0, 0.0);
    c[static_cast<std::size_t>(slot++)] = w.real();
    if (slot < kHashedCoords) c[static_cast<std::size_t>(slot++)] = w.imag();
  }
  return c;
}

}  // namespace

std::vector<ProjectivePoint> dedup_points(std::vector<ProjectivePoint> candidates, double grid_eps) {
  if (!(grid_eps > 0.0)) throw ArgumentError("dedup_points: grid_eps must be positive");
  std::sort(candidates.begin(), candidates.end(), canonical_less);
  const double cell = 2.0 * grid_eps;
  std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> grid;
  std::vector<ProjectivePoint> kept;

  for (auto& p : candidates) {
    const auto coords = chart_coords(p);
    CellKey key{};
    for (int k = 0; k < kHashedCoords; ++k) {
      key[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(std::floor(coords[static_cast<std::size_t>(k)] / cell));
    }
    bool duplicate = false;
    CellKey probe{};
    for (int code = 0; code < 81 && !duplicate; ++code) {
      int c = code;
      for (int k = 0; k < kHashedCoords; ++k) {
        probe[static_cast<std::size_t>(k)] = key[static_cast<std::size_t>(k)] + (c % 3) - 1;
        c /= 3;
      }
      auto it = grid.find(probe);
      if (it == grid.end()) continue;
      for (std::size_t idx : it->second) {
        if (chordal_distance(kept[idx], p) < grid_eps) {
          duplicate = true;
          break;
        }
      }
    }
    if (duplicate) continue;
    grid[key].push_back(kept.size());
    kept.push_back(std::move(p));
  }
  std::sort(kept.begin(), kept.end(), canonical_less);
  return kept;
}

LimitSetCloud orbit_accumulate(const GroupSpec& spec, const ProjectivePoint& base, int depth, double r_acc,
                               double grid_eps) {
  if (base.signature_class() != SignatureClass::Interior) {
    throw ArgumentError("orbit_accumulate: base point must be interior");
  }
  if (depth < 1) throw ArgumentError("orbit_accumulate: depth must be >= 1");
  const double tau_null = spec.tolerances.null;
  const Vector& o = base.rep();
  const double oo = herm_norm2(o);

  std::vector<ProjectivePoint> candidates;
  for_each_word(spec, depth, [&](const GroupElement& g) {
    const Vector x = g.lift() * o;
    // g preserves the form, so <x,x> = <o,o> exactly and
    // cosh(d/2) = |<o, g o>| / |<o,o>| without cancellation.
    const double ratio = std::abs(herm_form(o, x)) / std::abs(oo);
    const double d = 2.0 * std::acosh(std::max(1.0, ratio));
    if (d >= r_acc) candidates.push_back(project(null_cone_projection(x), tau_null));
  });

  LimitSetCloud cloud;
  cloud.grid_eps = grid_eps;
  cloud.provenance = {CloudMethod::Orbit, depth, base};
  cloud.points = dedup_points(std::move(candidates), grid_eps);
  if (cloud.points.empty()) cloud.diagnostics.push_back("no accumulation detected at this depth");
  return cloud;
}

LimitSetCloud fixed_point_seed(const GroupSpec& spec, int depth, double grid_eps) {
  if (depth < 1) throw ArgumentError("fixed_point_seed: depth must be >= 1");
  std::vector<ProjectivePoint> candidates;
  std::size_t skipped = 0;
  for_each_word(spec, depth, [&](const GroupElement& g) {
    try {
      const ElementClass c = classify(g, spec.tolerances);
      if (c.kind == ElementKind::Loxodromic || c.kind == ElementKind::Parabolic) {
        for (const auto& p : c.boundary_fixed_points) candidates.push_back(p);
      }
    } catch (const NumericalError&) {
      ++skipped;
    }
  });

  LimitSetCloud cloud;
  cloud.grid_eps = grid_eps;
  cloud.provenance = {CloudMethod::FixedPoints, depth, std::nullopt};
  cloud.points = dedup_points(std::move(candidates), grid_eps);
  if (skipped > 0) cloud.diagnostics.push_back(std::to_string(skipped) + " words with ill-conditioned classification skipped");
  if (cloud.points.empty()) cloud.diagnostics.push_back("no loxodromic or parabolic words up to this depth");
  return cloud;
}

LimitSetCloud merge_clouds(const LimitSetCloud& a, const LimitSetCloud& b) {
  LimitSetCloud out;
  out.grid_eps = std::max(a.grid_eps, b.grid_eps);
  out.provenance = {CloudMethod::Merged, std::max(a.provenance.depth, b.provenance.depth),
                    a.provenance.base ? a.provenance.base : b.provenance.base};
  std::vector<ProjectivePoint> all = a.points;
  all.insert(all.end(), b.points.begin(), b.points.end());
  out.points = dedup_points(std::move(all), out.grid_eps);
  out.diagnostics = a.diagnostics;
  out.diagnostics.insert(out.diagnostics.end(), b.diagnostics.begin(), b.diagnostics.end());
  return out;
}

namespace {

// Unit representatives packed row by row for a cache-friendly scan.
struct PackedCloud {
  Eigen::Index dim = 0;
  std::vector<Complex> reps;

  explicit PackedCloud(const LimitSetCloud& c) : dim(c.points.front().dim()) {
    reps.reserve(c.points.size() * static_cast<std::size_t>(dim));
    for (const auto& q : c.points) reps.insert(reps.end(), q.rep().data(), q.rep().data() + dim);
  }

  // The nearest point maximizes |<p,q>_E|; the winner's distance is then
  // recomputed through the residual form, which keeps small distances exact.
  double distance(const ProjectivePoint& p, const LimitSetCloud& c) const {
    if (p.dim() != dim) throw ArgumentError("distance_to_cloud: dimension mismatch");
    const Complex* x = p.rep().data();
    double best = -1.0;
    std::size_t arg = 0;
    const std::size_t count = reps.size() / static_cast<std::size_t>(dim);
    for (std::size_t k = 0; k < count; ++k) {
      const Complex* y = reps.data() + k * static_cast<std::size_t>(dim);
      Complex dot = 0.0;
      for (Eigen::Index j = 0; j < dim; ++j) dot += std::conj(y[j]) * x[j];
      const double overlap = std::norm(dot);
      if (overlap > best) {
        best = overlap;
        arg = k;
      }
    }
    return chordal_distance(p, c.points[arg]);
  }
};

}  // namespace

double distance_to_cloud(const ProjectivePoint& p, const LimitSetCloud& c) {
  if (c.empty()) throw ArgumentError("distance_to_cloud: empty cloud");
  return PackedCloud(c).distance(p, c);
}

double hausdorff(const LimitSetCloud& a, const LimitSetCloud& b) {
  if (a.empty() || b.empty()) throw ArgumentError("hausdorff: empty cloud");
  const PackedCloud pa(a), pb(b);
  double h = 0.0;
  for (const auto& p : a.points) h = std::max(h, pb.distance(p, b));
  for (const auto& q : b.points) h = std::max(h, pa.distance(q, a));
  return h;
}

bool is_elementary(const LimitSetCloud& c) { return c.size() <= 2; }

}  // namespace cheq
