#include <doctest.h>

#include <cmath>

#include "cheq/errors.hpp"
#include "cheq/limitset.hpp"
#include "support/models.hpp"
#include "support/random_group.hpp"

using namespace cheq;
using namespace cheq::testing;

namespace {

LimitSetCloud cloud_of(std::vector<ProjectivePoint> pts) {
  LimitSetCloud c;
  c.points = dedup_points(std::move(pts), 1e-6);
  return c;
}

bool sorted_and_separated(const LimitSetCloud& c) {
  for (std::size_t k = 1; k < c.size(); ++k) {
    if (!canonical_less(c.points[k - 1], c.points[k])) return false;
  }
  // Oracle: all pairs, no grid.
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      if (chordal_distance(c.points[i], c.points[j]) < c.grid_eps) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("dedup keeps the least point of each cluster, matching a quadratic oracle") {
  Rng rng(41);
  std::vector<ProjectivePoint> pts;
  for (int k = 0; k < 300; ++k) {
    const Vector base = null_cone_projection(rng.null_vector(3));
    pts.push_back(project(base));
    for (int j = 0; j < 3; ++j) {
      Vector near = base + 3e-7 * rng.vector(3);
      pts.push_back(project(null_cone_projection(near)));
    }
  }
  const double eps = 1e-6;
  const auto kept = dedup_points(pts, eps);
  // Oracle: sort, then greedy against every kept point.
  auto sorted = pts;
  std::sort(sorted.begin(), sorted.end(), canonical_less);
  std::vector<ProjectivePoint> expected;
  for (const auto& p : sorted) {
    bool far = true;
    for (const auto& q : expected) far = far && chordal_distance(p, q) >= eps;
    if (far) expected.push_back(p);
  }
  REQUIRE(kept.size() == expected.size());
  for (std::size_t k = 0; k < kept.size(); ++k) CHECK(kept[k] == expected[k]);
}

TEST_CASE("orbit accumulation of the cyclic group") {
  const GroupSpec spec = cyclic_spec();
  const LimitSetCloud c = orbit_accumulate(spec, point({1, 0, 0}), 20);
  REQUIRE(c.size() == 2);
  CHECK(sorted_and_separated(c));
  CHECK(chordal_distance(c.points[0], point({1, -1, 0})) <= 1e-4);
  CHECK(chordal_distance(c.points[1], point({1, 1, 0})) <= 1e-4);
  for (const auto& p : c.points) CHECK(p.signature_class() == SignatureClass::Boundary);
  CHECK(c.provenance.method == CloudMethod::Orbit);
  CHECK(c.provenance.depth == 20);
  REQUIRE(c.provenance.base.has_value());
  CHECK(is_elementary(c));
  CHECK_THROWS_AS(orbit_accumulate(spec, point({1, 1, 0}), 3), ArgumentError);
  CHECK_THROWS_AS(orbit_accumulate(spec, point({1, 0, 0}), 0), ArgumentError);
}

TEST_CASE("finite groups have empty clouds with a diagnostic") {
  const GroupSpec spec = elliptic_spec();
  for (int depth : {1, 4, 9}) {
    const LimitSetCloud c = orbit_accumulate(spec, point({1, 0, 0}), depth);
    CHECK(c.empty());
    REQUIRE_FALSE(c.diagnostics.empty());
    CHECK(c.diagnostics.front() == "no accumulation detected at this depth");
    CHECK(fixed_point_seed(spec, depth).empty());
  }
  CHECK(is_elementary(LimitSetCloud{}));
}

TEST_CASE("fixed point seeding") {
  const LimitSetCloud c = fixed_point_seed(cyclic_spec(), 1);
  REQUIRE(c.size() == 2);
  CHECK(chordal_distance(c.points[0], point({1, -1, 0})) <= 1e-12);
  CHECK(chordal_distance(c.points[1], point({1, 1, 0})) <= 1e-12);
  const LimitSetCloud p = fixed_point_seed(parabolic_spec(), 3);
  REQUIRE(p.size() == 1);
  CHECK(chordal_distance(p.points[0], point({1, 1, 0})) <= 1e-7);
  const LimitSetCloud two = fixed_point_seed(two_generator_spec(), 4);
  CHECK(two.size() >= 10);
  CHECK(sorted_and_separated(two));
  CHECK_FALSE(is_elementary(two));
}

TEST_CASE("two-generator orbit cloud is non-elementary at depth 8") {
  const LimitSetCloud c = orbit_accumulate(two_generator_spec(), point({1, 0, 0}), 8);
  CHECK(c.size() > 2);
  CHECK(sorted_and_separated(c));
}

TEST_CASE("hausdorff") {
  const LimitSetCloud a = cloud_of({point({1, 1, 0})});
  const LimitSetCloud b = cloud_of({point({1, -1, 0})});
  CHECK(hausdorff(a, a) == 0.0);
  CHECK(hausdorff(a, b) == 1.0);
  CHECK_THROWS_AS(hausdorff(a, LimitSetCloud{}), ArgumentError);
  CHECK_THROWS_AS(distance_to_cloud(point({1, 0, 0}), LimitSetCloud{}), ArgumentError);
  const GroupSpec spec = cyclic_spec();
  CHECK(hausdorff(orbit_accumulate(spec, point({1, 0, 0}), 16), fixed_point_seed(spec, 4)) <= 1e-4);

  // Oracle: brute-force max-min over all pairs.
  Rng rng(42);
  std::vector<ProjectivePoint> x, y;
  for (int k = 0; k < 40; ++k) x.push_back(project(rng.null_vector(3), 1e-8));
  for (int k = 0; k < 50; ++k) y.push_back(project(rng.null_vector(3), 1e-8));
  const LimitSetCloud cx = cloud_of(x), cy = cloud_of(y);
  double brute = 0.0;
  for (const auto& p : cx.points) {
    double m = 1.0;
    for (const auto& q : cy.points) m = std::min(m, chordal_distance(p, q));
    brute = std::max(brute, m);
  }
  for (const auto& q : cy.points) {
    double m = 1.0;
    for (const auto& p : cx.points) m = std::min(m, chordal_distance(p, q));
    brute = std::max(brute, m);
  }
  CHECK(hausdorff(cx, cy) == doctest::Approx(brute).epsilon(1e-12));
  CHECK(hausdorff(cx, cy) == hausdorff(cy, cx));
}

TEST_CASE("merged clouds") {
  const GroupSpec spec = two_generator_spec();
  const LimitSetCloud orbit = orbit_accumulate(spec, point({1, 0, 0}), 6);
  const LimitSetCloud fixed = fixed_point_seed(spec, 4);
  const LimitSetCloud merged = merge_clouds(orbit, fixed);
  CHECK(merged.provenance.method == CloudMethod::Merged);
  CHECK(merged.size() <= orbit.size() + fixed.size());
  CHECK(merged.size() >= std::max(orbit.size(), fixed.size()));
  CHECK(sorted_and_separated(merged));
  CHECK(merge_clouds(fixed, orbit).points.size() == merged.size());
  for (std::size_t k = 0; k < merged.size(); ++k) CHECK(merge_clouds(fixed, orbit).points[k] == merged.points[k]);
}

TEST_CASE("clouds are G-invariant up to one extra level") {
  // The fixed-point cloud at depth d, moved by a generator, lies in the
  // cloud at depth d + 2 (conjugates of words of length d).
  const GroupSpec spec = two_generator_spec();
  const LimitSetCloud c = fixed_point_seed(spec, 2);
  const LimitSetCloud deeper = fixed_point_seed(spec, 4);
  for (const auto& gen : spec.generators) {
    for (const GroupElement& g : {gen.element, gen.element.inverse()}) {
      for (const auto& p : c.points) CHECK(distance_to_cloud(act(g, p, 1e-8), deeper) <= deeper.grid_eps + 1e-6);
    }
  }
  // Cyclic orbit cloud: the two points are fixed by A.
  const GroupSpec cyclic = cyclic_spec();
  const LimitSetCloud cyc = orbit_accumulate(cyclic, point({1, 0, 0}), 12);
  const GroupElement& a = cyclic.generators[0].element;
  for (const auto& p : cyc.points) CHECK(distance_to_cloud(act(a, p, 1e-8), cyc) <= cyc.grid_eps + 1e-6);
}

TEST_CASE("method consistency improves with depth on the two-generator group") {
  const GroupSpec spec = two_generator_spec();
  double prev = 1.0;
  for (int depth : {4, 6, 8}) {
    const double h = hausdorff(orbit_accumulate(spec, point({1, 0, 0}), depth), fixed_point_seed(spec, depth));
    CHECK(h < prev);
    prev = h;
  }
}

TEST_CASE("cardinality grows on the two-generator group and stays at two for the cyclic one") {
  const GroupSpec two = two_generator_spec();
  std::size_t prev = 0;
  for (int depth = 6; depth <= 9; ++depth) {
    const std::size_t s = orbit_accumulate(two, point({1, 0, 0}), depth).size();
    CHECK(s > prev);
    prev = s;
  }
  for (int depth = 10; depth <= 20; ++depth) CHECK(orbit_accumulate(cyclic_spec(), point({1, 0, 0}), depth).size() == 2);
}

TEST_CASE("cloud method names") {
  CHECK(to_string(CloudMethod::Orbit) == "orbit");
  CHECK(to_string(CloudMethod::FixedPoints) == "fixed_points");
  CHECK(to_string(CloudMethod::Merged) == "merged");
}
