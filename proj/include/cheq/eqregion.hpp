#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cheq/isometry.hpp"
#include "cheq/limitset.hpp"
#include "cheq/projective.hpp"

namespace cheq {

/// z -> min over cloud points p of |<z,p>| (unit representatives), the
/// incidence margin to the nearest sampled tangent hyperplane.
class MarginField {
public:
  explicit MarginField(LimitSetCloud cloud);

  const LimitSetCloud& cloud() const { return cloud_; }
  bool empty() const { return cloud_.empty(); }

  /// Throws ArgumentError for an empty cloud: Eq(G) is then all of
  /// projective space and no margin is defined.
  double margin(const ProjectivePoint& z) const;
  double margin(const Vector& unit_rep) const;

private:
  LimitSetCloud cloud_;
  std::vector<Hyperplane> polars_;
};

enum class PointVerdict { InEq, OnC, Undetermined };

std::string to_string(PointVerdict v);

/// InEq if margin >= 2 eps, OnC if margin <= eps, Undetermined between.
/// An empty cloud answers InEq for every point.
PointVerdict classify_point(const ProjectivePoint& z, const MarginField& field, double eps);

/// Fixed sample of unit tangent directions at z (Euclidean-orthogonal to the
/// representative), drawn from a seeded mt19937_64.
std::vector<Vector> tangent_directions(const ProjectivePoint& z, int count, std::uint64_t seed = 0x5eed0fc0ffee1234ull);

/// Points at chordal distance delta from z along each direction.
std::vector<Vector> chordal_sphere(const ProjectivePoint& z, const std::vector<Vector>& directions, double delta);

/// Max pairwise chordal distance among the images m * s.
double image_diameter(const Matrix& m, const std::vector<Vector>& sample);

struct DistortionRow {
  Word word;
  double delta = 0.0;
  double ratio = 0.0;  ///< diameter(g * sphere) / diameter(sphere)
};

std::vector<DistortionRow> distortion_profile(const ProjectivePoint& z, const GroupSpec& spec, int depth,
                                              const std::vector<double>& deltas, int directions = 16);

struct ClusterOptions {
  double eps = 1e-3;            ///< InEq precondition margin scale
  double return_radius = 0.1;   ///< chordal radius for g(K) meeting K
};

struct ClusterReport {
  /// Frontier images (words of maximal length) farther than return_radius
  /// from every sample point.
  std::size_t escaping_images = 0;
  /// Largest chordal distance from an escaping image to the cloud.
  double max_escape_distance = 0.0;
  /// Distinct elements g with g(K) meeting K, in shortlex order of their
  /// first word.
  std::vector<Word> returning_words;
};

/// Orbit of a compact sample under the words up to depth. Throws
/// ArgumentError if a sample point is not InEq at opts.eps.
ClusterReport cluster_check(const std::vector<ProjectivePoint>& sample, const GroupSpec& spec, int depth,
                            const MarginField& field, const ClusterOptions& opts = {});

/// A real two-parameter slice of projective space:
/// (x, y) -> [center + x dir_u + y dir_v].
struct SliceChart {
  Vector center;
  Vector dir_u;
  Vector dir_v;
  double x_min = -1.0, x_max = 1.0, y_min = -1.0, y_max = 1.0;
  int width = 1, height = 1;
};

struct GrayMapping {
  double m_ref = 0.5;
  double gamma = 1.0;
};

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  ///< row-major, top row first

  /// Binary PGM: "P5\n<w> <h>\n255\n" then the pixel bytes.
  std::string to_pgm() const;
};

/// Chart coordinates of pixel (i, j). The window bounds are the centres of
/// the edge pixels; a single column or row sits at the window midpoint.
double pixel_x(const SliceChart& chart, int i);
double pixel_y(const SliceChart& chart, int j);

std::uint8_t gray_value(double margin, const GrayMapping& mapping);

/// Renders margin over the slice. Rows are split over up to `workers`
/// threads; each pixel is written once, so the buffer does not depend on
/// the worker count.
GrayImage render_slice(const SliceChart& chart, const MarginField& field, const GrayMapping& mapping,
                       int workers = 1);

}  // namespace cheq
