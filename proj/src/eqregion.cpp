#include "cheq/eqregion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "cheq/errors.hpp"

namespace cheq {

MarginField::MarginField(LimitSetCloud cloud) : cloud_(std::move(cloud)) {
  polars_.reserve(cloud_.points.size());
  for (const auto& p : cloud_.points) {
    if (p.signature_class() != SignatureClass::Boundary) throw ArgumentError("MarginField: cloud point off the boundary");
    polars_.push_back(polar_hyperplane(p, std::max(1e-10, std::abs(p.signature_value()))));
  }
}

double MarginField::margin(const Vector& unit_rep) const {
  if (polars_.empty()) throw ArgumentError("margin: empty cloud (Eq(G) is the whole space)");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& h : polars_) {
    best = std::min(best, std::abs(h.covector().cwiseProduct(unit_rep).sum()));
  }
  return std::min(best, 1.0);
}

double MarginField::margin(const ProjectivePoint& z) const {
  if (!polars_.empty() && z.dim() != polars_.front().covector().size()) {
    throw ArgumentError("margin: dimension mismatch");
  }
  return margin(z.rep());
}

std::string to_string(PointVerdict v) {
  switch (v) {
    case PointVerdict::InEq: return "InEq";
    case PointVerdict::OnC: return "OnC";
    case PointVerdict::Undetermined: return "Undetermined";
  }
  return "unknown";
}

PointVerdict classify_point(const ProjectivePoint& z, const MarginField& field, double eps) {
  if (field.empty()) return PointVerdict::InEq;
  const double m = field.margin(z);
  if (m >= 2.0 * eps) return PointVerdict::InEq;
  if (m <= eps) return PointVerdict::OnC;
  return PointVerdict::Undetermined;
}

namespace {

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller on raw engine output, so the sample is identical across
// standard library implementations.
double standard_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - unit_uniform(rng);
  const double u2 = unit_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

std::vector<Vector> tangent_directions(const ProjectivePoint& z, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Vector> out;
  const Vector& r = z.rep();
  while (static_cast<int>(out.size()) < count) {
    Vector u(r.size());
    for (Eigen::Index k = 0; k < u.size(); ++k) {
      const double re = standard_normal(rng);
      const double im = standard_normal(rng);
      u[k] = Complex(re, im);
    }
    u -= r * r.dot(u);
    const double len = u.norm();
    if (len < 1e-8) continue;
    out.push_back(u / len);
  }
  return out;
}

std::vector<Vector> chordal_sphere(const ProjectivePoint& z, const std::vector<Vector>& directions, double delta) {
  if (!(delta > 0.0) || delta > 1.0) throw ArgumentError("chordal_sphere: delta must lie in (0, 1]");
  const double s = delta;
  const double c = std::sqrt(1.0 - s * s);
  std::vector<Vector> out;
  out.reserve(directions.size());
  for (const auto& u : directions) out.push_back(c * z.rep() + s * u);
  return out;
}

double image_diameter(const Matrix& m, const std::vector<Vector>& sample) {
  std::vector<Vector> images;
  images.reserve(sample.size());
  for (const auto& s : sample) images.push_back(m * s);
  double diam = 0.0;
  for (std::size_t a = 0; a < images.size(); ++a) {
    for (std::size_t b = a + 1; b < images.size(); ++b) diam = std::max(diam, chordal_distance(images[a], images[b]));
  }
  return diam;
}

std::vector<DistortionRow> distortion_profile(const ProjectivePoint& z, const GroupSpec& spec, int depth,
                                              const std::vector<double>& deltas, int directions) {
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (!(deltas[k] > 0.0)) throw ArgumentError("distortion_profile: deltas must be positive");
    if (k > 0 && !(deltas[k] < deltas[k - 1])) throw ArgumentError("distortion_profile: deltas must decrease");
  }
  const auto dirs = tangent_directions(z, directions);
  std::vector<std::vector<Vector>> spheres;
  std::vector<double> base;
  const Matrix id = Matrix::Identity(z.dim(), z.dim());
  for (double d : deltas) {
    spheres.push_back(chordal_sphere(z, dirs, d));
    base.push_back(image_diameter(id, spheres.back()));
  }
  std::vector<DistortionRow> rows;
  for_each_word(spec, depth, [&](const GroupElement& g) {
    for (std::size_t k = 0; k < deltas.size(); ++k) {
      rows.push_back({g.word(), deltas[k], image_diameter(g.lift(), spheres[k]) / base[k]});
    }
  });
  return rows;
}

ClusterReport cluster_check(const std::vector<ProjectivePoint>& sample, const GroupSpec& spec, int depth,
                            const MarginField& field, const ClusterOptions& opts) {
  for (const auto& k : sample) {
    if (classify_point(k, field, opts.eps) != PointVerdict::InEq) {
      throw ArgumentError("cluster_check: sample point is not in the equicontinuity region (margin " +
                          std::to_string(field.margin(k)) + ")");
    }
  }
  ClusterReport report;
  std::vector<Matrix> returning_lifts;
  const double tau_fix = spec.tolerances.fix;
  for_each_word(spec, depth, [&](const GroupElement& g) {
    const bool frontier = static_cast<int>(g.word().size()) == depth;
    bool returns = false;
    for (const auto& k : sample) {
      const ProjectivePoint img = project(g.lift() * k.rep(), spec.tolerances.null);
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& other : sample) nearest = std::min(nearest, chordal_distance(img, other));
      if (nearest <= opts.return_radius) {
        returns = true;
      } else if (frontier) {
        ++report.escaping_images;
        const double d = field.empty() ? std::numeric_limits<double>::infinity() : distance_to_cloud(img, field.cloud());
        report.max_escape_distance = std::max(report.max_escape_distance, d);
      }
    }
    if (!returns) return;
    const Vector flat = g.lift().reshaped();
    for (const auto& seen : returning_lifts) {
      if (chordal_distance(Vector(seen.reshaped()), flat) <= tau_fix) return;
    }
    returning_lifts.push_back(g.lift());
    report.returning_words.push_back(g.word());
  });
  return report;
}

std::string GrayImage::to_pgm() const {
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(pixels.data()), pixels.size());
  return out;
}

double pixel_x(const SliceChart& chart, int i) {
  if (chart.width == 1) return 0.5 * (chart.x_min + chart.x_max);
  return chart.x_min + i * (chart.x_max - chart.x_min) / (chart.width - 1);
}

double pixel_y(const SliceChart& chart, int j) {
  if (chart.height == 1) return 0.5 * (chart.y_min + chart.y_max);
  return chart.y_max - j * (chart.y_max - chart.y_min) / (chart.height - 1);
}

std::uint8_t gray_value(double margin, const GrayMapping& mapping) {
  const double t = std::min(1.0, margin / mapping.m_ref);
  return static_cast<std::uint8_t>(std::lround(255.0 * std::pow(t, mapping.gamma)));
}

namespace {

Eigen::Index real_rank(std::initializer_list<const Vector*> vs) {
  const Eigen::Index rows = (*vs.begin())->size();
  Eigen::MatrixXd m(2 * rows, static_cast<Eigen::Index>(vs.size()));
  Eigen::Index c = 0;
  for (const Vector* v : vs) {
    m.col(c).head(rows) = v->real();
    m.col(c).tail(rows) = v->imag();
    ++c;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  Eigen::Index r = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) r += sv[k] > 1e-12 * sv[0] ? 1 : 0;
  return r;
}

Eigen::Index complex_rank(const Vector& a, const Vector& b) {
  Matrix m(a.size(), 2);
  m.col(0) = a;
  m.col(1) = b;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  return (sv[0] > 0.0 ? 1 : 0) + (sv[1] > 1e-12 * sv[0] ? 1 : 0);
}

void check_chart(const SliceChart& chart) {
  const Eigen::Index dim = chart.center.size();
  if (dim < 2 || chart.dir_u.size() != dim || chart.dir_v.size() != dim) {
    throw ArgumentError("render_slice: chart vectors must share a dimension >= 2");
  }
  if (chart.width < 1 || chart.height < 1) throw ArgumentError("render_slice: resolution must be at least 1x1");
  if (real_rank({&chart.center, &chart.dir_u, &chart.dir_v}) < 3 || complex_rank(chart.center, chart.dir_u) < 2 ||
      complex_rank(chart.center, chart.dir_v) < 2) {
    throw ArgumentError("render_slice: degenerate chart (directions dependent on the centre or each other)");
  }
}

}  // namespace

GrayImage render_slice(const SliceChart& chart, const MarginField& field, const GrayMapping& mapping, int workers) {
  check_chart(chart);
  if (field.empty()) throw ArgumentError("render_slice: empty cloud");
  if (!(mapping.m_ref > 0.0) || !(mapping.gamma > 0.0)) throw ArgumentError("render_slice: m_ref and gamma must be positive");

  GrayImage img;
  img.width = chart.width;
  img.height = chart.height;
  img.pixels.assign(static_cast<std::size_t>(chart.width) * static_cast<std::size_t>(chart.height), 0);

  auto render_rows = [&](int row_begin, int row_end) {
    for (int j = row_begin; j < row_end; ++j) {
      const double y = pixel_y(chart, j);
      for (int i = 0; i < chart.width; ++i) {
        const Vector z = chart.center + pixel_x(chart, i) * chart.dir_u + y * chart.dir_v;
        const double m = field.margin(Vector(z / z.norm()));
        img.pixels[static_cast<std::size_t>(j) * static_cast<std::size_t>(chart.width) + static_cast<std::size_t>(i)] =
            gray_value(m, mapping);
      }
    }
  };

  const int n_workers = std::clamp(workers, 1, chart.height);
  if (n_workers == 1) {
    render_rows(0, chart.height);
    return img;
  }
  std::vector<std::thread> pool;
  const int chunk = (chart.height + n_workers - 1) / n_workers;
  for (int w = 0; w < n_workers; ++w) {
    const int begin = w * chunk;
    const int end = std::min(chart.height, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(render_rows, begin, end);
  }
  for (auto& t : pool) t.join();
  return img;
}

}  // namespace cheq
