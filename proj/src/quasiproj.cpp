#include "cheq/quasiproj.hpp"

#include <cmath>
#include <sstream>

#include "cheq/errors.hpp"

namespace cheq {

double QuasiProjectiveMap::kernel_residual(const Vector& unit) const {
  Vector along = Vector::Zero(unit.size());
  for (const auto& k : kernel_) along += k * k.dot(unit);
  return (unit - along).norm();
}

QuasiProjectiveMap qp_from_matrix(const Matrix& m, double tau_rank) {
  if (m.rows() != m.cols() || m.rows() < 2) throw ArgumentError("qp_from_matrix: matrix must be square");
  QuasiProjectiveMap q;
  q.lift_ = canonical_phase(Matrix(m / sup_entry_norm(m)));
  RankSplit split = rank_split(q.lift_, tau_rank);
  q.kernel_ = std::move(split.kernel.vectors);
  q.image_ = std::move(split.image.vectors);
  q.ill_conditioned_ = split.kernel.ill_conditioned;
  q.rank_tol_ = tau_rank;
  return q;
}

ProjectivePoint qp_apply(const QuasiProjectiveMap& q, const ProjectivePoint& p, double tau_null) {
  if (p.dim() != q.dim()) throw ArgumentError("qp_apply: dimension mismatch");
  if (q.kernel_residual(p.rep()) <= q.rank_tol()) {
    std::ostringstream os;
    os << "qp_apply: undefined at kernel point [";
    for (Eigen::Index k = 0; k < p.dim(); ++k) os << (k ? " : " : "") << p.rep()[k];
    os << "]";
    throw ArgumentError(os.str());
  }
  return project(q.lift() * p.rep(), tau_null);
}

namespace {

using WideComplex = std::complex<long double>;
using WideMatrix = Eigen::Matrix<WideComplex, Eigen::Dynamic, Eigen::Dynamic>;

// Power-of-two rescaling keeps the carrier exact up to the rounding of the
// products themselves.
void rescale(WideMatrix& m) {
  long double sup = 0.0L;
  for (Eigen::Index k = 0; k < m.size(); ++k) sup = std::max(sup, std::abs(m(k)));
  if (!(sup > 0.0L)) throw NumericalError("power stream collapsed to the zero matrix");
  int exponent = 0;
  std::frexp(sup, &exponent);
  m *= std::ldexp(1.0L, -exponent);
}

}  // namespace

// Powers are formed from the carrier in extended precision: squaring a
// unipotent matrix cancels its leading terms, and a rounded lift would not be
// unipotent at all.
LiftStream power_stream(const GroupElement& g, int count) {
  return [base = WideMatrix(g.carrier().cast<WideComplex>()), count, k = 0,
          power = WideMatrix()]() mutable -> std::optional<Matrix> {
    if (k >= count) return std::nullopt;
    if (k == 0) {
      power = base;
    } else {
      power = power * base;
      rescale(power);
    }
    ++k;
    return Matrix(power.cast<Complex>());
  };
}

LiftStream doubling_stream(const GroupElement& g, int count) {
  return [count, k = 0, power = WideMatrix(g.carrier().cast<WideComplex>())]() mutable -> std::optional<Matrix> {
    if (k >= count) return std::nullopt;
    if (k > 0) {
      power = power * power;
      rescale(power);
    }
    ++k;
    return Matrix(power.cast<Complex>());
  };
}

LiftStream element_stream(std::vector<GroupElement> elements) {
  return [elements = std::move(elements), k = std::size_t{0}]() mutable -> std::optional<Matrix> {
    if (k >= elements.size()) return std::nullopt;
    return elements[k++].lift();
  };
}

std::optional<BoundaryForm> boundary_form(const QuasiProjectiveMap& q, double shape_tol, double tau_null) {
  if (q.image().size() != 1) return std::nullopt;
  const Vector& u = q.image().front();
  Vector row = q.lift().adjoint() * u;  // lift = s u r*, so lift* u = s r
  row.normalize();
  Vector tangency = row;
  tangency[0] = -tangency[0];  // J r

  const double image_res = std::abs(herm_norm2(u));
  const double kernel_res = std::abs(herm_norm2(tangency));
  if (image_res > shape_tol || kernel_res > shape_tol) return std::nullopt;
  return BoundaryForm{project(null_cone_projection(u), tau_null), project(null_cone_projection(tangency), tau_null),
                      image_res, kernel_res};
}

namespace {

constexpr double kShapeTol = 1e-6;

double increment(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

void finish(LimitReport& report, const Matrix& last, const LimitOptions& opts) {
  report.converged = true;
  report.limit = qp_from_matrix(last, opts.tau_rank);
  report.boundary_form = boundary_form(*report.limit, kShapeTol, opts.tau_null);
}

}  // namespace

LimitReport qp_limit(const LiftStream& stream, const LimitOptions& opts) {
  if (!(opts.tol > 0.0)) throw ArgumentError("qp_limit: tol must be positive");
  if (opts.window < 1) throw ArgumentError("qp_limit: window must be >= 1");
  LimitReport report;
  std::vector<Matrix> seen;
  int streak = 0;
  while (report.terms_used < opts.max_terms) {
    std::optional<Matrix> term = stream();
    if (!term) break;
    ++report.terms_used;
    Matrix normalized = canonical_phase(Matrix(*term / sup_entry_norm(*term)));
    if (seen.empty()) {
      streak = 1;
    } else {
      report.residual = increment(normalized, seen.back());
      report.increments.push_back(report.residual);
      streak = report.residual < opts.tol ? streak + 1 : 1;
    }
    seen.push_back(std::move(normalized));
    if (streak >= opts.window && seen.size() >= static_cast<std::size_t>(opts.window)) {
      finish(report, seen.back(), opts);
      return report;
    }
  }

  if (opts.retry_subsequence) {
    for (std::size_t start = 0; start < seen.size(); ++start) {
      std::vector<std::size_t> kept{start};
      for (std::size_t k = start + 1; k < seen.size(); ++k) {
        if (increment(seen[k], seen[kept.back()]) < opts.tol) kept.push_back(k);
        if (kept.size() >= static_cast<std::size_t>(opts.window)) {
          report.residual = increment(seen[kept.back()], seen[kept[kept.size() - 2]]);
          finish(report, seen[kept.back()], opts);
          return report;
        }
      }
    }
  }
  return report;
}

DualityResidual duality_check(const LimitReport& forward, const LimitReport& backward) {
  if (!forward.boundary_form || !backward.boundary_form) {
    throw PreconditionError("duality_check: both limits need a boundary form");
  }
  DualityResidual r;
  r.backward_image_to_forward_kernel =
      chordal_distance(backward.boundary_form->image_point, forward.boundary_form->kernel_tangency);
  r.forward_image_to_backward_kernel =
      chordal_distance(forward.boundary_form->image_point, backward.boundary_form->kernel_tangency);
  return r;
}

Hyperplane eq_of_sequence(const QuasiProjectiveMap& q, double tau_null) {
  const int n = static_cast<int>(q.dim()) - 1;
  if (q.proj_ker_dim() != n - 1) {
    throw PreconditionError("eq_of_sequence: kernel is not a hyperplane (projective dim " +
                            std::to_string(q.proj_ker_dim()) + ")");
  }
  Vector row = q.lift().adjoint() * q.image().front();
  row.normalize();
  Vector tangency = row;
  tangency[0] = -tangency[0];
  if (std::abs(herm_norm2(tangency)) <= kShapeTol) {
    return polar_hyperplane(project(null_cone_projection(tangency), tau_null), tau_null);
  }
  return Hyperplane::from_covector(row.conjugate());
}

}  // namespace cheq
