#include "cheq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cheq/errors.hpp"

namespace cheq {

Complex herm_form(const Vector& u, const Vector& v) {
  if (u.size() != v.size() || u.size() < 1) {
    throw ArgumentError("herm_form: dimension mismatch");
  }
  Complex acc = -u[0] * std::conj(v[0]);
  for (Eigen::Index j = 1; j < u.size(); ++j) acc += u[j] * std::conj(v[j]);
  return acc;
}

double herm_norm2(const Vector& v) {
  if (v.size() < 1) throw ArgumentError("herm_norm2: empty vector");
  return v.tail(v.size() - 1).squaredNorm() - std::norm(v[0]);
}

Matrix signature_matrix(Eigen::Index dim) {
  Matrix j = Matrix::Identity(dim, dim);
  j(0, 0) = -1.0;
  return j;
}

SignatureFit signature_residual(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 2) {
    throw ArgumentError("signature_residual: matrix must be square with dim >= 2");
  }
  const Matrix j = signature_matrix(m.rows());
  const Matrix h = m.adjoint() * j * m;
  double lo = INFINITY;
  double hi = -INFINITY;
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    const double a = j(k, k).real() * h(k, k).real();
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  SignatureFit fit;
  fit.scale = 0.5 * (lo + hi);
  fit.residual = (h - fit.scale * j).cwiseAbs().maxCoeff();
  return fit;
}

double sup_entry_norm(const Matrix& m) {
  if (m.size() == 0) throw ArgumentError("sup_entry_norm: empty matrix");
  const double s = m.cwiseAbs().maxCoeff();
  if (!(s > 0.0)) throw ArgumentError("sup_entry_norm: zero matrix");
  return s;
}

Matrix binary_normalized(const Matrix& m) {
  int exponent = 0;
  std::frexp(sup_entry_norm(m), &exponent);
  return m * std::ldexp(1.0, -exponent);
}

std::vector<EigenPair> eigen(const Matrix& m) {
  if (m.rows() != m.cols()) throw ArgumentError("eigen: matrix must be square");
  Eigen::ComplexEigenSolver<Matrix> solver(m, true);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigen: QR iteration did not converge");
  }
  const double bound = kEigenResidualTol * sup_entry_norm(m);
  std::vector<EigenPair> pairs;
  pairs.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index k = 0; k < m.rows(); ++k) {
    EigenPair p{solver.eigenvalues()[k], solver.eigenvectors().col(k)};
    p.vector.normalize();
    const double res = (m * p.vector - p.value * p.vector).norm();
    if (!(res <= bound)) {
      std::ostringstream os;
      os << "eigen: residual " << res << " exceeds " << bound << " for eigenvalue " << p.value;
      throw NumericalError(os.str());
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

RankSplit rank_split(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw ArgumentError("rank_split: matrix must be square");
  }
  if (!(tol > 0.0)) throw ArgumentError("rank_split: tolerance must be positive");
  sup_entry_norm(m);  // rejects the zero matrix

  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = tol * sv[0];
  RankSplit out;
  out.singular_values.assign(sv.data(), sv.data() + sv.size());
  bool near_cut = false;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv[k] > cut) ++out.rank;
    if (sv[k] > 0.1 * cut && sv[k] < 10.0 * cut) near_cut = true;
  }
  for (Eigen::Index k = 0; k < out.rank; ++k) out.image.vectors.push_back(svd.matrixU().col(k));
  for (Eigen::Index k = out.rank; k < m.cols(); ++k) out.kernel.vectors.push_back(svd.matrixV().col(k));
  out.kernel.ill_conditioned = near_cut;
  out.image.ill_conditioned = near_cut;
  return out;
}

SubspaceBasis kernel_basis(const Matrix& m, double tol) { return rank_split(m, tol).kernel; }

SubspaceBasis image_basis(const Matrix& m, double tol) { return rank_split(m, tol).image; }

Eigen::Index phase_pivot(const Vector& v) {
  const double top = v.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v[k]) >= top * (1.0 - kPivotTie)) return k;
  }
  return 0;
}

std::pair<Eigen::Index, Eigen::Index> phase_pivot(const Matrix& m) {
  const double top = m.cwiseAbs().maxCoeff();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (std::abs(m(r, c)) >= top * (1.0 - kPivotTie)) return {r, c};
    }
  }
  return {0, 0};
}

namespace {

// conj(z)/|z|, the rotation that takes z onto the positive real axis.
Complex unrotate(Complex z) {
  const double r = std::abs(z);
  if (!(r > 0.0)) throw ArgumentError("canonical_phase: zero pivot");
  return Complex(z.real() / r, -z.imag() / r);
}

}  // namespace

Vector canonical_phase(const Vector& v) {
  const Eigen::Index k = phase_pivot(v);
  const Complex rot = unrotate(v[k]);
  Vector out = v * rot;
  out[k] = Complex(std::abs(v[k]), 0.0);
  return out;
}

Matrix canonical_phase(const Matrix& m) {
  const auto [r, c] = phase_pivot(m);
  const Complex rot = unrotate(m(r, c));
  Matrix out = m * rot;
  out(r, c) = Complex(std::abs(m(r, c)), 0.0);
  return out;
}

}  // namespace cheq
