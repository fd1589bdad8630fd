#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace cheq {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Numerical thresholds shared by every module. The defaults are what the
/// CLI uses when a group-spec file leaves a field out.
struct Tolerances {
  double unitary = 1e-8;  ///< signature residual accepted by make_element
  double rank = 1e-9;     ///< relative singular-value cut for kernels/images
  double null = 1e-10;    ///< |<p,p>| below this counts as a boundary point
  double classify = 1e-6; ///< eigenvalue / self-product decision band
  double fix = 1e-8;      ///< chordal slack for fixed points and identities
};

/// Eigen-pair residuals are accepted up to this factor of sup_entry_norm.
inline constexpr double kEigenResidualTol = 1e-9;

/// The signature-(1,n) form  -u0 conj(v0) + sum_j uj conj(vj).
Complex herm_form(const Vector& u, const Vector& v);

/// Self-product <v,v> (always real).
double herm_norm2(const Vector& v);

/// J = diag(-1, 1, ..., 1) of the given size.
Matrix signature_matrix(Eigen::Index dim);

struct SignatureFit {
  double residual = 0.0;  ///< max-entry modulus of M* J M - scale J
  double scale = 0.0;     ///< minimizing real scale
};

/// Distance of M* J M from the ray {s J}. For Hermitian M* J M the optimum
/// is attained at a real scale, which is returned with the residual.
SignatureFit signature_residual(const Matrix& m);

/// max_ij |M_ij|; throws ArgumentError for the zero matrix.
double sup_entry_norm(const Matrix& m);

/// m scaled by a power of two so that sup_entry_norm lies in [0.5, 1).
/// The scaling is exact.
Matrix binary_normalized(const Matrix& m);

struct EigenPair {
  Complex value;
  Vector vector;  ///< unit Euclidean norm
};

/// All n+1 eigenpairs with multiplicity. Throws NumericalError if a pair
/// misses the residual bound kEigenResidualTol * sup_entry_norm(M).
std::vector<EigenPair> eigen(const Matrix& m);

struct SubspaceBasis {
  std::vector<Vector> vectors;  ///< orthonormal
  bool ill_conditioned = false; ///< some singular value fell near the cut
};

struct RankSplit {
  SubspaceBasis kernel;
  SubspaceBasis image;
  std::vector<double> singular_values;  ///< descending
  Eigen::Index rank = 0;
};

/// SVD-based kernel/image split: singular values <= tol * sigma_max count
/// as zero. kernel.size() + image.size() == dim always.
RankSplit rank_split(const Matrix& m, double tol = 1e-9);

SubspaceBasis kernel_basis(const Matrix& m, double tol = 1e-9);
SubspaceBasis image_basis(const Matrix& m, double tol = 1e-9);

/// Relative slack under which two moduli count as tied for the phase pivot.
inline constexpr double kPivotTie = 1e-12;

/// First coordinate whose modulus is within kPivotTie of the maximum.
Eigen::Index phase_pivot(const Vector& v);

/// Same rule over matrix entries, scanned row-major.
std::pair<Eigen::Index, Eigen::Index> phase_pivot(const Matrix& m);

/// Multiply by the unit scalar that makes the pivot entry real positive.
Vector canonical_phase(const Vector& v);
Matrix canonical_phase(const Matrix& m);

}  // namespace cheq
