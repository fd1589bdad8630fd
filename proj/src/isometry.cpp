#include "cheq/isometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "cheq/errors.hpp"

namespace cheq {

namespace {

constexpr double kGuardFactor = 10.0;
// Eigenvalues closer than this are treated as one (possibly defective) cluster.
constexpr double kClusterTol = 1e-4;
// Eigenspace cut for clustered eigenvalues, relative to sup_entry_norm.
constexpr double kEigenspaceTol = 1e-7;
// |<v,v>| accepted for an eigenvector that is snapped onto the null cone.
constexpr double kNullSnapTol = 1e-6;

Word reduce_join(const Word& a, const Word& b) {
  Word out = a;
  for (int letter : b) {
    if (!out.empty() && out.back() == -letter) {
      out.pop_back();
    } else {
      out.push_back(letter);
    }
  }
  return out;
}

ProjectivePoint boundary_point(const Vector& v, double tau_null) {
  if (std::abs(herm_norm2(v)) > kNullSnapTol * v.squaredNorm()) {
    throw IllConditioned("ill-conditioned classification: fixed vector is not null (<v,v> = " +
                         std::to_string(herm_norm2(v)) + ")");
  }
  return project(null_cone_projection(v), tau_null);
}

}  // namespace

GroupElement GroupElement::identity(Eigen::Index dim) {
  return GroupElement(Matrix::Identity(dim, dim), Matrix::Identity(dim, dim), {});
}

GroupElement GroupElement::inverse() const {
  Matrix inv = lift_.adjoint();
  inv.row(0) *= -1.0;
  inv.col(0) *= -1.0;
  Word w(word_.rbegin(), word_.rend());
  for (int& letter : w) letter = -letter;
  Matrix carrier = carrier_.adjoint();
  carrier.row(0) *= -1.0;
  carrier.col(0) *= -1.0;
  return GroupElement(canonical_phase(inv), std::move(carrier), std::move(w));
}

GroupElement operator*(const GroupElement& a, const GroupElement& b) {
  if (a.dim() != b.dim()) throw ArgumentError("GroupElement product: dimension mismatch");
  return GroupElement(canonical_phase(Matrix(a.lift_ * b.lift_)), binary_normalized(a.carrier_ * b.carrier_),
                      reduce_join(a.word_, b.word_));
}

GroupElement GroupElement::with_word(Word w) const { return GroupElement(lift_, carrier_, std::move(w)); }

GroupElement make_element(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() < 2) {
    throw ArgumentError("make_element: matrix must be square with dim >= 2");
  }
  if (!m.allFinite()) throw ArgumentError("make_element: non-finite entry");
  const double sup = sup_entry_norm(m);
  const Matrix unit = m / sup;

  Eigen::JacobiSVD<Matrix> svd(unit);
  const auto& sv = svd.singularValues();
  if (!(sv[sv.size() - 1] > 1e-14 * sv[0])) throw ValidationError("not invertible");

  const SignatureFit fit = signature_residual(unit);
  if (!(fit.residual <= tol) || !(fit.scale > 0.0)) {
    std::ostringstream os;
    os << "not in U(1,n) up to scale (signature residual " << fit.residual << ")";
    throw ValidationError(os.str());
  }
  const double det_abs = std::abs(unit.partialPivLu().determinant());
  const double scale = sup * std::pow(det_abs, 1.0 / static_cast<double>(m.rows()));
  return GroupElement(canonical_phase(Matrix(m / scale)), binary_normalized(m), {});
}

ProjectivePoint act(const GroupElement& g, const ProjectivePoint& p, double tau_null) {
  if (g.dim() != p.dim()) throw ArgumentError("act: dimension mismatch");
  return project(g.lift() * p.rep(), tau_null);
}

std::string to_string(ElementKind k) {
  switch (k) {
    case ElementKind::Identity: return "Identity";
    case ElementKind::Elliptic: return "Elliptic";
    case ElementKind::Parabolic: return "Parabolic";
    case ElementKind::Loxodromic: return "Loxodromic";
  }
  return "Unknown";
}

ElementClass classify(const GroupElement& g, const Tolerances& tol) {
  const Matrix& m = g.lift();
  const Eigen::Index dim = m.rows();
  const double tau = tol.classify;
  ElementClass out;

  const Complex mean = m.trace() / static_cast<double>(dim);
  const Matrix scalar = mean * Matrix::Identity(dim, dim);
  if ((m - scalar).cwiseAbs().maxCoeff() <= tau && std::abs(std::abs(mean) - 1.0) <= tau) {
    out.kind = ElementKind::Identity;
    out.eigenvalue_moduli.assign(static_cast<std::size_t>(dim), 1.0);
    return out;
  }

  const std::vector<EigenPair> pairs = eigen(m);
  for (const auto& p : pairs) out.eigenvalue_moduli.push_back(std::abs(p.value));
  std::sort(out.eigenvalue_moduli.begin(), out.eigenvalue_moduli.end(), std::greater<>());

  std::size_t top = 0;
  std::size_t bottom = 0;
  for (std::size_t k = 1; k < pairs.size(); ++k) {
    if (std::abs(pairs[k].value) > std::abs(pairs[top].value)) top = k;
    if (std::abs(pairs[k].value) < std::abs(pairs[bottom].value)) bottom = k;
  }
  out.modulus_excess = std::abs(pairs[top].value) - 1.0;

  if (out.modulus_excess > kGuardFactor * tau) {
    out.kind = ElementKind::Loxodromic;
    out.boundary_fixed_points.push_back(boundary_point(pairs[top].vector, tol.null));
    out.boundary_fixed_points.push_back(boundary_point(pairs[bottom].vector, tol.null));
    out.attracting = 0;
    return out;
  }
  if (out.modulus_excess > tau) {
    throw IllConditioned("ill-conditioned classification: max |eigenvalue| - 1 = " +
                         std::to_string(out.modulus_excess));
  }

  // Candidate fixed vectors: every computed eigenvector, plus, for each
  // cluster of nearly equal eigenvalues with a multi-dimensional eigenspace,
  // the direction minimizing <w,w> inside that eigenspace.
  std::vector<Vector> candidates;
  for (const auto& p : pairs) candidates.push_back(p.vector);
  const double sup = sup_entry_norm(m);
  std::vector<bool> used(pairs.size(), false);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (used[i]) continue;
    std::vector<std::size_t> cluster{i};
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      if (!used[j] && std::abs(pairs[j].value - pairs[i].value) <= kClusterTol) cluster.push_back(j);
    }
    for (std::size_t j : cluster) used[j] = true;
    if (cluster.size() < 2) continue;

    Complex centre = 0.0;
    for (std::size_t j : cluster) centre += pairs[j].value;
    centre /= static_cast<double>(cluster.size());
    const Matrix shifted = m - centre * Matrix::Identity(dim, dim);
    Eigen::JacobiSVD<Matrix> svd(shifted, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    std::vector<Vector> basis;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
      if (sv[k] <= kEigenspaceTol * sup) basis.push_back(svd.matrixV().col(k));
    }
    if (basis.size() < 2) continue;
    const auto b = static_cast<Eigen::Index>(basis.size());
    Matrix gram(b, b);
    for (Eigen::Index r = 0; r < b; ++r) {
      for (Eigen::Index c = 0; c < b; ++c) gram(r, c) = herm_form(basis[c], basis[r]);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    Vector w = Vector::Zero(dim);
    for (Eigen::Index r = 0; r < b; ++r) w += es.eigenvectors()(r, 0) * basis[r];
    candidates.push_back(w.normalized());
  }

  std::size_t most_negative = 0;
  std::size_t most_null = 0;
  for (std::size_t k = 1; k < candidates.size(); ++k) {
    if (herm_norm2(candidates[k]) < herm_norm2(candidates[most_negative])) most_negative = k;
    if (std::abs(herm_norm2(candidates[k])) < std::abs(herm_norm2(candidates[most_null]))) most_null = k;
  }
  out.negativity = std::max(0.0, -herm_norm2(candidates[most_negative]));

  if (out.negativity > kGuardFactor * tau) {
    out.kind = ElementKind::Elliptic;
    out.interior_fixed_point = project(candidates[most_negative], tol.null);
    return out;
  }
  if (out.negativity > tau) {
    throw IllConditioned("ill-conditioned classification: eigenvector self-product " +
                         std::to_string(-out.negativity) + " sits at the elliptic threshold");
  }
  out.kind = ElementKind::Parabolic;
  out.boundary_fixed_points.push_back(boundary_point(candidates[most_null], tol.null));
  return out;
}

double bergman_distance(const Vector& x, const Vector& y) {
  const double xx = herm_norm2(x);
  const double yy = herm_norm2(y);
  if (!(xx < 0.0) || !(yy < 0.0)) throw ArgumentError("bergman_distance: points must be interior");
  // w = y minus its form-projection on x; <w,w> = <y,y> - |<y,x>|^2/<x,x>
  // is computed directly so nearby points keep their precision.
  const Vector w = y - (herm_form(y, x) / xx) * x;
  const double sinh2 = std::max(0.0, -herm_norm2(w) / yy);
  return 2.0 * std::asinh(std::sqrt(sinh2));
}

double bergman_distance(const ProjectivePoint& x, const ProjectivePoint& y) {
  if (x.signature_class() != SignatureClass::Interior || y.signature_class() != SignatureClass::Interior) {
    throw ArgumentError("bergman_distance: points must be interior");
  }
  return bergman_distance(x.rep(), y.rep());
}

double distance_to_identity(const Matrix& m) {
  const Eigen::Index dim = m.rows();
  const Matrix id = Matrix::Identity(dim, dim);
  return chordal_distance(Vector(m.reshaped()), Vector(id.reshaped()));
}

std::optional<int> finite_order(const GroupElement& g, int max_order, double tau_fix) {
  if (max_order < 1) throw ArgumentError("finite_order: max_order must be >= 1");
  Matrix power = g.lift();
  for (int k = 1; k <= max_order; ++k) {
    if (distance_to_identity(power) <= tau_fix) return k;
    power = g.lift() * power;
    power /= sup_entry_norm(power);
  }
  return std::nullopt;
}

void GroupSpec::check() const {
  std::set<std::string> names;
  for (const auto& gen : generators) {
    if (gen.element.dim() != dim()) {
      throw ArgumentError("generator " + gen.name + " has dimension " + std::to_string(gen.element.dim()) +
                          ", expected " + std::to_string(dim()));
    }
    if (!names.insert(gen.name).second) throw ArgumentError("duplicate generator name " + gen.name);
  }
}

GroupElement evaluate_word(const GroupSpec& spec, const Word& w) {
  GroupElement out = GroupElement::identity(spec.dim());
  for (int letter : w) {
    const auto idx = static_cast<std::size_t>(std::abs(letter)) - 1;
    if (letter == 0 || idx >= spec.generators.size()) throw ArgumentError("evaluate_word: bad letter");
    const GroupElement& gen = spec.generators[idx].element;
    out = out * (letter > 0 ? gen.with_word({letter}) : gen.inverse().with_word({letter}));
  }
  return out;
}

std::string format_word(const GroupSpec& spec, const Word& w) {
  if (w.empty()) return "e";
  std::string out;
  std::size_t i = 0;
  while (i < w.size()) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    const int exponent = static_cast<int>(j - i) * (w[i] > 0 ? 1 : -1);
    if (!out.empty()) out += ' ';
    out += spec.generators.at(static_cast<std::size_t>(std::abs(w[i])) - 1).name;
    if (exponent != 1) out += "^" + std::to_string(exponent);
    i = j;
  }
  return out;
}

void for_each_word(const GroupSpec& spec, int depth, const std::function<void(const GroupElement&)>& visit) {
  if (depth < 0) throw ArgumentError("words: depth must be >= 0");
  std::vector<GroupElement> letters;
  for (std::size_t i = 0; i < spec.generators.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    letters.push_back(spec.generators[i].element.with_word({id}));
    letters.push_back(spec.generators[i].element.inverse().with_word({-id}));
  }
  std::vector<GroupElement> level{GroupElement::identity(spec.dim())};
  visit(level.front());
  for (int len = 1; len <= depth; ++len) {
    std::vector<GroupElement> next;
    next.reserve(level.size() * letters.size());
    for (const auto& parent : level) {
      const int last = parent.word().empty() ? 0 : parent.word().back();
      for (const auto& letter : letters) {
        if (last != 0 && letter.word().front() == -last) continue;
        next.push_back(parent * letter);
        visit(next.back());
      }
    }
    level = std::move(next);
  }
}

std::vector<GroupElement> words(const GroupSpec& spec, int depth) {
  std::vector<GroupElement> out;
  out.reserve(reduced_word_count(spec.generators.size(), depth));
  for_each_word(spec, depth, [&](const GroupElement& g) { out.push_back(g); });
  return out;
}

std::size_t reduced_word_count(std::size_t generators, int depth) {
  if (generators == 0 || depth <= 0) return 1;
  std::size_t total = 1;
  std::size_t level = 2 * generators;
  for (int len = 1; len <= depth; ++len) {
    total += level;
    level *= 2 * generators - 1;
  }
  return total;
}

}  // namespace cheq
