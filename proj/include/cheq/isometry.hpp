#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cheq/linalg.hpp"
#include "cheq/projective.hpp"

namespace cheq {

/// Signed generator indices, 1-based: +k is generator k, -k its inverse.
/// Products read left to right, so the rightmost letter acts first.
using Word = std::vector<int>;

/// An element of PU(1,n), stored as a lift in U(1,n) (signature scale 1)
/// with the phase fixed by the row-major pivot rule.
class GroupElement {
public:
  static GroupElement identity(Eigen::Index dim);

  const Matrix& lift() const { return lift_; }
  const Word& word() const { return word_; }
  Eigen::Index dim() const { return lift_.rows(); }
  /// Same projective element as the lift: the input matrix and the plain
  /// products of inputs, rescaled by powers of two only. Exact inputs stay
  /// exact, so high powers of a unipotent generator remain unipotent.
  const Matrix& carrier() const { return carrier_; }

  /// Exact inverse J M* J; the word is reversed and negated.
  GroupElement inverse() const;

  /// Product with free reduction of the words at the junction. No
  /// revalidation: U(1,n) is closed under products.
  friend GroupElement operator*(const GroupElement& a, const GroupElement& b);

  GroupElement with_word(Word w) const;

private:
  friend GroupElement make_element(const Matrix& m, double tol);
  GroupElement(Matrix lift, Matrix carrier, Word word)
      : lift_(std::move(lift)), carrier_(std::move(carrier)), word_(std::move(word)) {}

  Matrix lift_;
  Matrix carrier_;
  Word word_;
};

/// Validates M against U(1,n) up to scale and normalizes it. The residual
/// is measured on M / sup_entry_norm(M) so the test is scale-free. Throws
/// ValidationError ("not in U(1,n) up to scale", "not invertible").
GroupElement make_element(const Matrix& m, double tol = 1e-8);

/// Projective action: project(lift * rep).
ProjectivePoint act(const GroupElement& g, const ProjectivePoint& p, double tau_null = 1e-10);

enum class ElementKind { Identity, Elliptic, Parabolic, Loxodromic };

std::string to_string(ElementKind k);

struct ElementClass {
  ElementKind kind = ElementKind::Identity;
  /// One point for Parabolic; attracting then repelling for Loxodromic.
  std::vector<ProjectivePoint> boundary_fixed_points;
  std::optional<ProjectivePoint> interior_fixed_point;
  std::optional<std::size_t> attracting;
  std::vector<double> eigenvalue_moduli;  ///< descending
  /// max |lambda| - 1 and the most negative <w,w> over unit eigenvectors,
  /// the two quantities the decision is based on.
  double modulus_excess = 0.0;
  double negativity = 0.0;
};

/// Identity / Elliptic / Parabolic / Loxodromic from eigendata. Throws
/// IllConditioned when a deciding quantity falls in the guard band
/// (tau, 10 tau] of its threshold.
ElementClass classify(const GroupElement& g, const Tolerances& tol = {});

/// Bergman distance, normalized by cosh^2(d/2) = |<x,y>|^2 / (<x,x><y,y>).
/// Both points must be interior (ArgumentError otherwise).
double bergman_distance(const ProjectivePoint& x, const ProjectivePoint& y);

/// Same on raw lifts with negative self-product.
double bergman_distance(const Vector& x, const Vector& y);

/// Chordal distance between [M] and [I] viewed as points of P(C^{(n+1)^2}).
double distance_to_identity(const Matrix& m);

/// Smallest k <= max_order with g^k projectively trivial, if any.
std::optional<int> finite_order(const GroupElement& g, int max_order, double tau_fix = 1e-8);

struct NamedGenerator {
  std::string name;
  GroupElement element;
};

struct GroupSpec {
  int n = 0;
  std::vector<NamedGenerator> generators;
  Tolerances tolerances;

  Eigen::Index dim() const { return n + 1; }
  /// Throws ArgumentError on dimension mismatch or duplicate names.
  void check() const;
};

/// Element of a word over the spec's generators.
GroupElement evaluate_word(const GroupSpec& spec, const Word& w);

/// "e" for the empty word, otherwise "A B^-1 A^2" style.
std::string format_word(const GroupSpec& spec, const Word& w);

/// Reduced words of length <= depth in shortlex order over the letter
/// order g1, g1^-1, g2, g2^-1, ...; each level is built by appending a
/// letter on the right of the previous level.
void for_each_word(const GroupSpec& spec, int depth,
                   const std::function<void(const GroupElement&)>& visit);

std::vector<GroupElement> words(const GroupSpec& spec, int depth);

/// Number of reduced words of length <= depth over k generators.
std::size_t reduced_word_count(std::size_t generators, int depth);

}  // namespace cheq
