#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cheq/isometry.hpp"
#include "cheq/limitset.hpp"

namespace cheq::cli {

/// Malformed input text (spec file, word, vector syntax). Maps to exit 2.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, int line = 0, int column = 0)
      : std::runtime_error(what), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

/// A generator matrix outside U(1,n). Maps to exit 1.
class GeneratorRejected : public std::runtime_error {
public:
  GeneratorRejected(std::string name, const std::string& reason)
      : std::runtime_error("generator " + name + ": " + reason), name_(std::move(name)), reason_(reason) {}
  const std::string& name() const { return name_; }
  const std::string& reason() const { return reason_; }

private:
  std::string name_;
  std::string reason_;
};

/// Raw generator matrix as written in the file, before validation.
struct RawGenerator {
  std::string name;
  Matrix matrix;
};

struct RawSpec {
  int n = 0;
  Tolerances tolerances;
  std::vector<RawGenerator> generators;
};

/// JSON syntax:
///   {"n": 2,
///    "tolerances": {"tau_unitary": 1e-8, ...},      (optional)
///    "generators": [{"name": "A", "matrix": [[[re, im], ...], ...]}]}
RawSpec parse_raw_spec(std::string_view text);

/// Validates every generator; throws GeneratorRejected on the first failure.
GroupSpec validate_spec(const RawSpec& raw);

GroupSpec load_group_spec(const std::string& path);
RawSpec load_raw_spec(const std::string& path);

nlohmann::json spec_to_json(const std::vector<RawGenerator>& generators, int n);

/// Whitespace-separated tokens NAME or NAME^INT, e.g. "A B^-1 A^2".
Word parse_word(const GroupSpec& spec, std::string_view text);

/// "re+imi" forms: "1", "-0.5", "2i", "-i", "1e-3-2.5i".
Complex parse_complex(std::string_view text);

/// Comma-separated complex entries; `dim` entries required.
Vector parse_complex_vector(std::string_view text, Eigen::Index dim);

/// Header re0,im0,re1,im1,... then one canonical representative per row
/// with 17 significant digits.
std::string cloud_to_csv(const LimitSetCloud& cloud);

/// Reads back the rows of cloud_to_csv as projective points.
std::vector<ProjectivePoint> points_from_csv(std::string_view text, double tau_null = 1e-10);

nlohmann::json to_json(const Tolerances& t);
nlohmann::json to_json(const ProjectivePoint& p);
nlohmann::json to_json(const Matrix& m);

}  // namespace cheq::cli
