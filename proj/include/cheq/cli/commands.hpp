#pragma once

#include <iosfwd>
#include <optional>
#include <string>

namespace cheq::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitUsage = 2,
  kExitDivergence = 3,
  kExitEmptyCloud = 4,
};

struct CommonOptions {
  std::string spec_path;
  int threads = 1;
  bool timings = false;
  /// Echoed verbatim in the report.
  std::string command_line;
};

struct VerifyOptions {
  int max_order = 1000;
};

struct ClassifyOptions {
  std::string word;
};

struct CloudOptions {
  int depth = 8;
  std::string method = "orbit";  ///< orbit | fixed | merged
  std::optional<std::string> base;
  double r_acc = 10.0;
  double grid = 1e-6;
};

struct LimitsetOptions {
  CloudOptions cloud;
  std::optional<std::string> out;
};

struct QplimitOptions {
  std::string word;
  int powers = 60;
  double tol = 1e-9;
  int window = 3;
  std::string schedule = "doubling";  ///< doubling | linear
  bool retry_subsequence = false;
};

struct EqregionOptions {
  CloudOptions cloud;
  std::optional<std::string> chart;   ///< "c;u;v"
  std::string window = "-2,2,-2,2";  ///< x0,x1,y0,y1
  std::string res = "401x401";
  double m_ref = 0.5;
  double gamma = 1.0;
  std::optional<std::string> out;
};

/// Each command writes its JSON report to `out` and diagnostics to `err`,
/// and returns one of the ExitCode values.
int cmd_verify(const CommonOptions& common, const VerifyOptions& opts, std::ostream& out, std::ostream& err);
int cmd_classify(const CommonOptions& common, const ClassifyOptions& opts, std::ostream& out, std::ostream& err);
int cmd_limitset(const CommonOptions& common, const LimitsetOptions& opts, std::ostream& out, std::ostream& err);
int cmd_qplimit(const CommonOptions& common, const QplimitOptions& opts, std::ostream& out, std::ostream& err);
int cmd_eqregion(const CommonOptions& common, const EqregionOptions& opts, std::ostream& out, std::ostream& err);

const char* version();

}  // namespace cheq::cli
