#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "cheq/cli/commands.hpp"

namespace {

void add_cloud_flags(CLI::App* sub, cheq::cli::CloudOptions& c) {
  sub->add_option("--depth", c.depth, "Maximal word length")->check(CLI::PositiveNumber);
  sub->add_option("--method", c.method, "Cloud method")->check(CLI::IsMember({"orbit", "fixed", "merged"}));
  sub->add_option("--base", c.base, "Interior base point, comma-separated re+imi entries");
  sub->add_option("--r-acc", c.r_acc, "Bergman displacement threshold for orbit points");
  sub->add_option("--grid", c.grid, "Chordal deduplication radius");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace cheq::cli;
  CLI::App app{"Limit sets and equicontinuity regions of subgroups of PU(1,n)"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  CommonOptions common;
  const unsigned hw = std::thread::hardware_concurrency();
  common.threads = hw == 0 ? 1 : static_cast<int>(hw);
  app.add_option("--threads", common.threads, "Worker cap")->check(CLI::PositiveNumber);
  app.add_flag("--timings", common.timings, "Include wall-clock timings in the report");

  auto spec_arg = [&](CLI::App* sub) {
    sub->add_option("spec", common.spec_path, "Group spec file (JSON)")->required();
  };

  VerifyOptions verify;
  auto* s_verify = app.add_subcommand("verify", "Validate and classify the generators");
  spec_arg(s_verify);
  s_verify->add_option("--max-order", verify.max_order, "Bound for the finite-order search");

  ClassifyOptions classify;
  auto* s_classify = app.add_subcommand("classify", "Classify a word element");
  spec_arg(s_classify);
  s_classify->add_option("--word", classify.word, "Word such as \"A B^-1 A^2\"")->required();

  LimitsetOptions limitset;
  limitset.cloud.method = "orbit";
  auto* s_limitset = app.add_subcommand("limitset", "Sample the limit set");
  spec_arg(s_limitset);
  add_cloud_flags(s_limitset, limitset.cloud);
  s_limitset->add_option("--out", limitset.out, "CSV output path");

  QplimitOptions qplimit;
  auto* s_qplimit = app.add_subcommand("qplimit", "Quasi-projective limits of the powers of a word");
  spec_arg(s_qplimit);
  s_qplimit->add_option("--word", qplimit.word, "Word")->required();
  s_qplimit->add_option("--powers", qplimit.powers, "Number of terms");
  s_qplimit->add_option("--tol", qplimit.tol, "Cauchy tolerance");
  s_qplimit->add_option("--window", qplimit.window, "Consecutive sub-tol increments required");
  s_qplimit->add_option("--schedule", qplimit.schedule, "linear: g^m; doubling: g^(2^k)")
      ->check(CLI::IsMember({"linear", "doubling"}));
  s_qplimit->add_flag("--retry-subsequence", qplimit.retry_subsequence, "Retry on a greedy subsequence");

  EqregionOptions eqregion;
  eqregion.cloud.method = "merged";
  auto* s_eqregion = app.add_subcommand("eqregion", "Render the incidence margin over a real slice");
  spec_arg(s_eqregion);
  add_cloud_flags(s_eqregion, eqregion.cloud);
  s_eqregion->add_option("--chart", eqregion.chart, "c;u;v chart vectors");
  s_eqregion->add_option("--window", eqregion.window, "x0,x1,y0,y1");
  s_eqregion->add_option("--res", eqregion.res, "WxH");
  s_eqregion->add_option("--m-ref", eqregion.m_ref, "Margin mapped to white");
  s_eqregion->add_option("--gamma", eqregion.gamma, "Gray-level exponent");
  s_eqregion->add_option("--out", eqregion.out, "PGM output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (int k = 1; k < argc; ++k) {
    std::string arg = argv[k];
    if (arg.empty() || arg.find_first_of(" \t") != std::string::npos) arg = "\"" + arg + "\"";
    common.command_line += (k > 1 ? " " : "") + arg;
  }
  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
  if (s_verify->parsed()) return cmd_verify(common, verify, out, err);
  if (s_classify->parsed()) return cmd_classify(common, classify, out, err);
  if (s_limitset->parsed()) return cmd_limitset(common, limitset, out, err);
  if (s_qplimit->parsed()) return cmd_qplimit(common, qplimit, out, err);
  return cmd_eqregion(common, eqregion, out, err);
}
