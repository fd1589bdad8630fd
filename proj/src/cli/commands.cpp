#include "cheq/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cheq/cli/spec_file.hpp"
#include "cheq/eqregion.hpp"
#include "cheq/errors.hpp"
#include "cheq/limitset.hpp"
#include "cheq/quasiproj.hpp"

namespace cheq::cli {

using nlohmann::json;

const char* version() { return CHEQ_VERSION; }

namespace {

using Clock = std::chrono::steady_clock;

class Timer {
public:
  void mark(const std::string& label) {
    const auto now = Clock::now();
    entries_[label] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }
  const json& entries() const { return entries_; }

private:
  Clock::time_point last_ = Clock::now();
  json entries_ = json::object();
};

json report_header(const std::string& command, const CommonOptions& common) {
  json r;
  r["version"] = version();
  r["command"] = command;
  r["command_line"] = common.command_line;
  r["spec"] = common.spec_path;
  return r;
}

void emit(std::ostream& out, json& report, const CommonOptions& common, const Timer& timer) {
  if (common.timings) report["timings"] = timer.entries();
  out << report.dump(2) << '\n';
}

/// Runs `body`, mapping library exceptions onto exit codes.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const GeneratorRejected& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

json class_to_json(const ElementClass& c) {
  json r;
  r["kind"] = to_string(c.kind);
  r["eigenvalue_moduli"] = c.eigenvalue_moduli;
  r["modulus_excess"] = c.modulus_excess;
  r["negativity"] = c.negativity;
  json fixed = json::array();
  for (const auto& p : c.boundary_fixed_points) fixed.push_back(to_json(p));
  r["boundary_fixed_points"] = fixed;
  if (c.kind == ElementKind::Loxodromic) {
    r["attracting"] = to_json(c.boundary_fixed_points.at(0));
    r["repelling"] = to_json(c.boundary_fixed_points.at(1));
  }
  if (c.interior_fixed_point) r["interior_fixed_point"] = to_json(*c.interior_fixed_point);
  return r;
}

ProjectivePoint parse_base(const GroupSpec& spec, const std::optional<std::string>& text) {
  Vector v = Vector::Zero(spec.dim());
  v[0] = 1.0;
  if (text) v = parse_complex_vector(*text, spec.dim());
  const ProjectivePoint p = project(v, spec.tolerances.null);
  if (p.signature_class() != SignatureClass::Interior) throw ParseError("--base must be an interior point");
  return p;
}

LimitSetCloud build_cloud(const GroupSpec& spec, const CloudOptions& opts) {
  if (opts.depth < 1) throw ParseError("--depth must be >= 1");
  if (!(opts.grid > 0.0)) throw ParseError("--grid must be positive");
  if (!(opts.r_acc > 0.0)) throw ParseError("--r-acc must be positive");
  if (opts.method == "orbit") {
    return orbit_accumulate(spec, parse_base(spec, opts.base), opts.depth, opts.r_acc, opts.grid);
  }
  if (opts.method == "fixed") return fixed_point_seed(spec, opts.depth, opts.grid);
  if (opts.method == "merged") {
    return merge_clouds(orbit_accumulate(spec, parse_base(spec, opts.base), opts.depth, opts.r_acc, opts.grid),
                        fixed_point_seed(spec, opts.depth, opts.grid));
  }
  throw ParseError("--method must be orbit, fixed or merged");
}

json cloud_summary(const LimitSetCloud& cloud) {
  json r;
  r["size"] = cloud.size();
  r["grid_eps"] = cloud.grid_eps;
  r["method"] = to_string(cloud.provenance.method);
  r["depth"] = cloud.provenance.depth;
  if (cloud.provenance.base) r["base"] = to_json(*cloud.provenance.base);
  r["diagnostics"] = cloud.diagnostics;
  r["elementary"] = is_elementary(cloud);
  return r;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ParseError("cannot write " + path);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw ParseError("write failed for " + path);
}

std::vector<double> split_reals(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, sep)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (cell.empty() || used != cell.size()) throw ParseError("bad number \"" + cell + "\" in \"" + text + "\"");
    out.push_back(v);
  }
  return out;
}

std::uint64_t fnv1a(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

json limit_to_json(const LimitReport& r) {
  json out;
  out["converged"] = r.converged;
  out["terms_used"] = r.terms_used;
  out["residual"] = r.residual;
  if (r.limit) {
    out["limit"] = to_json(r.limit->lift());
    out["proj_ker_dim"] = r.limit->proj_ker_dim();
    out["proj_im_dim"] = r.limit->proj_im_dim();
  }
  if (r.boundary_form) {
    out["image_point"] = to_json(r.boundary_form->image_point);
    out["kernel_tangency"] = to_json(r.boundary_form->kernel_tangency);
  }
  if (!r.converged) out["increments"] = r.increments;
  return out;
}

}  // namespace

int cmd_verify(const CommonOptions& common, const VerifyOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.max_order < 1) throw ParseError("--max-order must be >= 1");
    Timer timer;
    const RawSpec raw = load_raw_spec(common.spec_path);
    json report = report_header("verify", common);
    report["n"] = raw.n;
    report["tolerances"] = to_json(raw.tolerances);
    report["max_order"] = opts.max_order;
    json items = json::array();
    std::vector<std::string> rejected;
    for (const auto& gen : raw.generators) {
      json item;
      item["name"] = gen.name;
      try {
        const GroupElement g = make_element(gen.matrix, raw.tolerances.unitary);
        const SignatureFit fit = signature_residual(gen.matrix / sup_entry_norm(gen.matrix));
        item["valid"] = true;
        item["signature_residual"] = fit.residual;
        try {
          item["classification"] = class_to_json(classify(g, raw.tolerances));
        } catch (const IllConditioned& e) {
          item["classification"] = {{"kind", "undetermined"}, {"diagnostic", e.what()}};
        }
        const auto order = finite_order(g, opts.max_order, raw.tolerances.fix);
        item["finite_order"] = order ? json(*order) : json(nullptr);
      } catch (const ValidationError& e) {
        item["valid"] = false;
        item["reason"] = e.what();
        rejected.push_back(gen.name + ": " + e.what());
      }
      items.push_back(item);
    }
    report["generators"] = items;
    report["valid"] = rejected.empty();
    timer.mark("verify");
    emit(out, report, common, timer);
    for (const auto& r : rejected) err << "error: generator " << r << '\n';
    return rejected.empty() ? kExitOk : kExitValidation;
  });
}

int cmd_classify(const CommonOptions& common, const ClassifyOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Timer timer;
    const GroupSpec spec = load_group_spec(common.spec_path);
    const Word w = parse_word(spec, opts.word);
    const GroupElement g = evaluate_word(spec, w);
    json report = report_header("classify", common);
    report["tolerances"] = to_json(spec.tolerances);
    report["word"] = format_word(spec, g.word());
    try {
      report["classification"] = class_to_json(classify(g, spec.tolerances));
    } catch (const IllConditioned& e) {
      report["classification"] = {{"kind", "undetermined"}, {"diagnostic", e.what()}};
    }
    timer.mark("classify");
    emit(out, report, common, timer);
    return kExitOk;
  });
}

int cmd_limitset(const CommonOptions& common, const LimitsetOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Timer timer;
    const GroupSpec spec = load_group_spec(common.spec_path);
    const LimitSetCloud cloud = build_cloud(spec, opts.cloud);
    timer.mark("cloud");
    json report = report_header("limitset", common);
    report["tolerances"] = to_json(spec.tolerances);
    report["r_acc"] = opts.cloud.r_acc;
    report["cloud"] = cloud_summary(cloud);
    const std::string csv = cloud_to_csv(cloud);
    if (opts.out) {
      write_file(*opts.out, csv);
      report["out"] = *opts.out;
    } else {
      json pts = json::array();
      for (const auto& p : cloud.points) pts.push_back(to_json(p));
      report["points"] = pts;
    }
    emit(out, report, common, timer);
    return kExitOk;
  });
}

int cmd_qplimit(const CommonOptions& common, const QplimitOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.powers < 1) throw ParseError("--powers must be >= 1");
    if (!(opts.tol > 0.0)) throw ParseError("--tol must be positive");
    if (opts.window < 1) throw ParseError("--window must be >= 1");
    if (opts.schedule != "doubling" && opts.schedule != "linear") {
      throw ParseError("--schedule must be doubling or linear");
    }
    Timer timer;
    const GroupSpec spec = load_group_spec(common.spec_path);
    const GroupElement g = evaluate_word(spec, parse_word(spec, opts.word));
    LimitOptions lo;
    lo.tol = opts.tol;
    lo.max_terms = opts.powers;
    lo.window = opts.window;
    lo.tau_rank = spec.tolerances.rank;
    lo.tau_null = spec.tolerances.null;
    lo.retry_subsequence = opts.retry_subsequence;
    auto stream_of = [&](const GroupElement& h) {
      return opts.schedule == "linear" ? power_stream(h, opts.powers) : doubling_stream(h, opts.powers);
    };
    const LimitReport forward = qp_limit(stream_of(g), lo);
    const LimitReport backward = qp_limit(stream_of(g.inverse()), lo);
    timer.mark("limits");

    json report = report_header("qplimit", common);
    report["tolerances"] = to_json(spec.tolerances);
    report["word"] = format_word(spec, g.word());
    report["schedule"] = opts.schedule;
    report["powers"] = opts.powers;
    report["tol"] = opts.tol;
    report["forward"] = limit_to_json(forward);
    report["backward"] = limit_to_json(backward);
    if (forward.boundary_form && backward.boundary_form) {
      const DualityResidual d = duality_check(forward, backward);
      report["duality"] = {{"backward_image_to_forward_kernel", d.backward_image_to_forward_kernel},
                           {"forward_image_to_backward_kernel", d.forward_image_to_backward_kernel}};
    } else if (forward.converged && backward.converged) {
      report["note"] = forward.limit->proj_ker_dim() < 0 ? "invertible limit (stationary sequence), no boundary form"
                                                          : "limit without boundary form";
    }
    emit(out, report, common, timer);
    if (!forward.converged || !backward.converged) {
      const LimitReport& bad = forward.converged ? backward : forward;
      err << "error: " << (forward.converged ? "backward" : "forward") << " sequence did not converge; residual "
          << bad.residual << "; trace:";
      for (double inc : bad.increments) err << ' ' << inc;
      err << '\n';
      return kExitDivergence;
    }
    return kExitOk;
  });
}

int cmd_eqregion(const CommonOptions& common, const EqregionOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!(opts.m_ref > 0.0)) throw ParseError("--m-ref must be positive");
    if (!(opts.gamma > 0.0)) throw ParseError("--gamma must be positive");
    Timer timer;
    const GroupSpec spec = load_group_spec(common.spec_path);

    SliceChart chart;
    const Eigen::Index dim = spec.dim();
    if (opts.chart) {
      std::vector<std::string> parts;
      std::stringstream ss(*opts.chart);
      std::string part;
      while (std::getline(ss, part, ';')) parts.push_back(part);
      if (parts.size() != 3) throw ParseError("--chart needs three vectors c;u;v");
      chart.center = parse_complex_vector(parts[0], dim);
      chart.dir_u = parse_complex_vector(parts[1], dim);
      chart.dir_v = parse_complex_vector(parts[2], dim);
    } else {
      if (dim < 3) throw ParseError("--chart is required when n < 2");
      chart.center = Vector::Unit(dim, 0);
      chart.dir_u = Vector::Unit(dim, 1);
      chart.dir_v = Vector::Unit(dim, 2);
    }
    const std::vector<double> win = split_reals(opts.window, ',');
    if (win.size() != 4) throw ParseError("--window needs x0,x1,y0,y1");
    chart.x_min = win[0];
    chart.x_max = win[1];
    chart.y_min = win[2];
    chart.y_max = win[3];
    {
      const auto x = opts.res.find('x');
      if (x == std::string::npos) throw ParseError("--res needs WxH");
      const std::vector<double> w = split_reals(opts.res.substr(0, x), ',');
      const std::vector<double> h = split_reals(opts.res.substr(x + 1), ',');
      if (w.size() != 1 || h.size() != 1 || w[0] < 1 || h[0] < 1 || w[0] != std::floor(w[0]) ||
          h[0] != std::floor(h[0]) || w[0] > 20000 || h[0] > 20000) {
        throw ParseError("--res needs positive integers WxH");
      }
      chart.width = static_cast<int>(w[0]);
      chart.height = static_cast<int>(h[0]);
    }

    const LimitSetCloud cloud = build_cloud(spec, opts.cloud);
    timer.mark("cloud");
    json report = report_header("eqregion", common);
    report["tolerances"] = to_json(spec.tolerances);
    report["cloud"] = cloud_summary(cloud);
    if (cloud.empty()) {
      emit(out, report, common, timer);
      err << "error: Eq(G) = whole space (finite group?)\n";
      return kExitEmptyCloud;
    }
    const MarginField field(cloud);
    const GrayImage image = render_slice(chart, field, {opts.m_ref, opts.gamma}, std::max(1, common.threads));
    timer.mark("render");
    report["image"] = {{"width", image.width}, {"height", image.height}, {"m_ref", opts.m_ref},
                       {"gamma", opts.gamma}, {"window", win}};
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(image.pixels)));
    report["image"]["fnv1a64"] = hash;
    if (opts.out) {
      write_file(*opts.out, image.to_pgm());
      report["out"] = *opts.out;
    }
    emit(out, report, common, timer);
    return kExitOk;
  });
}

}  // namespace cheq::cli
