// Batch front end: configure the objective, tube, and budgets, then run
// evaluations, the tube gap scan, or individual probes. CSV/JSON output
// only; all randomness flows from one 64-bit seed.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "busemann/config.hpp"
#include "busemann/core_linalg.hpp"
#include "busemann/envelope.hpp"
#include "busemann/experiments.hpp"
#include "busemann/objective.hpp"
#include "busemann/touching.hpp"

namespace {

using nlohmann::json;
using namespace busemann;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitSolverCap = 3;
constexpr int kExitIo = 4;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json mat_json(const Mat2& m) { return json::array({m.e11, m.e12, m.e21, m.e22}); }

json point_json(const MinorsPoint& p) {
  return json{{"hat", mat_json(p.hat)}, {"last", p.last}};
}

json affine_json(const AffineFunctional5& a) {
  return json{{"grad", point_json(a.grad)}, {"offset", a.offset}};
}

json combo_json(const ConvexCombination& c) {
  json entries = json::array();
  for (const auto& e : c.entries)
    entries.push_back(json{{"lambda", e.lambda}, {"xi", mat_json(e.xi)}});
  return entries;
}

const char* verdict_name(GapVerdict v) {
  switch (v) {
    case GapVerdict::gap_certified: return "gap_certified";
    case GapVerdict::gap_refuted_at_cap: return "gap_refuted_at_cap";
    case GapVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct CliOptions {
  std::string config_file;
  std::optional<double> y, epsilon, t_range, cap, grad_box, tol_cut;
  std::optional<int> restarts, max_cut_iters, t_count, eta_count;
  std::optional<long> audit_samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> kind, output;
};

void add_common(CLI::App* app, CliOptions& o, bool with_kind = true) {
  app->add_option("--config", o.config_file, "JSON config file");
  if (with_kind)
    app->add_option("--kind", o.kind, "objective kind: counterexample | norm_of_minors");
  app->add_option("--y", o.y, "tube height y (> 0)");
  app->add_option("--epsilon", o.epsilon, "tube radius (0 < epsilon < y)");
  app->add_option("--t-range", o.t_range, "axis coefficient bound for grids");
  app->add_option("--cap", o.cap, "primal search radius cap");
  app->add_option("--grad-box", o.grad_box, "dual gradient box bound");
  app->add_option("--restarts", o.restarts, "primal multistart count");
  app->add_option("--tol-cut", o.tol_cut, "cutting-plane violation tolerance");
  app->add_option("--max-cut-iters", o.max_cut_iters, "cutting-plane iteration cap");
  app->add_option("--audit-samples", o.audit_samples, "dual certificate audit sample count");
  app->add_option("--t-count", o.t_count, "scan grid: t values");
  app->add_option("--eta-count", o.eta_count, "scan grid: eta samples per t");
  app->add_option("--seed", o.seed, "64-bit master seed");
  app->add_option("--output", o.output, "output path");
}

RunConfig resolve_config(const CliOptions& o) {
  json j = json::object();
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    if (!in) throw std::runtime_error("cannot read config file: " + o.config_file);
    in >> j;
  }
  if (o.kind) j["kind"] = *o.kind;
  if (o.y) j["y"] = *o.y;
  if (o.epsilon) j["epsilon"] = *o.epsilon;
  if (o.t_range) j["t_range"] = *o.t_range;
  if (o.cap) j["cap"] = *o.cap;
  if (o.grad_box) j["grad_box"] = *o.grad_box;
  if (o.restarts) j["restarts"] = *o.restarts;
  if (o.tol_cut) j["tol_cut"] = *o.tol_cut;
  if (o.max_cut_iters) j["max_cut_iters"] = *o.max_cut_iters;
  if (o.audit_samples) j["audit_samples"] = *o.audit_samples;
  if (o.t_count) j["t_count"] = *o.t_count;
  if (o.eta_count) j["eta_count"] = *o.eta_count;
  if (o.seed) j["seed"] = *o.seed;
  if (o.output) j["output_path"] = *o.output;
  RunConfig cfg = RunConfig::from_json(j);
  cfg.validate();
  return cfg;
}

json probe_json(const ProbeReport& rep) {
  const char* kind = "min_W";
  switch (rep.kind) {
    case ProbeKind::dist_tube_to_S: kind = "dist_tube_to_S"; break;
    case ProbeKind::min_W: kind = "min_W"; break;
    case ProbeKind::segment_affinity: kind = "segment_affinity"; break;
    case ProbeKind::direction_constancy: kind = "direction_constancy"; break;
  }
  return json{{"kind", kind},
              {"value", rep.value},
              {"witness", mat_json(rep.witness)},
              {"witness_from", point_json(rep.witness_from)},
              {"witness_to", point_json(rep.witness_to)},
              {"budget_used", rep.budget_used}};
}

int cmd_eval(const CliOptions& o, const std::string& what, const std::vector<double>& pt) {
  const RunConfig cfg = resolve_config(o);
  std::vector<double> p = pt;
  p.resize(9, 0.0);  // padding ignored
  const Mat2 hat{p[0], p[1], p[2], p[3]};
  const MinorsPoint x{hat, p[4]};

  json out;
  out["config"] = cfg.to_json();
  out["point"] = point_json(x);
  int rc = kExitOk;
  if (what == "w") {
    out["w"] = eval_w(cfg.objective, hat);
  } else if (what == "phitau") {
    out["phi_tau"] = phi_tau_closed(x, cfg.tube.y);
  } else if (what == "phiw") {
    const EnvelopeBracket br = envelope_bracket(cfg.objective, x, cfg.envelope);
    out["phi_w_lower"] = br.lower;
    out["phi_w_upper"] = br.upper;
    out["cap"] = br.param_cap;
    out["grad_box"] = br.box_bound;
    out["lower_certificate"] = affine_json(br.lower_result.certificate);
    out["lower_cut_count"] = br.lower_result.cuts.cuts.size();
    out["lower_iteration_cap_reached"] = br.lower_result.iteration_cap_reached;
    out["upper_certificate"] = combo_json(br.upper_result.certificate);
    out["upper_feasibility_residual"] = br.upper_result.residual;
    out["upper_feasible"] = br.upper_result.feasible;
    if (br.lower_result.iteration_cap_reached || !br.upper_result.feasible) rc = kExitSolverCap;
  } else {
    std::cerr << "eval: unknown --what '" << what << "'\n";
    return kExitUsage;
  }
  std::cout << out.dump(2) << "\n";
  return rc;
}

int cmd_scan_tube(const CliOptions& o) {
  const RunConfig cfg = resolve_config(o);
  const std::vector<GapRecord> records = gap_scan(cfg.tube, cfg.grid, cfg.envelope);

  std::ostringstream csv;
  csv << "t,eta11,eta12,eta21,eta22,xprime,phi_tau,phi_w_lower,phi_w_upper,cap,verdict\n";
  for (const GapRecord& r : records) {
    csv << fmt17(r.t) << ',' << fmt17(r.eta.e11) << ',' << fmt17(r.eta.e12) << ','
        << fmt17(r.eta.e21) << ',' << fmt17(r.eta.e22) << ',' << fmt17(r.x.last) << ','
        << fmt17(r.phi_tau) << ',' << fmt17(r.phi_w_lower) << ',' << fmt17(r.phi_w_upper)
        << ',' << fmt17(r.cap) << ',' << verdict_name(r.verdict) << '\n';
  }
  std::ofstream out(cfg.output_path, std::ios::binary);
  if (!out) {
    std::cerr << "scan-tube: cannot write " << cfg.output_path << "\n";
    return kExitIo;
  }
  out << csv.str();
  out.close();
  if (!out) return kExitIo;

  long certified = 0, refuted = 0, inconclusive = 0;
  for (const GapRecord& r : records) {
    switch (r.verdict) {
      case GapVerdict::gap_certified: ++certified; break;
      case GapVerdict::gap_refuted_at_cap: ++refuted; break;
      case GapVerdict::inconclusive: ++inconclusive; break;
    }
  }
  const ProbeReport min_w = probe_min_W(ObjectiveSpec::counterexample(cfg.tube.y), cfg.budget,
                                        cfg.envelope.cap);
  const ProbeReport dist = probe_dist_tube_to_S(cfg.tube, cfg.budget);
  json summary{{"config", cfg.to_json()},
               {"rows", records.size()},
               {"min_W", min_w.value},
               {"dist_tube_to_S", dist.value},
               {"n_gap_certified", certified},
               {"n_gap_refuted_at_cap", refuted},
               {"n_inconclusive", inconclusive}};
  std::ofstream sout(cfg.output_path + ".summary.json", std::ios::binary);
  if (!sout) return kExitIo;
  sout << summary.dump(2) << "\n";
  return sout ? kExitOk : kExitIo;
}

int cmd_probe(const CliOptions& o, const std::string& kind, const std::vector<double>& pt,
              const std::vector<double>& src, const std::vector<double>& dir, double trange,
              int k) {
  const RunConfig cfg = resolve_config(o);
  ProbeReport rep;
  if (kind == "min-w") {
    rep = probe_min_W(ObjectiveSpec::counterexample(cfg.tube.y), cfg.budget,
                      cfg.envelope.cap);
  } else if (kind == "dist") {
    rep = probe_dist_tube_to_S(cfg.tube, cfg.budget);
  } else if (kind == "segment") {
    std::vector<double> p = pt;
    p.resize(5, 0.0);
    std::vector<double> s = src;
    s.resize(4, 0.0);
    rep = segment_affinity_probe(cfg.objective, {{p[0], p[1], p[2], p[3]}, p[4]},
                                 {s[0], s[1], s[2], s[3]}, k, cfg.envelope);
  } else if (kind == "direction") {
    std::vector<double> p = pt;
    p.resize(5, 0.0);
    std::vector<double> e = dir;
    e.resize(5, 0.0);
    rep = direction_constancy_probe(cfg.objective, {{p[0], p[1], p[2], p[3]}, p[4]},
                                    {{e[0], e[1], e[2], e[3]}, e[4]}, trange, k, cfg.envelope);
  } else {
    std::cerr << "probe: unknown --kind '" << kind << "'\n";
    return kExitUsage;
  }

  json out{{"config", cfg.to_json()}, {"report", probe_json(rep)}};
  if (o.output && !o.output->empty() && *o.output != "-") {
    std::ofstream f(*o.output, std::ios::binary);
    if (!f) {
      std::cerr << "probe: cannot write " << *o.output << "\n";
      return kExitIo;
    }
    f << out.dump(2) << "\n";
    return f ? kExitOk : kExitIo;
  }
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int cmd_report(const std::string& input) {
  std::ifstream in(input);
  if (!in) {
    std::cerr << "report: cannot read " << input << "\n";
    return kExitIo;
  }
  std::string line;
  std::getline(in, line);  // header
  long certified = 0, refuted = 0, inconclusive = 0, rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    const auto pos = line.rfind(',');
    const std::string verdict = pos == std::string::npos ? "" : line.substr(pos + 1);
    if (verdict == "gap_certified") ++certified;
    else if (verdict == "gap_refuted_at_cap") ++refuted;
    else ++inconclusive;
  }
  json out{{"rows", rows},
           {"n_gap_certified", certified},
           {"n_gap_refuted_at_cap", refuted},
           {"n_inconclusive", inconclusive}};
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"busemann_lab: certified bounds on the Busemann representative of a "
               "polyconvex function on 2x2 matrices"};
  app.require_subcommand(1);

  CliOptions opts;
  std::string what = "w", probe_kind = "min-w", report_input;
  std::vector<double> point, source, direction;
  double trange = 1.0;
  int k = 5;

  CLI::App* eval = app.add_subcommand("eval", "evaluate W, phi_tau, or the phi_W bracket");
  add_common(eval, opts);
  eval->add_option("--what", what, "w | phitau | phiw")->required();
  eval->add_option("--point", point, "up to 9 reals: X_hat entries, X', padding ignored")
      ->expected(1, 9)
      ->required();

  CLI::App* scan = app.add_subcommand("scan-tube", "gap scan over the tube grid (CSV + JSON)");
  add_common(scan, opts);

  CLI::App* probe = app.add_subcommand("probe", "run a single probe, emit a JSON report");
  add_common(probe, opts, /*with_kind=*/false);  // --kind selects the probe here
  probe->add_option("--kind", probe_kind, "min-w | dist | segment | direction")->required();
  probe->add_option("--point", point, "probe point (5 reals)")->expected(1, 9);
  probe->add_option("--source", source, "segment source matrix (4 reals)")->expected(1, 4);
  probe->add_option("--dir", direction, "direction (5 reals, unit)")->expected(1, 5);
  probe->add_option("--trange", trange, "direction probe half-range");
  probe->add_option("--k", k, "number of sample points");

  CLI::App* report = app.add_subcommand("report", "summarize a scan CSV");
  report->add_option("--input", report_input, "scan CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (eval->parsed()) return cmd_eval(opts, what, point);
    if (scan->parsed()) return cmd_scan_tube(opts);
    if (probe->parsed())
      return cmd_probe(opts, probe_kind, point, source, direction, trange, k);
    if (report->parsed()) return cmd_report(report_input);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
