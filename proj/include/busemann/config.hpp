// Run configuration: one flat JSON document, command-line flags override
// file values. All randomness flows from the single 64-bit seed.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "busemann/budget.hpp"
#include "busemann/envelope.hpp"
#include "busemann/experiments.hpp"
#include "busemann/objective.hpp"

namespace busemann {

struct RunConfig {
  ObjectiveSpec objective = ObjectiveSpec::counterexample(1.0);
  TubeSpec tube;
  SearchBudget budget = SearchBudget::defaults();
  EnvelopeConfig envelope;
  GapGrid grid;
  std::uint64_t seed = 20240817;
  std::string output_path = "scan.csv";

  void resolve_seeds() {
    budget.seed = seed;
    envelope.seed = seed ^ 0x517cc1b727220a95ULL;
    envelope.sep_budget.seed = seed ^ 0x2545f4914f6cdd1dULL;
    grid.seed = seed ^ 0x9e3779b97f4a7c15ULL;
  }

  void validate() const {
    tube.validate();
    budget.validate();
    if (!(envelope.cap > 0.0) || !(envelope.grad_box > 0.0))
      throw std::invalid_argument("RunConfig: cap and grad_box must be > 0");
    if (envelope.restarts < 0 || envelope.max_cut_iters < 1 || envelope.audit_samples < 1)
      throw std::invalid_argument("RunConfig: bad envelope budgets");
    if (grid.t_count < 1 || grid.eta_count < 1)
      throw std::invalid_argument("RunConfig: bad grid");
  }

  static RunConfig from_json(const nlohmann::json& j) {
    RunConfig c;
    const std::string kind = j.value("kind", "counterexample");
    const double y = j.value("y", 1.0);
    if (kind == "counterexample") {
      c.objective = ObjectiveSpec::counterexample(y);
    } else if (kind == "norm_of_minors") {
      c.objective = ObjectiveSpec::norm_of_minors();
    } else {
      throw std::invalid_argument("RunConfig: unknown objective kind '" + kind + "'");
    }
    c.tube.y = y;
    c.tube.epsilon = j.value("epsilon", 0.1);
    c.tube.t_range = j.value("t_range", 10.0);
    if (j.contains("subgradient_budget")) {
      const auto& b = j.at("subgradient_budget");
      c.budget.direction_samples = b.value("direction_samples", c.budget.direction_samples);
      c.budget.det_floor = b.value("det_floor", c.budget.det_floor);
      c.budget.refine_iters = b.value("refine_iters", c.budget.refine_iters);
    }
    c.envelope.cap = j.value("cap", c.envelope.cap);
    c.envelope.grad_box = j.value("grad_box", c.envelope.grad_box);
    c.envelope.restarts = j.value("restarts", c.envelope.restarts);
    c.envelope.tol_cut = j.value("tol_cut", c.envelope.tol_cut);
    c.envelope.max_cut_iters = j.value("max_cut_iters", c.envelope.max_cut_iters);
    c.envelope.audit_samples = j.value("audit_samples", c.envelope.audit_samples);
    c.grid.t_count = j.value("t_count", c.grid.t_count);
    c.grid.eta_count = j.value("eta_count", c.grid.eta_count);
    c.seed = j.value("seed", c.seed);
    c.output_path = j.value("output_path", c.output_path);
    c.resolve_seeds();
    return c;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["kind"] = objective.kind == ObjectiveKind::counterexample ? "counterexample"
                                                                : "norm_of_minors";
    j["y"] = objective.kind == ObjectiveKind::counterexample ? objective.y : tube.y;
    j["epsilon"] = tube.epsilon;
    j["t_range"] = tube.t_range;
    j["subgradient_budget"] = {{"direction_samples", budget.direction_samples},
                               {"det_floor", budget.det_floor},
                               {"refine_iters", budget.refine_iters}};
    j["cap"] = envelope.cap;
    j["grad_box"] = envelope.grad_box;
    j["restarts"] = envelope.restarts;
    j["tol_cut"] = envelope.tol_cut;
    j["max_cut_iters"] = envelope.max_cut_iters;
    j["audit_samples"] = envelope.audit_samples;
    j["t_count"] = grid.t_count;
    j["eta_count"] = grid.eta_count;
    j["seed"] = seed;
    j["output_path"] = output_path;
    return j;
  }
};

}  // namespace busemann
