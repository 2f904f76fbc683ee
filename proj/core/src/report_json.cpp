#include "stokpp/report_json.hpp"

#include <algorithm>

#include <json.hpp>

namespace stokpp {
namespace {

using nlohmann::ordered_json;

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json prediction(const TheoryPrediction& p) {
  ordered_json j;
  j["regime"] = to_string(p.regime);
  j["speed"] = opt(p.speed);
  j["decay"] = opt(p.decay);
  j["v_bar"] = opt(p.v_bar);
  j["threshold"] = p.threshold;
  j["degenerate"] = p.degenerate();
  return j;
}

ordered_json report(const FrontReport& r) {
  ordered_json j;
  j["speed"] = r.speed.value;
  j["speed_ci"] = r.speed.half_width;
  j["decay"] = r.decay.value;
  j["decay_ci"] = r.decay.half_width;
  j["theory_speed"] = opt(r.theory.speed);
  j["theory_decay"] = opt(r.theory.decay);
  j["t_lo"] = r.t_lo;
  j["t_hi"] = r.t_hi;
  return j;
}

}  // namespace

std::string prediction_json(const TheoryPrediction& p, const std::vector<std::string>& notes) {
  auto j = prediction(p);
  j["notes"] = notes;
  return j.dump(2);
}

std::string front_report_json(const FrontReport& r) { return report(r).dump(2); }

std::string summary_json(const ExperimentConfig& config, const EnsembleSummary& s) {
  ordered_json j;
  j["regime"] = to_string(s.regime);
  j["marker_kind"] = s.kind == MarkerKind::pathwise ? "pathwise" : "expectation";
  if (s.kind == MarkerKind::expectation) j["marker_estimator"] = "isotonic regression of the ensemble mean";
  j["paths"] = config.paths;
  j["survivors"] = s.survivors.size();
  j["failed_streams"] = s.failed_streams;
  j["theory"] = s.reports.empty() ? ordered_json(nullptr) : prediction(s.reports.front().theory);

  ordered_json levels = ordered_json::array();
  for (std::size_t l = 0; l < s.reports.size(); ++l) {
    auto r = report(s.reports[l]);
    r["level"] = config.levels[l];
    levels.push_back(r);
  }
  j["levels"] = levels;

  if (s.a_star) {
    j["a_star"] = {{"value", s.a_star->value}, {"std_error", s.a_star->std_error}};
  } else {
    j["a_star"] = nullptr;
  }
  ordered_json w = ordered_json::array();
  for (const auto& row : s.w_cov) {
    w.push_back({{"lag", row.lag},
                 {"covariance", row.covariance.value},
                 {"covariance_se", row.covariance.std_error},
                 {"second_moment", row.second_moment.value},
                 {"second_moment_se", row.second_moment.std_error},
                 {"mean_w", row.mean_w}});
  }
  j["w_covariance"] = w;

  if (!s.final_max.empty()) {
    auto sorted = s.final_max;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    j["final_sup_u_median"] = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  }
  j["regularized_markers"] = s.regularized_markers;
  j["skipped_markers"] = s.skipped_markers;
  j["dropped_decay"] = s.dropped_decay;
  j["dropped_w"] = s.dropped_w;
  return j.dump(2);
}

std::string manifest_json(const RunManifest& m) {
  ordered_json j;
  j["command"] = m.command;
  j["tool_version"] = m.version;
  j["seed"] = m.seed;
  j["config_source"] = m.config_source;
  j["config_hash"] = m.config_hash;
  j["config"] = m.config;
  j["started"] = m.started;
  j["finished"] = m.finished.empty() ? ordered_json(nullptr) : ordered_json(m.finished);
  j["status"] = m.status;
  j["outputs"] = m.outputs;
  return j.dump(2);
}

}  // namespace stokpp
