#pragma once

#include <string>
#include <vector>

#include "stokpp/config.hpp"
#include "stokpp/ensemble.hpp"
#include "stokpp/markers.hpp"
#include "stokpp/theory.hpp"

namespace stokpp {

/// {"regime", "speed", "decay", "v_bar", "threshold", "degenerate", "notes"}
/// with null for absent values.
std::string prediction_json(const TheoryPrediction& p, const std::vector<std::string>& notes = {});

/// {"speed", "speed_ci", "decay", "decay_ci", "theory_speed", "theory_decay",
///  "t_lo", "t_hi"}; *_ci are 95% half-widths.
std::string front_report_json(const FrontReport& r);

/// Summary of an ensemble run: per-level reports, a*, w covariance, survivors.
std::string summary_json(const ExperimentConfig& config, const EnsembleSummary& s);

std::string manifest_json(const RunManifest& m);

}  // namespace stokpp
