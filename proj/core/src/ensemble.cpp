#include "stokpp/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "stokpp/errors.hpp"
#include "stokpp/parallel.hpp"

namespace stokpp {
namespace {

constexpr double kSurvivorFraction = 0.8;

struct Schedule {
  std::size_t steps = 0;
  std::size_t every = 1;
  std::vector<std::size_t> snap_steps;  // step indices of the snapshots, 0 first
};

Schedule make_schedule(const ExperimentConfig& c) {
  Schedule s;
  s.steps = static_cast<std::size_t>(std::llround(c.T / c.params.dt));
  s.every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(c.stride / c.params.dt)));
  for (std::size_t k = 0; k <= s.steps; k += s.every) s.snap_steps.push_back(k);
  if (s.snap_steps.back() != s.steps) s.snap_steps.push_back(s.steps);
  return s;
}

bool in_window(const ExperimentConfig& c, double t) {
  return t >= c.speed_window.first * c.T - 1e-9 && t <= c.speed_window.second * c.T + 1e-9;
}

Interval across_paths(std::span<const double> values) {
  const auto e = mean_estimate(values);
  return {e.value, kZ95 * e.std_error};
}

// Per-level running sums for one path.
struct DecaySums {
  double sum = 0.0;
  std::size_t count = 0;
  bool failed = false;
};

// ----------------------------------------------------------------- pathwise

struct PathResult {
  std::vector<MarkerTrack> tracks;
  std::vector<DecaySums> decay;
  double final_max = 0.0;
  std::size_t regularized = 0;
  std::size_t skipped = 0;
  bool failed = false;
};

PathResult run_path(const ExperimentConfig& c, const Schedule& s, std::uint64_t stream) {
  KppParams p = c.params;
  p.noise = p.noise.with_stream(stream);
  PathResult r;
  r.tracks.resize(c.levels.size());
  r.decay.resize(c.levels.size());
  for (std::size_t l = 0; l < c.levels.size(); ++l) {
    r.tracks[l].level = c.levels[l];
    r.tracks[l].kind = MarkerKind::pathwise;
  }

  auto observe = [&](const Field& f) {
    const bool late = in_window(c, f.time);
    for (std::size_t l = 0; l < c.levels.size(); ++l) {
      try {
        const auto hit = a_marker(f, c.levels[l]);
        r.tracks[l].push(f.time, hit.position);
        if (hit.regularized) ++r.regularized;
        if (late && !r.decay[l].failed) {
          try {
            r.decay[l].sum += decay_estimate(f, hit.position, c.decay_offsets).value;
            ++r.decay[l].count;
          } catch (const DomainError&) {
            r.decay[l].failed = true;
          } catch (const InsufficientDomainError&) {
            r.decay[l].failed = true;
          }
        }
      } catch (const LevelNotAttainedError&) {
        ++r.skipped;
      }
    }
  };

  KppSolver solver(p, make_initial_condition(p.N, c.grid));
  SdePath v;
  if (c.route == Route::normalized) {
    v = simulate_v(p.epsilon, p.noise.interpretation, 1.0, p.dt, s.steps, p.noise);
  }
  observe(solver.field());
  std::size_t next = 1;
  for (std::size_t k = 0; k < s.steps; ++k) {
    if (c.route == Route::normalized) {
      solver.step_normalized(v.values[k]);
    } else {
      solver.step_spde();
    }
    if (next < s.snap_steps.size() && k + 1 == s.snap_steps[next]) {
      observe(solver.field());
      ++next;
    }
  }
  const auto& u = solver.field().values;
  r.final_max = *std::max_element(u.begin(), u.end());
  return r;
}

EnsembleSummary run_pathwise(const ExperimentConfig& c, const Schedule& s) {
  std::vector<PathResult> results(c.paths);
  parallel_for(c.paths, c.jobs, [&](std::size_t i) {
    try {
      results[i] = run_path(c, s, i);
    } catch (const InstabilityError&) {
      results[i].failed = true;
    } catch (const NumericError&) {
      results[i].failed = true;
    }
  });

  EnsembleSummary out;
  out.kind = MarkerKind::pathwise;
  out.regime = c.regime();
  for (std::size_t k : s.snap_steps) out.snapshot_times.push_back(static_cast<double>(k) * c.params.dt);
  out.tracks.resize(c.levels.size());
  for (std::size_t i = 0; i < c.paths; ++i) {
    auto& r = results[i];
    if (r.failed) {
      out.failed_streams.push_back(i);
      continue;
    }
    out.survivors.push_back(i);
    out.final_max.push_back(r.final_max);
    out.regularized_markers += r.regularized;
    out.skipped_markers += r.skipped;
    for (std::size_t l = 0; l < c.levels.size(); ++l) out.tracks[l].push_back(std::move(r.tracks[l]));
  }
  if (static_cast<double>(out.survivors.size()) < kSurvivorFraction * static_cast<double>(c.paths)) {
    std::string ids;
    for (auto id : out.failed_streams) ids += (ids.empty() ? "" : ",") + std::to_string(id);
    throw EstimationError("too few surviving paths; failed streams: " + ids);
  }

  const auto theory = predict(out.regime, c.params.kappa, c.params.epsilon, c.params.N);
  const double t_lo = c.speed_window.first * c.T;
  const double t_hi = c.speed_window.second * c.T;
  for (std::size_t l = 0; l < c.levels.size(); ++l) {
    std::vector<double> slopes;
    Interval single;
    for (const auto& tr : out.tracks[l]) {
      single = speed_estimate_between(tr, t_lo, t_hi);
      slopes.push_back(single.value);
    }
    std::vector<double> decays;
    for (std::size_t j = 0; j < out.survivors.size(); ++j) {
      const auto& d = results[out.survivors[j]].decay[l];
      if (!d.failed && d.count > 0) decays.push_back(d.sum / static_cast<double>(d.count));
    }
    if (l == 0) out.dropped_decay = out.survivors.size() - decays.size();

    FrontReport rep;
    rep.speed = slopes.size() == 1 ? single : across_paths(slopes);
    if (!decays.empty()) rep.decay = decays.size() == 1 ? Interval{decays[0], 0.0} : across_paths(decays);
    rep.t_lo = t_lo;
    rep.t_hi = t_hi;
    rep.theory = theory;
    out.reports.push_back(rep);
  }
  return out;
}

// -------------------------------------------------------------- expectation

struct PathStats {
  std::vector<DecaySums> decay;
  double plateau_sum = 0.0;
  std::size_t plateau_count = 0;
  bool w_failed = false;
};

// w = -(log u)_x by central differences at nodes [lo, lo + count); false if a
// needed value is nonpositive.
bool w_values(const Field& f, std::size_t lo, std::size_t count, std::vector<double>& out) {
  if (lo < 1 || lo + count + 1 > f.size()) return false;
  out.resize(count);
  const double inv2h = 1.0 / (2.0 * f.grid.dx);
  for (std::size_t i = 0; i < count; ++i) {
    const double a = f.values[lo + i - 1];
    const double b = f.values[lo + i + 1];
    if (!(a > 0.0) || !(b > 0.0)) return false;
    out[i] = -std::log(b / a) * inv2h;
  }
  return true;
}

// w profiles of every path over the tail window at one snapshot.
struct WSnapshot {
  std::size_t count = 0;  // window nodes; each row holds count + max lag values
  std::vector<std::vector<double>> rows;
};

// Cross-path covariance of w(x) and w(x + lag), averaged over the window
// nodes of every snapshot, with a leave-one-path-out jackknife error.
WCovRow w_covariance_row(const std::vector<WSnapshot>& snaps, std::span<const std::size_t> paths, std::size_t lag) {
  const std::size_t n = paths.size();
  const double nd = static_cast<double>(n);
  std::vector<double> X(n, 0.0), Y(n, 0.0), Z(n, 0.0), prod(n, 0.0), level(n, 0.0);
  double G = 0.0, H = 0.0, M = 0.0;
  for (const auto& sn : snaps) {
    for (std::size_t i = 0; i < sn.count; ++i) {
      double Sa = 0.0, Sb = 0.0, Sab = 0.0;
      for (std::size_t p : paths) {
        const double a = sn.rows[p][i], b = sn.rows[p][i + lag];
        Sa += a;
        Sb += b;
        Sab += a * b;
      }
      for (std::size_t q = 0; q < n; ++q) {
        const double a = sn.rows[paths[q]][i], b = sn.rows[paths[q]][i + lag];
        X[q] += a * b;
        Y[q] += a * Sb;
        Z[q] += b * Sa;
        level[q] += a;
      }
      G += Sa * Sb;
      H += Sab;
      M += 1.0;
    }
  }
  WCovRow row;
  for (std::size_t q = 0; q < n; ++q) {
    prod[q] = X[q] / M;
    level[q] /= M;
  }
  row.second_moment = mean_estimate(prod);
  row.mean_w = mean(level);
  if (n < 2) return row;
  row.covariance.value = (H - G / nd) / ((nd - 1.0) * M);
  if (n < 3) return row;
  std::vector<double> loo(n);
  for (std::size_t q = 0; q < n; ++q) {
    const double h = H - X[q];
    const double g = G - Y[q] - Z[q] + X[q];
    loo[q] = (h - g / (nd - 1.0)) / ((nd - 2.0) * M);
  }
  const double m = mean(loo);
  double ss = 0.0;
  for (double x : loo) ss += (x - m) * (x - m);
  row.covariance.std_error = std::sqrt((nd - 1.0) / nd * ss);
  return row;
}

EnsembleSummary run_expectation_once(const ExperimentConfig& c, const Schedule& s,
                                     const std::vector<std::uint64_t>& streams,
                                     std::vector<std::uint64_t>& newly_failed) {
  KppParams base = c.params;
  base.frame.enabled = false;
  const auto regime = c.regime();
  const auto theory = predict(regime, base.kappa, base.epsilon, base.N);
  base.drift_shift = c.frame_speed.value_or(theory.speed.value_or(0.0));

  const std::size_t P = streams.size();
  const Field initial = make_initial_condition(base.N, c.grid);
  std::vector<std::unique_ptr<KppSolver>> solvers(P);
  for (std::size_t j = 0; j < P; ++j) {
    KppParams p = base;
    p.noise = p.noise.with_stream(streams[j]);
    solvers[j] = std::make_unique<KppSolver>(p, initial);
  }

  const std::size_t L = c.levels.size();
  std::vector<std::size_t> lag_nodes;
  for (double lag : c.w_lags) lag_nodes.push_back(static_cast<std::size_t>(std::llround(lag / c.grid.dx)));
  std::vector<PathStats> stats(P);
  for (auto& st : stats) {
    st.decay.resize(L);
  }
  const std::size_t max_lag = lag_nodes.empty() ? 0 : *std::max_element(lag_nodes.begin(), lag_nodes.end());
  std::vector<WSnapshot> w_snaps;

  EnsembleSummary out;
  out.kind = MarkerKind::expectation;
  out.regime = regime;
  out.tracks.resize(L);
  for (std::size_t l = 0; l < L; ++l) {
    out.tracks[l].resize(1);
    out.tracks[l][0].level = c.levels[l];
    out.tracks[l][0].kind = MarkerKind::expectation;
  }
  bool plateau_resolved = false;

  std::vector<char> failed(P, 0);
  std::size_t done = 0;
  for (std::size_t k = 0; k < s.snap_steps.size(); ++k) {
    const std::size_t advance = s.snap_steps[k] - done;
    if (advance > 0) {
      parallel_for(P, c.jobs, [&](std::size_t j) {
        try {
          for (std::size_t q = 0; q < advance; ++q) solvers[j]->step_spde();
        } catch (const InstabilityError&) {
          failed[j] = 1;
        } catch (const NumericError&) {
          failed[j] = 1;
        }
      });
      done = s.snap_steps[k];
      for (std::size_t j = 0; j < P; ++j) {
        if (failed[j]) newly_failed.push_back(streams[j]);
      }
      if (!newly_failed.empty()) return out;
    }

    // Every solver shares the grid, so the ensemble mean is pointwise.
    const Field& ref = solvers[0]->field();
    std::vector<double> acc(ref.size(), 0.0);
    for (std::size_t j = 0; j < P; ++j) {
      const auto& u = solvers[j]->field().values;
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += u[i];
    }
    const double inv = 1.0 / static_cast<double>(P);
    for (auto& a : acc) a *= inv;
    Field mean(ref.grid, std::move(acc), ref.time);
    const double t = mean.time;
    out.snapshot_times.push_back(t);

    std::vector<std::optional<double>> markers(L);
    for (std::size_t l = 0; l < L; ++l) {
      try {
        markers[l] = expectation_marker(mean, c.levels[l]);
        out.tracks[l][0].push(t, *markers[l]);
      } catch (const LevelNotAttainedError&) {
        ++out.skipped_markers;
      }
    }

    if (in_window(c, t)) {
      WSnapshot* ws = nullptr;
      std::size_t w_lo = 0;
      if (!lag_nodes.empty() && markers[0]) {
        const double g = *markers[0];
        while (w_lo < mean.size() && mean.x(w_lo) < g + c.w_window.first) ++w_lo;
        std::size_t hi = w_lo;
        while (hi < mean.size() && mean.x(hi) <= g + c.w_window.second) ++hi;
        if (hi > w_lo && w_lo >= 1 && hi + max_lag + 1 <= mean.size()) {
          ws = &w_snaps.emplace_back();
          ws->count = hi - w_lo;
          ws->rows.resize(P);
        }
      }
      for (std::size_t j = 0; j < P; ++j) {
        const Field& f = solvers[j]->field();
        auto& st = stats[j];
        for (std::size_t l = 0; l < L; ++l) {
          if (!markers[l] || st.decay[l].failed) continue;
          try {
            st.decay[l].sum += decay_estimate(f, *markers[l], c.decay_offsets).value;
            ++st.decay[l].count;
          } catch (const DomainError&) {
            st.decay[l].failed = true;
          } catch (const InsufficientDomainError&) {
            st.decay[l].failed = true;
          }
        }
        if (!markers[0]) continue;
        const double g = *markers[0];

        std::size_t m = 0;
        while (m < f.size() && f.x(m) <= g - c.a_star_offset) ++m;
        if (m > 0) {
          plateau_resolved = true;
          st.plateau_sum += pairwise_sum(std::span<const double>(f.values.data(), m)) / static_cast<double>(m);
          ++st.plateau_count;
        }

        if (ws && !st.w_failed && !w_values(f, w_lo, ws->count + max_lag, ws->rows[j])) st.w_failed = true;
      }
    }
    out.mean_fields.push_back(std::move(mean));
  }

  for (std::size_t j = 0; j < P; ++j) {
    const auto& u = solvers[j]->field().values;
    out.final_max.push_back(*std::max_element(u.begin(), u.end()));
  }
  out.survivors = streams;

  const double t_lo = c.speed_window.first * c.T;
  const double t_hi = c.speed_window.second * c.T;
  for (std::size_t l = 0; l < L; ++l) {
    FrontReport rep;
    rep.speed = speed_estimate_between(out.tracks[l][0], t_lo, t_hi);
    std::vector<double> decays;
    for (const auto& st : stats) {
      if (!st.decay[l].failed && st.decay[l].count > 0) {
        decays.push_back(st.decay[l].sum / static_cast<double>(st.decay[l].count));
      }
    }
    if (l == 0) out.dropped_decay = P - decays.size();
    if (!decays.empty()) rep.decay = decays.size() == 1 ? Interval{decays[0], 0.0} : across_paths(decays);
    rep.t_lo = t_lo;
    rep.t_hi = t_hi;
    rep.theory = theory;
    out.reports.push_back(rep);
  }

  if (plateau_resolved) {
    std::vector<double> plateau;
    for (const auto& st : stats) {
      if (st.plateau_count > 0) plateau.push_back(st.plateau_sum / static_cast<double>(st.plateau_count));
    }
    out.a_star = mean_estimate(plateau);
  }

  if (!lag_nodes.empty()) {
    std::vector<std::size_t> usable;
    for (std::size_t j = 0; j < P; ++j) {
      if (stats[j].w_failed) {
        ++out.dropped_w;
      } else {
        usable.push_back(j);
      }
    }
    if (2 * out.dropped_w > P) {
      throw EstimationError("w covariance: more than half of the paths dropped (" + std::to_string(out.dropped_w) +
                            " of " + std::to_string(P) + ")");
    }
    if (w_snaps.empty()) throw InsufficientDomainError("w covariance: no snapshot with a resolved tail window");
    for (std::size_t lag : lag_nodes) {
      auto row = w_covariance_row(w_snaps, usable, lag);
      row.lag = static_cast<double>(lag) * c.grid.dx;
      out.w_cov.push_back(row);
    }
  }
  return out;
}

EnsembleSummary run_expectation(const ExperimentConfig& c, const Schedule& s) {
  std::vector<std::uint64_t> streams(c.paths);
  for (std::size_t i = 0; i < c.paths; ++i) streams[i] = i;
  std::vector<std::uint64_t> failed;
  // A path that fails invalidates the means accumulated so far; rerun the
  // survivors from scratch so every snapshot averages the same set.
  for (;;) {
    std::vector<std::uint64_t> newly;
    auto out = run_expectation_once(c, s, streams, newly);
    if (newly.empty()) {
      out.failed_streams = failed;
      return out;
    }
    failed.insert(failed.end(), newly.begin(), newly.end());
    std::sort(failed.begin(), failed.end());
    if (static_cast<double>(c.paths - failed.size()) < kSurvivorFraction * static_cast<double>(c.paths)) {
      std::string ids;
      for (auto id : failed) ids += (ids.empty() ? "" : ",") + std::to_string(id);
      throw EstimationError("too few surviving paths; failed streams: " + ids);
    }
    std::erase_if(streams, [&](std::uint64_t id) { return std::binary_search(failed.begin(), failed.end(), id); });
  }
}

}  // namespace

std::string to_string(Route route) { return route == Route::normalized ? "normalized" : "spde"; }

Route parse_route(const std::string& s) {
  if (s == "normalized") return Route::normalized;
  if (s == "spde") return Route::spde;
  throw ConfigError("unknown route '" + s + "' (normalized|spde)");
}

void ExperimentConfig::validate() const {
  params.validate();
  grid.validate();
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("T must be positive");
  if (paths < 1) throw ConfigError("paths must be >= 1");
  if (levels.empty()) throw ConfigError("at least one marker level is required");
  for (double a : levels) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("marker levels must lie in (0,1)");
  }
  if (!(stride > 0.0)) throw ConfigError("stride must be positive");
  if (!(speed_window.first >= 0.0 && speed_window.first < speed_window.second && speed_window.second <= 1.0)) {
    throw ConfigError("speed window: need 0 <= lo < hi <= 1");
  }
  if ((speed_window.second - speed_window.first) * T / stride < 9.0) {
    throw ConfigError("speed window holds fewer than 10 snapshots; reduce stride");
  }
  if (!(decay_offsets.first < decay_offsets.second)) throw ConfigError("decay offsets: need lo < hi");
  if (!(w_window.first < w_window.second)) throw ConfigError("w window: need lo < hi");
  for (double lag : w_lags) {
    if (!(lag >= 0.0)) throw ConfigError("w lags must be >= 0");
  }
  const bool constant = params.noise.kernel.kind == KernelKind::constant;
  if (route == Route::normalized && !constant) {
    throw ConfigError("the normalized route needs a constant kernel (scalar noise)");
  }
  if (!constant && params.noise.interpretation == Interpretation::stratonovich) {
    throw ConfigError("stratonovich interpretation is only supported for scalar noise");
  }
  if (effective_marker_kind() == MarkerKind::expectation && route != Route::spde) {
    throw ConfigError("expectation markers need the spde route");
  }
}

MarkerKind ExperimentConfig::effective_marker_kind() const {
  if (marker_kind) return *marker_kind;
  return params.noise.kernel.kind == KernelKind::constant ? MarkerKind::pathwise : MarkerKind::expectation;
}

Regime ExperimentConfig::regime() const {
  if (params.noise.kernel.kind != KernelKind::constant) return Regime::ito_correlated;
  return params.noise.interpretation == Interpretation::ito ? Regime::ito_scalar : Regime::stratonovich_scalar;
}

EnsembleSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto schedule = make_schedule(config);
  if (config.effective_marker_kind() == MarkerKind::expectation) return run_expectation(config, schedule);
  return run_pathwise(config, schedule);
}

Estimate estimate_a_star(const ExperimentConfig& config, double behind_offset) {
  ExperimentConfig c = config;
  c.marker_kind = MarkerKind::expectation;
  c.route = Route::spde;
  c.a_star_offset = behind_offset;
  c.w_lags.clear();
  const auto summary = run_experiment(c);
  if (!summary.a_star) throw InsufficientDomainError("a*: no plateau behind the marker inside the window");
  return *summary.a_star;
}

std::vector<WCovRow> estimate_w_covariance(const ExperimentConfig& config, const std::vector<double>& lags,
                                           std::pair<double, double> tail_window) {
  if (lags.empty()) throw MisuseError("estimate_w_covariance: no lags requested");
  ExperimentConfig c = config;
  c.marker_kind = MarkerKind::expectation;
  c.route = Route::spde;
  c.w_lags = lags;
  c.w_window = tail_window;
  return run_experiment(c).w_cov;
}

}  // namespace stokpp
