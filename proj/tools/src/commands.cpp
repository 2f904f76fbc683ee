#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "stokpp/acceptance.hpp"
#include "stokpp/config.hpp"
#include "stokpp/ensemble.hpp"
#include "stokpp/errors.hpp"
#include "stokpp/field_io.hpp"
#include "stokpp/logistic_sde.hpp"
#include "stokpp/noise.hpp"
#include "stokpp/report_json.hpp"
#include "stokpp/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace stokpp::cli {
namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text << '\n';
}

}  // namespace

int cmd_theory(const TheoryArgs& a) {
  const auto regime = parse_regime(a.regime);
  const auto p = predict(regime, a.kappa, a.epsilon.value_or(0.0), a.N);
  std::vector<std::string> notes;
  if (regime != Regime::ito_scalar && a.epsilon) {
    notes.push_back("epsilon ignored: the " + to_string(regime) + " prediction does not depend on it");
  }
  if (p.degenerate()) notes.push_back("degenerate: eps^2/2 >= 1, the flat part dies out and no front forms");
  std::cout << prediction_json(p, notes) << '\n';
  return 0;
}

int cmd_sde(const SdeArgs& a) {
  const auto interp = parse_interpretation(a.interpretation);
  if (!(a.T > 0.0) || !(a.dt > 0.0)) throw ConfigError("T and dt must be positive");
  if (a.paths < 1) throw ConfigError("paths must be >= 1");
  NoiseModel model;
  model.seed = a.seed;
  model.interpretation = interp;
  const auto steps = static_cast<std::size_t>(std::llround(a.T / a.dt));
  const auto paths = simulate_v_ensemble(a.epsilon, interp, 1.0, a.dt, steps, model, a.paths, a.jobs);

  if (!a.csv.empty()) {
    auto out = open_output(a.csv);
    out << "t,mean,var\n";
    const auto every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(a.stride / a.dt)));
    std::vector<double> column(paths.size());
    for (std::size_t k = 0; k <= steps; k += every) {
      for (std::size_t p = 0; p < paths.size(); ++p) column[p] = paths[p].values[k];
      const std::vector<std::string> row{format_double(static_cast<double>(k) * a.dt), format_double(mean(column)),
                                         format_double(sample_variance(column))};
      write_csv_row(out, row);
    }
  }

  const double burn_in = a.burn_in_fraction * a.T;
  std::vector<double> averages;
  for (const auto& p : paths) averages.push_back(time_average(p, burn_in));
  const auto avg = mean_estimate(averages);

  ordered_json j;
  j["epsilon"] = a.epsilon;
  j["interpretation"] = to_string(interp);
  j["dt"] = a.dt;
  j["T"] = a.T;
  j["paths"] = a.paths;
  j["seed"] = a.seed;
  j["burn_in"] = burn_in;
  j["mean"] = {{"value", avg.value}, {"std_error", avg.std_error}};
  if (interp == Interpretation::stratonovich) {
    j["stationary_mean"] = 1.0;
  } else if (const auto m = stationary_mean(a.epsilon)) {
    j["stationary_mean"] = *m;
  } else {
    j["stationary_mean"] = nullptr;
  }
  ordered_json laplace = ordered_json::array();
  if (interp == Interpretation::ito && a.epsilon > 0.0 && stationary_mean(a.epsilon)) {
    for (double lambda : {-2.0, -1.0, 1.0}) {
      if (lambda >= 2.0 / (a.epsilon * a.epsilon)) continue;
      const auto e = estimate_laplace(paths, lambda, burn_in);
      const double exact = stationary_laplace(lambda, a.epsilon);
      laplace.push_back({{"lambda", lambda},
                         {"estimate", e.value},
                         {"std_error", e.std_error},
                         {"closed_form", exact},
                         {"relative_error", std::abs(e.value - exact) / exact}});
    }
  }
  j["laplace"] = laplace;
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_run(const RunArgs& a) {
  const auto file = load_config(a.config);
  auto config = to_experiment(file);
  if (a.seed) config.params.noise.seed = *a.seed;
  if (a.jobs) config.jobs = a.jobs;

  const fs::path dir(a.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + a.out + "': " + ec.message());

  const auto kind = config.effective_marker_kind();
  RunManifest manifest;
  manifest.command = "run";
  manifest.config_source = a.config;
  manifest.config_hash = content_hash(file.text);
  manifest.config = describe(config);
  manifest.seed = config.params.noise.seed;
  manifest.version = library_version();
  manifest.started = utc_now();
  manifest.outputs = {"summary.json", "markers.csv"};
  if (kind == MarkerKind::expectation && a.snapshots) manifest.outputs.push_back("snapshots/");
  if (!config.w_lags.empty()) manifest.outputs.push_back("w_covariance.csv");
  const auto manifest_path = dir / "manifest.json";
  write_text(manifest_path, manifest_json(manifest));

  EnsembleSummary summary;
  try {
    summary = run_experiment(config);
  } catch (const Error& e) {
    manifest.finished = utc_now();
    manifest.status = std::string("failed: ") + e.what();
    write_text(manifest_path, manifest_json(manifest));
    std::cerr << "run failed; manifest: " << manifest_path.string() << '\n';
    throw;
  }

  write_text(dir / "summary.json", summary_json(config, summary));

  {
    auto out = open_output(dir / "markers.csv");
    const bool pathwise = summary.kind == MarkerKind::pathwise;
    out << (pathwise ? "stream,level,t,position\n" : "level,t,position\n");
    for (std::size_t l = 0; l < summary.tracks.size(); ++l) {
      for (std::size_t p = 0; p < summary.tracks[l].size(); ++p) {
        const auto& tr = summary.tracks[l][p];
        for (std::size_t i = 0; i < tr.size(); ++i) {
          std::vector<std::string> row;
          if (pathwise) row.push_back(std::to_string(summary.survivors[p]));
          row.push_back(format_double(tr.level));
          row.push_back(format_double(tr.times[i]));
          row.push_back(format_double(tr.positions[i]));
          write_csv_row(out, row);
        }
      }
    }
  }

  if (kind == MarkerKind::expectation && a.snapshots) {
    fs::create_directories(dir / "snapshots");
    for (std::size_t k = 0; k < summary.mean_fields.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "mean_%06zu.bin", k);
      auto out = open_output(dir / "snapshots" / name);
      write_snapshot(out, summary.mean_fields[k]);
    }
  }

  if (!summary.w_cov.empty()) {
    auto out = open_output(dir / "w_covariance.csv");
    out << "lag,covariance,covariance_se,second_moment,second_moment_se,mean_w\n";
    for (const auto& r : summary.w_cov) {
      const std::vector<std::string> row{format_double(r.lag), format_double(r.covariance.value),
                                         format_double(r.covariance.std_error), format_double(r.second_moment.value),
                                         format_double(r.second_moment.std_error), format_double(r.mean_w)};
      write_csv_row(out, row);
    }
  }

  manifest.finished = utc_now();
  manifest.status = "ok";
  write_text(manifest_path, manifest_json(manifest));
  std::cout << summary_json(config, summary) << '\n';
  return 0;
}

int cmd_accept(const AcceptArgs& a) {
  AcceptanceOptions opt;
  opt.seed = a.seed;
  opt.full = a.full;
  opt.jobs = a.jobs;
  opt.only = a.only;
  opt.on_result = [](const CheckResult& r) { std::cout << format_check(r) << std::endl; };
  std::cout << "stokpp " << library_version() << " acceptance, seed " << a.seed << (a.full ? ", full" : ", fast")
            << std::endl;
  const auto results = run_acceptance(opt);
  int counts[4] = {0, 0, 0, 0};
  for (const auto& r : results) ++counts[static_cast<int>(r.status)];
  std::cout << counts[0] << " passed, " << counts[1] << " failed, " << counts[2] << " warned, " << counts[3]
            << " skipped" << std::endl;
  return counts[1] == 0 ? 0 : 1;
}

int cmd_covcheck(const CovcheckArgs& a) {
  NoiseModel model;
  model.seed = a.seed;
  switch (parse_kernel_kind(a.kind)) {
    case KernelKind::constant: model.kernel = CovarianceKernel::constant(a.sigma2); break;
    case KernelKind::squared_exponential:
      model.kernel = CovarianceKernel::squared_exponential(a.sigma2, a.length);
      break;
    case KernelKind::tabulated:
      if (a.table.empty()) throw ConfigError("--table is required for tabulated kernels");
      model.kernel = load_kernel_table(a.table);
      break;
  }
  FieldNoise::Method method = FieldNoise::Method::automatic;
  if (a.method == "embedding") {
    method = FieldNoise::Method::embedding;
  } else if (a.method == "dense") {
    method = FieldNoise::Method::dense;
  } else if (a.method != "automatic") {
    throw ConfigError("unknown method '" + a.method + "' (automatic|embedding|dense)");
  }
  if (a.n < 3 || !(a.dx > 0.0) || !(a.dt > 0.0) || a.draws < 2) {
    throw ConfigError("need n >= 3, dx > 0, dt > 0, draws >= 2");
  }

  const auto grid = GridSpec::window(0.0, static_cast<double>(a.n - 1) * a.dx, a.dx);
  FieldNoise noise(model, grid, a.dt, method);
  std::vector<double> lags = a.lags;
  if (lags.empty()) {
    const double ell = model.kernel.kind == KernelKind::squared_exponential ? model.kernel.length : 1.0;
    lags = {0.0, ell, 3 * ell, 6 * ell};
  }
  std::vector<std::size_t> offsets;
  for (double lag : lags) {
    const auto l = static_cast<std::size_t>(std::llround(lag / a.dx));
    if (l >= a.n) throw ConfigError("lag " + format_double(lag) + " exceeds the grid");
    offsets.push_back(l);
  }

  std::vector<std::vector<double>> products(offsets.size(), std::vector<double>(a.draws));
  std::vector<double> z(a.n);
  bool rank_one = true;
  for (std::size_t d = 0; d < a.draws; ++d) {
    noise.next(z);
    if (noise.rank_one()) rank_one = rank_one && std::all_of(z.begin(), z.end(), [&](double x) { return x == z[0]; });
    for (std::size_t q = 0; q < offsets.size(); ++q) products[q][d] = z[0] * z[offsets[q]];
  }

  ordered_json j;
  j["kernel"] = to_string(model.kernel.kind);
  j["method"] = noise.rank_one() ? "rank_one" : (noise.uses_embedding() ? "embedding" : "dense");
  j["ring_size"] = noise.ring_size();
  j["negative_mass"] = noise.negative_mass();
  j["draws"] = a.draws;
  bool ok = true;
  ordered_json rows = ordered_json::array();
  for (std::size_t q = 0; q < offsets.size(); ++q) {
    const auto e = mean_estimate(products[q]);
    const double lag = static_cast<double>(offsets[q]) * a.dx;
    const double expected = a.dt * kernel_eval(model.kernel, lag);
    const double z_score = e.std_error > 0.0 ? (e.value - expected) / e.std_error : (e.value == expected ? 0.0 : INFINITY);
    ok = ok && std::abs(z_score) <= 3.0;
    rows.push_back({{"lag", lag},
                    {"empirical", e.value},
                    {"std_error", e.std_error},
                    {"expected", expected},
                    {"z", z_score}});
  }
  j["lags"] = rows;
  if (noise.rank_one()) j["rank_one_exact"] = rank_one;
  j["ok"] = ok && rank_one;
  std::cout << j.dump(2) << '\n';
  return ok && rank_one ? 0 : 1;
}

}  // namespace stokpp::cli
