#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "stokpp/errors.hpp"

using namespace stokpp::cli;

int main(int argc, char** argv) {
  CLI::App app{"Stochastic KPP front simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "stokpp " STOKPP_TOOL_VERSION);

  TheoryArgs theory;
  auto* th = app.add_subcommand("theory", "Closed-form speed and decay prediction (JSON)");
  th->add_option("--regime", theory.regime, "ito_scalar | stratonovich_scalar | correlated")->required();
  th->add_option("--kappa", theory.kappa, "Diffusion coefficient")->check(CLI::PositiveNumber);
  th->add_option("--epsilon", theory.epsilon, "Noise strength (ito_scalar only)");
  th->add_option("--N", theory.N, "Initial decay rate")->check(CLI::PositiveNumber);

  SdeArgs sde;
  auto* sd = app.add_subcommand("sde", "Flat logistic SDE ensemble (CSV + JSON)");
  sd->add_option("--epsilon", sde.epsilon, "Noise strength")->check(CLI::NonNegativeNumber);
  sd->add_option("--interpretation", sde.interpretation, "ito | strat");
  sd->add_option("--dt", sde.dt, "Time step")->check(CLI::PositiveNumber);
  sd->add_option("--T", sde.T, "Horizon")->check(CLI::PositiveNumber);
  sd->add_option("--paths", sde.paths, "Number of paths")->check(CLI::PositiveNumber);
  sd->add_option("--seed", sde.seed, "Master seed")->required();
  sd->add_option("--stride", sde.stride, "CSV row spacing in time units")->check(CLI::PositiveNumber);
  sd->add_option("--burn-in", sde.burn_in_fraction, "Discarded fraction of T")->check(CLI::Range(0.0, 0.99));
  sd->add_option("--csv", sde.csv, "Write (t, mean, var) to this file");
  sd->add_option("--jobs", sde.jobs, "Worker threads (0: all cores)");

  RunArgs run;
  auto* rn = app.add_subcommand("run", "Ensemble experiment from a config file");
  rn->add_option("--config", run.config, "Config file")->required();
  rn->add_option("--seed", run.seed, "Override noise.seed");
  rn->add_option("--out", run.out, "Output directory");
  rn->add_option("--jobs", run.jobs, "Worker threads (0: config or all cores)");
  rn->add_flag("!--no-snapshots", run.snapshots, "Skip binary mean-field snapshots");

  AcceptArgs accept;
  auto* ac = app.add_subcommand("accept", "Run the acceptance suite");
  ac->add_option("--seed", accept.seed, "Master seed")->required();
  auto* full = ac->add_flag("--full", accept.full, "Include the long-running checks");
  ac->add_flag("--fast", "Fast checks only (default)")->excludes(full);
  ac->add_option("--jobs", accept.jobs, "Worker threads (0: all cores)");
  ac->add_option("--only", accept.only, "Run only these criterion ids")->check(CLI::Range(1, 13));

  CovcheckArgs cov;
  auto* cv = app.add_subcommand("covcheck", "Empirical covariance of the noise generator (JSON)");
  cv->add_option("--kind", cov.kind, "constant | squared_exponential | tabulated");
  cv->add_option("--sigma2", cov.sigma2, "Gamma(0)")->check(CLI::PositiveNumber);
  cv->add_option("--length", cov.length, "Correlation length")->check(CLI::PositiveNumber);
  cv->add_option("--table", cov.table, "Tabulated kernel CSV (lag, gamma)");
  cv->add_option("--dx", cov.dx, "Grid spacing")->check(CLI::PositiveNumber);
  cv->add_option("--n", cov.n, "Grid nodes");
  cv->add_option("--dt", cov.dt, "Time step")->check(CLI::PositiveNumber);
  cv->add_option("--draws", cov.draws, "Number of draws");
  cv->add_option("--seed", cov.seed, "Master seed")->required();
  cv->add_option("--lags", cov.lags, "Lags in space units (default 0, l, 3l, 6l)");
  cv->add_option("--method", cov.method, "automatic | embedding | dense");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*th) return cmd_theory(theory);
    if (*sd) return cmd_sde(sde);
    if (*rn) return cmd_run(run);
    if (*ac) return cmd_accept(accept);
    if (*cv) return cmd_covcheck(cov);
  } catch (const stokpp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
