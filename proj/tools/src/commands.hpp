#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stokpp::cli {

struct TheoryArgs {
  std::string regime;
  double kappa = 1.0;
  std::optional<double> epsilon;
  double N = 1.0;
};

struct SdeArgs {
  double epsilon = 1.0;
  std::string interpretation = "ito";
  double dt = 0.01;
  double T = 500.0;
  std::size_t paths = 16;
  std::uint64_t seed = 0;
  double stride = 1.0;
  double burn_in_fraction = 0.2;
  std::string csv;  ///< empty: no CSV
  unsigned jobs = 0;
};

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "stokpp_run";
  unsigned jobs = 0;
  bool snapshots = true;
};

struct AcceptArgs {
  std::uint64_t seed = 0;
  bool full = false;
  unsigned jobs = 0;
  std::vector<int> only;
};

struct CovcheckArgs {
  std::string kind = "squared_exponential";
  double sigma2 = 1.0;
  double length = 2.0;
  std::string table;
  double dx = 0.05;
  std::size_t n = 401;
  double dt = 0.01;
  std::size_t draws = 100000;
  std::uint64_t seed = 0;
  std::vector<double> lags;
  std::string method = "automatic";
};

// Each returns the process exit code; library errors propagate.
int cmd_theory(const TheoryArgs& a);
int cmd_sde(const SdeArgs& a);
int cmd_run(const RunArgs& a);
int cmd_accept(const AcceptArgs& a);
int cmd_covcheck(const CovcheckArgs& a);

}  // namespace stokpp::cli
