#include "stokpp/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <sstream>

#include "stokpp/errors.hpp"
#include "stokpp/field_io.hpp"

namespace stokpp {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

class Reader {
 public:
  explicit Reader(const ConfigFile& f) : file_(f) {}

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const auto it = file_.entries.find(key);
    const int line = it == file_.entries.end() ? 0 : it->second.line;
    throw ConfigError(file_.source + ":" + std::to_string(line) + ": key '" + key + "': " + msg);
  }

  const std::string* raw(const std::string& key) const {
    const auto it = file_.entries.find(key);
    return it == file_.entries.end() ? nullptr : &it->second.value;
  }

  double number(const std::string& key, const std::string& text) const {
    double v = 0.0;
    const auto s = trim(text);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) fail(key, "expected a number, got '" + s + "'");
    return v;
  }

  void get(const std::string& key, double& out) const {
    if (const auto* r = raw(key)) out = number(key, *r);
  }

  void get(const std::string& key, std::uint64_t& out) const {
    if (const auto* r = raw(key)) {
      const auto s = trim(*r);
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        fail(key, "expected a non-negative integer, got '" + s + "'");
      }
    }
  }

  void get(const std::string& key, unsigned& out) const {
    std::uint64_t v = out;
    get(key, v);
    out = static_cast<unsigned>(v);
  }

  void get(const std::string& key, bool& out) const {
    if (const auto* r = raw(key)) {
      const auto s = trim(*r);
      if (s == "true" || s == "on" || s == "yes" || s == "1") {
        out = true;
      } else if (s == "false" || s == "off" || s == "no" || s == "0") {
        out = false;
      } else {
        fail(key, "expected true or false, got '" + s + "'");
      }
    }
  }

  void get(const std::string& key, std::vector<double>& out) const {
    const auto* r = raw(key);
    if (!r) return;
    std::string s = trim(*r);
    if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
    out.clear();
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (trim(item).empty()) continue;
      out.push_back(number(key, item));
    }
  }

  void get(const std::string& key, std::pair<double, double>& out) const {
    if (!raw(key)) return;
    std::vector<double> v;
    get(key, v);
    if (v.size() != 2) fail(key, "expected two numbers 'lo, hi'");
    out = {v[0], v[1]};
  }

  template <class F>
  void with_text(const std::string& key, F&& apply) const {
    if (const auto* r = raw(key)) {
      try {
        apply(trim(*r));
      } catch (const ConfigError& e) {
        fail(key, e.what());
      }
    }
  }

 private:
  const ConfigFile& file_;
};

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ", ") + format_double(x);
  return s;
}

}  // namespace

ConfigFile parse_config(std::string_view text, std::string source) {
  ConfigFile f;
  f.source = std::move(source);
  f.text = std::string(text);
  std::istringstream in(f.text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const auto where = f.source + ":" + std::to_string(number) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const auto key = trim(std::string_view(body).substr(0, eq));
    const auto value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "missing key");
    if (value.empty()) throw ConfigError(where + "key '" + key + "' has no value");
    if (!std::all_of(key.begin(), key.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_'; })) {
      throw ConfigError(where + "invalid key '" + key + "'");
    }
    if (f.entries.count(key)) {
      throw ConfigError(where + "key '" + key + "' repeats line " + std::to_string(f.entries[key].line));
    }
    f.entries[key] = {value, number};
  }
  return f;
}

ConfigFile load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "model.kappa",         "model.epsilon",         "model.N",
      "noise.kind",          "noise.sigma2",          "noise.length",
      "noise.table",         "noise.interpretation",  "noise.seed",
      "grid.dx",             "grid.length",           "grid.left",
      "solver.dt",           "solver.route",          "solver.drift_shift",
      "frame.enabled",       "frame.trigger",         "frame.target",
      "run.T",               "run.paths",             "run.stride",
      "run.jobs",            "markers.levels",        "markers.kind",
      "analysis.speed_window", "analysis.decay_offsets", "analysis.a_star_offset",
      "analysis.frame_speed",  "analysis.w_lags",       "analysis.w_window",
  };
  return keys;
}

ExperimentConfig to_experiment(const ConfigFile& file) {
  const auto& known = config_keys();
  for (const auto& [key, entry] : file.entries) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(file.source + ":" + std::to_string(entry.line) + ": unknown key '" + key + "'");
    }
  }

  Reader r(file);
  ExperimentConfig c;
  auto& p = c.params;
  r.get("model.kappa", p.kappa);
  r.get("model.epsilon", p.epsilon);
  r.get("model.N", p.N);

  KernelKind kind = KernelKind::constant;
  r.with_text("noise.kind", [&](const std::string& s) { kind = parse_kernel_kind(s); });
  double sigma2 = 1.0;
  double length = 1.0;
  r.get("noise.sigma2", sigma2);
  r.get("noise.length", length);
  switch (kind) {
    case KernelKind::constant:
      p.noise.kernel = CovarianceKernel::constant(sigma2);
      break;
    case KernelKind::squared_exponential:
      p.noise.kernel = CovarianceKernel::squared_exponential(sigma2, length);
      break;
    case KernelKind::tabulated: {
      const auto* path = r.raw("noise.table");
      if (!path) r.fail("noise.kind", "tabulated kernels need noise.table");
      try {
        p.noise.kernel = load_kernel_table(trim(*path));
      } catch (const Error& e) {
        r.fail("noise.table", e.what());
      }
      break;
    }
  }
  r.with_text("noise.interpretation", [&](const std::string& s) { p.noise.interpretation = parse_interpretation(s); });
  r.get("noise.seed", p.noise.seed);

  double dx = 0.05;
  double glen = 200.0;
  r.get("grid.dx", dx);
  r.get("grid.length", glen);
  double left = -0.4 * glen;
  r.get("grid.left", left);
  if (!(dx > 0.0)) r.fail("grid.dx", "must be positive");
  if (!(glen > 2.0 * dx)) r.fail("grid.length", "must span at least two cells");
  c.grid = GridSpec::window(left, glen, dx);

  r.get("solver.dt", p.dt);
  r.with_text("solver.route", [&](const std::string& s) { c.route = parse_route(s); });
  r.get("solver.drift_shift", p.drift_shift);
  r.get("frame.enabled", p.frame.enabled);
  r.get("frame.trigger", p.frame.trigger);
  r.get("frame.target", p.frame.target);

  r.get("run.T", c.T);
  r.get("run.paths", c.paths);
  r.get("run.stride", c.stride);
  r.get("run.jobs", c.jobs);

  r.get("markers.levels", c.levels);
  r.with_text("markers.kind", [&](const std::string& s) {
    if (s == "auto") {
      c.marker_kind.reset();
    } else if (s == "pathwise") {
      c.marker_kind = MarkerKind::pathwise;
    } else if (s == "expectation") {
      c.marker_kind = MarkerKind::expectation;
    } else {
      throw ConfigError("expected auto, pathwise or expectation");
    }
  });

  r.get("analysis.speed_window", c.speed_window);
  r.get("analysis.decay_offsets", c.decay_offsets);
  r.get("analysis.a_star_offset", c.a_star_offset);
  if (r.raw("analysis.frame_speed")) {
    double s = 0.0;
    r.get("analysis.frame_speed", s);
    c.frame_speed = s;
  }
  r.get("analysis.w_lags", c.w_lags);
  r.get("analysis.w_window", c.w_window);

  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(file.source + ": " + e.what());
  }
  return c;
}

std::map<std::string, std::string> describe(const ExperimentConfig& c) {
  const auto& p = c.params;
  const auto& k = p.noise.kernel;
  std::map<std::string, std::string> m;
  m["model.kappa"] = format_double(p.kappa);
  m["model.epsilon"] = format_double(p.epsilon);
  m["model.N"] = format_double(p.N);
  m["noise.kind"] = to_string(k.kind);
  m["noise.sigma2"] = format_double(k.sigma2);
  if (k.kind == KernelKind::squared_exponential) m["noise.length"] = format_double(k.length);
  m["noise.interpretation"] = to_string(p.noise.interpretation);
  m["noise.seed"] = std::to_string(p.noise.seed);
  m["grid.dx"] = format_double(c.grid.dx);
  m["grid.length"] = format_double(c.grid.length());
  m["grid.left"] = format_double(c.grid.left());
  m["solver.dt"] = format_double(p.dt);
  m["solver.route"] = to_string(c.route);
  m["solver.drift_shift"] = format_double(p.drift_shift);
  m["frame.enabled"] = p.frame.enabled ? "true" : "false";
  m["frame.trigger"] = format_double(p.frame.trigger);
  m["frame.target"] = format_double(p.frame.target);
  m["run.T"] = format_double(c.T);
  m["run.paths"] = std::to_string(c.paths);
  m["run.stride"] = format_double(c.stride);
  m["markers.levels"] = join(c.levels);
  m["markers.kind"] = c.effective_marker_kind() == MarkerKind::pathwise ? "pathwise" : "expectation";
  m["analysis.speed_window"] = join({c.speed_window.first, c.speed_window.second});
  m["analysis.decay_offsets"] = join({c.decay_offsets.first, c.decay_offsets.second});
  m["analysis.a_star_offset"] = format_double(c.a_star_offset);
  if (c.frame_speed) m["analysis.frame_speed"] = format_double(*c.frame_speed);
  if (!c.w_lags.empty()) {
    m["analysis.w_lags"] = join(c.w_lags);
    m["analysis.w_window"] = join({c.w_window.first, c.w_window.second});
  }
  return m;
}

std::string content_hash(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), header.data(), header.size()) != 1 ||
      EVP_DigestUpdate(ctx.get(), content.data(), content.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error("content_hash: SHA-1 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string library_version() { return STOKPP_VERSION; }

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace stokpp
