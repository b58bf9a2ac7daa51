#include "core/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "core/error.hpp"
#include "core/io.hpp"

namespace chinpaint {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE)
    throw Error(ErrorCode::Config, "key '" + key + "': expected a number, got '" + v + "'");
  return x;
}

long long to_integer(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno == ERANGE)
    throw Error(ErrorCode::Config, "key '" + key + "': expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::Config, "key '" + key + "': expected true/false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

std::string list_str(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + csv_number(xs[i]);
  return s;
}

struct Entry {
  const char* key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define DOUBLE_KEY(name, member)                                                            \
  Entry {                                                                                   \
    name, [](RunConfig& c, const std::string& v) { c.member = to_double(name, v); },        \
        [](const RunConfig& c) { return csv_number(c.member); }                             \
  }
#define INT_KEY(name, member)                                                                        \
  Entry {                                                                                            \
    name, [](RunConfig& c, const std::string& v) { c.member = static_cast<int>(to_integer(name, v)); }, \
        [](const RunConfig& c) { return std::to_string(c.member); }                                  \
  }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      INT_KEY("nx", nx),
      INT_KEY("ny", ny),
      DOUBLE_KEY("lx", lx),
      DOUBLE_KEY("ly", ly),
      DOUBLE_KEY("theta", potential.theta),
      DOUBLE_KEY("theta_c", potential.theta_c),
      DOUBLE_KEY("eps", potential.eps),
      DOUBLE_KEY("delta_clip", potential.delta_clip),
      Entry{"potential",
            [](RunConfig& c, const std::string& v) {
              if (v == "logarithmic") c.potential.kind = PotentialKind::Logarithmic;
              else if (v == "quadratic") c.potential.kind = PotentialKind::Quadratic;
              else throw Error(ErrorCode::Config, "key 'potential': expected logarithmic or quadratic, got '" + v + "'");
            },
            [](const RunConfig& c) {
              return std::string(c.potential.kind == PotentialKind::Quadratic ? "quadratic" : "logarithmic");
            }},
      DOUBLE_KEY("dt", solver.dt),
      INT_KEY("n_steps", solver.n_steps),
      DOUBLE_KEY("stabilization", solver.stabilization),
      DOUBLE_KEY("picard_tol", solver.picard_tol),
      INT_KEY("picard_max", solver.picard_max),
      DOUBLE_KEY("alpha1", weights.alpha1),
      DOUBLE_KEY("alpha2", weights.alpha2),
      DOUBLE_KEY("beta", weights.beta),
      DOUBLE_KEY("r", weights.r),
      DOUBLE_KEY("lambda_min", lambda_min),
      DOUBLE_KEY("lambda_max", lambda_max),
      DOUBLE_KEY("lambda0", lambda0),
      INT_KEY("max_iter", optimizer.max_iter),
      DOUBLE_KEY("opt_tol", optimizer.tol),
      DOUBLE_KEY("s0", optimizer.s0),
      DOUBLE_KEY("initial_step", optimizer.initial_step),
      DOUBLE_KEY("armijo_c", optimizer.armijo_c),
      INT_KEY("max_backtracks", optimizer.max_backtracks),
      DOUBLE_KEY("blur_sigma", blur_sigma),
      DOUBLE_KEY("binarize_threshold", binarize_threshold),
      Entry{"seed",
            [](RunConfig& c, const std::string& v) {
              const long long s = to_integer("seed", v);
              if (s < 0) throw Error(ErrorCode::Config, "key 'seed': must be nonnegative");
              c.seed = static_cast<std::uint64_t>(s);
            },
            [](const RunConfig& c) { return std::to_string(c.seed); }},
      INT_KEY("stripe_period", stripe_period),
      INT_KEY("stripe_hole", stripe_hole),
      INT_KEY("check_directions", check_directions),
      DOUBLE_KEY("grad_tau", grad_tau),
      DOUBLE_KEY("hess_tau", hess_tau),
      DOUBLE_KEY("check_amplitude", check_amplitude),
      INT_KEY("second_order_dirs", second_order_dirs),
      Entry{"decay_lambdas", [](RunConfig& c, const std::string& v) { c.decay_lambdas = to_list("decay_lambdas", v); },
            [](const RunConfig& c) { return list_str(c.decay_lambdas); }},
      Entry{"scan_eps", [](RunConfig& c, const std::string& v) { c.scan_eps = to_list("scan_eps", v); },
            [](const RunConfig& c) { return list_str(c.scan_eps); }},
      DOUBLE_KEY("scan_lambda0", scan_lambda0),
      DOUBLE_KEY("decay_dt", decay_dt),
      INT_KEY("decay_steps", decay_steps),
      DOUBLE_KEY("decay_horizon", decay_horizon),
      DOUBLE_KEY("decay_floor", decay_floor),
      DOUBLE_KEY("target_lambda_big", target_lambda_big),
      DOUBLE_KEY("target_dt", target_dt),
      DOUBLE_KEY("target_stat_tol", target_stat_tol),
      INT_KEY("target_max_steps", target_max_steps),
      Entry{"target_relax", [](RunConfig& c, const std::string& v) { c.target_relax = to_bool("target_relax", v); },
            [](const RunConfig& c) { return std::string(c.target_relax ? "true" : "false"); }},
  };
  return table;
}

#undef DOUBLE_KEY
#undef INT_KEY

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::Config, msg);
}

}  // namespace

Grid RunConfig::grid() const { return Grid::make(nx, ny, lx, ly); }

void RunConfig::validate() const {
  require(nx >= 4 && ny >= 4, "nx and ny must be at least 4");
  require(lx > 0.0 && ly > 0.0, "lx and ly must be positive");
  require(potential.theta > 0.0 && potential.theta_c > 0.0, "theta and theta_c must be positive");
  require(potential.theta < potential.theta_c,
          "theta must be below theta_c (double-well condition), got theta = " + csv_number(potential.theta) +
              ", theta_c = " + csv_number(potential.theta_c));
  require(potential.eps > 0.0, "eps must be positive");
  require(potential.delta_clip > 0.0 && potential.delta_clip < 0.5, "delta_clip must lie in (0, 0.5)");
  require(solver.dt > 0.0, "dt must be positive");
  require(solver.n_steps >= 1, "n_steps must be at least 1");
  require(solver.picard_tol > 0.0 && solver.picard_max >= 1, "picard_tol must be positive and picard_max >= 1");
  require(weights.alpha1 >= 0.0 && weights.alpha2 >= 0.0 && weights.beta >= 0.0,
          "alpha1, alpha2 and beta must be nonnegative");
  require(!(weights.alpha1 == 0.0 && weights.alpha2 == 0.0 && weights.beta == 0.0),
          "alpha1, alpha2 and beta must not all be zero");
  require(weights.r > 0.0, "penalty exponent r must be positive");
  require(lambda_min > 0.0, "lambda_min must be positive");
  require(lambda_min < lambda_max,
          "lambda_min must be below lambda_max, got lambda_min = " + csv_number(lambda_min) +
              ", lambda_max = " + csv_number(lambda_max));
  require(lambda0 < 0.0 || (lambda0 >= lambda_min && lambda0 <= lambda_max), "lambda0 must lie in [lambda_min, lambda_max]");
  require(optimizer.max_iter >= 0 && optimizer.tol > 0.0 && optimizer.s0 > 0.0, "optimizer settings out of range");
  require(optimizer.armijo_c > 0.0 && optimizer.armijo_c < 1.0, "armijo_c must lie in (0, 1)");
  require(blur_sigma >= 0.0, "blur_sigma must be nonnegative");
  require(binarize_threshold > 0.0 && binarize_threshold < 1.0, "binarize_threshold must lie in (0, 1)");
  require(stripe_period >= 2 && stripe_hole >= 1 && stripe_hole < std::min(nx, ny), "stripe settings out of range");
  require(check_directions >= 1 && grad_tau > 0.0 && hess_tau > 0.0 && check_amplitude > 0.0,
          "check settings out of range");
  require(decay_dt > 0.0 && decay_steps >= 2 && decay_horizon > 0.0 && decay_floor >= 0.0,
          "decay settings out of range");
  for (double l : decay_lambdas) require(l >= 0.0, "decay_lambdas must be nonnegative");
  for (double e : scan_eps) require(e > 0.0, "scan_eps entries must be positive");
  require(target_lambda_big > 0.0 && target_dt > 0.0 && target_stat_tol > 0.0 && target_max_steps >= 1,
          "target settings out of range");
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const Entry& e : entries())
    if (key == e.key) return e.set(cfg, value);
  throw Error(ErrorCode::Config, "unknown key '" + key + "'");
}

std::string get_key(const RunConfig& cfg, const std::string& key) {
  for (const Entry& e : entries())
    if (key == e.key) return e.get(cfg);
  throw Error(ErrorCode::Config, "unknown key '" + key + "'");
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::Config, origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    try {
      apply_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(ErrorCode::Config, origin + ":" + std::to_string(lineno) + ": " +
                                         std::string(e.what()).substr(std::string("Config: ").size()));
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw Error(ErrorCode::Config, "--set expects key=value, got '" + assignment + "'");
  apply_key(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

std::string dump_config(const RunConfig& cfg) {
  std::string out;
  for (const Entry& e : entries()) out += std::string(e.key) + " = " + e.get(cfg) + "\n";
  return out;
}

}  // namespace chinpaint
