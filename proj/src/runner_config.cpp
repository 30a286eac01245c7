#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ips/runner.hpp"

namespace ips {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void key_error(const std::string& key, const std::string& what) {
  throw std::invalid_argument("config key '" + key + "': " + what);
}

}  // namespace

ConfigMap ConfigMap::parse(const std::string& text) {
  ConfigMap out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    if (out.kv_.count(key))
      throw std::invalid_argument("config key '" + key + "': duplicated");
    out.kv_[key] = value;
  }
  return out;
}

const std::string& ConfigMap::raw(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) key_error(key, "missing");
  return it->second;
}

double ConfigMap::get_double(const std::string& key) const {
  const std::string& v = raw(key);
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) key_error(key, "trailing characters in number '" + v + "'");
    return x;
  } catch (const std::invalid_argument&) {
    key_error(key, "not a number: '" + v + "'");
  } catch (const std::out_of_range&) {
    key_error(key, "number out of range: '" + v + "'");
  }
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long ConfigMap::get_int(const std::string& key) const {
  const double x = get_double(key);
  const long i = static_cast<long>(std::llround(x));
  if (static_cast<double>(i) != x) key_error(key, "expected an integer");
  return i;
}

long ConfigMap::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t ConfigMap::get_u64(const std::string& key) const {
  const std::string& v = raw(key);
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    key_error(key, "expected an unsigned integer, got '" + v + "'");
  return x;
}

std::string ConfigMap::get_string(const std::string& key) const { return raw(key); }

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

std::vector<double> ConfigMap::get_double_list(const std::string& key) const {
  const std::string& v = raw(key);
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) key_error(key, "empty list element");
    try {
      std::size_t used = 0;
      out.push_back(std::stod(t, &used));
      if (used != t.size()) key_error(key, "bad list element '" + t + "'");
    } catch (const std::invalid_argument&) {
      key_error(key, "bad list element '" + t + "'");
    }
  }
  if (out.empty()) key_error(key, "empty list");
  return out;
}

std::string config_hash(const std::string& kind, const std::map<std::string, std::string>& kv) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
  auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0x1f;
    h *= 1099511628211ULL;
  };
  feed(kind);
  for (const auto& [k, v] : kv) {
    if (k == "chunk" || k == "workers") continue;  // partial/runtime knobs
    feed(k);
    feed(v);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

namespace {

struct KeySpec {
  bool required;
};

using Schema = std::map<std::string, KeySpec>;

const std::map<std::string, Schema>& schemas() {
  static const std::map<std::string, Schema> table = [] {
    std::map<std::string, Schema> s;
    const Schema common = {
        {"kind", {true}}, {"seed", {true}}, {"workers", {false}}, {"chunk", {false}}};
    auto with = [&common](std::initializer_list<std::pair<const std::string, KeySpec>> extra) {
      Schema out = common;
      for (const auto& [k, v] : extra) out.emplace(k, v);
      return out;
    };
    s["rw"] = with({{"lattice.d", {true}},
                    {"lattice.L", {true}},
                    {"times", {true}},
                    {"tol", {false}},
                    {"profile_window", {false}},
                    {"fit_times", {false}}});
    s["bounds"] = with({{"c", {true}},      {"u", {true}},       {"v", {true}},
                        {"p", {true}},      {"a", {false}},      {"kappa", {false}},
                        {"psi_u", {false}}, {"df_v", {false}},   {"df_1", {false}},
                        {"df_2", {false}},  {"window", {false}}, {"alpha", {false}},
                        {"eps", {false}},   {"t", {false}},      {"d", {false}},
                        {"dnorm", {false}}, {"prefactor", {false}}});
    s["sep"] = with({{"lattice.d", {false}},
                     {"lattice.L", {true}},
                     {"rho", {true}},
                     {"times", {true}},
                     {"n_psi", {true}},
                     {"n_outer", {true}},
                     {"n_inner", {true}},
                     {"a_levels", {false}},
                     {"psi_window", {false}},
                     {"tol", {false}},
                     {"f.sites", {false}},
                     {"f.values", {false}}});
    s["voter"] = with({{"lattice.d", {false}},
                       {"lattice.L", {true}},
                       {"times", {true}},
                       {"n_psi", {true}},
                       {"tol", {false}}});
    s["contact"] = with({{"lattice.L", {true}},
                         {"lambda", {true}},
                         {"times", {true}},
                         {"n_psi", {true}},
                         {"rho", {false}}});
    s["glauber"] = with({{"lattice.L", {true}},
                         {"beta", {true}},
                         {"kappa", {true}},
                         {"range", {true}},
                         {"times", {true}},
                         {"n_psi", {true}},
                         {"rho", {false}}});
    s["asep"] = with({{"lattice.L", {true}},
                      {"p", {true}},
                      {"q", {true}},
                      {"rho_list", {true}},
                      {"t_drift", {true}},
                      {"n_drift", {true}},
                      {"t_psi", {true}},
                      {"k_window", {true}},
                      {"n_env", {true}},
                      {"n_rep", {true}},
                      {"t_struct", {false}},
                      {"n_struct", {false}},
                      {"struct_window", {false}},
                      {"n_outer", {false}},
                      {"n_inner", {false}},
                      {"rho", {false}},
                      {"fit_times", {false}},
                      {"fit_n_env", {false}},
                      {"fit_n_rep", {false}}});
    s["gibbs1d"] = with({{"n", {true}},
                         {"beta", {true}},
                         {"kappa", {true}},
                         {"range", {false}},
                         {"tail_tol", {false}},
                         {"boundary", {false}},
                         {"j_max", {true}},
                         {"n_theta", {true}},
                         {"n_gibbs_hist", {false}},
                         {"hoc_horizon", {false}},
                         {"q", {false}},
                         {"tv_n", {false}},
                         {"tv_samples", {false}},
                         {"n_poincare_f", {false}},
                         {"n_poincare_samples", {false}}});
    return s;
  }();
  return table;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_text(const std::string& text) {
  ExperimentConfig cfg;
  cfg.map = ConfigMap::parse(text);
  if (!cfg.map.has("kind")) throw std::invalid_argument("config key 'kind': missing");
  cfg.kind = cfg.map.get_string("kind");
  const auto schema_it = schemas().find(cfg.kind);
  if (schema_it == schemas().end())
    throw std::invalid_argument("config key 'kind': unknown experiment kind '" + cfg.kind + "'");
  const Schema& schema = schema_it->second;

  std::vector<std::string> problems;
  for (const auto& [key, value] : cfg.map.entries()) {
    if (!schema.count(key)) problems.push_back("unknown key '" + key + "'");
  }
  for (const auto& [key, spec] : schema) {
    if (spec.required && !cfg.map.has(key)) problems.push_back("missing required key '" + key + "'");
  }
  if (!problems.empty()) {
    std::string msg = "config schema violations:";
    for (const std::string& p : problems) msg += "\n  - " + p;
    throw std::invalid_argument(msg);
  }

  cfg.seed = cfg.map.get_u64("seed");
  cfg.workers = static_cast<int>(cfg.map.get_int("workers", 1));
  cfg.chunk = static_cast<int>(cfg.map.get_int("chunk", -1));
  if (cfg.workers < 1) throw std::invalid_argument("config key 'workers': must be >= 1");
  cfg.hash = config_hash(cfg.kind, cfg.map.entries());
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

void ExperimentConfig::override_seed(std::uint64_t s) {
  seed = s;
  map.set("seed", std::to_string(s));
  hash = config_hash(kind, map.entries());
}

void ExperimentConfig::override_workers(int w) {
  if (w < 1) throw std::invalid_argument("workers must be >= 1");
  workers = w;
  map.set("workers", std::to_string(w));
}

LocalFunction parse_local_function(const ConfigMap& map, const std::string& prefix, int dim) {
  const std::string sites_key = prefix + ".sites";
  const std::string values_key = prefix + ".values";
  if (!map.has(sites_key) || !map.has(values_key))
    throw std::invalid_argument("local function literal needs '" + sites_key + "' and '" +
                                values_key + "'");
  std::vector<Point> sites;
  const std::string& sraw = map.raw(sites_key);
  if (dim == 1) {
    std::stringstream ss(sraw);
    std::string item;
    while (std::getline(ss, item, ',')) {
      sites.push_back(make_point({static_cast<int>(std::stol(trim(item)))}));
    }
  } else {
    // format: (x y),(x y),...
    std::string rest = sraw;
    while (true) {
      const std::size_t open = rest.find('(');
      if (open == std::string::npos) break;
      const std::size_t close = rest.find(')', open);
      if (close == std::string::npos)
        throw std::invalid_argument("config key '" + sites_key + "': unbalanced parenthesis");
      std::istringstream coord(rest.substr(open + 1, close - open - 1));
      Point p{};
      for (int a = 0; a < dim; ++a) {
        if (!(coord >> p[static_cast<std::size_t>(a)]))
          throw std::invalid_argument("config key '" + sites_key + "': expected " +
                                      std::to_string(dim) + " coordinates per site");
      }
      sites.push_back(p);
      rest = rest.substr(close + 1);
    }
    if (sites.empty())
      throw std::invalid_argument("config key '" + sites_key + "': no sites parsed");
  }
  const std::vector<double> values = map.get_double_list(values_key);
  return LocalFunction(dim, std::move(sites), std::vector<double>(values));
}

Verdict evaluate(const ResultRow& row) {
  if (row.direction == Direction::Info || !row.bound.has_value()) return Verdict::Info;
  const double slack = 3.0 * row.se;
  const double diff = row.estimate - *row.bound;
  switch (row.direction) {
    case Direction::Upper:
      if (diff <= 0.0) return Verdict::Pass;
      return diff <= slack ? Verdict::Indeterminate : Verdict::Fail;
    case Direction::Lower:
      if (diff >= 0.0) return Verdict::Pass;
      return -diff <= slack ? Verdict::Indeterminate : Verdict::Fail;
    case Direction::TwoSided:
      return std::fabs(diff) <= slack ? Verdict::Pass : Verdict::Fail;
    default:
      return Verdict::Info;
  }
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Indeterminate: return "indeterminate";
    default: return "info";
  }
}

std::string to_string(Direction d) {
  switch (d) {
    case Direction::Upper: return "upper";
    case Direction::Lower: return "lower";
    case Direction::TwoSided: return "two_sided";
    default: return "info";
  }
}

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::string(buf);
}

}  // namespace

std::string ResultBundle::csv() const {
  std::string out = "quantity,t,k,estimate,se,bound,bound_name,config_hash,seed\n";
  for (const ResultRow& r : rows) {
    out += r.quantity;
    out += ',' + fmt(r.t);
    out += ',' + std::to_string(r.k);
    out += ',' + fmt(r.estimate);
    out += ',' + fmt(r.se);
    out += ',';
    if (r.bound) out += fmt(*r.bound);
    out += ',' + r.bound_name;
    out += ',' + config_hash;
    out += ',' + std::to_string(seed);
    out += '\n';
  }
  return out;
}

std::string ResultBundle::json_summary() const {
  std::string out = "{\n";
  out += "  \"kind\": \"" + kind + "\",\n";
  out += "  \"config_hash\": \"" + config_hash + "\",\n";
  out += "  \"seed\": " + std::to_string(seed) + ",\n";
  out += "  \"chunk\": " + std::to_string(chunk) + ",\n";
  int pass = 0, fail = 0, indet = 0, info = 0;
  std::string rows_json;
  for (const ResultRow& r : rows) {
    const Verdict v = evaluate(r);
    switch (v) {
      case Verdict::Pass: ++pass; break;
      case Verdict::Fail: ++fail; break;
      case Verdict::Indeterminate: ++indet; break;
      default: ++info; break;
    }
    rows_json += "    {\"quantity\": \"" + r.quantity + "\", \"t\": " + fmt(r.t) +
                 ", \"k\": " + std::to_string(r.k) + ", \"estimate\": " + fmt(r.estimate) +
                 ", \"se\": " + fmt(r.se);
    if (r.bound)
      rows_json += ", \"bound\": " + fmt(*r.bound) + ", \"bound_name\": \"" + r.bound_name + "\"";
    rows_json += ", \"n\": " + std::to_string(r.n);
    rows_json += ", \"direction\": \"" + to_string(r.direction) + "\", \"verdict\": \"" +
                 to_string(v) + "\"},\n";
  }
  if (!rows_json.empty()) rows_json.erase(rows_json.size() - 2, 1);  // drop trailing comma
  out += "  \"rows\": [\n" + rows_json + "  ],\n";
  out += "  \"verdicts\": {\"pass\": " + std::to_string(pass) + ", \"fail\": " + std::to_string(fail) +
         ", \"indeterminate\": " + std::to_string(indet) + ", \"info\": " + std::to_string(info) +
         "},\n";
  out += "  \"exit_code\": " + std::to_string(exit_code()) + "\n}\n";
  return out;
}

int ResultBundle::exit_code() const {
  for (const ResultRow& r : rows)
    if (evaluate(r) == Verdict::Fail) return 2;
  return 0;
}

ResultBundle merge(std::vector<ResultBundle> partials) {
  if (partials.empty()) throw std::invalid_argument("merge: no partials");
  std::sort(partials.begin(), partials.end(),
            [](const ResultBundle& a, const ResultBundle& b) { return a.chunk < b.chunk; });
  const std::string& hash = partials.front().config_hash;
  std::set<int> seen;
  for (const ResultBundle& p : partials) {
    if (p.config_hash != hash)
      throw std::invalid_argument("merge: mismatched config hashes " + hash + " vs " +
                                  p.config_hash);
    if (!seen.insert(p.chunk).second)
      throw std::invalid_argument("merge: duplicate replica chunk " + std::to_string(p.chunk));
  }
  if (partials.size() == 1) return partials.front();
  for (const ResultBundle& p : partials)
    if (p.chunk < 0)
      throw std::invalid_argument("merge: a full (unchunked) run cannot be pooled with partials");

  ResultBundle out = partials.front();
  out.chunk = -1;
  for (std::size_t pi = 1; pi < partials.size(); ++pi) {
    const ResultBundle& p = partials[pi];
    if (p.rows.size() != out.rows.size())
      throw std::invalid_argument("merge: partials carry different row sets");
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
      ResultRow& a = out.rows[i];
      const ResultRow& b = p.rows[i];
      if (a.quantity != b.quantity || a.t != b.t || a.k != b.k)
        throw std::invalid_argument("merge: row key mismatch at '" + a.quantity + "'");
      if (a.n == 0 && b.n == 0) {
        // exact rows must agree bit for bit
        if (a.estimate != b.estimate)
          throw std::invalid_argument("merge: exact rows disagree at '" + a.quantity + "'");
        continue;
      }
      const double na = static_cast<double>(a.n), nb = static_cast<double>(b.n);
      const double ntot = na + nb;
      const double pooled = (na * a.estimate + nb * b.estimate) / ntot;
      const double pooled_se =
          std::sqrt((na * a.se) * (na * a.se) + (nb * b.se) * (nb * b.se)) / ntot;
      a.estimate = pooled;
      a.se = pooled_se;
      a.n = a.n + b.n;
    }
  }
  return out;
}

}  // namespace ips
