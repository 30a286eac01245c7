#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ips/lattice.hpp"
#include "ips/local_function.hpp"

namespace ips {

// Flat key = value config text with one dotted nesting level. '#' starts a
// comment. Unknown keys are schema errors.
class ConfigMap {
 public:
  static ConfigMap parse(const std::string& text);

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  const std::string& raw(const std::string& key) const;

  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;

  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

struct ExperimentConfig {
  std::string kind;
  std::uint64_t seed = 0;
  int workers = 1;
  int chunk = -1;  // -1: full run; >= 0: partial replica chunk for merge()
  ConfigMap map;
  std::string hash;  // canonical config hash, chunk excluded

  // Parses and schema-validates; throws std::invalid_argument listing every
  // offending key path.
  static ExperimentConfig from_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);

  void override_seed(std::uint64_t s);
  void override_workers(int w);
};

std::string config_hash(const std::string& kind, const std::map<std::string, std::string>& kv);

enum class Direction { Upper, Lower, TwoSided, Info };
enum class Verdict { Pass, Fail, Indeterminate, Info };

struct ResultRow {
  std::string quantity;
  double t = 0.0;
  long k = 0;
  double estimate = 0.0;
  double se = 0.0;
  std::optional<double> bound;
  std::string bound_name;
  Direction direction = Direction::Info;
  std::size_t n = 0;  // replica count backing a Monte Carlo estimate, 0 = exact
};

Verdict evaluate(const ResultRow& row);
std::string to_string(Verdict v);
std::string to_string(Direction d);

struct ResultBundle {
  std::string kind;
  std::string config_hash;
  std::uint64_t seed = 0;
  int chunk = -1;
  std::vector<ResultRow> rows;

  std::string csv() const;
  std::string json_summary() const;
  // 0: all pass/indeterminate/info, 2: any fail.
  int exit_code() const;
};

// Runs one experiment (or one replica chunk of it).
ResultBundle run(const ExperimentConfig& config);

// Keyed deterministic reduction of replica-chunk partials: Monte Carlo rows
// pool by replica count, exact rows must agree bit for bit. Partials are
// sorted by chunk id, so the fold is order-independent. Mismatched config
// hashes or duplicate chunks are errors.
ResultBundle merge(std::vector<ResultBundle> partials);

// LocalFunction literal from config keys `prefix.sites` / `prefix.values`
// (value table in lexicographic restriction order, first site most
// significant).
LocalFunction parse_local_function(const ConfigMap& map, const std::string& prefix, int dim);

}  // namespace ips
