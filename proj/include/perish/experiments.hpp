#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace perish {

struct ExperimentConfig {
  std::string experiment;
  std::string horizon = "geometric";
  double mean = 2.0;
  std::int64_t cap = 0;
  std::vector<std::size_t> m{20};
  double lambda = 1e-3;
  std::vector<double> alpha{2.0};
  std::vector<int> c{2};
  std::string values = "uniform-int:1:100";
  std::string policy;  // empty: the experiment's default
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  std::string output;  // empty: $PERISH_OUTPUT_DIR/<experiment>.<format>, else stdout
  std::string format = "csv";
  double rho = 0.5;
  bool verbose = false;
  int threads = 0;
  std::vector<int> j{1, 3};
  std::vector<double> x{0.5};
  std::size_t instances = 50;
  std::int64_t c_max = 200;

  void validate() const;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

const std::vector<std::string>& experiment_names();

// Overwrites the fields named in a JSON object; unknown keys and wrong types are errors.
void apply_config_json(ExperimentConfig& cfg, const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});

struct ResultRow {
  std::string experiment;
  std::string parameters;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::string metric;
  double value = 0.0;
  std::optional<double> std_error;
  std::optional<double> bound;
  std::string relation;
  std::optional<bool> pass;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  bool all_pass() const;
  const ResultRow* find(const std::string& metric) const;
};

// Column order of both writers.
const std::vector<std::string>& result_columns();
void write_csv(std::ostream& os, const ResultTable& t);
void write_json(std::ostream& os, const ResultTable& t);

ResultTable run_experiment(const ExperimentConfig& cfg);

// Runs the experiment and writes the table. Returns 0, or 2 when a bound comparison failed.
int run(const ExperimentConfig& cfg, std::ostream& default_out, std::ostream& log);

}  // namespace perish
