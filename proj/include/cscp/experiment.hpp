#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cscp/driver.hpp"
#include "cscp/io.hpp"

namespace cscp {

/// One line of the experiment summary: the terminal record of a single run.
struct ExperimentRow {
  std::string method;
  std::uint64_t seed{0};
  std::string status;  // converged | max-iterations | error
  int iterations{0};
  double terminal_j_hat{0.0};
  double terminal_true_j{0.0};
  double terminal_var_j{0.0};
  double travel{0.0};
  long evaluations{0};
  double millis{0.0};
};

/// Per-method aggregate over all non-error rows.
struct MethodAggregate {
  int runs{0};
  double median_iterations{0.0};
  double q1_iterations{0.0};
  double q3_iterations{0.0};
  double median_travel{0.0};
  double median_terminal_var{0.0};
};

struct ExperimentOptions {
  std::vector<std::string> methods;
  std::vector<std::uint64_t> seeds;
  int parallelism{1};
  std::string out_dir;                // empty: keep results in memory only
  std::string emit_fields{"none"};    // none | terminal | all
};

struct RunResult {
  ExperimentRow row;
  CscpTrace trace;
};

struct ExperimentResult {
  std::vector<RunResult> runs;
  std::vector<ExperimentRow> rows() const;
};

/// Runs every (method, seed) pair of the base scenario. Pairs sharing a seed
/// consume the identical ground-truth realization, so method comparisons are
/// matched. Per-run failures are recorded as error rows; the experiment
/// continues. With an out_dir set, each run's trace CSV (and requested field
/// dumps) plus summary_rows.csv and summary.json are written there.
ExperimentResult run_experiment(const ScenarioSpec& base, const ExperimentOptions& options);

std::map<std::string, MethodAggregate> aggregate_rows(const std::vector<ExperimentRow>& rows);

void write_rows_csv(const std::vector<ExperimentRow>& rows, std::ostream& out);
std::vector<ExperimentRow> parse_rows_csv(std::istream& in);
void write_summary_json(const std::vector<ExperimentRow>& rows, std::ostream& out);

}  // namespace cscp
