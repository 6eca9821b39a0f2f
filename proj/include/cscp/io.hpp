#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cscp/driver.hpp"

namespace cscp {

/// File-level mirror of a Scenario: what the configuration file stores,
/// before derived objects (basis, dynamics) are built. Sentinels: goal = -1
/// means the top-right grid point, basis_width <= 0 and alpha1 < 0 mean the
/// documented auto defaults, horizon_cap = 0 means 4 * grid_side^2.
struct ScenarioSpec {
  double half_extent{1.0};
  int grid_side{7};
  int start{0};
  int goal{-1};

  int basis_per_side{5};
  double basis_width{0.0};
  double support_threshold{0.1};

  std::string dynamics_kind{"heat"};  // "heat" | "static"
  double alpha{0.005};
  double sigma_p{0.01};
  double dt{1.0};
  int order{2};

  int num_sensors{2};
  double sigma_r2{0.01};
  std::vector<int> initial_config;

  std::string method{"crmi"};
  double alpha1{-1.0};
  double alpha2{0.01};

  double epsilon{0.1};
  int max_iterations{200};

  double chi{1e3};
  double ukf_alpha{1e-3};
  double ukf_beta{2.0};
  double ukf_kappa{0.0};

  int horizon_cap{0};
  double c_floor{1e-3};

  double theta_min{0.0};
  double theta_max{4.0};

  std::string emit_fields{"none"};  // none | terminal | all

  bool operator==(const ScenarioSpec&) const = default;
};

/// Parses and validates a scenario file. Unknown keys and schema-version
/// mismatches are rejected; missing keys take the documented defaults.
ScenarioSpec parse_scenario(const std::string& text);
ScenarioSpec load_scenario_file(const std::string& path);

/// Serializes a spec back to scenario-file text (round-trips losslessly).
std::string emit_scenario(const ScenarioSpec& spec);

/// Builds the runnable scenario (basis, dynamics, resolved sentinels).
Scenario build_scenario(const ScenarioSpec& spec);

/// Per-iteration trace CSV. Column order:
/// k,q,z,trace_p,j_hat,true_j,var_j,rho,objective,margin,travel,millis
/// where q and z are semicolon-joined lists within one field.
void write_trace_csv(const CscpTrace& trace, std::ostream& out);

enum class FieldKind { True, Estimated, Error, ObjectiveMap };
FieldKind field_kind_from_name(const std::string& name);
std::string field_kind_name(FieldKind kind);

/// grid_side x grid_side matrix, row-major with the bottom row (y = -h)
/// first, comma-separated. The objective map holds the single-sensor value
/// of the scenario's placement objective at every grid point, evaluated on
/// the one-step-ahead prediction of the record's belief against the
/// record's path.
void emit_field_dump(const CscpTrace& trace, int k, FieldKind kind, const Scenario& scenario,
                     std::ostream& out);

std::string field_dump_filename(const std::string& run_id, int k, FieldKind kind);

}  // namespace cscp
