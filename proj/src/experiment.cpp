#include "cscp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace cscp {

namespace {

std::string run_id(const std::string& method, std::uint64_t seed) {
  return method + "_seed" + std::to_string(seed);
}

std::string status_name(RunStatus status) {
  switch (status) {
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxIterations: return "max-iterations";
    case RunStatus::Error: return "error";
  }
  return "error";
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = p * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - lo;
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

void emit_run_files(const RunResult& run, const Scenario& scenario,
                    const std::string& out_dir, const std::string& emit_fields) {
  namespace fs = std::filesystem;
  const std::string id = run_id(run.row.method, run.row.seed);
  {
    std::ofstream trace_out(fs::path(out_dir) / (id + "_trace.csv"));
    write_trace_csv(run.trace, trace_out);
  }
  if (emit_fields == "none" || run.trace.records.empty()) return;
  std::vector<int> ks;
  if (emit_fields == "terminal")
    ks.push_back(static_cast<int>(run.trace.records.size()) - 1);
  else
    for (int k = 0; k < static_cast<int>(run.trace.records.size()); ++k) ks.push_back(k);
  for (int k : ks) {
    for (FieldKind kind : {FieldKind::True, FieldKind::Estimated, FieldKind::Error,
                           FieldKind::ObjectiveMap}) {
      std::ofstream out(fs::path(out_dir) / field_dump_filename(id, k, kind));
      emit_field_dump(run.trace, k, kind, scenario, out);
    }
  }
}

}  // namespace

std::vector<ExperimentRow> ExperimentResult::rows() const {
  std::vector<ExperimentRow> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(r.row);
  return out;
}

ExperimentResult run_experiment(const ScenarioSpec& base, const ExperimentOptions& options) {
  if (options.methods.empty()) throw std::invalid_argument("run_experiment: no methods");
  if (options.seeds.empty()) throw std::invalid_argument("run_experiment: no seeds");

  struct Job {
    std::string method;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& method : options.methods)
    for (std::uint64_t seed : options.seeds) jobs.push_back({method, seed});

  ExperimentResult result;
  result.runs.resize(jobs.size());

  if (!options.out_dir.empty()) std::filesystem::create_directories(options.out_dir);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) break;
      const Job& job = jobs[i];
      RunResult& run = result.runs[i];
      run.row.method = job.method;
      run.row.seed = job.seed;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        ScenarioSpec spec = base;
        spec.method = job.method;
        const Scenario scenario = build_scenario(spec);
        RngBundle rngs(job.seed);
        run.trace = cscp::run(scenario, rngs);
        const IterationRecord& terminal = run.trace.terminal();
        run.row.status = status_name(run.trace.status);
        run.row.iterations = terminal.k;
        run.row.terminal_j_hat = terminal.j_hat;
        run.row.terminal_true_j = terminal.true_j;
        run.row.terminal_var_j = terminal.var_j;
        run.row.travel = run.trace.cumulative_travel;
        run.row.evaluations = run.trace.objective_evaluations;
        if (run.trace.status == RunStatus::Error) run.row.status = "error";
        if (!options.out_dir.empty())
          emit_run_files(run, scenario, options.out_dir, options.emit_fields);
      } catch (const std::exception& e) {
        run.row.status = std::string("error");
        run.trace.status = RunStatus::Error;
        run.trace.error = e.what();
      }
      run.row.millis = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
    }
  };

  const int threads = std::max(1, options.parallelism);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  if (!options.out_dir.empty()) {
    namespace fs = std::filesystem;
    std::ofstream rows_out(fs::path(options.out_dir) / "summary_rows.csv");
    write_rows_csv(result.rows(), rows_out);
    std::ofstream summary_out(fs::path(options.out_dir) / "summary.json");
    write_summary_json(result.rows(), summary_out);
  }
  return result;
}

std::map<std::string, MethodAggregate> aggregate_rows(const std::vector<ExperimentRow>& rows) {
  std::map<std::string, std::vector<const ExperimentRow*>> by_method;
  for (const auto& row : rows)
    if (row.status != "error") by_method[row.method].push_back(&row);

  std::map<std::string, MethodAggregate> out;
  for (const auto& [method, group] : by_method) {
    MethodAggregate agg;
    agg.runs = static_cast<int>(group.size());
    std::vector<double> iters, travel, var;
    for (const auto* r : group) {
      iters.push_back(r->iterations);
      travel.push_back(r->travel);
      var.push_back(r->terminal_var_j);
    }
    agg.median_iterations = quantile(iters, 0.5);
    agg.q1_iterations = quantile(iters, 0.25);
    agg.q3_iterations = quantile(iters, 0.75);
    agg.median_travel = quantile(travel, 0.5);
    agg.median_terminal_var = quantile(var, 0.5);
    out[method] = agg;
  }
  return out;
}

void write_rows_csv(const std::vector<ExperimentRow>& rows, std::ostream& out) {
  out << "method,seed,status,iterations,terminal_j_hat,terminal_true_j,terminal_var_j,"
         "travel,evaluations,millis\n";
  out.precision(17);
  for (const auto& r : rows) {
    out << r.method << ',' << r.seed << ',' << r.status << ',' << r.iterations << ','
        << r.terminal_j_hat << ',' << r.terminal_true_j << ',' << r.terminal_var_j << ','
        << r.travel << ',' << r.evaluations << ',' << r.millis << '\n';
  }
}

std::vector<ExperimentRow> parse_rows_csv(std::istream& in) {
  std::vector<ExperimentRow> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    ExperimentRow r;
    std::string token;
    std::getline(fields, r.method, ',');
    std::getline(fields, token, ',');
    r.seed = std::stoull(token);
    std::getline(fields, r.status, ',');
    std::getline(fields, token, ',');
    r.iterations = std::stoi(token);
    std::getline(fields, token, ',');
    r.terminal_j_hat = std::stod(token);
    std::getline(fields, token, ',');
    r.terminal_true_j = std::stod(token);
    std::getline(fields, token, ',');
    r.terminal_var_j = std::stod(token);
    std::getline(fields, token, ',');
    r.travel = std::stod(token);
    std::getline(fields, token, ',');
    r.evaluations = std::stol(token);
    std::getline(fields, token, ',');
    r.millis = std::stod(token);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_summary_json(const std::vector<ExperimentRow>& rows, std::ostream& out) {
  nlohmann::json root;
  root["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    root["rows"].push_back({{"method", r.method},
                            {"seed", r.seed},
                            {"status", r.status},
                            {"iterations", r.iterations},
                            {"terminal_j_hat", r.terminal_j_hat},
                            {"terminal_true_j", r.terminal_true_j},
                            {"terminal_var_j", r.terminal_var_j},
                            {"travel", r.travel},
                            {"evaluations", r.evaluations},
                            {"millis", r.millis}});
  }
  root["aggregates"] = nlohmann::json::object();
  for (const auto& [method, agg] : aggregate_rows(rows)) {
    root["aggregates"][method] = {{"runs", agg.runs},
                                  {"median_iterations", agg.median_iterations},
                                  {"q1_iterations", agg.q1_iterations},
                                  {"q3_iterations", agg.q3_iterations},
                                  {"median_travel", agg.median_travel},
                                  {"median_terminal_var", agg.median_terminal_var}};
  }
  out << root.dump(2) << '\n';
}

}  // namespace cscp
