#include "neurotrig/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "neurotrig/analysis.hpp"
#include "neurotrig/errors.hpp"
#include "neurotrig/record_io.hpp"
#include "neurotrig/scenario_io.hpp"

namespace neurotrig {
namespace {

namespace fs = std::filesystem;

struct Overrides {
  std::optional<double> step;
  std::optional<double> horizon;
  std::optional<std::string> mode;
  std::optional<std::size_t> stride;

  void attach(CLI::App* cmd) {
    cmd->add_option("--step", step, "Integration step h [s]")->check(CLI::PositiveNumber);
    cmd->add_option("--horizon", horizon, "Horizon T [s]")->check(CLI::PositiveNumber);
    cmd->add_option("--mode", mode, "triggered or continuous")
        ->check(CLI::IsMember({"triggered", "continuous"}));
    cmd->add_option("--stride", stride, "Write every n-th sample")->check(CLI::PositiveNumber);
  }

  void apply(Scenario& s) const {
    if (step) s.run.step = *step;
    if (horizon) s.run.horizon = *horizon;
    if (mode) s.run.mode = *mode == "continuous" ? ControlMode::kContinuous : ControlMode::kTriggered;
    if (stride) s.run.output_stride = *stride;
  }
};

Scenario prepare(const std::string& file, const Overrides& ov, std::ostream& err) {
  Scenario s = load_scenario(file);
  ov.apply(s);
  s.validate();
  for (const auto& w : s.warnings()) err << "warning: " << w << "\n";
  return s;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  return os;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

void export_run(const TrajectoryRecord& record, std::size_t stride, const fs::path& dir,
                const RunSummary& summary) {
  ensure_dir(dir);
  {
    auto os = open_out(dir / "trajectory.csv");
    write_trajectory_csv(record, os, stride);
  }
  {
    auto os = open_out(dir / "events.csv");
    write_events_csv(record.channels, os);
  }
  {
    auto os = open_out(dir / "summary.txt");
    write_summary_text(summary, os);
  }
  {
    auto os = open_out(dir / "summary.csv");
    write_summary_csv(summary, os);
  }
  {
    auto os = open_out(dir / "plot.csv");
    write_plot_csv(record, os, stride);
  }
}

std::vector<double> parse_values(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
      if (piece.empty()) continue;
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(piece, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != piece.size()) throw MalformedInputError("bad sweep value '" + piece + "'");
      out.push_back(v);
    }
  }
  if (out.empty()) throw MalformedInputError("sweep needs at least one value");
  return out;
}

int cmd_run(const std::string& file, const std::string& out_dir, const Overrides& ov,
            std::ostream& out, std::ostream& err) {
  const Scenario s = prepare(file, ov, err);
  const TrajectoryRecord record = run(s);
  const RunSummary summary = summarize(record);
  export_run(record, s.run.output_stride, out_dir, summary);
  write_summary_text(summary, out);
  return kExitOk;
}

int cmd_validate(const std::string& file, const Overrides& ov, std::ostream& out, std::ostream& err) {
  const Scenario s = prepare(file, ov, err);
  const auto q = q_matrix(s.topology);
  out << "ok: " << s.agents() << " agents, order " << s.plant.order << ", "
      << s.steps() << " steps, lambda_min(Q) = " << min_eigenvalue(q) << "\n";
  return kExitOk;
}

int cmd_compare(const std::string& file, const std::vector<double>& dx, const std::string& out_dir,
                const Overrides& ov, std::ostream& out, std::ostream& err) {
  Scenario a = prepare(file, ov, err);
  a.run.mode = ControlMode::kTriggered;
  Scenario b = a;
  a.thresholds.set_state(dx.at(0));
  b.thresholds.set_state(dx.at(1));
  const auto cmp = compare_thresholds(a, b);
  write_comparison_text(cmp, out);
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    auto os = open_out(fs::path(out_dir) / "comparison.txt");
    write_comparison_text(cmp, os);
  }
  return kExitOk;
}

int cmd_sweep(const std::string& file, const std::string& param, const std::vector<double>& values,
              std::size_t jobs, const std::string& out_dir, const Overrides& ov, std::ostream& out,
              std::ostream& err) {
  const Scenario base = prepare(file, ov, err);
  std::vector<Scenario> runs;
  for (const double v : values) {
    if (param.rfind("thresholds.", 0) == 0 && !(v > 0.0)) {
      throw ValidationError("sweep values for " + param + " must be positive");
    }
    Scenario s = base;
    apply_parameter(s, param, v);
    s.validate();
    runs.push_back(std::move(s));
  }
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());

  std::vector<RunSummary> summaries(runs.size());
  std::vector<std::string> failures(runs.size());
  std::vector<int> codes(runs.size(), kExitOk);
  for (std::size_t start = 0; start < runs.size(); start += jobs) {
    std::vector<std::future<void>> batch;
    for (std::size_t r = start; r < std::min(runs.size(), start + jobs); ++r) {
      batch.push_back(std::async(std::launch::async, [&, r] {
        try {
          const auto record = run(runs[r]);
          summaries[r] = summarize(record);
          if (!out_dir.empty()) {
            export_run(record, runs[r].run.output_stride,
                       fs::path(out_dir) / ("run_" + std::to_string(r)), summaries[r]);
          }
        } catch (const DivergenceError& e) {
          failures[r] = e.what();
          codes[r] = kExitDivergence;
        } catch (const IoError& e) {
          failures[r] = e.what();
          codes[r] = kExitIo;
        }
      }));
    }
    for (auto& f : batch) f.get();
  }

  std::ostringstream table;
  table << "index," << param << ",error_norm,total_events,status\n";
  int code = kExitOk;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    std::size_t total = 0;
    for (const auto& ch : summaries[r].channels) total += ch.count;
    table << r << ',' << format_double(values[r]) << ',';
    if (failures[r].empty()) {
      table << format_double(summaries[r].error_norm) << ',' << total << ",ok\n";
    } else {
      table << ",," << "failed\n";
      err << "run " << r << ": " << failures[r] << "\n";
      code = std::max(code, codes[r]);
    }
  }
  out << table.str();
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    auto os = open_out(fs::path(out_dir) / "sweep.csv");
    os << table.str();
  }
  return code;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Event-triggered neuroadaptive consensus tracking simulator", "neurotrig"};
  app.require_subcommand(1);

  Overrides ov;
  std::string file;
  std::string out_dir;

  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and export records");
  run_cmd->add_option("file", file, "Scenario YAML")->required();
  run_cmd->add_option("--out", out_dir, "Output directory")->required();
  ov.attach(run_cmd);

  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario without running it");
  validate_cmd->add_option("file", file, "Scenario YAML")->required();
  ov.attach(validate_cmd);

  std::vector<double> dx;
  auto* compare_cmd =
      app.add_subcommand("compare-thresholds", "Run two state-threshold settings side by side");
  compare_cmd->add_option("file", file, "Scenario YAML")->required();
  compare_cmd->add_option("--dx", dx, "Two state thresholds")->required()->expected(2);
  compare_cmd->add_option("--out", out_dir, "Optional output directory");
  ov.attach(compare_cmd);

  std::string param;
  std::vector<std::string> raw_values;
  std::size_t jobs = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a scenario over a list of parameter values");
  sweep_cmd->add_option("file", file, "Scenario YAML")->required();
  sweep_cmd->add_option("--param", param, "Parameter name, e.g. thresholds.state")->required();
  sweep_cmd->add_option("--values", raw_values, "Values, space or comma separated")->required();
  sweep_cmd->add_option("--jobs", jobs, "Concurrent runs (0: hardware threads)");
  sweep_cmd->add_option("--out", out_dir, "Optional output directory");
  ov.attach(sweep_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*run_cmd) return cmd_run(file, out_dir, ov, out, err);
    if (*validate_cmd) return cmd_validate(file, ov, out, err);
    if (*compare_cmd) {
      for (const double v : dx) {
        if (!(v > 0.0)) throw ValidationError("--dx values must be positive");
      }
      return cmd_compare(file, dx, out_dir, ov, out, err);
    }
    if (*sweep_cmd) return cmd_sweep(file, param, parse_values(raw_values), jobs, out_dir, ov, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace neurotrig
