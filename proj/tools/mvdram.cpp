// mvdram: verification, benchmark sweeps, capacity tables and one-shot GeMV.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mvdram/engine.hpp"
#include "mvdram/errors.hpp"
#include "mvdram/experiment.hpp"
#include "mvdram/io.hpp"

namespace {

constexpr int kExitMatch = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::uint32_t m = 8, n = 64;
  unsigned wbits = 4, abits = 4;
  bool signed_weights = false, signed_acts = false;
  double sparsity = 0.5;
  std::uint64_t seed = 1;
  std::string mode = "sparse";
  std::vector<std::string> profiles;
  std::string timing;
  std::string out;
  std::string format = "json";
  std::uint32_t rows = 512, columns = 65536;
  std::uint32_t budget = 4096;
  std::uint32_t max_n_span = mvdram::kMaxNSpan;
  bool ignore_reliability = false;
  std::string fault_mode;
  std::string sweep;
  std::vector<std::uint32_t> n_sweep;
  std::string matrix_path, activation_path;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--m", o.m, "Output dimension M")->check(CLI::PositiveNumber);
  cmd->add_option("--n", o.n, "Reduction dimension N")->check(CLI::PositiveNumber);
  cmd->add_option("--wbits", o.wbits, "Weight bits");
  cmd->add_option("--abits", o.abits, "Activation bits");
  cmd->add_flag("--signed-weights", o.signed_weights, "Signed weights (offset codes)");
  cmd->add_flag("--signed-acts", o.signed_acts, "Signed activations (offset codes)");
  cmd->add_option("--sparsity", o.sparsity, "Probability that an activation bit is 0");
  cmd->add_option("--seed", o.seed, "Seed for generated matrix and vector");
  cmd->add_option("--mode", o.mode, "Encoding mode")->check(CLI::IsMember({"naive", "sparse"}));
  cmd->add_option("--profile", o.profiles, "Reliability profile name or JSON file (repeat to cycle)")
      ->delimiter(',');
  cmd->add_option("--timing", o.timing, "Timing config JSON");
  cmd->add_option("--out", o.out, "Write the report here instead of stdout");
  cmd->add_option("--rows", o.rows, "Rows per subarray");
  cmd->add_option("--columns", o.columns, "Columns per subarray");
  cmd->add_option("--budget", o.budget, "Subarray budget");
  cmd->add_option("--max-n-span", o.max_n_span, "Largest N span per tile");
  cmd->add_flag("--ignore-reliability", o.ignore_reliability, "Test hook: place tiles on faulty columns too");
  cmd->add_option("--fault-mode", o.fault_mode, "Override fault mode")
      ->check(CLI::IsMember({"stuck-random", "flip"}));
}

mvdram::ExperimentConfig to_config(const Options& o) {
  mvdram::ExperimentConfig c;
  c.shape = {o.m, o.n, o.wbits, o.abits, o.signed_weights, o.signed_acts};
  c.sparsity = o.sparsity;
  c.seed = o.seed;
  c.mode = mvdram::parse_encoding_mode(o.mode);
  c.geometry = {o.rows, o.columns};
  if (!o.profiles.empty()) c.profiles = o.profiles;
  if (!o.fault_mode.empty()) c.fault_mode = mvdram::parse_fault_mode(o.fault_mode);
  c.plan_options.max_n_span = o.max_n_span;
  c.plan_options.subarray_budget = o.budget;
  c.plan_options.ignore_reliability = o.ignore_reliability;
  if (!o.timing.empty()) c.timing = mvdram::load_timing(o.timing);
  return c;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
  if (!f || !(f << text) || !f.flush()) throw mvdram::ConfigError("cannot write " + o.out);
}

std::string dump(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

int cmd_verify(const Options& o) {
  const auto outcome = mvdram::run_verify(to_config(o));
  if (o.format == "csv") {
    std::ostringstream csv;
    csv << "match,mismatch_count,tiles,row_copy,maj,host_read\n"
        << (outcome.match ? "true" : "false") << ',' << outcome.report.at("mismatch_count").get<std::size_t>() << ','
        << outcome.report.at("tiles").get<std::uint32_t>() << ','
        << outcome.report.at("commands").at("row_copy").get<std::uint64_t>() << ','
        << outcome.report.at("commands").at("maj").get<std::uint64_t>() << ','
        << outcome.report.at("commands").at("host_read").get<std::uint64_t>() << '\n';
    emit(o, csv.str());
  } else {
    emit(o, dump(outcome.report));
  }
  if (!outcome.match) std::cerr << "verify: " << outcome.report.at("mismatch_count") << " mismatching outputs\n";
  return outcome.match ? kExitMatch : kExitMismatch;
}

int cmd_bench(const Options& o) {
  const auto base = to_config(o);
  std::vector<mvdram::ExperimentConfig> entries;
  if (o.sweep.empty()) {
    entries.push_back(base);
  } else {
    std::ifstream in(o.sweep);
    if (!in) throw mvdram::ConfigError("cannot open sweep file " + o.sweep);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw mvdram::ConfigError("sweep file " + o.sweep + ": " + e.what());
    }
    entries = mvdram::load_sweep(doc, base);
  }
  const auto report = mvdram::run_bench(entries);
  emit(o, o.format == "csv" ? mvdram::bench_to_csv(report) : dump(report));
  return kExitMatch;
}

int cmd_capacity(const Options& o) {
  const auto config = to_config(o);
  std::vector<std::uint32_t> spans = o.n_sweep;
  if (spans.empty()) spans = {std::min(o.n, o.max_n_span)};
  const auto report = mvdram::run_capacity(config, spans);
  emit(o, o.format == "csv" ? mvdram::capacity_to_csv(report) : dump(report));
  return kExitMatch;
}

int cmd_gemv(const Options& o) {
  auto config = to_config(o);
  std::optional<mvdram::QuantizedMatrix> matrix;
  std::optional<mvdram::ActivationVector> act;
  if (!o.matrix_path.empty()) {
    matrix = mvdram::io::read_matrix(o.matrix_path);
    config.shape.m = matrix->rows();
    config.shape.n = matrix->cols();
    config.shape.q_w = matrix->bits();
    config.shape.signed_weights = matrix->is_signed();
  }
  if (!o.activation_path.empty()) {
    act = mvdram::io::read_activation(o.activation_path);
    config.shape.q_a = act->bits();
    config.shape.signed_acts = act->is_signed();
    if (!matrix) config.shape.n = act->size();
  }
  config.validate();
  if (!matrix) matrix = mvdram::make_matrix(config);
  if (!act) act = mvdram::make_activation(config);
  const auto profiles = mvdram::resolve_profiles(config);
  const auto plan = mvdram::plan(config.shape, config.geometry, profiles, config.plan_options);
  mvdram::check_cell_budget(plan, mvdram::cell_budget());
  mvdram::TemplateStore store;
  const auto run = mvdram::run_gemv(plan, *matrix, *act, config.mode, profiles, store);
  if (o.format == "bin") {
    if (o.out.empty()) throw mvdram::ConfigError("--format bin needs --out");
    mvdram::io::write_result(o.out, run.result.output);
    return kExitMatch;
  }
  if (o.format == "csv") {
    std::ostringstream csv;
    csv << "index,output\n";
    for (std::size_t i = 0; i < run.result.output.size(); ++i) csv << i << ',' << run.result.output[i] << '\n';
    emit(o, csv.str());
    return kExitMatch;
  }
  const auto& s = run.stats.total;
  emit(o, dump({{"schema", 1},
                {"output", run.result.output},
                {"tiles", run.result.tiles_reduced},
                {"commands",
                 {{"row_copy", s.row_copies}, {"maj", s.majs}, {"host_read", s.host_reads}, {"total", s.total()}}}}));
  return kExitMatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Processing-using-DRAM GeMV simulator and performance model"};
  app.require_subcommand(1);
  Options o;

  auto* verify = app.add_subcommand("verify", "Simulate at cell level and compare against the integer GeMV");
  add_common(verify, o);
  verify->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  auto* bench = app.add_subcommand("bench", "Count-level latency and energy estimates");
  add_common(bench, o);
  bench->add_option("--sweep", o.sweep, "Sweep file with defaults and entries");
  bench->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  auto* capacity = app.add_subcommand("capacity", "Row usage per subarray region");
  add_common(capacity, o);
  capacity->add_option("--n-sweep", o.n_sweep, "Tile spans to tabulate")->delimiter(',');
  capacity->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  auto* gemv = app.add_subcommand("gemv", "One-shot GeMV; prints the output vector");
  add_common(gemv, o);
  gemv->add_option("--matrix", o.matrix_path, "Binary matrix file");
  gemv->add_option("--activation", o.activation_path, "Binary activation file");
  gemv->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv", "bin"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*verify) return cmd_verify(o);
    if (*bench) return cmd_bench(o);
    if (*capacity) return cmd_capacity(o);
    return cmd_gemv(o);
  } catch (const mvdram::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
