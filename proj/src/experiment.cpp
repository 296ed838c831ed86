#include "mvdram/experiment.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "mvdram/engine.hpp"
#include "mvdram/errors.hpp"
#include "mvdram/hash.hpp"

namespace mvdram {

namespace {

constexpr std::size_t kMaxReportedMismatches = 100;

nlohmann::json stats_to_json(const CommandStats& s) {
  return {{"row_copy", s.row_copies}, {"maj", s.majs}, {"host_read", s.host_reads}, {"total", s.total()}};
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  shape.validate();
  geometry.validate();
  if (!(sparsity >= 0.0 && sparsity <= 1.0)) throw ConfigError("sparsity must lie in [0, 1]");
  if (profiles.empty()) throw ConfigError("at least one reliability profile is required");
  if (plan_options.max_n_span < 1) throw ConfigError("max n-span must be >= 1");
  timing.validate();
}

ExperimentConfig config_from_json(const nlohmann::json& doc, const ExperimentConfig& base) {
  ExperimentConfig c = base;
  try {
    c.shape.m = doc.value("m", c.shape.m);
    c.shape.n = doc.value("n", c.shape.n);
    c.shape.q_w = doc.value("wbits", c.shape.q_w);
    c.shape.q_a = doc.value("abits", c.shape.q_a);
    c.shape.signed_weights = doc.value("signed_weights", c.shape.signed_weights);
    c.shape.signed_acts = doc.value("signed_acts", c.shape.signed_acts);
    c.sparsity = doc.value("sparsity", c.sparsity);
    c.seed = doc.value("seed", c.seed);
    if (doc.contains("mode")) c.mode = parse_encoding_mode(doc.at("mode").get<std::string>());
    c.geometry.row_count = doc.value("rows", c.geometry.row_count);
    c.geometry.column_count = doc.value("columns", c.geometry.column_count);
    if (doc.contains("profiles")) {
      const auto& p = doc.at("profiles");
      c.profiles = p.is_string() ? std::vector<std::string>{p.get<std::string>()} : p.get<std::vector<std::string>>();
    }
    if (doc.contains("fault_mode")) c.fault_mode = parse_fault_mode(doc.at("fault_mode").get<std::string>());
    c.plan_options.max_n_span = doc.value("max_n_span", c.plan_options.max_n_span);
    c.plan_options.subarray_budget = doc.value("budget", c.plan_options.subarray_budget);
    c.plan_options.ignore_reliability = doc.value("ignore_reliability", c.plan_options.ignore_reliability);
    if (doc.contains("timing")) c.timing = timing_from_json(doc.at("timing"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json doc = {{"m", c.shape.m},
                        {"n", c.shape.n},
                        {"wbits", c.shape.q_w},
                        {"abits", c.shape.q_a},
                        {"signed_weights", c.shape.signed_weights},
                        {"signed_acts", c.shape.signed_acts},
                        {"sparsity", c.sparsity},
                        {"seed", c.seed},
                        {"mode", std::string(to_string(c.mode))},
                        {"rows", c.geometry.row_count},
                        {"columns", c.geometry.column_count},
                        {"profiles", c.profiles},
                        {"max_n_span", c.plan_options.max_n_span},
                        {"budget", c.plan_options.subarray_budget},
                        {"ignore_reliability", c.plan_options.ignore_reliability},
                        {"timing", timing_to_json(c.timing)}};
  if (c.fault_mode) doc["fault_mode"] = std::string(to_string(*c.fault_mode));
  return doc;
}

std::vector<ReliabilityProfile> resolve_profiles(const ExperimentConfig& config) {
  std::vector<ReliabilityProfile> out;
  for (const auto& name : config.profiles) {
    out.push_back(resolve_profile(name, config.geometry.column_count));
    if (config.fault_mode) out.back().fault_mode = *config.fault_mode;
  }
  return out;
}

std::uint64_t matrix_seed(std::uint64_t seed) { return splitmix64(seed ^ 0x4D41545249580000ULL); }
std::uint64_t activation_seed(std::uint64_t seed) { return splitmix64(seed ^ 0x4143540000000000ULL); }

QuantizedMatrix make_matrix(const ExperimentConfig& c) {
  return QuantizedMatrix::random(c.shape.m, c.shape.n, c.shape.q_w, c.shape.signed_weights, matrix_seed(c.seed));
}

ActivationVector make_activation(const ExperimentConfig& c) {
  return ActivationVector::random(c.shape.n, c.shape.q_a, c.shape.signed_acts, c.sparsity, activation_seed(c.seed));
}

std::uint64_t cell_budget() {
  const char* env = std::getenv("MVDRAM_CELL_BUDGET");
  if (!env || !*env) return kDefaultCellBudget;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0') throw ConfigError("MVDRAM_CELL_BUDGET must be a positive integer");
  return v;
}

void check_cell_budget(const GemvPlan& plan, std::uint64_t budget) {
  const std::uint64_t cells = std::uint64_t{plan.subarray_count()} * plan.geometry.cells();
  if (cells > budget) {
    throw ConfigError("simulating " + std::to_string(plan.subarray_count()) + " subarrays needs " +
                      std::to_string(cells) + " cells, over the budget of " + std::to_string(budget) +
                      " (set MVDRAM_CELL_BUDGET, or use bench for a count-level estimate)");
  }
}

VerifyOutcome run_verify(const ExperimentConfig& config) {
  config.validate();
  const auto profiles = resolve_profiles(config);
  const auto plan = mvdram::plan(config.shape, config.geometry, profiles, config.plan_options);
  check_cell_budget(plan, cell_budget());
  const auto matrix = make_matrix(config);
  const auto a = make_activation(config);
  TemplateStore store;
  const auto report = verify(plan, matrix, a, config.mode, profiles, store);

  nlohmann::json mismatches = nlohmann::json::array();
  for (std::size_t i = 0; i < report.mismatches.size() && i < kMaxReportedMismatches; ++i) {
    const auto& m = report.mismatches[i];
    mismatches.push_back({{"index", m.index}, {"expected", m.expected}, {"actual", m.actual}, {"delta", m.delta()}});
  }
  VerifyOutcome out;
  out.match = report.match;
  out.report = {{"schema", 1},
                {"command", "verify"},
                {"config", config_to_json(config)},
                {"match", report.match},
                {"mismatch_count", report.mismatches.size()},
                {"mismatches", std::move(mismatches)},
                {"tiles", plan.subarray_count()},
                {"commands", stats_to_json(report.stats.total)},
                {"output", report.output}};
  return out;
}

nlohmann::json run_bench_entry(const ExperimentConfig& config, TemplateStore& store) {
  nlohmann::json row = {{"m", config.shape.m},          {"n", config.shape.n},       {"wbits", config.shape.q_w},
                        {"abits", config.shape.q_a},    {"sparsity", config.sparsity}, {"seed", config.seed},
                        {"mode", std::string(to_string(config.mode))}, {"profiles", config.profiles}};
  try {
    config.validate();
    const auto profiles = resolve_profiles(config);
    const auto plan = mvdram::plan(config.shape, config.geometry, profiles, config.plan_options);
    const auto a = make_activation(config);
    const auto traces = encode(plan, a, config.mode, store);
    row["perf"] = perf_to_json(estimate(traces, plan, config.timing));
  } catch (const Error& e) {
    row["error"] = e.what();
  }
  return row;
}

nlohmann::json run_bench(const std::vector<ExperimentConfig>& entries) {
  TemplateStore store;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : entries) rows.push_back(run_bench_entry(e, store));
  return {{"schema", 1}, {"command", "bench"}, {"rows", std::move(rows)}};
}

std::vector<ExperimentConfig> load_sweep(const nlohmann::json& doc, const ExperimentConfig& base) {
  if (!doc.is_object()) throw ConfigError("sweep file must hold a JSON object");
  const auto defaults = doc.contains("defaults") ? config_from_json(doc.at("defaults"), base) : base;
  std::vector<ExperimentConfig> out;
  if (!doc.contains("entries")) return out;
  if (!doc.at("entries").is_array()) throw ConfigError("sweep 'entries' must be an array");
  for (const auto& e : doc.at("entries")) out.push_back(config_from_json(e, defaults));
  return out;
}

nlohmann::json run_capacity(const ExperimentConfig& config, const std::vector<std::uint32_t>& n_tiles) {
  config.shape.validate();
  config.geometry.validate();
  const auto profiles = resolve_profiles(config);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto n_tile : n_tiles) {
    nlohmann::json row = {{"n_tile", n_tile}, {"wbits", config.shape.q_w}, {"abits", config.shape.q_a}};
    try {
      if (n_tile < 1) throw ConfigError("tile span must be >= 1");
      auto shape = config.shape;
      shape.n = n_tile;
      auto options = config.plan_options;
      options.max_n_span = n_tile;
      const auto plan = mvdram::plan(shape, config.geometry, profiles, options);
      row["r"] = plan.r;
      row["capacity"] = capacity_to_json(plan.capacity);
    } catch (const Error& e) {
      row["error"] = e.what();
    }
    rows.push_back(std::move(row));
  }
  return {{"schema", 1},
          {"command", "capacity"},
          {"m", config.shape.m},
          {"rows_per_subarray", config.geometry.row_count},
          {"rows", std::move(rows)}};
}

std::string bench_to_csv(const nlohmann::json& report) {
  std::ostringstream out;
  out << "m,n,wbits,abits,sparsity,mode," << perf_csv_header() << ",error\n";
  for (const auto& row : report.at("rows")) {
    out << row.at("m").get<std::uint32_t>() << ',' << row.at("n").get<std::uint32_t>() << ','
        << row.at("wbits").get<unsigned>() << ',' << row.at("abits").get<unsigned>() << ','
        << fmt(row.at("sparsity").get<double>()) << ',' << row.at("mode").get<std::string>() << ',';
    if (row.contains("perf")) {
      const auto& p = row.at("perf");
      double cpu = 0.0;
      for (const auto& c : p.at("comparisons")) {
        if (c.at("baseline") == "cpu") cpu = c.at("speedup").get<double>();
      }
      out << p.at("tiles").get<std::uint32_t>() << ',' << p.at("commands").at("row_copy").get<std::uint64_t>() << ','
          << p.at("commands").at("maj").get<std::uint64_t>() << ','
          << p.at("commands").at("host_read").get<std::uint64_t>() << ','
          << fmt(p.at("in_dram_latency_ns").get<double>()) << ','
          << fmt(p.at("aggregation_latency_ns").get<double>()) << ',' << fmt(p.at("total_ns").get<double>()) << ','
          << fmt(p.at("energy_nj").get<double>()) << ',' << p.at("aggregation_bits_per_output").get<std::uint64_t>()
          << ',' << fmt(cpu) << ",\n";
    } else {
      out << ",,,,,,,,,," << '"' << row.at("error").get<std::string>() << "\"\n";
    }
  }
  return out.str();
}

std::string capacity_to_csv(const nlohmann::json& report) {
  std::ostringstream out;
  out << "n_tile,wbits,abits,r,constant_rows,matrix_rows,complement_rows,compute_rows,output_rows,total_rows,"
         "overhead_ratio,error\n";
  for (const auto& row : report.at("rows")) {
    out << row.at("n_tile").get<std::uint32_t>() << ',' << row.at("wbits").get<unsigned>() << ','
        << row.at("abits").get<unsigned>() << ',';
    if (row.contains("capacity")) {
      const auto& c = row.at("capacity");
      out << row.at("r").get<unsigned>() << ',' << c.at("constant_rows").get<std::uint64_t>() << ','
          << c.at("matrix_rows").get<std::uint64_t>() << ',' << c.at("complement_rows").get<std::uint64_t>() << ','
          << c.at("compute_rows").get<std::uint64_t>() << ',' << c.at("output_rows").get<std::uint64_t>() << ','
          << c.at("total_rows").get<std::uint64_t>() << ',' << fmt(c.at("overhead_ratio").get<double>()) << ",\n";
    } else {
      out << ",,,,,,,," << '"' << row.at("error").get<std::string>() << "\"\n";
    }
  }
  return out.str();
}

}  // namespace mvdram
