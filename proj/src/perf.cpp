#include "mvdram/perf.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

#include "mvdram/errors.hpp"

namespace mvdram {

std::string_view to_string(OverlapModel model) {
  return model == OverlapModel::CommandBus ? "command-bus" : "bank-parallel";
}

OverlapModel parse_overlap_model(std::string_view text) {
  if (text == "command-bus") return OverlapModel::CommandBus;
  if (text == "bank-parallel") return OverlapModel::BankParallel;
  throw ConfigError("unknown overlap model '" + std::string(text) + "'");
}

void TimingConfig::validate() const {
  if (!(t_cmd_ns > 0) || !(rowcopy_slots > 0) || !(maj_slots > 0) || !(host_read_ns_per_row > 0) ||
      parallel_channels == 0 || banks_per_channel == 0) {
    throw ConfigError("timing parameters must be strictly positive");
  }
}

TimingConfig timing_from_json(const nlohmann::json& doc) {
  TimingConfig t;
  try {
    t.t_cmd_ns = doc.value("t_cmd_ns", t.t_cmd_ns);
    t.rowcopy_slots = doc.value("rowcopy_slots", t.rowcopy_slots);
    t.maj_slots = doc.value("maj_slots", t.maj_slots);
    t.host_read_ns_per_row = doc.value("host_read_ns_per_row", t.host_read_ns_per_row);
    t.parallel_channels = doc.value("parallel_channels", t.parallel_channels);
    t.banks_per_channel = doc.value("banks_per_channel", t.banks_per_channel);
    if (doc.contains("overlap")) t.overlap = parse_overlap_model(doc.at("overlap").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("timing config: ") + e.what());
  }
  t.validate();
  return t;
}

nlohmann::json timing_to_json(const TimingConfig& t) {
  return {{"t_cmd_ns", t.t_cmd_ns},
          {"rowcopy_slots", t.rowcopy_slots},
          {"maj_slots", t.maj_slots},
          {"host_read_ns_per_row", t.host_read_ns_per_row},
          {"parallel_channels", t.parallel_channels},
          {"banks_per_channel", t.banks_per_channel},
          {"overlap", std::string(to_string(t.overlap))}};
}

TimingConfig load_timing(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open timing config " + path.string());
  try {
    return timing_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("timing config " + path.string() + ": " + e.what());
  }
}

double trace_energy(const CommandStats& stats, const EnergyConfig& energy, double read_fraction) {
  return static_cast<double>(stats.row_copies) * energy.rowcopy_nj + static_cast<double>(stats.majs) * energy.maj_nj +
         static_cast<double>(stats.host_reads) * energy.host_read_nj_per_row * read_fraction;
}

std::vector<Baseline> default_baselines() {
  const std::string shape = "published, 32000x4096 GeMV, 2-bit weights, 1-bit activations";
  return {
      {"cpu", 1.44, shape + ", CPU"},
      {"gpu", 1.70, shape + ", GPU"},
      {"measured-total", 0.19, shape + ", measured in-DRAM total"},
      {"measured-in-dram", 0.14, shape + ", measured in-DRAM computation"},
      {"measured-aggregation", 0.05, shape + ", measured result aggregation"},
  };
}

std::vector<Baseline> baselines_from_json(const nlohmann::json& doc) {
  std::vector<Baseline> out;
  try {
    for (const auto& e : doc.is_array() ? doc : doc.at("baselines")) {
      out.push_back({e.at("name").get<std::string>(), e.at("value_ms").get<double>(),
                     e.at("provenance").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("baseline table: ") + e.what());
  }
  return out;
}

PerfReport estimate(std::span<const Trace> traces, const GemvPlan& plan, const TimingConfig& timing,
                    const EnergyConfig& energy) {
  timing.validate();
  if (traces.size() != plan.tiles.size()) {
    throw ConfigError("estimate: " + std::to_string(traces.size()) + " traces for " +
                      std::to_string(plan.tiles.size()) + " tiles");
  }
  const std::uint32_t channels = timing.parallel_channels;
  PerfReport r;
  r.tiles = static_cast<std::uint32_t>(traces.size());
  r.channels.assign(channels, {});
  std::vector<std::vector<double>> bank_slots(channels, std::vector<double>(timing.banks_per_channel, 0.0));

  const double columns = plan.geometry.column_count;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& stats = traces[i].stats();
    r.commands += stats;
    const double slots = timing.slots(stats);
    const auto ch = static_cast<std::uint32_t>(i % channels);
    const auto bank = static_cast<std::uint32_t>((i / channels) % timing.banks_per_channel);
    r.channels[ch].tiles += 1;
    r.channels[ch].slots += slots;
    bank_slots[ch][bank] += slots;
    const double fraction = plan.tiles[i].column_span() / columns;
    r.aggregation_latency_ns += static_cast<double>(stats.host_reads) * timing.host_read_ns_per_row * fraction;
    r.energy_nj += trace_energy(stats, energy, fraction);
  }
  for (std::uint32_t c = 0; c < channels; ++c) {
    const double slots = timing.overlap == OverlapModel::CommandBus
                             ? r.channels[c].slots
                             : *std::max_element(bank_slots[c].begin(), bank_slots[c].end());
    r.channels[c].latency_ns = slots * timing.t_cmd_ns;
    r.in_dram_latency_ns = std::max(r.in_dram_latency_ns, r.channels[c].latency_ns);
  }
  r.total_ns = r.in_dram_latency_ns + r.aggregation_latency_ns;

  std::map<std::uint32_t, unsigned> width_by_span;
  for (const auto& t : plan.tiles) width_by_span[t.n0] = t.shape.r;
  for (const auto& [n0, width] : width_by_span) r.aggregation_bits_per_output += std::uint64_t{plan.shape.q_w} * width;
  for (const auto& t : plan.tiles) r.aggregation_bits_total += std::uint64_t{t.m_count()} * plan.shape.q_w * t.shape.r;
  r.capacity = plan.capacity;
  r.comparisons = compare_baselines(r, default_baselines());
  return r;
}

std::vector<BaselineComparison> compare_baselines(const PerfReport& report, std::span<const Baseline> table,
                                                  std::span<const std::string> names) {
  const double modeled_ms = report.total_ns * 1e-6;
  auto row = [&](const Baseline& b) {
    return BaselineComparison{b.name, b.value_ms, modeled_ms, modeled_ms > 0 ? b.value_ms / modeled_ms : 0.0,
                              b.provenance};
  };
  std::vector<BaselineComparison> out;
  if (names.empty()) {
    for (const auto& b : table) out.push_back(row(b));
    return out;
  }
  for (const auto& name : names) {
    auto it = std::find_if(table.begin(), table.end(), [&](const Baseline& b) { return b.name == name; });
    if (it == table.end()) throw LookupError("unknown baseline '" + name + "'");
    out.push_back(row(*it));
  }
  return out;
}

nlohmann::json perf_to_json(const PerfReport& r) {
  nlohmann::json channels = nlohmann::json::array();
  for (const auto& c : r.channels) {
    channels.push_back({{"tiles", c.tiles}, {"slots", c.slots}, {"latency_ns", c.latency_ns}});
  }
  nlohmann::json comparisons = nlohmann::json::array();
  for (const auto& c : r.comparisons) {
    comparisons.push_back({{"baseline", c.name},
                           {"baseline_ms", c.baseline_ms},
                           {"modeled_ms", c.modeled_ms},
                           {"speedup", c.speedup},
                           {"provenance", c.provenance}});
  }
  return {{"commands",
           {{"row_copy", r.commands.row_copies},
            {"maj", r.commands.majs},
            {"host_read", r.commands.host_reads},
            {"in_dram", r.commands.in_dram()},
            {"total", r.commands.total()}}},
          {"tiles", r.tiles},
          {"channels", std::move(channels)},
          {"in_dram_latency_ns", r.in_dram_latency_ns},
          {"aggregation_latency_ns", r.aggregation_latency_ns},
          {"total_ns", r.total_ns},
          {"energy_nj", r.energy_nj},
          {"aggregation_bits_per_output", r.aggregation_bits_per_output},
          {"aggregation_bits_per_output_reference", kReferenceAggregationBits},
          {"aggregation_bits_total", r.aggregation_bits_total},
          {"capacity", capacity_to_json(r.capacity)},
          {"comparisons", std::move(comparisons)}};
}

std::string perf_csv_header() {
  return "tiles,row_copy,maj,host_read,in_dram_latency_ns,aggregation_latency_ns,total_ns,energy_nj,"
         "aggregation_bits_per_output,speedup_vs_cpu";
}

std::string perf_csv_row(const PerfReport& r) {
  double cpu = 0.0;
  for (const auto& c : r.comparisons) {
    if (c.name == "cpu") cpu = c.speedup;
  }
  char buf[512];
  std::snprintf(buf, sizeof buf, "%u,%llu,%llu,%llu,%.3f,%.3f,%.3f,%.3f,%llu,%.4f", r.tiles,
                static_cast<unsigned long long>(r.commands.row_copies), static_cast<unsigned long long>(r.commands.majs),
                static_cast<unsigned long long>(r.commands.host_reads), r.in_dram_latency_ns,
                r.aggregation_latency_ns, r.total_ns, r.energy_nj,
                static_cast<unsigned long long>(r.aggregation_bits_per_output), cpu);
  return buf;
}

}  // namespace mvdram
