#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvdram/layout.hpp"
#include "mvdram/trace.hpp"
#include "json.hpp"

namespace mvdram {

enum class OverlapModel : std::uint8_t {
  CommandBus,    // a channel's command bus serializes every slot of every tile on it
  BankParallel,  // tiles on distinct banks of a channel run fully overlapped
};

std::string_view to_string(OverlapModel model);
OverlapModel parse_overlap_model(std::string_view text);

struct TimingConfig {
  double t_cmd_ns = 1.5;
  double rowcopy_slots = 2.0;  // PRE, ACT
  double maj_slots = 3.0;      // ACT, PRE, ACT
  /// One full 8 KiB row over 76.8 GB/s (four DDR4-2400 channels).
  double host_read_ns_per_row = 8192.0 / 76.8;
  std::uint32_t parallel_channels = 4;
  std::uint32_t banks_per_channel = 16;
  OverlapModel overlap = OverlapModel::CommandBus;

  void validate() const;
  double slots(const CommandStats& s) const {
    return static_cast<double>(s.row_copies) * rowcopy_slots + static_cast<double>(s.majs) * maj_slots;
  }
};

TimingConfig timing_from_json(const nlohmann::json& doc);
nlohmann::json timing_to_json(const TimingConfig& t);
TimingConfig load_timing(const std::filesystem::path& path);

/// Per-command energy. Defaults are order-of-magnitude placeholders, not a calibrated model.
struct EnergyConfig {
  double rowcopy_nj = 2.0;
  double maj_nj = 3.0;
  double host_read_nj_per_row = 1300.0;
  std::string provenance = "placeholder magnitudes (not calibrated)";
};

/// Host reads are charged for `read_fraction` of a full row.
double trace_energy(const CommandStats& stats, const EnergyConfig& energy, double read_fraction = 1.0);

struct Baseline {
  std::string name;
  double value_ms = 0.0;
  std::string provenance;
};

/// Published constants for the 32000x4096 GeMV at 2-bit weights; none are measured here.
std::vector<Baseline> default_baselines();
/// Accepts a bare array of {name, value_ms, provenance} or an object holding it under "baselines".
std::vector<Baseline> baselines_from_json(const nlohmann::json& doc);

struct BaselineComparison {
  std::string name;
  double baseline_ms = 0.0;
  double modeled_ms = 0.0;
  double speedup = 0.0;  // baseline / modeled
  std::string provenance;
};

struct ChannelLoad {
  std::uint32_t tiles = 0;
  double slots = 0.0;
  double latency_ns = 0.0;
};

struct PerfReport {
  CommandStats commands;
  std::uint32_t tiles = 0;
  std::vector<ChannelLoad> channels;
  double in_dram_latency_ns = 0.0;
  double aggregation_latency_ns = 0.0;
  double total_ns = 0.0;
  double energy_nj = 0.0;
  std::uint64_t aggregation_bits_per_output = 0;  // q_w * r per n-span tile, summed over spans
  std::uint64_t aggregation_bits_total = 0;
  CapacityBreakdown capacity;
  std::vector<BaselineComparison> comparisons;
};

/// Tile i goes to channel i % C and bank (i / C) % B. In-DRAM latency is the slowest channel.
/// Aggregation charges each HostRead the share of a row its tile's columns cover.
PerfReport estimate(std::span<const Trace> traces, const GemvPlan& plan, const TimingConfig& timing,
                    const EnergyConfig& energy = {});

/// Speedups of `report` against the named baselines (all of them when names is empty).
/// Throws LookupError on an unknown name.
std::vector<BaselineComparison> compare_baselines(const PerfReport& report, std::span<const Baseline> table,
                                                  std::span<const std::string> names = {});

/// Aggregation bits per output as quoted for the reference measurement; not derivable from the plan.
inline constexpr std::uint64_t kReferenceAggregationBits = 384;

nlohmann::json perf_to_json(const PerfReport& report);
std::string perf_csv_header();
std::string perf_csv_row(const PerfReport& report);

}  // namespace mvdram
