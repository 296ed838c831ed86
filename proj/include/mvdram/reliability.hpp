#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mvdram/bitvector.hpp"
#include "json.hpp"

namespace mvdram {

/// How a MAJ result is corrupted on a column marked unreliable.
enum class FaultMode : std::uint8_t {
  StuckRandom,  // seeded constant bit per column
  Flip,         // true majority XOR a seeded bit per (column, op ordinal)
};

std::string_view to_string(FaultMode mode);
FaultMode parse_fault_mode(std::string_view text);

struct ColumnRun {
  ColumnIndex start = 0;
  ColumnIndex length = 0;
  friend bool operator==(const ColumnRun&, const ColumnRun&) = default;
};

struct ReliabilityProfile {
  std::string name = "all-reliable";
  BitVector reliable_mask;  // 1 = reliable
  std::uint64_t fault_seed = 0;
  FaultMode fault_mode = FaultMode::Flip;

  std::size_t column_count() const { return reliable_mask.size(); }
  std::size_t reliable_count() const { return reliable_mask.popcount(); }
  bool reliable(ColumnIndex c) const { return reliable_mask.get(c); }

  std::vector<ColumnRun> reliable_runs() const;
  std::vector<ColumnIndex> unreliable_columns() const;

  static ReliabilityProfile all_reliable(std::size_t column_count, std::uint64_t fault_seed = 0);
  static ReliabilityProfile from_runs(std::size_t column_count, const std::vector<ColumnRun>& runs,
                                      std::uint64_t fault_seed, FaultMode mode = FaultMode::Flip);
};

/// Minimum and maximum reliable-column counts measured per DDR4 module (of 65,536 columns).
struct ModuleReliability {
  std::string_view name;
  std::uint32_t min_reliable;
  std::uint32_t max_reliable;
};

inline constexpr std::array<ModuleReliability, 4> kModuleReliability{{
    {"module1", 61727, 62826},
    {"module2", 62300, 62483},
    {"module3", 54365, 62329},
    {"module4", 54712, 62925},
}};

inline constexpr std::uint32_t kModuleColumns = 65536;

/// "all-reliable" (any width) or "module1".."module4" (65,536 columns, popcount = listed minimum).
/// Unreliable columns are laid out as seeded short clusters.
ReliabilityProfile builtin_profile(std::string_view name, std::size_t column_count = kModuleColumns);
bool is_builtin_profile(std::string_view name);

/// { "column_count": int, "reliable_runs": [[start,len],...], "fault_seed": int, "fault_mode"?: str }
ReliabilityProfile profile_from_json(const nlohmann::json& doc);
nlohmann::json profile_to_json(const ReliabilityProfile& profile);
ReliabilityProfile load_profile(const std::filesystem::path& path);

/// Resolves a built-in name first, then a JSON file path.
ReliabilityProfile resolve_profile(std::string_view name_or_path, std::size_t column_count);

/// Greedy left-to-right starts of consecutive reliable column runs of length `width`.
std::vector<ColumnIndex> usable_column_groups(const ReliabilityProfile& profile, unsigned width);

}  // namespace mvdram
