#include "mvdram/reliability.hpp"

#include <algorithm>
#include <fstream>

#include "mvdram/errors.hpp"
#include "mvdram/hash.hpp"

namespace mvdram {

std::string_view to_string(FaultMode mode) {
  switch (mode) {
    case FaultMode::StuckRandom:
      return "stuck-random";
    case FaultMode::Flip:
      return "flip";
  }
  return "flip";
}

FaultMode parse_fault_mode(std::string_view text) {
  if (text == "stuck-random") return FaultMode::StuckRandom;
  if (text == "flip") return FaultMode::Flip;
  throw ConfigError("unknown fault mode '" + std::string(text) + "'");
}

std::vector<ColumnRun> ReliabilityProfile::reliable_runs() const {
  std::vector<ColumnRun> runs;
  const auto n = static_cast<ColumnIndex>(column_count());
  ColumnIndex c = 0;
  while (c < n) {
    if (!reliable_mask.get(c)) {
      ++c;
      continue;
    }
    const ColumnIndex start = c;
    while (c < n && reliable_mask.get(c)) ++c;
    runs.push_back({start, c - start});
  }
  return runs;
}

std::vector<ColumnIndex> ReliabilityProfile::unreliable_columns() const {
  std::vector<ColumnIndex> cols;
  for (ColumnIndex c = 0; c < column_count(); ++c) {
    if (!reliable_mask.get(c)) cols.push_back(c);
  }
  return cols;
}

ReliabilityProfile ReliabilityProfile::all_reliable(std::size_t column_count, std::uint64_t fault_seed) {
  ReliabilityProfile p;
  p.name = "all-reliable";
  p.reliable_mask = BitVector(column_count, true);
  p.fault_seed = fault_seed;
  return p;
}

ReliabilityProfile ReliabilityProfile::from_runs(std::size_t column_count, const std::vector<ColumnRun>& runs,
                                                 std::uint64_t fault_seed, FaultMode mode) {
  ReliabilityProfile p;
  p.name = "custom";
  p.reliable_mask = BitVector(column_count, false);
  p.fault_seed = fault_seed;
  p.fault_mode = mode;
  for (const auto& run : runs) {
    if (std::uint64_t{run.start} + run.length > column_count) {
      throw ConfigError("reliable run [" + std::to_string(run.start) + "," + std::to_string(run.length) +
                        "] exceeds column_count " + std::to_string(column_count));
    }
    for (ColumnIndex c = run.start; c < run.start + run.length; ++c) p.reliable_mask.set(c, true);
  }
  return p;
}

bool is_builtin_profile(std::string_view name) {
  if (name == "all-reliable") return true;
  return std::any_of(kModuleReliability.begin(), kModuleReliability.end(),
                     [&](const ModuleReliability& m) { return m.name == name; });
}

ReliabilityProfile builtin_profile(std::string_view name, std::size_t column_count) {
  if (name == "all-reliable") return ReliabilityProfile::all_reliable(column_count);

  const auto it = std::find_if(kModuleReliability.begin(), kModuleReliability.end(),
                               [&](const ModuleReliability& m) { return m.name == name; });
  if (it == kModuleReliability.end()) throw ConfigError("unknown reliability profile '" + std::string(name) + "'");
  if (column_count != kModuleColumns) {
    throw ConfigError("profile '" + std::string(name) + "' is defined for " + std::to_string(kModuleColumns) +
                      " columns, geometry has " + std::to_string(column_count));
  }

  const auto index = static_cast<std::uint64_t>(it - kModuleReliability.begin());
  ReliabilityProfile p = ReliabilityProfile::all_reliable(column_count, splitmix64(0xD7A30000 + index));
  p.name = std::string(name);

  // Faults cluster in short runs of 1-8 columns at seeded positions.
  std::uint64_t state = 0x5EED0000 + index;
  std::size_t remaining = kModuleColumns - it->min_reliable;
  while (remaining > 0) {
    state = splitmix64(state);
    const auto start = static_cast<ColumnIndex>(state % column_count);
    const auto length = static_cast<ColumnIndex>(1 + (state >> 32) % 8);
    for (ColumnIndex c = start; c < start + length && c < column_count && remaining > 0; ++c) {
      if (p.reliable_mask.get(c)) {
        p.reliable_mask.set(c, false);
        --remaining;
      }
    }
  }
  return p;
}

ReliabilityProfile profile_from_json(const nlohmann::json& doc) {
  try {
    const auto columns = doc.at("column_count").get<std::int64_t>();
    if (columns < 1) throw ConfigError("column_count must be >= 1");
    std::vector<ColumnRun> runs;
    for (const auto& r : doc.at("reliable_runs")) {
      if (!r.is_array() || r.size() != 2) throw ConfigError("reliable_runs entries must be [start,len]");
      const auto start = r[0].get<std::int64_t>();
      const auto len = r[1].get<std::int64_t>();
      if (start < 0 || len < 0) throw ConfigError("reliable run fields must be non-negative");
      runs.push_back({static_cast<ColumnIndex>(start), static_cast<ColumnIndex>(len)});
    }
    const auto seed = doc.value("fault_seed", std::uint64_t{0});
    const auto mode = parse_fault_mode(doc.value("fault_mode", std::string("flip")));
    auto p = ReliabilityProfile::from_runs(static_cast<std::size_t>(columns), runs, seed, mode);
    p.name = doc.value("name", std::string("custom"));
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed reliability profile: ") + e.what());
  }
}

nlohmann::json profile_to_json(const ReliabilityProfile& profile) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : profile.reliable_runs()) runs.push_back({r.start, r.length});
  return {{"name", profile.name},
          {"column_count", profile.column_count()},
          {"reliable_runs", std::move(runs)},
          {"fault_seed", profile.fault_seed},
          {"fault_mode", std::string(to_string(profile.fault_mode))}};
}

ReliabilityProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open reliability profile '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse reliability profile '" + path.string() + "': " + e.what());
  }
  return profile_from_json(doc);
}

ReliabilityProfile resolve_profile(std::string_view name_or_path, std::size_t column_count) {
  if (is_builtin_profile(name_or_path)) return builtin_profile(name_or_path, column_count);
  auto p = load_profile(std::filesystem::path(std::string(name_or_path)));
  if (p.column_count() != column_count) {
    throw ConfigError("profile column_count " + std::to_string(p.column_count()) + " does not match geometry " +
                      std::to_string(column_count));
  }
  return p;
}

std::vector<ColumnIndex> usable_column_groups(const ReliabilityProfile& profile, unsigned width) {
  std::vector<ColumnIndex> starts;
  if (width == 0) return starts;
  for (const auto& run : profile.reliable_runs()) {
    for (ColumnIndex c = run.start; c + width <= run.start + run.length; c += width) starts.push_back(c);
  }
  return starts;
}

}  // namespace mvdram
