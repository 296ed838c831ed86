#pragma once

#include <atomic>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <shared_mutex>
#include <span>
#include <vector>

#include "mvdram/layout.hpp"
#include "mvdram/trace.hpp"

namespace mvdram {

/// Placeholder source row in an uninstantiated slot.
inline constexpr RowIndex kSlotPlaceholder = 0xFFFFFFFFu;

/// One activation bit-plane of one tile. The command skeleton depends on the tile shape, the
/// plane index (shift), the accumulator state earlier planes left behind, and the plane's
/// popcount; the activation pattern only decides which matrix rows fill the slots.
struct TemplateKey {
  TileShape shape;
  unsigned plane = 0;
  AccumulatorState state;
  std::uint32_t popcount = 0;
  friend auto operator<=>(const TemplateKey&, const TemplateKey&) = default;
};

class TraceTemplate {
 public:
  TraceTemplate(TemplateKey key, std::vector<PudCommand> commands, std::vector<std::size_t> slots,
                AccumulatorState state_out, bool final_plane);

  const TemplateKey& key() const { return key_; }
  std::size_t slot_count() const { return slots_.size(); }
  /// Index, within commands(), of each slot's pos RowCopy; the complement copy follows it.
  std::span<const std::size_t> slot_positions() const { return slots_; }
  const std::vector<PudCommand>& commands() const { return commands_; }
  const CommandStats& stats() const { return stats_; }
  const AccumulatorState& state_out() const { return state_out_; }
  bool final_plane() const { return final_; }

  /// Appends the skeleton to `out`, slot s reading from sources[s] (pos and complement rows).
  void instantiate(std::span<const DualTrackCell> sources, Trace& out) const;

 private:
  TemplateKey key_;
  std::vector<PudCommand> commands_;
  std::vector<std::size_t> slots_;
  CommandStats stats_;
  AccumulatorState state_out_;
  bool final_;
};

/// Builds the skeleton for `bucket` set bits of plane `plane`, starting from accumulator state
/// `state`. Each slot stages one activation element into the accumulator with shift `plane`.
/// The last plane (plane == q_a - 1) also zero-fills untouched output rows and reads all r rows.
/// Throws PlanError when r < q_a + ceil(log2(N_tile)) + 1 or bucket > N_tile.
TraceTemplate build_mac_template(const TileShape& shape, std::uint32_t bucket, const RegionMap& map,
                                 unsigned plane = 0, const AccumulatorState& state = {});

/// Cache of immutable templates. Lookups take a shared lock; a miss builds outside the lock and
/// inserts under an exclusive one (first insert wins).
class TemplateStore {
 public:
  std::shared_ptr<const TraceTemplate> get(const TemplateKey& key);
  std::size_t size() const;
  std::uint64_t hits() const;
  std::uint64_t misses() const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<TemplateKey, std::shared_ptr<const TraceTemplate>> templates_;
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
};

}  // namespace mvdram
