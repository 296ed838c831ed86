#include "mvdram/templates.hpp"

#include <mutex>
#include <string>

#include "mvdram/errors.hpp"

namespace mvdram {

TraceTemplate::TraceTemplate(TemplateKey key, std::vector<PudCommand> commands, std::vector<std::size_t> slots,
                             AccumulatorState state_out, bool final_plane)
    : key_(key),
      commands_(std::move(commands)),
      slots_(std::move(slots)),
      stats_(recount(commands_)),
      state_out_(state_out),
      final_(final_plane) {}

void TraceTemplate::instantiate(std::span<const DualTrackCell> sources, Trace& out) const {
  if (sources.size() != slots_.size()) {
    throw ConfigError("template has " + std::to_string(slots_.size()) + " slots, got " +
                      std::to_string(sources.size()) + " sources");
  }
  std::vector<PudCommand> cmds = commands_;
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    std::get<RowCopy>(cmds[slots_[s]]).src = sources[s].pos;
    std::get<RowCopy>(cmds[slots_[s] + 1]).src = sources[s].neg;
  }
  out.append(Trace(out.subarray_id(), std::move(cmds), stats_));
}

TraceTemplate build_mac_template(const TileShape& shape, std::uint32_t bucket, const RegionMap& map, unsigned plane,
                                 const AccumulatorState& state) {
  const unsigned needed = shape.q_a + ceil_log2(shape.n_tile) + 1;
  if (shape.r < needed) {
    throw PlanError("accumulator width " + std::to_string(shape.r) + " too small for N_tile=" +
                    std::to_string(shape.n_tile) + ", q_a=" + std::to_string(shape.q_a) + " (needs " +
                    std::to_string(needed) + ")");
  }
  if (bucket > shape.n_tile) {
    throw PlanError("popcount " + std::to_string(bucket) + " exceeds tile span " + std::to_string(shape.n_tile));
  }
  if (plane >= shape.q_a) throw PlanError("plane " + std::to_string(plane) + " out of range");
  if (map.width() != shape.r || map.matrix_rows.size() != shape.n_tile) {
    throw PlanError("region map does not match tile shape");
  }

  TraceBuilder builder;
  Accumulator acc = map.make_accumulator(state);
  std::vector<std::size_t> slots;
  slots.reserve(bucket);
  if (plane == 0) acc.clear_outputs(builder);
  for (std::uint32_t s = 0; s < bucket; ++s) {
    const DualTrackCell stage = acc.staging_cell(plane);
    slots.push_back(builder.size());
    builder.row_copy(kSlotPlaceholder, stage.pos);
    builder.row_copy(kSlotPlaceholder, stage.neg);
    acc.add(builder, stage, plane);
  }
  const bool final_plane = plane + 1 == shape.q_a;
  acc.flush(builder);
  if (final_plane) {
    for (auto row : map.output_rows) builder.host_read(row);
  }
  Trace trace = builder.take();
  return TraceTemplate(TemplateKey{shape, plane, state, bucket}, std::move(trace.mutable_commands()),
                       std::move(slots), acc.state(), final_plane);
}

std::shared_ptr<const TraceTemplate> TemplateStore::get(const TemplateKey& key) {
  {
    std::shared_lock lock(mutex_);
    if (auto it = templates_.find(key); it != templates_.end()) {
      ++hits_;
      return it->second;
    }
  }
  ++misses_;
  const RegionMap map = make_region_map(key.shape.n_tile, key.shape.r);
  auto built = std::make_shared<const TraceTemplate>(
      build_mac_template(key.shape, key.popcount, map, key.plane, key.state));
  std::unique_lock lock(mutex_);
  return templates_.emplace(key, std::move(built)).first->second;
}

std::size_t TemplateStore::size() const {
  std::shared_lock lock(mutex_);
  return templates_.size();
}

std::uint64_t TemplateStore::hits() const { return hits_.load(); }
std::uint64_t TemplateStore::misses() const { return misses_.load(); }

}  // namespace mvdram
