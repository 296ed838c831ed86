#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mvdram/bitvector.hpp"
#include "mvdram/subarray.hpp"

namespace mvdram {

struct RowCopy {
  RowIndex src = 0;
  RowIndex dst = 0;
  friend bool operator==(const RowCopy&, const RowCopy&) = default;
};

struct MajX {
  std::array<RowIndex, kMaxMajRows> rows{};
  std::uint8_t count = 0;

  MajX() = default;
  MajX(std::initializer_list<RowIndex> group);
  explicit MajX(std::span<const RowIndex> group);

  std::span<const RowIndex> group() const { return {rows.data(), count}; }
  friend bool operator==(const MajX& a, const MajX& b);
};

/// Host-side read of one row; never mutates state, carried for cost accounting.
struct HostRead {
  RowIndex row = 0;
  friend bool operator==(const HostRead&, const HostRead&) = default;
};

using PudCommand = std::variant<RowCopy, MajX, HostRead>;

struct CommandStats {
  std::uint64_t row_copies = 0;
  std::uint64_t majs = 0;
  std::uint64_t host_reads = 0;

  std::uint64_t in_dram() const { return row_copies + majs; }
  std::uint64_t total() const { return row_copies + majs + host_reads; }
  void count(const PudCommand& cmd);
  CommandStats& operator+=(const CommandStats& other);
  friend bool operator==(const CommandStats&, const CommandStats&) = default;
};

class Trace {
 public:
  explicit Trace(std::uint32_t subarray_id = 0) : subarray_id_(subarray_id) {}
  /// Adopts externally produced commands and stats verbatim; validate_trace reports disagreement.
  Trace(std::uint32_t subarray_id, std::vector<PudCommand> commands, CommandStats stats)
      : subarray_id_(subarray_id), commands_(std::move(commands)), stats_(stats) {}

  std::uint32_t subarray_id() const { return subarray_id_; }
  void set_subarray_id(std::uint32_t id) { subarray_id_ = id; }

  void push(const PudCommand& cmd) {
    commands_.push_back(cmd);
    stats_.count(cmd);
  }
  void append(const Trace& other);
  void reserve(std::size_t n) { commands_.reserve(n); }

  const std::vector<PudCommand>& commands() const { return commands_; }
  std::vector<PudCommand>& mutable_commands() { return commands_; }
  const CommandStats& stats() const { return stats_; }
  std::size_t size() const { return commands_.size(); }
  bool empty() const { return commands_.empty(); }

  /// One command per line: `RC src dst`, `MAJ r1,r2,...`, `RD row`.
  std::string to_text() const;
  static Trace from_text(std::string_view text, std::uint32_t subarray_id = 0);

 private:
  std::uint32_t subarray_id_;
  std::vector<PudCommand> commands_;
  CommandStats stats_;
};

CommandStats recount(std::span<const PudCommand> commands);

struct ValidationFinding {
  std::size_t command_index;  // == commands().size() for trace-level findings
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationFinding> findings;
  bool valid() const { return findings.empty(); }
};

ValidationReport validate_trace(const Trace& trace, const SubarrayGeometry& geometry);

}  // namespace mvdram
