#include "mvdram/trace.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "mvdram/errors.hpp"

namespace mvdram {

MajX::MajX(std::initializer_list<RowIndex> group) : MajX(std::span<const RowIndex>(group.begin(), group.size())) {}

MajX::MajX(std::span<const RowIndex> group) {
  if (group.size() > kMaxMajRows) throw GroupError("MAJ group of size " + std::to_string(group.size()));
  std::copy(group.begin(), group.end(), rows.begin());
  count = static_cast<std::uint8_t>(group.size());
}

bool operator==(const MajX& a, const MajX& b) { return std::ranges::equal(a.group(), b.group()); }

void CommandStats::count(const PudCommand& cmd) {
  std::visit(
      [this](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, RowCopy>) {
          ++row_copies;
        } else if constexpr (std::is_same_v<T, MajX>) {
          ++majs;
        } else {
          ++host_reads;
        }
      },
      cmd);
}

CommandStats& CommandStats::operator+=(const CommandStats& other) {
  row_copies += other.row_copies;
  majs += other.majs;
  host_reads += other.host_reads;
  return *this;
}

CommandStats recount(std::span<const PudCommand> commands) {
  CommandStats s;
  for (const auto& c : commands) s.count(c);
  return s;
}

void Trace::append(const Trace& other) {
  commands_.insert(commands_.end(), other.commands_.begin(), other.commands_.end());
  stats_ += other.stats_;
}

std::string Trace::to_text() const {
  std::string out;
  out.reserve(commands_.size() * 12);
  for (const auto& cmd : commands_) {
    if (const auto* rc = std::get_if<RowCopy>(&cmd)) {
      out += "RC " + std::to_string(rc->src) + ' ' + std::to_string(rc->dst);
    } else if (const auto* mj = std::get_if<MajX>(&cmd)) {
      out += "MAJ ";
      for (std::size_t i = 0; i < mj->count; ++i) {
        if (i) out += ',';
        out += std::to_string(mj->rows[i]);
      }
    } else {
      out += "RD " + std::to_string(std::get<HostRead>(cmd).row);
    }
    out += '\n';
  }
  return out;
}

namespace {

RowIndex parse_row(std::string_view tok, std::size_t line) {
  RowIndex v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ConfigError("trace line " + std::to_string(line) + ": bad row '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace

Trace Trace::from_text(std::string_view text, std::uint32_t subarray_id) {
  Trace t(subarray_id);
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string op;
    ls >> op;
    if (op == "RC") {
      std::string a, b;
      ls >> a >> b;
      t.push(RowCopy{parse_row(a, lineno), parse_row(b, lineno)});
    } else if (op == "MAJ") {
      std::string list;
      ls >> list;
      std::vector<RowIndex> rows;
      std::string_view rest = list;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        rows.push_back(parse_row(rest.substr(0, comma), lineno));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
      t.push(MajX(std::span<const RowIndex>(rows)));
    } else if (op == "RD") {
      std::string a;
      ls >> a;
      t.push(HostRead{parse_row(a, lineno)});
    } else {
      throw ConfigError("trace line " + std::to_string(lineno) + ": unknown op '" + op + "'");
    }
  }
  return t;
}

ValidationReport validate_trace(const Trace& trace, const SubarrayGeometry& geometry) {
  ValidationReport report;
  const auto& cmds = trace.commands();
  auto check = [&](std::size_t i, RowIndex row) {
    if (row >= geometry.row_count) {
      report.findings.push_back({i, "row " + std::to_string(row) + " out of range"});
    }
  };
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    if (const auto* rc = std::get_if<RowCopy>(&cmds[i])) {
      check(i, rc->src);
      check(i, rc->dst);
    } else if (const auto* mj = std::get_if<MajX>(&cmds[i])) {
      const auto group = mj->group();
      if (group.size() < kMinMajRows || group.size() > kMaxMajRows || group.size() % 2 == 0) {
        report.findings.push_back({i, "invalid group size " + std::to_string(group.size())});
      }
      for (std::size_t a = 0; a < group.size(); ++a) {
        check(i, group[a]);
        for (std::size_t b = 0; b < a; ++b) {
          if (group[a] == group[b]) report.findings.push_back({i, "duplicate row " + std::to_string(group[a])});
        }
      }
    } else {
      check(i, std::get<HostRead>(cmds[i]).row);
    }
  }
  if (recount(cmds) != trace.stats()) report.findings.push_back({cmds.size(), "stats mismatch"});
  return report;
}

}  // namespace mvdram
