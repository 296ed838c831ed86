#include "mvdram/io.hpp"

#include <array>
#include <fstream>
#include <string>

#include "mvdram/errors.hpp"

namespace mvdram::io {

namespace {

struct Header {
  std::int32_t rows = 0, cols = 0, bits = 0, flags = 0;
};

template <typename T>
void put_le(std::ostream& out, T value) {
  auto u = static_cast<std::make_unsigned_t<T>>(value);
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((u >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in, const std::filesystem::path& path) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw ConfigError("truncated file " + path.string());
  }
  std::make_unsigned_t<T> u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<std::make_unsigned_t<T>>(bytes[i]) << (8 * i);
  return static_cast<T>(u);
}

std::ofstream open_out(const std::filesystem::path& path, const Header& h) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  put_le(out, h.rows);
  put_le(out, h.cols);
  put_le(out, h.bits);
  put_le(out, h.flags);
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, Header& h) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  h.rows = get_le<std::int32_t>(in, path);
  h.cols = get_le<std::int32_t>(in, path);
  h.bits = get_le<std::int32_t>(in, path);
  h.flags = get_le<std::int32_t>(in, path);
  if (h.rows < 1 || h.cols < 1) throw ConfigError("bad dimensions in " + path.string());
  return in;
}

void finish(std::ostream& out, const std::filesystem::path& path) {
  if (!out.flush()) throw ConfigError("write failed for " + path.string());
}

}  // namespace

void write_matrix(const std::filesystem::path& path, const QuantizedMatrix& matrix) {
  auto out = open_out(path, {static_cast<std::int32_t>(matrix.rows()), static_cast<std::int32_t>(matrix.cols()),
                             static_cast<std::int32_t>(matrix.bits()), matrix.is_signed() ? kFlagSigned : 0});
  for (auto v : matrix.values()) put_le(out, v);
  finish(out, path);
}

QuantizedMatrix read_matrix(const std::filesystem::path& path) {
  Header h;
  auto in = open_in(path, h);
  if (h.flags & kFlagWide) throw ConfigError(path.string() + " holds a result vector, not a matrix");
  std::vector<std::int32_t> values(std::size_t(h.rows) * std::size_t(h.cols));
  for (auto& v : values) v = get_le<std::int32_t>(in, path);
  return QuantizedMatrix::from_values(static_cast<std::uint32_t>(h.rows), static_cast<std::uint32_t>(h.cols),
                                      static_cast<unsigned>(h.bits), h.flags & kFlagSigned, std::move(values));
}

void write_activation(const std::filesystem::path& path, const ActivationVector& a) {
  auto out = open_out(path, {1, static_cast<std::int32_t>(a.size()), static_cast<std::int32_t>(a.bits()),
                             a.is_signed() ? kFlagSigned : 0});
  for (auto v : a.values()) put_le(out, v);
  finish(out, path);
}

ActivationVector read_activation(const std::filesystem::path& path) {
  Header h;
  auto in = open_in(path, h);
  if (h.rows != 1 || (h.flags & kFlagWide)) throw ConfigError(path.string() + " is not an activation vector");
  std::vector<std::int32_t> values(static_cast<std::size_t>(h.cols));
  for (auto& v : values) v = get_le<std::int32_t>(in, path);
  return ActivationVector::from_values(static_cast<unsigned>(h.bits), h.flags & kFlagSigned, std::move(values));
}

void write_result(const std::filesystem::path& path, std::span<const std::int64_t> values) {
  auto out = open_out(path, {1, static_cast<std::int32_t>(values.size()), 64, kFlagSigned | kFlagWide});
  for (auto v : values) put_le(out, v);
  finish(out, path);
}

std::vector<std::int64_t> read_result(const std::filesystem::path& path) {
  Header h;
  auto in = open_in(path, h);
  if (!(h.flags & kFlagWide)) throw ConfigError(path.string() + " is not a result vector");
  std::vector<std::int64_t> values(static_cast<std::size_t>(h.cols));
  for (auto& v : values) v = get_le<std::int64_t>(in, path);
  return values;
}

}  // namespace mvdram::io
