#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mvdram/quant.hpp"

namespace mvdram::io {

/// 16-byte little-endian header of int32 fields: rows, cols, bits, flags. Payload is row-major
/// little-endian int32 values, or int64 when kFlagWide is set (result vectors).
inline constexpr std::int32_t kFlagSigned = 1;
inline constexpr std::int32_t kFlagWide = 2;

void write_matrix(const std::filesystem::path& path, const QuantizedMatrix& matrix);
QuantizedMatrix read_matrix(const std::filesystem::path& path);

/// Stored as a 1 x N matrix.
void write_activation(const std::filesystem::path& path, const ActivationVector& a);
ActivationVector read_activation(const std::filesystem::path& path);

void write_result(const std::filesystem::path& path, std::span<const std::int64_t> values);
std::vector<std::int64_t> read_result(const std::filesystem::path& path);

}  // namespace mvdram::io
