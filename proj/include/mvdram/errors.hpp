#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvdram {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid geometry, profile, shape or file content.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Row or column index outside the subarray.
class AddressError : public Error {
 public:
  using Error::Error;
};

/// MAJ row group of illegal size or with repeated rows.
class GroupError : public Error {
 public:
  using Error::Error;
};

/// Macro builder ran out of rows or was handed colliding rows.
class AllocationError : public Error {
 public:
  using Error::Error;
};

/// Static bound violated while building a trace or template.
class PlanError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  CapacityError(const std::string& what, std::uint64_t needed, std::uint64_t available)
      : Error(what), needed_(needed), available_(available) {}

  std::uint64_t needed() const { return needed_; }
  std::uint64_t available() const { return available_; }
  std::uint64_t deficit() const { return needed_ > available_ ? needed_ - available_ : 0; }

 private:
  std::uint64_t needed_;
  std::uint64_t available_;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class IncompleteResultError : public Error {
 public:
  IncompleteResultError(const std::string& what, std::vector<std::uint32_t> missing)
      : Error(what), missing_(std::move(missing)) {}

  const std::vector<std::uint32_t>& missing_tiles() const { return missing_; }

 private:
  std::vector<std::uint32_t> missing_;
};

}  // namespace mvdram
