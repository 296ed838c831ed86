#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvdram/encoder.hpp"
#include "mvdram/layout.hpp"
#include "mvdram/perf.hpp"
#include "mvdram/reliability.hpp"
#include "json.hpp"

namespace mvdram {

/// Default simulation guardrail in cells (bits); MVDRAM_CELL_BUDGET overrides it.
inline constexpr std::uint64_t kDefaultCellBudget = std::uint64_t{1} << 31;

struct ExperimentConfig {
  GemvShape shape;
  double sparsity = 0.5;
  std::uint64_t seed = 1;
  EncodingMode mode = EncodingMode::Sparse;
  SubarrayGeometry geometry;
  std::vector<std::string> profiles{"all-reliable"};  // built-in names or JSON paths, cycled per subarray
  std::optional<FaultMode> fault_mode;                 // overrides every profile's mode
  PlanOptions plan_options;
  TimingConfig timing;

  void validate() const;
};

/// Fields absent from `doc` keep the values of `base`.
ExperimentConfig config_from_json(const nlohmann::json& doc, const ExperimentConfig& base = {});
nlohmann::json config_to_json(const ExperimentConfig& config);

std::vector<ReliabilityProfile> resolve_profiles(const ExperimentConfig& config);

std::uint64_t matrix_seed(std::uint64_t seed);
std::uint64_t activation_seed(std::uint64_t seed);

QuantizedMatrix make_matrix(const ExperimentConfig& config);
ActivationVector make_activation(const ExperimentConfig& config);

/// Reads MVDRAM_CELL_BUDGET, falling back to kDefaultCellBudget.
std::uint64_t cell_budget();
/// Throws ConfigError when simulating `plan` would touch more than `budget` cells.
void check_cell_budget(const GemvPlan& plan, std::uint64_t budget);

struct VerifyOutcome {
  bool match = false;
  nlohmann::json report;
};

/// Cell-level run against the integer oracle.
VerifyOutcome run_verify(const ExperimentConfig& config);

/// Count-level run: plan and encode only, then the perf model. Never touches cells.
nlohmann::json run_bench_entry(const ExperimentConfig& config, TemplateStore& store);

/// {"schema":1, "defaults":{...}, "entries":[{...}, ...]}; failures become rows with "error".
nlohmann::json run_bench(const std::vector<ExperimentConfig>& entries);
std::vector<ExperimentConfig> load_sweep(const nlohmann::json& doc, const ExperimentConfig& base);

/// Per-region rows of one subarray for each requested tile span.
nlohmann::json run_capacity(const ExperimentConfig& config, const std::vector<std::uint32_t>& n_tiles);

std::string bench_to_csv(const nlohmann::json& report);
std::string capacity_to_csv(const nlohmann::json& report);

}  // namespace mvdram
