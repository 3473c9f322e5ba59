#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hgsort/core.hpp"
#include "hgsort/engine.hpp"

namespace hgsort {

// ---------------------------------------------------------------------------
// Resource and latency models for the hourglass tree.
//
// Register and carry-chain counts are structural; the LUT count is an affine
// fit per element width over the synthesized power-of-two configurations and
// is refused outside them.
// ---------------------------------------------------------------------------

/// Σ_{k=1..depth} ceil(n / 2^k); n - 1 for powers of two.
[[nodiscard]] std::uint64_t cell_count(std::uint64_t n);

/// Flip-flops: every cell has two w-bit data registers and two valid bits,
/// every leaf one w-bit register and one valid bit. Index registers are not
/// counted.
[[nodiscard]] std::uint64_t reg_count(std::uint64_t n, unsigned w);

/// One CARRY8 block per 16 bits of comparator, per cell.
[[nodiscard]] std::uint64_t carry8_count(std::uint64_t n, unsigned w);

/// LUT estimate for w in {8, 16, 32} and power-of-two n >= 64; empty
/// otherwise ("no fit available").
[[nodiscard]] std::optional<std::uint64_t> lut_fit(std::uint64_t n, unsigned w);

struct LatencyModel {
  std::uint64_t first = 0;  // cycle of the first root transaction
  std::uint64_t total = 0;  // cycles until the array has fully streamed out
};

[[nodiscard]] LatencyModel latency_model(std::uint64_t n);

struct ResourceEstimate {
  std::uint64_t n = 0;
  unsigned w = 0;
  std::uint64_t reg_bits = 0;
  std::uint64_t carry8_blocks = 0;
  std::optional<std::uint64_t> lut_estimate;  // fit, not a structural count
  std::uint64_t latency_first = 0;
  std::uint64_t latency_total = 0;
  /// Set for non-power-of-two n, which the synthesized data does not cover.
  bool extrapolated = false;
};

[[nodiscard]] ResourceEstimate estimate_resources(std::uint64_t n, unsigned w);

inline constexpr const char* kResourceCsvHeader = "n,w,lut,reg,carry8,freq,latency";

/// `n,w,lut,reg,carry8,,<depth>+<n>`; the frequency column is always empty
/// and lut is empty when no fit exists.
[[nodiscard]] std::string resource_csv_row(const ResourceEstimate& e);

// ---------------------------------------------------------------------------
// Checks over runs and traces.
// ---------------------------------------------------------------------------

/// Ascending by value, ties in input order.
[[nodiscard]] std::vector<Element> oracle_stable_sort(std::span<const Element> input);

/// Cycles in which the sink was ready but the root delivered nothing, scanning
/// from cycle `first` until `count` root transactions have been seen.
[[nodiscard]] std::vector<std::uint64_t> detect_bubbles(std::span<const CycleTrace> trace,
                                                        std::uint64_t first, std::uint64_t count);

/// Bubbles of a finished run, over its whole output window.
[[nodiscard]] std::vector<std::uint64_t> detect_bubbles(const RunReport& report);

/// Re-derives every per-cycle invariant from a verbose trace: register
/// invariants per cell, empty-flag stickiness, multiset conservation, output
/// monotonicity and the emitted/transaction correspondence.
[[nodiscard]] std::vector<Violation> check_invariants(std::span<const CycleTrace> trace,
                                                      std::span<const Element> loaded);

struct VariantResult {
  Variant variant = Variant::hourglass;
  std::uint64_t first_output_cycle = 0;
  std::uint64_t total_cycles = 0;
  std::size_t bubbles = 0;
  std::size_t violations = 0;
  bool matches_oracle = false;
};

struct VariantComparison {
  VariantResult hourglass;
  VariantResult registered;
  double ratio = 0.0;  // hourglass total / registered total
  /// The hourglass tree finishes strictly first for n >= 4.
  bool hourglass_faster = true;
};

/// Runs the hourglass and registered trees on the same input. `config.variant`
/// is ignored.
[[nodiscard]] VariantComparison compare_variants(const SimConfig& config,
                                                 std::span<const Element> input);

}  // namespace hgsort
