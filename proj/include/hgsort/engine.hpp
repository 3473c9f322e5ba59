#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "hgsort/cells.hpp"
#include "hgsort/core.hpp"
#include "hgsort/topology.hpp"

namespace hgsort {

struct SinkState {
  std::uint64_t consumed = 0;
  std::uint64_t cursor = 0;  // cycles seen
  std::mt19937_64 rng;

  friend bool operator==(const SinkState&, const SinkState&) = default;
};

/// Every register of the tree at a clock boundary.
///
/// `cycle` counts clock edges since the parallel load. The cell vector in use
/// depends on the variant; the combinational variant has leaves only.
struct SimState {
  std::uint64_t cycle = 0;
  std::vector<LeafState> leaves;
  std::vector<CellRegisters> cells;
  std::vector<RegisteredNodeState> registered;
  SinkState sink;
  std::vector<Element> emitted;
  /// The loaded multiset, sorted by (value, index), for conservation checks.
  std::vector<Element> loaded;
  std::vector<Violation> violations;
};

struct RunReport {
  std::vector<Element> output;
  std::uint64_t first_output_cycle = 0;
  std::uint64_t last_output_cycle = 0;
  /// Cycles until the last requested element has left the tree:
  /// last_output_cycle + 1, i.e. depth + n for an unobstructed hourglass run.
  std::uint64_t total_cycles = 0;
  std::vector<CycleTrace> trace;
  std::vector<Violation> violations;
  /// Combinational variant only: comparator stages on the critical path of a
  /// single extraction (compare chain down plus reset chain back up).
  std::uint64_t critical_path_per_extraction = 0;
};

/// Thrown when the root stays silent for longer than any correct tree could.
class NonTerminationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two-phase clocked simulator for one configuration.
///
/// Each step evaluates every select/ready/handshake signal from the
/// cycle-start snapshot, then commits all register updates at once, so the
/// result does not depend on the order cells are visited in.
///
/// Cycle numbering: cycle k is the clock period that starts from boundary k
/// (boundary 0 is the loaded state). A root transaction evaluated during cycle
/// k is stamped k and commits at the edge into boundary k+1.
class Simulator {
 public:
  /// Validates the configuration and builds the tree.
  explicit Simulator(SimConfig config);

  [[nodiscard]] const SimConfig& config() const { return config_; }
  [[nodiscard]] const TreeTopology& topology() const { return topology_; }

  /// Parallel load into the leaf registers. Throws std::invalid_argument on a
  /// length mismatch, a value that does not fit the width, or (with index
  /// tracking) an index that is missing, repeated or out of range.
  [[nodiscard]] SimState load(std::span<const Element> input) const;

  /// Advances one clock cycle in place and returns what was observed during
  /// it. Invariant violations found at the new boundary are appended to
  /// state.violations.
  CycleTrace step(SimState& state) const;

  /// Steps until the configured number of root transactions have happened.
  /// Throws NonTerminationError after 4n + 4·depth consecutive sink-ready cycles
  /// without a root transaction.
  [[nodiscard]] RunReport run(std::span<const Element> input) const;

  [[nodiscard]] std::uint64_t idle_limit() const;

 private:
  bool sink_ready(SinkState& sink) const;
  void step_hourglass(SimState& state, bool ready, CycleTrace& rec) const;
  void step_registered(SimState& state, bool ready, CycleTrace& rec) const;
  void step_combinational(SimState& state, bool ready, CycleTrace& rec) const;
  void check_boundary(const SimState& before, SimState& after) const;
  static void check_cell(std::size_t c, const CellRegisters& r, std::int64_t cycle,
                         std::vector<Violation>& out);

  static std::vector<char>& scratch_ready(std::size_t size);

  // Parents of each cell, by cell ordinal: c >= 0 is a cell, -(i + 1) leaf i.
  static constexpr std::int64_t kNoParent = std::numeric_limits<std::int64_t>::min();

  SimConfig config_;
  TreeTopology topology_;
  std::vector<std::int64_t> left_;
  std::vector<std::int64_t> right_;
};

/// Value-semantics form of Simulator::step.
[[nodiscard]] SimState step(const Simulator& sim, SimState state);

[[nodiscard]] RunReport run(const SimConfig& config, std::span<const Element> input);

/// Ordering used for multiset comparisons: value, then index (absent first).
[[nodiscard]] bool multiset_less(const Element& a, const Element& b) noexcept;

/// Elements currently held by valid leaf or cell registers.
[[nodiscard]] std::vector<Element> in_flight(const SimState& state);

}  // namespace hgsort
