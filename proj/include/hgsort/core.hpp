#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hgsort {

/// A sortable payload: an unsigned key plus the optional position it had in
/// the loaded array. Comparisons never look at the index.
struct Element {
  std::uint64_t value = 0;
  std::optional<std::uint32_t> index;

  friend bool operator==(const Element&, const Element&) = default;
};

/// A register slot that may hold garbage. Empty means "undefined", never a
/// sentinel value.
using Slot = std::optional<Element>;

enum class TieBreak { left, right };
enum class Variant { hourglass, registered, combinational };

/// `true` when `a` (the left operand) is selected over `b`.
///
/// With TieBreak::left equal keys select the left operand, which is what makes
/// the tree stable. TieBreak::right is the strict `<` comparison, so equal keys
/// fall through to the right operand.
[[nodiscard]] constexpr bool element_less(const Element& a, const Element& b,
                                          TieBreak tie_break) noexcept {
  return tie_break == TieBreak::left ? a.value <= b.value : a.value < b.value;
}

struct SinkPattern {
  enum class Kind { always_ready, every_k, random };
  Kind kind = Kind::always_ready;
  std::uint64_t period = 1;    // every_k
  double probability = 1.0;    // random

  static SinkPattern always() { return {}; }
  static SinkPattern every(std::uint64_t k) { return {Kind::every_k, k, 1.0}; }
  static SinkPattern random(double p) { return {Kind::random, 1, p}; }

  /// Parses `always`, `every:K` or `random:P`. Throws std::invalid_argument.
  static SinkPattern parse(std::string_view text);
  [[nodiscard]] std::string to_string() const;
};

enum class TraceLevel {
  none,     // no per-cycle records
  summary,  // root/sink signals only
  verbose,  // plus every register snapshot
};

struct SimConfig {
  std::size_t n = 1;
  unsigned width = 16;
  Variant variant = Variant::hourglass;
  TieBreak tie_break = TieBreak::left;
  std::optional<std::size_t> take;
  SinkPattern sink;
  std::uint64_t seed = 0;
  bool track_indices = false;
  TraceLevel trace = TraceLevel::summary;
  /// Multiset conservation check at every clock boundary. O(n log n) per
  /// cycle, so large sweeps turn it off.
  bool check_conservation = true;

  /// Throws std::invalid_argument when n, width, take or the sink pattern are
  /// out of range.
  void validate() const;
  [[nodiscard]] std::size_t outputs_expected() const { return take.value_or(n); }
};

/// One ready/valid interface as seen during a cycle. `d` is only meaningful
/// when `v` is set.
struct PortView {
  Slot d;
  bool v = false;
  bool r = false;
};

/// Hourglass cell storage. Invariants at every clock boundary: v1 implies v0,
/// and with both valid d0 <= d1.
struct CellRegisters {
  Slot d0;
  Slot d1;
  bool v0 = false;
  bool v1 = false;

  friend bool operator==(const CellRegisters&, const CellRegisters&) = default;
};

/// Output register of a registered (single-buffer) comparator node.
/// `e_out` marks the subtree above as exhausted; it never clears.
struct RegisteredNodeState {
  Slot d_out;
  bool v_out = false;
  bool e_out = false;

  friend bool operator==(const RegisteredNodeState&, const RegisteredNodeState&) = default;
};

/// A first-layer source register. Valid until consumed, then never again.
struct LeafState {
  Slot d;
  bool v = false;

  friend bool operator==(const LeafState&, const LeafState&) = default;
};

struct Violation {
  std::int64_t cycle = -1;
  std::string where;
  std::string rule;

  [[nodiscard]] std::string to_string() const;
  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Observations for one clock cycle: the snapshot at the start of the cycle
/// plus the root handshake evaluated from it.
struct CycleTrace {
  std::uint64_t cycle = 0;
  bool sink_ready = false;
  bool root_valid = false;
  bool root_transaction = false;
  std::optional<Element> emitted;  // present iff root_transaction

  // Verbose traces only. Exactly one of the cell vectors is populated,
  // depending on the variant.
  std::vector<LeafState> leaves;
  std::vector<CellRegisters> cells;
  std::vector<RegisteredNodeState> registered;
};

[[nodiscard]] std::string_view to_string(TieBreak t);
[[nodiscard]] std::string_view to_string(Variant v);
[[nodiscard]] TieBreak parse_tie_break(std::string_view text);
[[nodiscard]] Variant parse_variant(std::string_view text);

/// Builds elements from raw values; indices are the positions when requested.
[[nodiscard]] std::vector<Element> make_elements(const std::vector<std::uint64_t>& values,
                                                 bool with_indices);

}  // namespace hgsort
