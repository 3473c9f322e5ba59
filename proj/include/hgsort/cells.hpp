#pragma once

#include <cstddef>
#include <span>

#include "hgsort/core.hpp"

// Single-cycle step semantics for every node kind. All functions are pure:
// they read a cycle-start snapshot and return the next-state value.

namespace hgsort {

/// Combinational routing decision of an hourglass cell.
/// At most one of r_l / r_r is set, and v implies d.
struct Selection {
  Slot d;
  bool v = false;
  bool r_l = false;
  bool r_r = false;

  friend bool operator==(const Selection&, const Selection&) = default;
};

/// Picks which parent stream moves forward and routes `ready = !v1` to it.
///
/// When only one side is valid that side is taken regardless of the data.
/// When neither is valid, ready is still routed (left when the data cannot be
/// compared), but no transaction can happen since no parent asserts valid.
[[nodiscard]] Selection hourglass_select(const PortView& left, const PortView& right, bool v1,
                                         TieBreak tie_break) noexcept;

/// Register update for one clock edge. `r_out` is the downstream ready seen
/// this cycle; since the output is driven from register zero, r_out && v0 is
/// exactly an output transaction.
[[nodiscard]] CellRegisters hourglass_commit(const CellRegisters& regs, const Selection& sel,
                                             bool r_out) noexcept;

struct CellOutputs {
  Slot d;                 // downstream data, register zero
  bool v = false;         // downstream valid
  bool ready_up = false;  // offered to the selected parent
};

[[nodiscard]] CellOutputs hourglass_outputs(const CellRegisters& regs) noexcept;

/// The cell as a parent port of the next layer.
[[nodiscard]] inline PortView downstream_port(const CellRegisters& regs) noexcept {
  return {regs.v0 ? regs.d0 : Slot{}, regs.v0, false};
}

[[nodiscard]] inline PortView downstream_port(const LeafState& leaf) noexcept {
  return {leaf.v ? leaf.d : Slot{}, leaf.v, false};
}

/// Parent output as seen by a registered node.
struct RegisteredInput {
  Slot d;
  bool v = false;
  bool e = false;
};

struct RegisteredStep {
  RegisteredNodeState node;
  bool clear1 = false;
  bool clear2 = false;

  friend bool operator==(const RegisteredStep&, const RegisteredStep&) = default;
};

/// One edge of a single-buffer comparator node. `consumed` means the child (or
/// the sink) reads the output register this cycle; such a cycle is read-only,
/// which is what produces the alternating valid/empty output.
[[nodiscard]] RegisteredStep registered_step(const RegisteredNodeState& node,
                                             const RegisteredInput& in1,
                                             const RegisteredInput& in2, bool consumed,
                                             TieBreak tie_break) noexcept;

/// A first-layer leaf as a registered-node input: empty once drained.
[[nodiscard]] inline RegisteredInput registered_input(const LeafState& leaf) noexcept {
  return {leaf.v ? leaf.d : Slot{}, leaf.v, !leaf.v};
}

[[nodiscard]] inline RegisteredInput registered_input(const RegisteredNodeState& node) noexcept {
  return {node.v_out ? node.d_out : Slot{}, node.v_out, node.e_out};
}

struct Extraction {
  Element winner;
  std::size_t winner_leaf = 0;
  /// Comparator stages crossed by the compare chain down plus the reset back up.
  std::size_t path_depth = 0;
};

/// Tournament minimum over the valid leaves of an unregistered comparator
/// tree. Leaves pair positionally (2j, 2j+1) layer by layer, the same shape
/// the clocked variants use. Throws std::invalid_argument if no leaf is valid.
[[nodiscard]] Extraction comb_extract(std::span<const LeafState> leaves, TieBreak tie_break);

/// Single-shot source: a valid leaf that sees ready hands its value off.
[[nodiscard]] constexpr LeafState leaf_step(const LeafState& leaf, bool ready_seen) noexcept {
  if (leaf.v && ready_seen) {
    return {leaf.d, false};
  }
  return leaf;
}

}  // namespace hgsort
