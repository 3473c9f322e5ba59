#include "hgsort/cells.hpp"

#include <stdexcept>
#include <vector>

#include "hgsort/topology.hpp"

namespace hgsort {

Selection hourglass_select(const PortView& left, const PortView& right, bool v1,
                           TieBreak tie_break) noexcept {
  const bool ready = !v1;
  // Undefined data only shows up on an invalid side, where the validity checks
  // below override the comparison anyway.
  const bool left_wins =
      left.d && right.d ? element_less(*left.d, *right.d, tie_break) : true;

  bool take_left;
  if (left_wins) {
    take_left = left.v;
  } else {
    take_left = !right.v;
  }

  Selection sel;
  const PortView& taken = take_left ? left : right;
  sel.v = taken.v;
  sel.d = taken.v ? taken.d : Slot{};
  sel.r_l = take_left && ready;
  sel.r_r = !take_left && ready;
  return sel;
}

CellRegisters hourglass_commit(const CellRegisters& regs, const Selection& sel,
                               bool r_out) noexcept {
  CellRegisters next = regs;
  if (!regs.v0) {
    next.d0 = sel.d;
    next.v0 = sel.v;
  } else if (!regs.v1) {
    if (r_out) {
      next.d0 = sel.d;
      next.v0 = sel.v;
    } else {
      next.d1 = sel.d;
      next.v1 = sel.v;
    }
  } else if (r_out) {
    next.d0 = regs.d1;
    next.v0 = regs.v1;
    next.d1.reset();
    next.v1 = false;
  }
  return next;
}

CellOutputs hourglass_outputs(const CellRegisters& regs) noexcept {
  return {regs.v0 ? regs.d0 : Slot{}, regs.v0, !regs.v1};
}

RegisteredStep registered_step(const RegisteredNodeState& node, const RegisteredInput& in1,
                               const RegisteredInput& in2, bool consumed,
                               TieBreak tie_break) noexcept {
  RegisteredStep out{node, false, false};
  if (consumed) {
    out.node.v_out = false;
    return out;
  }
  if (node.v_out) {
    return out;
  }
  if (in1.v && in2.v) {
    const bool first = element_less(*in1.d, *in2.d, tie_break);
    out.node.d_out = first ? in1.d : in2.d;
    out.node.v_out = true;
    out.clear1 = first;
    out.clear2 = !first;
  } else if (in1.v && in2.e) {
    out.node.d_out = in1.d;
    out.node.v_out = true;
    out.clear1 = true;
  } else if (in2.v && in1.e) {
    out.node.d_out = in2.d;
    out.node.v_out = true;
    out.clear2 = true;
  } else if (in1.e && in2.e) {
    out.node.e_out = true;
  }
  return out;
}

Extraction comb_extract(std::span<const LeafState> leaves, TieBreak tie_break) {
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> layer;
  layer.reserve(leaves.size());
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    layer.push_back(leaves[i].v ? i : none);
  }
  while (layer.size() > 1) {
    std::vector<std::size_t> next((layer.size() + 1) / 2, none);
    for (std::size_t j = 0; j < next.size(); ++j) {
      const std::size_t l = layer[2 * j];
      const std::size_t r = 2 * j + 1 < layer.size() ? layer[2 * j + 1] : none;
      if (l != none && r != none) {
        next[j] = element_less(*leaves[l].d, *leaves[r].d, tie_break) ? l : r;
      } else {
        next[j] = l != none ? l : r;
      }
    }
    layer = std::move(next);
  }
  if (layer.empty() || layer.front() == none) {
    throw std::invalid_argument("comb_extract: no valid leaf");
  }
  const std::size_t w = layer.front();
  return {*leaves[w].d, w, 2 * depth_of(leaves.size())};
}

}  // namespace hgsort
