#include "hgsort/engine.hpp"

#include <algorithm>
#include <sstream>
#include <string>

namespace hgsort {

bool multiset_less(const Element& a, const Element& b) noexcept {
  if (a.value != b.value) return a.value < b.value;
  return a.index < b.index;
}

namespace {

std::string cell_name(std::size_t c) { return "cell " + std::to_string(c); }

std::seed_seq sink_seed(std::uint64_t seed) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       0x5151u};
}

}  // namespace

Simulator::Simulator(SimConfig config) : config_(config) {
  config_.validate();
  topology_ = build_tree(config_.n);
  const std::size_t n = topology_.leaf_count();
  auto encode = [n](NodeId id) {
    return id < n ? -static_cast<std::int64_t>(id) - 1 : static_cast<std::int64_t>(id - n);
  };
  for (std::size_t c = 0; c < topology_.cell_count(); ++c) {
    const TreeNode& node = topology_.nodes()[n + c];
    left_.push_back(encode(*node.left));
    right_.push_back(node.right ? encode(*node.right) : kNoParent);
  }
}

std::vector<char>& Simulator::scratch_ready(std::size_t size) {
  thread_local std::vector<char> buffer;
  buffer.assign(size, 0);
  return buffer;
}

std::uint64_t Simulator::idle_limit() const {
  return 4 * config_.n + 4 * topology_.depth();
}

SimState Simulator::load(std::span<const Element> input) const {
  if (input.size() != config_.n) {
    throw std::invalid_argument("load: expected " + std::to_string(config_.n) + " elements, got " +
                                std::to_string(input.size()));
  }
  const std::uint64_t limit =
      config_.width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << config_.width) - 1;
  std::vector<bool> seen(config_.track_indices ? input.size() : 0, false);
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (input[i].value > limit) {
      throw std::invalid_argument("load: value " + std::to_string(input[i].value) + " at position " +
                                  std::to_string(i) + " does not fit in " +
                                  std::to_string(config_.width) + " bits");
    }
    if (config_.track_indices) {
      const auto& idx = input[i].index;
      if (!idx || *idx >= input.size() || seen[*idx]) {
        throw std::invalid_argument("load: indices must be unique and in [0,n) (position " +
                                    std::to_string(i) + ")");
      }
      seen[*idx] = true;
    }
  }

  SimState state;
  state.leaves.reserve(input.size());
  for (const Element& e : input) {
    Element copy = e;
    if (!config_.track_indices) copy.index.reset();
    state.leaves.push_back({copy, true});
  }
  switch (config_.variant) {
    case Variant::hourglass:
      state.cells.assign(topology_.cell_count(), CellRegisters{});
      break;
    case Variant::registered:
      state.registered.assign(topology_.cell_count(), RegisteredNodeState{});
      break;
    case Variant::combinational:
      break;
  }
  auto seq = sink_seed(config_.seed);
  state.sink.rng.seed(seq);
  state.loaded.reserve(input.size());
  for (const auto& leaf : state.leaves) state.loaded.push_back(*leaf.d);
  std::sort(state.loaded.begin(), state.loaded.end(), multiset_less);
  state.emitted.reserve(config_.outputs_expected());
  return state;
}

bool Simulator::sink_ready(SinkState& sink) const {
  const std::uint64_t cycle = sink.cursor++;
  switch (config_.sink.kind) {
    case SinkPattern::Kind::always_ready:
      return true;
    case SinkPattern::Kind::every_k:
      return cycle % config_.sink.period == 0;
    case SinkPattern::Kind::random: {
      // 53 random mantissa bits: identical on every platform, unlike
      // std::bernoulli_distribution.
      const double u = static_cast<double>(sink.rng() >> 11) * 0x1.0p-53;
      return u < config_.sink.probability;
    }
  }
  return true;
}

CycleTrace Simulator::step(SimState& state) const {
  CycleTrace rec;
  rec.cycle = state.cycle;
  rec.sink_ready = sink_ready(state.sink);
  if (config_.trace == TraceLevel::verbose) {
    rec.leaves = state.leaves;
    rec.cells = state.cells;
    rec.registered = state.registered;
  }

  // The register snapshot is only needed for the sticky-flag check.
  SimState before;
  if (config_.variant == Variant::registered) before.registered = state.registered;

  switch (config_.variant) {
    case Variant::hourglass:
      step_hourglass(state, rec.sink_ready, rec);
      break;
    case Variant::registered:
      step_registered(state, rec.sink_ready, rec);
      break;
    case Variant::combinational:
      step_combinational(state, rec.sink_ready, rec);
      break;
  }
  if (rec.root_transaction) {
    state.emitted.push_back(*rec.emitted);
    ++state.sink.consumed;
  }
  ++state.cycle;
  check_boundary(before, state);
  return rec;
}

// Both clocked variants evaluate in one pass from the root toward the leaves.
// A node's registers are sampled only by the node itself and by its child,
// and children have larger ids, so by the time a node is committed in place
// its single reader has already seen the cycle-start value. The result is
// identical to evaluating everything from a snapshot and committing after.

namespace {

bool port_valid(const SimState& state, std::int64_t id) {
  if (id == std::numeric_limits<std::int64_t>::min()) return false;
  return id < 0 ? state.leaves[-id - 1].v : state.cells[id].v0;
}

}  // namespace

void Simulator::step_hourglass(SimState& state, bool ready, CycleTrace& rec) const {
  const std::size_t cells = topology_.cell_count();
  const std::size_t root = cells - 1;

  rec.root_valid = state.cells[root].v0;
  rec.root_transaction = rec.root_valid && ready;
  if (rec.root_transaction) rec.emitted = state.cells[root].d0;

  std::vector<char>& r_out = scratch_ready(cells);
  r_out[root] = ready;
  const auto boundary = static_cast<std::int64_t>(state.cycle + 1);
  for (std::size_t c = cells; c-- > 0;) {
    const std::int64_t l = left_[c];
    const std::int64_t r = right_[c];
    // Skipping is exact for a cell that is not being read and either is full
    // (R = !v1 routes no ready upstream) or has no valid parent (nothing to
    // take, and an invalid register already holds no data).
    if (!r_out[c]) {
      const CellRegisters& regs = state.cells[c];
      if (regs.v0 && regs.v1) continue;
      if (!port_valid(state, l) && !port_valid(state, r) && !regs.d1 && (regs.v0 || !regs.d0)) continue;
    }
    const PortView left = l < 0 ? downstream_port(state.leaves[-l - 1]) : downstream_port(state.cells[l]);
    const PortView right = r == kNoParent ? PortView{}
                           : r < 0        ? downstream_port(state.leaves[-r - 1])
                                          : downstream_port(state.cells[r]);
    const Selection sel = hourglass_select(left, right, state.cells[c].v1, config_.tie_break);
    state.cells[c] = hourglass_commit(state.cells[c], sel, r_out[c] != 0);
    check_cell(c, state.cells[c], boundary, state.violations);
    if (l < 0) {
      state.leaves[-l - 1] = leaf_step(state.leaves[-l - 1], sel.r_l);
    } else {
      r_out[l] = sel.r_l;
    }
    if (r == kNoParent) continue;
    if (r < 0) {
      state.leaves[-r - 1] = leaf_step(state.leaves[-r - 1], sel.r_r);
    } else {
      r_out[r] = sel.r_r;
    }
  }
}

void Simulator::step_registered(SimState& state, bool ready, CycleTrace& rec) const {
  const std::size_t cells = topology_.cell_count();
  const std::size_t root = cells - 1;

  auto input = [&](std::int64_t id) -> RegisteredInput {
    if (id == kNoParent) return {Slot{}, false, true};  // padding: an always-empty subtree
    return id < 0 ? registered_input(state.leaves[-id - 1]) : registered_input(state.registered[id]);
  };

  rec.root_valid = state.registered[root].v_out;
  rec.root_transaction = rec.root_valid && ready;
  if (rec.root_transaction) rec.emitted = state.registered[root].d_out;

  std::vector<char>& consumed = scratch_ready(cells);
  consumed[root] = rec.root_transaction;
  for (std::size_t c = cells; c-- > 0;) {
    const std::int64_t l = left_[c];
    const std::int64_t r = right_[c];
    const auto res = registered_step(state.registered[c], input(l), input(r), consumed[c] != 0,
                                     config_.tie_break);
    state.registered[c] = res.node;
    if (l < 0) {
      state.leaves[-l - 1] = leaf_step(state.leaves[-l - 1], res.clear1);
    } else {
      consumed[l] = res.clear1;
    }
    if (r == kNoParent) continue;
    if (r < 0) {
      state.leaves[-r - 1] = leaf_step(state.leaves[-r - 1], res.clear2);
    } else {
      consumed[r] = res.clear2;
    }
  }
}

void Simulator::step_combinational(SimState& state, bool ready, CycleTrace& rec) const {
  rec.root_valid = state.emitted.size() < state.leaves.size();
  if (!rec.root_valid || !ready) return;
  const Extraction ex = comb_extract(state.leaves, config_.tie_break);
  rec.root_transaction = true;
  rec.emitted = ex.winner;
  state.leaves[ex.winner_leaf] = leaf_step(state.leaves[ex.winner_leaf], true);
}

void Simulator::check_cell(std::size_t c, const CellRegisters& r, std::int64_t cycle,
                           std::vector<Violation>& out) {
  if (r.v1 && !r.v0) out.push_back({cycle, cell_name(c), "v1 set without v0"});
  if ((r.v0 && !r.d0) || (r.v1 && !r.d1)) {
    out.push_back({cycle, cell_name(c), "valid register holds no data"});
  }
  if (r.v0 && r.v1 && r.d0 && r.d1 && r.d0->value > r.d1->value) {
    out.push_back({cycle, cell_name(c), "d0 > d1"});
  }
}

void Simulator::check_boundary(const SimState& before, SimState& state) const {
  const auto cycle = static_cast<std::int64_t>(state.cycle);
  auto flag = [&](std::string where, std::string rule) {
    state.violations.push_back({cycle, std::move(where), std::move(rule)});
  };

  // Hourglass cells are checked as they are committed; skipped cells are
  // unchanged.
  for (std::size_t c = 0; c < state.registered.size(); ++c) {
    const RegisteredNodeState& r = state.registered[c];
    if (r.v_out && r.e_out) flag(cell_name(c), "valid and empty at once");
    if (r.v_out && !r.d_out) flag(cell_name(c), "valid register holds no data");
    if (c < before.registered.size() && before.registered[c].e_out && !r.e_out) {
      flag(cell_name(c), "empty flag cleared");
    }
  }
  const auto& out = state.emitted;
  if (out.size() >= 2 && out[out.size() - 2].value > out.back().value) {
    flag("sink", "output decreased");
  }
  if (config_.check_conservation) {
    auto held = in_flight(state);
    held.insert(held.end(), out.begin(), out.end());
    std::sort(held.begin(), held.end(), multiset_less);
    if (held != state.loaded) flag("tree", "in-flight plus emitted differs from the loaded multiset");
  }
}

std::vector<Element> in_flight(const SimState& state) {
  std::vector<Element> held;
  for (const auto& leaf : state.leaves) {
    if (leaf.v && leaf.d) held.push_back(*leaf.d);
  }
  for (const auto& r : state.cells) {
    if (r.v0 && r.d0) held.push_back(*r.d0);
    if (r.v1 && r.d1) held.push_back(*r.d1);
  }
  for (const auto& r : state.registered) {
    if (r.v_out && r.d_out) held.push_back(*r.d_out);
  }
  return held;
}

RunReport Simulator::run(std::span<const Element> input) const {
  SimState state = load(input);
  RunReport report;
  if (config_.variant == Variant::combinational) {
    report.critical_path_per_extraction = 2 * topology_.depth();
  }
  const std::size_t wanted = config_.outputs_expected();
  std::uint64_t idle = 0;
  bool first = true;
  while (state.emitted.size() < wanted) {
    CycleTrace rec = step(state);
    if (rec.root_transaction) {
      if (first) report.first_output_cycle = rec.cycle;
      first = false;
      report.last_output_cycle = rec.cycle;
      idle = 0;
    } else if (rec.sink_ready && ++idle >= idle_limit()) {
      // Stalled-sink cycles are not evidence of deadlock and are not counted.
      std::ostringstream os;
      os << "no root transaction for " << idle << " consecutive sink-ready cycles (cycle "
         << rec.cycle
         << ", " << state.emitted.size() << " of " << wanted << " emitted)";
      throw NonTerminationError(os.str());
    }
    if (config_.trace != TraceLevel::none) report.trace.push_back(std::move(rec));
  }
  report.total_cycles = report.last_output_cycle + 1;
  report.output = std::move(state.emitted);
  report.violations = std::move(state.violations);
  return report;
}

SimState step(const Simulator& sim, SimState state) {
  sim.step(state);
  return state;
}

RunReport run(const SimConfig& config, std::span<const Element> input) {
  return Simulator(config).run(input);
}

}  // namespace hgsort
