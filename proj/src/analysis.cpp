#include "hgsort/analysis.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace hgsort {

std::uint64_t cell_count(std::uint64_t n) {
  if (n <= 1) return n;  // the lone buffer cell
  std::uint64_t total = 0;
  for (std::uint64_t layer = n; layer > 1;) {
    layer = (layer + 1) / 2;
    total += layer;
  }
  return total;
}

std::uint64_t reg_count(std::uint64_t n, unsigned w) {
  return cell_count(n) * (2 * std::uint64_t{w} + 2) + n * (std::uint64_t{w} + 1);
}

std::uint64_t carry8_count(std::uint64_t n, unsigned w) {
  return cell_count(n) * ((std::uint64_t{w} + 15) / 16);
}

std::optional<std::uint64_t> lut_fit(std::uint64_t n, unsigned w) {
  if (n < 64 || !std::has_single_bit(n)) return std::nullopt;
  // Slopes are 27.5, 47.5 and 87 LUTs per element; n is even here, so the
  // halves stay exact in integer arithmetic.
  switch (w) {
    case 8:
      return (55 * n - 56) / 2;
    case 16:
      return (95 * n - 96) / 2;
    case 32:
      return 87 * n - 86;
    default:
      return std::nullopt;
  }
}

LatencyModel latency_model(std::uint64_t n) {
  const std::uint64_t d = depth_of(n);
  return {d, d + n};
}

ResourceEstimate estimate_resources(std::uint64_t n, unsigned w) {
  ResourceEstimate e;
  e.n = n;
  e.w = w;
  e.reg_bits = reg_count(n, w);
  e.carry8_blocks = carry8_count(n, w);
  e.lut_estimate = lut_fit(n, w);
  const auto lat = latency_model(n);
  e.latency_first = lat.first;
  e.latency_total = lat.total;
  e.extrapolated = !std::has_single_bit(n) || n < 2;
  return e;
}

std::string resource_csv_row(const ResourceEstimate& e) {
  std::ostringstream os;
  os << e.n << ',' << e.w << ',';
  if (e.lut_estimate) os << *e.lut_estimate;
  os << ',' << e.reg_bits << ',' << e.carry8_blocks << ",," << e.latency_first << '+' << e.n;
  return os.str();
}

std::vector<Element> oracle_stable_sort(std::span<const Element> input) {
  std::vector<Element> out(input.begin(), input.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const Element& a, const Element& b) { return a.value < b.value; });
  return out;
}

std::vector<std::uint64_t> detect_bubbles(std::span<const CycleTrace> trace, std::uint64_t first,
                                          std::uint64_t count) {
  std::vector<std::uint64_t> bubbles;
  std::uint64_t seen = 0;
  for (const CycleTrace& rec : trace) {
    if (rec.cycle < first) continue;
    if (seen >= count) break;
    if (rec.root_transaction) {
      ++seen;
    } else if (rec.sink_ready) {
      bubbles.push_back(rec.cycle);
    }
  }
  return bubbles;
}

std::vector<std::uint64_t> detect_bubbles(const RunReport& report) {
  return detect_bubbles(report.trace, report.first_output_cycle, report.output.size());
}

std::vector<Violation> check_invariants(std::span<const CycleTrace> trace,
                                        std::span<const Element> loaded) {
  std::vector<Violation> out;
  if (trace.empty()) return out;

  std::vector<Element> expected(loaded.begin(), loaded.end());
  const bool indexed = std::any_of(trace.front().leaves.begin(), trace.front().leaves.end(),
                                   [](const LeafState& l) { return l.d && l.d->index; });
  if (!indexed) {
    for (auto& e : expected) e.index.reset();
  }
  std::sort(expected.begin(), expected.end(), multiset_less);

  std::vector<Element> emitted;
  const std::vector<RegisteredNodeState>* previous = nullptr;
  for (const CycleTrace& rec : trace) {
    const auto cycle = static_cast<std::int64_t>(rec.cycle);
    auto flag = [&](std::string where, std::string rule) {
      out.push_back({cycle, std::move(where), std::move(rule)});
    };

    if (rec.emitted.has_value() != rec.root_transaction) {
      flag("sink", "emitted value without a transaction, or the reverse");
    }
    if (rec.root_transaction && !rec.root_valid) flag("sink", "transaction without valid");

    std::vector<Element> held;
    for (const auto& leaf : rec.leaves) {
      if (leaf.v && leaf.d) held.push_back(*leaf.d);
    }
    for (std::size_t c = 0; c < rec.cells.size(); ++c) {
      const CellRegisters& r = rec.cells[c];
      const std::string where = "cell " + std::to_string(c);
      if (r.v1 && !r.v0) flag(where, "v1 set without v0");
      if ((r.v0 && !r.d0) || (r.v1 && !r.d1)) flag(where, "valid register holds no data");
      if (r.v0 && r.v1 && r.d0 && r.d1 && r.d0->value > r.d1->value) flag(where, "d0 > d1");
      if (r.v0 && r.d0) held.push_back(*r.d0);
      if (r.v1 && r.d1) held.push_back(*r.d1);
    }
    if (!rec.cells.empty() && rec.root_valid != rec.cells.back().v0) {
      flag("root", "root_valid disagrees with register zero");
    }
    for (std::size_t c = 0; c < rec.registered.size(); ++c) {
      const RegisteredNodeState& r = rec.registered[c];
      const std::string where = "cell " + std::to_string(c);
      if (r.v_out && r.e_out) flag(where, "valid and empty at once");
      if (r.v_out && !r.d_out) flag(where, "valid register holds no data");
      if (previous && c < previous->size() && (*previous)[c].e_out && !r.e_out) {
        flag(where, "empty flag cleared");
      }
      if (r.v_out && r.d_out) held.push_back(*r.d_out);
    }
    if (!rec.registered.empty()) previous = &rec.registered;

    if (!rec.leaves.empty()) {
      held.insert(held.end(), emitted.begin(), emitted.end());
      std::sort(held.begin(), held.end(), multiset_less);
      if (held != expected) flag("tree", "in-flight plus emitted differs from the loaded multiset");
    }

    if (rec.emitted) {
      if (!emitted.empty() && emitted.back().value > rec.emitted->value) {
        flag("sink", "output decreased");
      }
      emitted.push_back(*rec.emitted);
    }
  }
  return out;
}

namespace {

VariantResult run_variant(SimConfig config, Variant variant, std::span<const Element> input) {
  config.variant = variant;
  config.trace = TraceLevel::summary;
  const RunReport report = run(config, input);
  VariantResult r;
  r.variant = variant;
  r.first_output_cycle = report.first_output_cycle;
  r.total_cycles = report.total_cycles;
  r.bubbles = detect_bubbles(report).size();
  r.violations = report.violations.size();

  auto expected = oracle_stable_sort(input);
  if (!config.track_indices) {
    for (auto& e : expected) e.index.reset();
  }
  expected.resize(config.outputs_expected());
  if (config.tie_break == TieBreak::left) {
    r.matches_oracle = report.output == expected;
  } else {
    // Unstable tie order: compare keys only.
    r.matches_oracle = std::equal(report.output.begin(), report.output.end(), expected.begin(),
                                  expected.end(), [](const Element& a, const Element& b) {
                                    return a.value == b.value;
                                  });
  }
  return r;
}

}  // namespace

VariantComparison compare_variants(const SimConfig& config, std::span<const Element> input) {
  VariantComparison cmp;
  cmp.hourglass = run_variant(config, Variant::hourglass, input);
  cmp.registered = run_variant(config, Variant::registered, input);
  cmp.ratio = static_cast<double>(cmp.hourglass.total_cycles) /
              static_cast<double>(cmp.registered.total_cycles);
  cmp.hourglass_faster =
      config.n < 4 || cmp.hourglass.total_cycles < cmp.registered.total_cycles;
  return cmp;
}

}  // namespace hgsort
