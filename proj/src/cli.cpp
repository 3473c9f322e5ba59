#include "hgsort/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "hgsort/analysis.hpp"
#include "hgsort/engine.hpp"
#include "hgsort/topology.hpp"

namespace hgsort::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t below(std::mt19937_64& rng, std::uint64_t bound) {
  // Rejection sampling keeps the stream identical across standard libraries.
  if (bound == 0) return rng();
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

std::uint64_t value_space(unsigned width) {
  // 0 stands for 2^64.
  return width >= 64 ? 0 : std::uint64_t{1} << width;
}

struct RunOptions {
  std::string input;
  std::size_t random = 0;
  unsigned width = 16;
  std::string variant = "hourglass";
  std::size_t take = 0;
  std::string tie_break = "left";
  std::string sink = "always";
  std::uint64_t seed = 0;
  bool indices = false;
  bool check = false;
  bool topology = false;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  auto* in = cmd->add_option("--input", o.input, "Text file, one unsigned value per line");
  auto* rnd = cmd->add_option("--random", o.random, "Sort N uniformly drawn values instead");
  in->excludes(rnd);
  cmd->add_option("--width", o.width, "Element width in bits")->capture_default_str()
      ->check(CLI::Range(1, 64));
  cmd->add_option("--variant", o.variant, "hourglass | registered | combinational")
      ->capture_default_str();
  cmd->add_option("--take", o.take, "Stop after the M smallest values");
  cmd->add_option("--tie-break", o.tie_break, "left | right")->capture_default_str();
  cmd->add_option("--sink", o.sink, "always | every:K | random:P")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Seed for --random and random sinks")->capture_default_str();
  cmd->add_flag("--indices", o.indices, "Track original positions");
  cmd->add_flag("--check", o.check, "Compare against a stable reference sort");
  cmd->add_flag("--topology", o.topology, "Dump the tree to stderr before running");
}

struct Prepared {
  SimConfig config;
  std::vector<Element> input;
};

Prepared prepare(const RunOptions& o) {
  if (o.input.empty() && o.random == 0) {
    throw InputError("one of --input FILE or --random N is required");
  }
  std::vector<std::uint64_t> values;
  if (!o.input.empty()) {
    std::ifstream file(o.input);
    if (!file) throw InputError("cannot read " + o.input);
    values = read_values(file);
    if (values.empty()) throw InputError(o.input + " holds no values");
  } else {
    values = random_values(o.random, o.width, o.seed);
  }
  Prepared p;
  p.config.n = values.size();
  p.config.width = o.width;
  p.config.variant = parse_variant(o.variant);
  p.config.tie_break = parse_tie_break(o.tie_break);
  if (o.take) p.config.take = o.take;
  p.config.sink = SinkPattern::parse(o.sink);
  p.config.seed = o.seed;
  p.config.track_indices = o.indices;
  p.config.validate();
  p.input = make_elements(values, o.indices);
  return p;
}

std::string format_element(const Element& e) {
  std::string s = std::to_string(e.value);
  if (e.index) s += "," + std::to_string(*e.index);
  return s;
}

bool oracle_agrees(const Prepared& p, const std::vector<Element>& output) {
  auto expected = oracle_stable_sort(p.input);
  expected.resize(p.config.outputs_expected());
  if (p.config.tie_break == TieBreak::left) return expected == output;
  return std::equal(output.begin(), output.end(), expected.begin(), expected.end(),
                    [](const Element& a, const Element& b) { return a.value == b.value; });
}

int report_violations(const std::vector<Violation>& violations, std::ostream& err) {
  for (const auto& v : violations) err << "violation: " << v.to_string() << '\n';
  return violations.empty() ? kOk : kInvariantViolation;
}

int cmd_sort(const RunOptions& o, std::ostream& out, std::ostream& err) {
  Prepared p = prepare(o);
  const Simulator sim(p.config);
  if (o.topology) dump_topology(sim.topology(), err);
  const RunReport report = sim.run(p.input);
  for (const auto& e : report.output) out << format_element(e) << '\n';
  err << "first=" << report.first_output_cycle << " total=" << report.total_cycles
      << " bubbles=" << detect_bubbles(report).size() << '\n';
  int code = report_violations(report.violations, err);
  if (o.check && !oracle_agrees(p, report.output)) {
    err << "check: output differs from the stable reference sort\n";
    code = kInvariantViolation;
  }
  return code;
}

int cmd_compare(const RunOptions& o, std::ostream& out, std::ostream& err) {
  Prepared p = prepare(o);
  const VariantComparison cmp = compare_variants(p.config, p.input);
  out << "variant,first,total,bubbles\n";
  for (const auto* r : {&cmp.hourglass, &cmp.registered}) {
    out << to_string(r->variant) << ',' << r->first_output_cycle << ',' << r->total_cycles << ','
        << r->bubbles << '\n';
  }
  out << "ratio=" << cmp.ratio << '\n';
  int code = kOk;
  for (const auto* r : {&cmp.hourglass, &cmp.registered}) {
    if (!r->matches_oracle || r->violations != 0) {
      err << to_string(r->variant) << ": output or invariants wrong\n";
      code = kInvariantViolation;
    }
  }
  if (!cmp.hourglass_faster) {
    err << "hourglass did not finish before the registered tree\n";
    code = kInvariantViolation;
  }
  return code;
}

int cmd_trace(const RunOptions& o, bool verbose, const std::string& out_path, std::ostream& out,
              std::ostream& err) {
  Prepared p = prepare(o);
  p.config.trace = verbose ? TraceLevel::verbose : TraceLevel::summary;
  const Simulator sim(p.config);
  if (o.topology) dump_topology(sim.topology(), err);
  const RunReport report = sim.run(p.input);

  std::ofstream file;
  std::ostream* sink = &out;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::binary);
    if (!file) throw InputError("cannot write " + out_path);
    sink = &file;
  }
  for (const auto& rec : report.trace) *sink << trace_record_json(rec, verbose) << '\n';
  err << "first=" << report.first_output_cycle << " total=" << report.total_cycles
      << " bubbles=" << detect_bubbles(report).size() << '\n';
  int code = report_violations(report.violations, err);
  if (verbose) {
    code = std::max(code, report_violations(check_invariants(report.trace, p.input), err));
  }
  return code;
}

std::vector<std::uint64_t> parse_list(const std::string& text, const char* what) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(item, &used);
      if (used != item.size() || item.front() == '-') throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw InputError(std::string("bad entry in ") + what + ": '" + item + "'");
    }
  }
  if (out.empty()) throw InputError(std::string(what) + " is empty");
  return out;
}

int cmd_resources(const std::string& sizes_text, const std::string& widths_text, std::ostream& out,
                  std::ostream& err) {
  const auto sizes = parse_list(sizes_text, "--sizes");
  const auto widths = parse_list(widths_text, "--widths");
  for (auto n : sizes) {
    if (n == 0) throw InputError("sizes must be >= 1");
  }
  for (auto w : widths) {
    if (w == 0 || w > 64) throw InputError("widths must be in [1,64]");
  }
  out << kResourceCsvHeader << '\n';
  for (auto w : widths) {
    for (auto n : sizes) {
      const ResourceEstimate e = estimate_resources(n, static_cast<unsigned>(w));
      if (e.extrapolated) {
        err << "warning: n=" << n << " is outside the synthesized power-of-two range;"
            << " reg/carry8 extrapolated from the cell count\n";
      }
      if (!e.lut_estimate) {
        err << "warning: no LUT fit available for n=" << n << " w=" << w
            << " (fit covers w in {8,16,32}, power-of-two n >= 64)\n";
      }
      out << resource_csv_row(e) << '\n';
    }
  }
  return kOk;
}

int cmd_gen(std::size_t n, unsigned width, std::uint64_t seed, const std::string& dup,
            const std::string& out_path, std::ostream& out) {
  const auto values = generate_values(n, width, seed, parse_duplicates(dup));
  std::ofstream file;
  std::ostream* sink = &out;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::binary);
    if (!file) throw InputError("cannot write " + out_path);
    sink = &file;
  }
  for (auto v : values) *sink << v << '\n';
  return kOk;
}

ordered_json slot_json(const Slot& s) { return s ? ordered_json(s->value) : ordered_json(nullptr); }

}  // namespace

Duplicates parse_duplicates(const std::string& text) {
  if (text == "none") return Duplicates::none;
  if (text == "some") return Duplicates::some;
  if (text == "heavy") return Duplicates::heavy;
  throw std::invalid_argument("unknown duplicates mode '" + text + "'");
}

std::vector<std::uint64_t> generate_values(std::size_t n, unsigned width, std::uint64_t seed,
                                           Duplicates mode) {
  if (n == 0) throw std::invalid_argument("gen: n must be >= 1");
  if (width == 0 || width > 64) throw std::invalid_argument("gen: width must be in [1,64]");
  std::mt19937_64 rng(seed);
  const std::uint64_t space = value_space(width);
  std::vector<std::uint64_t> out;
  out.reserve(n);

  if (mode == Duplicates::none) {
    if (space != 0 && space < n) {
      throw std::invalid_argument("gen: cannot draw " + std::to_string(n) +
                                  " distinct values of width " + std::to_string(width));
    }
    std::unordered_set<std::uint64_t> used;
    while (out.size() < n) {
      const auto v = below(rng, space);
      if (used.insert(v).second) out.push_back(v);
    }
    return out;
  }

  std::uint64_t range = mode == Duplicates::some ? std::max<std::uint64_t>(2, n)
                                                 : std::max<std::uint64_t>(2, n / 8);
  if (space != 0) range = std::min(range, space);
  for (std::size_t i = 0; i < n; ++i) out.push_back(below(rng, range));
  return out;
}

std::vector<std::uint64_t> random_values(std::size_t n, unsigned width, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("random: n must be >= 1");
  std::mt19937_64 rng(seed);
  const std::uint64_t space = value_space(width);
  std::vector<std::uint64_t> out(n);
  for (auto& v : out) v = below(rng, space);
  return out;
}

std::vector<std::uint64_t> read_values(std::istream& in) {
  std::vector<std::uint64_t> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(first, last - first + 1);
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
      if (token.front() == '-' || token.front() == '+') throw std::invalid_argument(token);
      v = std::stoull(token, &used, 10);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size() || used == 0) {
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": not an unsigned decimal: '" + token + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::string trace_record_json(const CycleTrace& rec, bool verbose) {
  ordered_json j;
  j["cycle"] = rec.cycle;
  j["root_valid"] = rec.root_valid;
  j["root_txn"] = rec.root_transaction;
  j["value"] = rec.emitted ? ordered_json(rec.emitted->value) : ordered_json(nullptr);
  j["index"] = rec.emitted && rec.emitted->index ? ordered_json(*rec.emitted->index)
                                                 : ordered_json(nullptr);
  j["sink_ready"] = rec.sink_ready;
  if (verbose) {
    ordered_json cells = ordered_json::object();
    for (std::size_t c = 0; c < rec.cells.size(); ++c) {
      const auto& r = rec.cells[c];
      cells[std::to_string(c)] = {{"d0", slot_json(r.d0)},
                                  {"d1", slot_json(r.d1)},
                                  {"v0", r.v0},
                                  {"v1", r.v1}};
    }
    for (std::size_t c = 0; c < rec.registered.size(); ++c) {
      const auto& r = rec.registered[c];
      cells[std::to_string(c)] = {{"d", slot_json(r.d_out)}, {"v", r.v_out}, {"e", r.e_out}};
    }
    j["cells"] = std::move(cells);
  }
  return j.dump();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cycle-accurate simulator for parallel-in/serial-out sorting trees", "hgsort"};
  app.require_subcommand(1);

  RunOptions sort_opts;
  auto* sort = app.add_subcommand("sort", "Sort an array and print it, one value per line");
  add_run_options(sort, sort_opts);

  RunOptions cmp_opts;
  auto* compare = app.add_subcommand("compare", "Run the hourglass and registered trees side by side");
  add_run_options(compare, cmp_opts);

  RunOptions trace_opts;
  bool verbose = false;
  std::string trace_out;
  auto* trace = app.add_subcommand("trace", "Emit one JSON record per clock cycle");
  add_run_options(trace, trace_opts);
  trace->add_flag("--verbose", verbose, "Include every cell's registers");
  trace->add_option("--out", trace_out, "Write records to FILE instead of stdout");

  std::string sizes = "64,128,256,512,1024";
  std::string widths = "8,16,32";
  auto* resources = app.add_subcommand("resources", "Resource and latency estimates as CSV");
  resources->add_option("--sizes", sizes, "Comma-separated array lengths")->capture_default_str();
  resources->add_option("--widths", widths, "Comma-separated element widths")->capture_default_str();

  std::size_t gen_n = 0;
  unsigned gen_width = 16;
  std::uint64_t gen_seed = 0;
  std::string gen_dup = "none";
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Write a random input file");
  gen->add_option("--n", gen_n, "Number of values")->required();
  gen->add_option("--width", gen_width, "Element width in bits")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Seed")->capture_default_str();
  gen->add_option("--duplicates", gen_dup, "none | some | heavy")->capture_default_str();
  gen->add_option("--out", gen_out, "Write to FILE instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*sort) return cmd_sort(sort_opts, out, err);
    if (*compare) return cmd_compare(cmp_opts, out, err);
    if (*trace) return cmd_trace(trace_opts, verbose, trace_out, out, err);
    if (*resources) return cmd_resources(sizes, widths, out, err);
    if (*gen) return cmd_gen(gen_n, gen_width, gen_seed, gen_dup, gen_out, out);
  } catch (const NonTerminationError& e) {
    err << "error: " << e.what() << '\n';
    return kNonTermination;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace hgsort::cli
