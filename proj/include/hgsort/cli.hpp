#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hgsort/core.hpp"

namespace hgsort::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kInvariantViolation = 2,
  kNonTermination = 3,
};

enum class Duplicates { none, some, heavy };

[[nodiscard]] Duplicates parse_duplicates(const std::string& text);

/// Values below 2^width drawn from a seeded stream. `none` gives distinct
/// values (throws if 2^width < n), `some` draws from a range of size n,
/// `heavy` from a range of size max(2, n/8). Throws on n == 0.
[[nodiscard]] std::vector<std::uint64_t> generate_values(std::size_t n, unsigned width,
                                                         std::uint64_t seed, Duplicates mode);

/// Uniform draw over the full width.
[[nodiscard]] std::vector<std::uint64_t> random_values(std::size_t n, unsigned width,
                                                       std::uint64_t seed);

/// One unsigned decimal per line; blank lines are skipped.
[[nodiscard]] std::vector<std::uint64_t> read_values(std::istream& in);

/// One line-delimited trace record (no trailing newline).
/// Fields, in order: cycle, root_valid, root_txn, value, index, sink_ready and,
/// when verbose, `cells` keyed by cell ordinal.
[[nodiscard]] std::string trace_record_json(const CycleTrace& rec, bool verbose);

/// Entry point shared by the binary and the tests. `args` excludes argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hgsort::cli
