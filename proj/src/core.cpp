#include "hgsort/core.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace hgsort {

namespace {

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T out{};
  if constexpr (std::is_floating_point_v<T>) {
    // from_chars for double is missing on some toolchains still in use.
    std::string copy(text);
    std::size_t used = 0;
    try {
      out = std::stod(copy, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != copy.size()) {
      throw std::invalid_argument("bad " + std::string(what) + ": '" + copy + "'");
    }
  } else {
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw std::invalid_argument("bad " + std::string(what) + ": '" + std::string(text) + "'");
    }
  }
  return out;
}

}  // namespace

SinkPattern SinkPattern::parse(std::string_view text) {
  if (text == "always") {
    return always();
  }
  if (text.starts_with("every:")) {
    auto k = parse_number<std::uint64_t>(text.substr(6), "sink period");
    if (k == 0) {
      throw std::invalid_argument("sink period must be >= 1");
    }
    return every(k);
  }
  if (text.starts_with("random:")) {
    auto p = parse_number<double>(text.substr(7), "sink probability");
    if (!(p > 0.0 && p <= 1.0)) {
      throw std::invalid_argument("sink probability must be in (0,1]");
    }
    return random(p);
  }
  throw std::invalid_argument("unknown sink pattern '" + std::string(text) +
                              "' (expected always, every:K or random:P)");
}

std::string SinkPattern::to_string() const {
  switch (kind) {
    case Kind::always_ready:
      return "always";
    case Kind::every_k:
      return "every:" + std::to_string(period);
    case Kind::random: {
      std::ostringstream os;
      os << "random:" << probability;
      return os.str();
    }
  }
  return "?";
}

void SimConfig::validate() const {
  if (n == 0) {
    throw std::invalid_argument("n must be >= 1");
  }
  if (width == 0 || width > 64) {
    throw std::invalid_argument("width must be in [1,64]");
  }
  if (take && (*take == 0 || *take > n)) {
    throw std::invalid_argument("take must be in [1,n]");
  }
  if (sink.kind == SinkPattern::Kind::every_k && sink.period == 0) {
    throw std::invalid_argument("sink period must be >= 1");
  }
  if (sink.kind == SinkPattern::Kind::random &&
      !(sink.probability > 0.0 && sink.probability <= 1.0)) {
    throw std::invalid_argument("sink probability must be in (0,1]");
  }
}

std::string Violation::to_string() const {
  std::ostringstream os;
  os << "cycle " << cycle << ": " << where << ": " << rule;
  return os.str();
}

std::string_view to_string(TieBreak t) { return t == TieBreak::left ? "left" : "right"; }

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::hourglass:
      return "hourglass";
    case Variant::registered:
      return "registered";
    case Variant::combinational:
      return "combinational";
  }
  return "?";
}

TieBreak parse_tie_break(std::string_view text) {
  if (text == "left") return TieBreak::left;
  if (text == "right") return TieBreak::right;
  throw std::invalid_argument("unknown tie-break '" + std::string(text) + "'");
}

Variant parse_variant(std::string_view text) {
  if (text == "hourglass") return Variant::hourglass;
  if (text == "registered") return Variant::registered;
  if (text == "combinational") return Variant::combinational;
  throw std::invalid_argument("unknown variant '" + std::string(text) + "'");
}

std::vector<Element> make_elements(const std::vector<std::uint64_t>& values, bool with_indices) {
  std::vector<Element> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    Element e{values[i], std::nullopt};
    if (with_indices) {
      e.index = static_cast<std::uint32_t>(i);
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace hgsort
