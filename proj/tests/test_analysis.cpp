#include <doctest.h>

#include "hgsort/analysis.hpp"
#include "synth_rows.hpp"

using namespace hgsort;

TEST_CASE("resource model matches every synthesized configuration") {
  for (const auto& row : kSynthRows) {
    CAPTURE(row.n);
    CAPTURE(row.w);
    CHECK(reg_count(row.n, row.w) == row.reg);
    CHECK(carry8_count(row.n, row.w) == row.carry8);
    REQUIRE(lut_fit(row.n, row.w).has_value());
    CHECK(*lut_fit(row.n, row.w) == row.lut);
    CHECK(latency_model(row.n).first == row.latency_first);
    CHECK(latency_model(row.n).total == row.latency_first + row.n);
  }
}

TEST_CASE("resource model edges") {
  CHECK(reg_count(2, 8) == 36);
  CHECK(carry8_count(128, 32) == 254);
  CHECK_FALSE(lut_fit(1024, 12).has_value());
  CHECK_FALSE(lut_fit(32, 8).has_value());
  CHECK_FALSE(lut_fit(100, 8).has_value());

  // Padded trees use the real cell count.
  CHECK(cell_count(6) == 6);
  CHECK(reg_count(6, 8) == 6 * 18 + 6 * 9);
  const auto e = estimate_resources(6, 8);
  CHECK(e.extrapolated);
  CHECK_FALSE(e.lut_estimate.has_value());
  CHECK_FALSE(estimate_resources(64, 8).extrapolated);
}

TEST_CASE("resource CSV rows") {
  CHECK(resource_csv_row(estimate_resources(1024, 8)) == "1024,8,28132,27630,1023,,10+1024");
  CHECK(resource_csv_row(estimate_resources(64, 32)) == "64,32,5482,6270,126,,6+64");
  CHECK(resource_csv_row(estimate_resources(2, 8)) == "2,8,,36,1,,1+2");
  CHECK(std::string(kResourceCsvHeader) == "n,w,lut,reg,carry8,freq,latency");
}

TEST_CASE("latency_model") {
  CHECK(latency_model(1024).first == 10);
  CHECK(latency_model(1024).total == 1034);
  CHECK(latency_model(128).total == 135);
  CHECK(latency_model(6).first == 3);
  CHECK(latency_model(6).total == 9);

  SimConfig c;
  c.n = 6;
  const auto r = run(c, make_elements({5, 1, 4, 1, 0, 2}, false));
  CHECK(r.first_output_cycle == latency_model(6).first);
  CHECK(r.total_cycles == latency_model(6).total);
}

TEST_CASE("measured latency follows the model") {
  for (std::size_t n : {2, 3, 4, 5, 6, 7, 8, 9, 64, 100, 128, 256, 512, 1024}) {
    CAPTURE(n);
    std::vector<std::uint64_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = (i * 2654435761u) % 1000;
    SimConfig c;
    c.n = n;
    c.check_conservation = n <= 256;
    const auto r = run(c, make_elements(v, false));
    CHECK(r.first_output_cycle == latency_model(n).first);
    CHECK(r.total_cycles == latency_model(n).total);
  }
}

TEST_CASE("oracle_stable_sort") {
  CHECK(oracle_stable_sort(make_elements({3, 1, 2}, false)) == make_elements({1, 2, 3}, false));
  const std::vector<Element> ties{{5, 0}, {5, 1}};
  CHECK(oracle_stable_sort(ties) == ties);
  const std::vector<Element> swapped{{5, 1}, {5, 0}};
  CHECK(oracle_stable_sort(swapped) == swapped);
  CHECK(oracle_stable_sort(std::vector<Element>{}).empty());
}

TEST_CASE("detect_bubbles") {
  std::vector<std::uint64_t> v(64);
  for (std::size_t i = 0; i < 64; ++i) v[i] = (i * 37) % 64;
  const auto input = make_elements(v, false);

  SimConfig c;
  c.n = 64;
  const auto hg = run(c, input);
  CHECK(detect_bubbles(hg).empty());
  CHECK(detect_bubbles(hg.trace, hg.first_output_cycle, 64).empty());

  SimConfig r8;
  r8.n = 8;
  r8.variant = Variant::registered;
  const auto reg = run(r8, make_elements({7, 6, 5, 4, 3, 2, 1, 0}, false));
  const auto bubbles = detect_bubbles(reg);
  CHECK(bubbles.size() == 7);
  for (std::size_t i = 0; i < bubbles.size(); ++i) {
    CHECK(bubbles[i] == reg.first_output_cycle + 2 * i + 1);
  }

  // A stalling sink leaves gaps, but none of them are the tree's fault.
  c.sink = SinkPattern::every(2);
  const auto stalled = run(c, input);
  CHECK(detect_bubbles(stalled).empty());
  std::size_t gaps = 0;
  for (const auto& rec : stalled.trace) {
    if (rec.cycle < stalled.first_output_cycle || rec.cycle > stalled.last_output_cycle) continue;
    if (!rec.root_transaction) {
      CHECK_FALSE(rec.sink_ready);
      ++gaps;
    }
  }
  CHECK(gaps == 63);
}

TEST_CASE("compare_variants") {
  SimConfig c;
  c.n = 4;
  auto cmp = compare_variants(c, make_elements({4, 1, 3, 2}, false));
  CHECK(cmp.hourglass.total_cycles == 6);
  CHECK(cmp.registered.total_cycles == 9);
  CHECK(cmp.hourglass_faster);
  CHECK(cmp.hourglass.matches_oracle);
  CHECK(cmp.registered.matches_oracle);

  c.n = 2;
  cmp = compare_variants(c, make_elements({8, 3}, false));
  CHECK(cmp.hourglass.first_output_cycle == 1);
  CHECK(cmp.hourglass.matches_oracle);
  CHECK(cmp.registered.matches_oracle);

  c.n = 1024;
  std::vector<std::uint64_t> v(1024);
  for (std::size_t i = 0; i < 1024; ++i) v[i] = (i * 7919) % 1021;
  c.check_conservation = false;
  cmp = compare_variants(c, make_elements(v, false));
  CHECK(cmp.hourglass.total_cycles == 1034);
  CHECK(cmp.registered.total_cycles >= 2048);
  CHECK(cmp.ratio < 0.51);

  // The ratio falls toward one half as the tree grows.
  double previous = 1.0;
  for (std::size_t n : {4, 16, 64, 256}) {
    SimConfig s;
    s.n = n;
    std::vector<std::uint64_t> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = (i * 31) % 17;
    const auto r = compare_variants(s, make_elements(w, false));
    CHECK(r.ratio < previous);
    CHECK(r.ratio > 0.5);
    previous = r.ratio;
  }
}

TEST_CASE("check_invariants") {
  SimConfig c;
  c.n = 9;
  c.trace = TraceLevel::verbose;
  c.track_indices = true;
  const auto input = make_elements({3, 3, 1, 8, 0, 2, 2, 7, 1}, true);
  auto r = run(c, input);
  CHECK(check_invariants(r.trace, input).empty());

  auto corrupted = r.trace;
  corrupted[4].cells[2].v0 = false;
  corrupted[4].cells[2].v1 = true;
  corrupted[4].cells[2].d1 = Element{5, 0};
  const auto v = check_invariants(corrupted, input);
  REQUIRE_FALSE(v.empty());
  CHECK(v.front().cycle == 4);
  CHECK(v.front().where == "cell 2");
  CHECK(v.front().rule == "v1 set without v0");

  // Dropped value: conservation catches it.
  auto lost = r.trace;
  for (auto& leaf : lost[0].leaves) leaf.v = false;
  CHECK_FALSE(check_invariants(lost, input).empty());

  SimConfig rc = c;
  rc.variant = Variant::registered;
  auto rr = run(rc, input);
  CHECK(check_invariants(rr.trace, input).empty());
  auto unstuck = rr.trace;
  bool patched = false;
  for (std::size_t k = 1; k < unstuck.size() && !patched; ++k) {
    if (unstuck[k - 1].registered[0].e_out) {
      unstuck[k].registered[0].e_out = false;
      patched = true;
    }
  }
  REQUIRE(patched);
  CHECK_FALSE(check_invariants(unstuck, input).empty());
}
