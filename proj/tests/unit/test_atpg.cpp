#include <doctest.h>

#include <random>

#include "ifsguard/atpg.hpp"
#include "ifsguard/benchgen.hpp"
#include "ifsguard/cone.hpp"
#include "support/circuits.hpp"
#include "support/oracle.hpp"

using namespace ifsguard;
using namespace ifsguard::atpg;

namespace {

Options with_depth(std::uint32_t d) {
  Options o;
  o.depth = d;
  return o;
}

std::vector<ObserveTarget> all_observe_points(const CircuitGraph& g, const ScanConfig& cfg) {
  std::vector<ObserveTarget> out;
  for (NetId po : g.primary_outputs()) out.push_back(observe_point(g, Point::output(po)));
  for (FfId f : cfg.scan_enabled) out.push_back(observe_point(g, Point::flipflop(f)));
  return out;
}

}  // namespace

TEST_CASE("c17: no flow from N1 to N23, flow to N22 in one frame") {
  CircuitGraph g = parse_netlist(testing::kC17);
  ScanConfig cfg = full_scan(g);
  NetId n1 = g.net_by_name("N1");
  auto to23 = detect(g, cfg, {n1, false}, {observe_point(g, Point::output(g.net_by_name("N23")))}, with_depth(1));
  CHECK(to23.status == Detection::Status::Undetectable);
  for (bool v : {false, true}) {
    auto to22 = detect(g, cfg, {n1, v}, {observe_point(g, Point::output(g.net_by_name("N22")))}, with_depth(1));
    REQUIRE(to22.status == Detection::Status::Detected);
    CHECK(to22.frame == 0);
    CHECK(to22.stimulus.frame_count() == 1);
    CHECK(to22.path.depth == 2);
    CHECK(testing::replay_confirms(g, to22.stimulus, n1, g.net_by_name("N22"), 0));
  }
  // A witness must set N3=1 (to open g1) and N2/N11 so that N16 = 1.
  auto w = detect(g, cfg, {n1, false}, {observe_point(g, Point::output(g.net_by_name("N22")))}, with_depth(1));
  const auto& in = w.stimulus.inputs;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (g.net(in[i]).name == "N3") CHECK(w.stimulus.frames[0].inputs[i] == Tri::One);
    if (g.net(in[i]).name == "N1") CHECK(w.stimulus.frames[0].inputs[i] == Tri::X);
  }
}

TEST_CASE("model shape follows the scan configuration") {
  CircuitGraph g = parse_netlist(testing::kShift3);
  NetId a = g.net_by_name("a");
  auto full = build_unrolled_model(g, full_scan(g), {a, false}, 4);
  CHECK(shape(*full).frames == 4);
  CHECK(shape(*full).forced_frames == 4);
  CHECK(shape(*full).scan_free_at_frame0 == 3);
  auto none = build_unrolled_model(g, ScanConfig{}, {a, false}, 4);
  CHECK(shape(*none).scan_free_at_frame0 == 0);
}

TEST_CASE("shift register needs one frame per stage without scan") {
  CircuitGraph g = parse_netlist(testing::kShift3);
  NetId a = g.net_by_name("a");
  std::vector<ObserveTarget> y{observe_point(g, Point::output(g.net_by_name("y")))};
  ScanConfig none;
  CHECK(detect(g, none, {a, true}, y, with_depth(3)).status == Detection::Status::Undetectable);
  auto d = detect(g, none, {a, true}, y, with_depth(4));
  REQUIRE(d.status == Detection::Status::Detected);
  CHECK(d.frame == 3);
  CHECK(d.path.depth == 1);
  CHECK(d.path.steps.size() == 4);
  Options adaptive = with_depth(1);
  adaptive.adaptive = true;
  CHECK(detect(g, none, {a, true}, y, adaptive).status == Detection::Status::Detected);
  // Scanning f1 cuts the chain: the flow now ends at f1's capture.
  ScanConfig cut;
  cut.scan_enabled.insert(g.ff_by_name("f1"));
  CHECK(detect(g, cut, {a, true}, y, with_depth(8)).status == Detection::Status::Undetectable);
  auto at_f1 = detect(g, cut, {a, true}, {observe_point(g, Point::flipflop(g.ff_by_name("f1")))}, with_depth(8));
  CHECK(at_f1.status == Detection::Status::Detected);
  CHECK(at_f1.frame == 1);
}

TEST_CASE("masked observe points are ignored") {
  CircuitGraph g = parse_netlist(testing::kShift3);
  ScanConfig cfg = full_scan(g);
  Point f0 = Point::flipflop(g.ff_by_name("f0"));
  Point masked[] = {f0};
  ScanConfig m = mask(g, cfg, masked);
  auto targets = std::vector<ObserveTarget>{observe_point(g, f0)};
  CHECK(detect(g, cfg, {g.net_by_name("a"), false}, targets, with_depth(2)).status == Detection::Status::Detected);
  CHECK(detect(g, m, {g.net_by_name("a"), false}, targets, with_depth(2)).status == Detection::Status::Undetectable);
}

TEST_CASE("detection agrees with the exhaustive oracle and replays independently") {
  std::mt19937 rng(4242);
  int detected = 0, checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    CircuitGraph g = parse_netlist(benchgen::random_design(rng, {3, 3, 10 + trial % 8, 2}));
    ScanConfig cfg;
    for (const FlipFlop& ff : g.flipflops())
      if (rng() % 2) cfg.scan_enabled.insert(ff.id);
    NetId asset = g.net_by_name("a0");
    const std::uint32_t depth = 1 + trial % 3;
    for (const ObserveTarget& t : all_observe_points(g, cfg)) {
      if (testing::free_bits(g, cfg, asset, depth) > 20) continue;
      bool truth = testing::two_run_differs(g, cfg, asset, t.net, depth);
      for (bool v : {false, true}) {
        auto d = detect(g, cfg, {asset, v}, {t}, with_depth(depth));
        CAPTURE(trial);
        CHECK((d.status == Detection::Status::Detected) == truth);
        ++checked;
        if (d.status != Detection::Status::Detected) continue;
        ++detected;
        CHECK(d.frame < depth);
        CHECK(testing::replay_confirms(g, d.stimulus, asset, t.net, d.frame));
        CHECK(differs(g, cfg, d.stimulus, asset, t.net, d.frame));
      }
    }
  }
  CHECK(checked > 100);
  CHECK(detected > 20);
}

TEST_CASE("deeper unrolling never loses a detection") {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    CircuitGraph g = parse_netlist(benchgen::random_design(rng, {3, 4, 14, 2}));
    ScanConfig cfg;
    NetId asset = g.net_by_name("a0");
    for (const ObserveTarget& t : all_observe_points(g, cfg)) {
      bool before = false;
      for (std::uint32_t d = 1; d <= 5; ++d) {
        bool now = detect(g, cfg, {asset, true}, {t}, with_depth(d)).status == Detection::Status::Detected;
        CHECK((!before || now));
        before = now;
      }
    }
  }
}

TEST_CASE("three-valued replay of a relaxed witness still detects") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    CircuitGraph g = parse_netlist(benchgen::random_design(rng, {4, 3, 16, 2}));
    ScanConfig cfg = full_scan(g);
    NetId asset = g.net_by_name("a1");
    auto d = detect(g, cfg, {asset, false}, all_observe_points(g, cfg), with_depth(2));
    if (d.status != Detection::Status::Detected) continue;
    Trace a = simulate(g, cfg, d.stimulus, Forcing{asset, false}, true);
    Trace b = simulate(g, cfg, d.stimulus, Forcing{asset, true}, true);
    Tri x = a.values[d.frame][index(d.target.net)], y = b.values[d.frame][index(d.target.net)];
    CHECK(x != Tri::X);
    CHECK(y != Tri::X);
    CHECK(x != y);
  }
}

TEST_CASE("state justification") {
  SUBCASE("reset state at depth zero") {
    CircuitGraph g = parse_netlist(testing::kCounter3);
    std::vector<StateTarget> zero;
    for (const FlipFlop& ff : g.flipflops()) zero.push_back({ff.id, false});
    auto j = justify_state(g, ScanConfig{}, zero, 0, 1000);
    CHECK(j.status == Justification::Status::Reachable);
    CHECK(j.stimulus.frame_count() == 0);
  }
  SUBCASE("counter value 5 needs five enabled cycles") {
    CircuitGraph g = parse_netlist(testing::kCounter3);
    std::vector<StateTarget> five{{g.ff_by_name("r0"), true}, {g.ff_by_name("r1"), false}, {g.ff_by_name("r2"), true}};
    CHECK(justify_state(g, ScanConfig{}, five, 4, 100000).status == Justification::Status::Unreachable);
    auto j = justify_state(g, ScanConfig{}, five, 5, 100000);
    REQUIRE(j.status == Justification::Status::Reachable);
    REQUIRE(j.stimulus.frame_count() == 5);
    Trace t = simulate(g, ScanConfig{}, j.stimulus, std::nullopt, false);
    CHECK(t.final_state[index(g.ff_by_name("r0"))] == Tri::One);
    CHECK(t.final_state[index(g.ff_by_name("r1"))] == Tri::Zero);
    CHECK(t.final_state[index(g.ff_by_name("r2"))] == Tri::One);
  }
  SUBCASE("a state outside the reachable set") {
    CircuitGraph g = parse_netlist(testing::kRing3);
    std::vector<StateTarget> two_hot{{g.ff_by_name("f0"), true}, {g.ff_by_name("f1"), true}};
    for (std::uint32_t d = 0; d <= 6; ++d)
      CHECK(justify_state(g, ScanConfig{}, two_hot, d, 100000).status == Justification::Status::Unreachable);
  }
}

TEST_CASE("check_flow needs both polarities at the same point") {
  CircuitGraph g = parse_netlist(testing::kC17);
  ScanConfig cfg = full_scan(g);
  NetId n1 = g.net_by_name("N1");
  std::vector<ObserveTarget> both{observe_point(g, Point::output(g.net_by_name("N23"))),
                                  observe_point(g, Point::output(g.net_by_name("N22")))};
  auto r = check_flow(g, cfg, n1, both, with_depth(1));
  REQUIRE(r.status == Detection::Status::Detected);
  CHECK(g.net(r.witness.target.net).name == "N22");
  CHECK(activatable(g, cfg, g.net_by_name("N23"), true, with_depth(1)) == Detection::Status::Detected);
}
