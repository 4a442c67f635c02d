#include <doctest.h>

#include <random>

#include "ifsguard/cone.hpp"
#include "ifsguard/ifs.hpp"
#include "ifsguard/report.hpp"
#include "support/circuits.hpp"
#include "support/oracle.hpp"
#include "support/pipeline.hpp"

using namespace ifsguard;
using namespace ifsguard::benchgen;
using ifs::AssetKind;

namespace {

std::set<std::string> names(const CircuitGraph& g, const std::set<Point>& pts) {
  std::set<std::string> out;
  for (Point p : pts) out.insert(point_name(g, p));
  return out;
}

// Every witness, replayed on the independent simulator, shows the forced
// source making a difference at the reported point.
void check_witnesses(const CircuitGraph& g, const ifs::FlowReport& r) {
  for (const auto& lvl : r.levels) {
    for (const auto& rp : lvl) {
      CAPTURE(point_name(g, rp.point));
      CHECK(testing::replay_confirms(g, rp.witness.stimulus, rp.fault_net, rp.witness.target.net, rp.witness.frame));
    }
  }
}

}  // namespace

TEST_CASE("c17: the equality property fails though N1 never reaches N23") {
  CircuitGraph g = parse_netlist(testing::kC17);
  const NetId n1 = g.net_by_name("N1");
  CHECK(ifs::check_equality_property(g, n1, g.net_by_name("N23")).violated);
  CHECK(ifs::check_equality_property(g, n1, g.net_by_name("N22")).violated);
  CHECK(testing::two_run_differs(g, full_scan(g), n1, g.net_by_name("N22"), 1));
  CHECK_FALSE(testing::two_run_differs(g, full_scan(g), n1, g.net_by_name("N23"), 1));

  auto r = ifs::confidentiality_verify(g, ifs::resolve_asset(g, "N1", AssetKind::Confidentiality));
  CHECK(names(g, r.reported_points()) == std::set<std::string>{"N22"});
  check_witnesses(g, r);
}

TEST_CASE("asset names: bare index form and registers") {
  auto f = generate(testing::spec("p", Core::Processor, TriggerKind::Counter, PayloadKind::PcHijack));
  CircuitGraph g = parse_netlist(f.netlist);
  auto a = ifs::resolve_asset(g, "pc0", AssetKind::Integrity);
  CHECK(a.net == g.ff(g.ff_by_name("pc[0]")).d);
  auto c = ifs::resolve_asset(g, "pc[0]", AssetKind::Confidentiality);
  CHECK(c.net == g.ff(g.ff_by_name("pc[0]")).q);
  CHECK_THROWS_AS(ifs::resolve_asset(g, "nothing", AssetKind::Integrity), GraphError);
}

TEST_CASE("Type II: leak port and LFSR flagged, control fixture clean") {
  auto t100 = testing::run_fixture(testing::spec("t100", Core::Cipher, TriggerKind::AlwaysOn, PayloadKind::XorLfsrLeak),
                                   AssetKind::Confidentiality);
  CHECK(testing::malicious_names(t100) == testing::manifest_malicious(t100));
  CHECK(t100.report.verdict == ifs::Verdict::TypeII);
  check_witnesses(t100.graph, t100.report);

  auto free = testing::run_fixture(testing::spec("free", Core::Cipher, TriggerKind::None, PayloadKind::None),
                                   AssetKind::Confidentiality);
  CHECK(free.report.malicious.empty());
  CHECK(free.report.verdict == ifs::Verdict::NoneFound);
  // Every ciphertext bit is reached by the key.
  std::set<std::string> cts;
  for (const auto& [p, d] : free.report.depth->depths) cts.insert(point_name(free.graph, p));
  CHECK(cts.size() == 8);
}

TEST_CASE("Type II through an isolated shift register") {
  auto run = testing::run_fixture(
      testing::spec("t2000", Core::Cipher, TriggerKind::Counter, PayloadKind::ShiftRegister), AssetKind::Confidentiality);
  CHECK(testing::malicious_names(run) == testing::manifest_malicious(run));
}

TEST_CASE("Type I: the bypass is the shallow valid point") {
  auto rsa = testing::run_fixture(testing::spec("rsa", Core::Cipher, TriggerKind::SpecificInput, PayloadKind::Bypass),
                                  AssetKind::Confidentiality);
  REQUIRE(rsa.report.depth);
  CHECK(rsa.report.verdict == ifs::Verdict::TypeI);
  REQUIRE(rsa.report.malicious.size() == 1);
  const auto& m = rsa.report.malicious.front();
  CHECK(point_name(rsa.graph, m.point) == "ct[0]");
  CHECK(m.reason == ifs::MaliciousReason::ShallowDepth);
  const auto* rp = rsa.report.find(m.point);
  REQUIRE(rp);
  CHECK(rp->witness.path.depth <= 0.2 * rsa.report.depth->median);

  // The unmodified cipher has no outlier at the same threshold.
  auto free = testing::run_fixture(testing::spec("free", Core::Cipher, TriggerKind::None, PayloadKind::None),
                                   AssetKind::Confidentiality, 0.5);
  CHECK(free.report.malicious.empty());

  // theta = 0 never flags anything.
  ifs::depth_analysis(rsa.report, rsa.valid, 0.0);
  CHECK(rsa.report.malicious.empty());
}

TEST_CASE("depth analysis needs two valid points") {
  ifs::FlowReport r;
  ifs::ReportedPoint rp;
  rp.point = Point::output(NetId{0});
  rp.witness.path.depth = 1;
  r.levels.push_back({rp});
  ifs::depth_analysis(r, {rp.point}, 0.9);
  CHECK(r.malicious.empty());
}

TEST_CASE("integrity: counter control points of the program counter") {
  auto s = testing::spec("pic", Core::Processor, TriggerKind::Counter, PayloadKind::PcHijack);
  s.counter_bits = 7;
  s.counter_match = 100;
  auto run = testing::run_fixture(s, AssetKind::Integrity);
  CHECK(testing::malicious_names(run) == testing::manifest_malicious(run));
  CHECK(run.report.verdict == ifs::Verdict::TypeII);
  check_witnesses(run.graph, run.report);
  // The instruction register is a legitimate control point.
  CHECK(run.report.find(Point::flipflop(run.graph.ff_by_name("ir[3]"))) != nullptr);
}

TEST_CASE("integrity: internal drivers of scan enable") {
  auto run = testing::run_fixture(testing::spec("scan", Core::Processor, TriggerKind::Counter, PayloadKind::ScanHijack),
                                  AssetKind::Integrity);
  CHECK(testing::malicious_names(run) == testing::manifest_malicious(run));
  CHECK(run.report.find(Point::input(run.graph.net_by_name("test_se"))) != nullptr);
  check_witnesses(run.graph, run.report);
}

TEST_CASE("integrity: key replacement is controlled by the counter") {
  auto run = testing::run_fixture(testing::spec("rsa400", Core::Cipher, TriggerKind::Counter, PayloadKind::KeyReplace),
                                  AssetKind::Integrity);
  CHECK(testing::malicious_names(run) == testing::manifest_malicious(run));
}

TEST_CASE("level discipline: each level lies one register stage past the previous") {
  auto run = testing::run_fixture(testing::spec("t1100", Core::Cipher, TriggerKind::Fsm, PayloadKind::XorLfsrLeak),
                                  AssetKind::Confidentiality);
  const auto& g = run.graph;
  std::set<Point> frontier = fanout_endpoints(g, run.report.asset.net).endpoints;
  for (const auto& lvl : run.report.levels) {
    std::set<Point> next;
    for (const auto& rp : lvl) {
      CHECK(frontier.count(rp.point) == 1);
      if (rp.point.is_ff()) {
        auto more = fanout_endpoints(g, g.ff(rp.point.ff()).q).endpoints;
        next.insert(more.begin(), more.end());
      }
    }
    frontier = next;
  }

  auto pic = testing::run_fixture(testing::spec("pic", Core::Processor, TriggerKind::Counter, PayloadKind::PcHijack),
                                  AssetKind::Integrity);
  frontier = fanin_startpoints(pic.graph, pic.report.asset.net).endpoints;
  for (const auto& lvl : pic.report.levels) {
    std::set<Point> next;
    for (const auto& rp : lvl) {
      CHECK(frontier.count(rp.point) == 1);
      if (rp.point.is_ff()) {
        auto more = fanin_startpoints(pic.graph, pic.graph.ff(rp.point.ff()).d).endpoints;
        next.insert(more.begin(), more.end());
      }
    }
    frontier = next;
  }
}

TEST_CASE("parallel candidates give the sequential result") {
  auto s = testing::spec("t100", Core::Cipher, TriggerKind::AlwaysOn, PayloadKind::XorLfsrLeak);
  ifs::Params par;
  par.jobs = 4;
  auto a = testing::run_fixture(s, AssetKind::Confidentiality);
  auto b = testing::run_fixture(s, AssetKind::Confidentiality, 0.5, par);
  report::AssetAnalysis ra{a.report, a.valid, std::nullopt}, rb{b.report, b.valid, std::nullopt};
  CHECK(report::render_json(a.graph, "verify-conf", {ra}) == report::render_json(b.graph, "verify-conf", {rb}));
}

TEST_CASE("unanalyzable elements are carried into the report") {
  auto s = testing::spec("t100", Core::Cipher, TriggerKind::AlwaysOn, PayloadKind::XorLfsrLeak);
  s.planted_latch = true;
  s.uncontrollable_ff = true;
  auto run = testing::run_fixture(s, AssetKind::Confidentiality);
  std::set<std::string> elems;
  for (const auto& d : run.report.diagnostics) elems.insert(d.element);
  CHECK(elems == std::set<std::string>{"lat0", "stuck0"});
  // The planted elements never show up as observe points.
  CHECK(run.report.find(Point::output(run.graph.net_by_name("dbg_l"))) == nullptr);
  CHECK(testing::malicious_names(run) == testing::manifest_malicious(run));
}

TEST_CASE("a tiny budget abandons instead of guessing") {
  ifs::Params p;
  p.atpg.budget = 1;
  auto run = testing::run_fixture(testing::spec("free", Core::Cipher, TriggerKind::None, PayloadKind::None),
                                  AssetKind::Confidentiality, 0.5, p);
  CHECK_FALSE(run.report.abandoned.empty());
  for (const auto& a : run.report.abandoned) CHECK(run.report.find(a.point) == nullptr);
}

TEST_CASE("random designs: reported observe points equal the two-run oracle") {
  std::mt19937 rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 25; ++trial) {
    CircuitGraph g = parse_netlist(benchgen::random_design(rng, {3, 3, 10 + trial % 6, 2}));
    const NetId asset = g.net_by_name("a0");
    ifs::Params p;
    p.atpg.depth = 2;
    auto r = ifs::confidentiality_verify(g, ifs::resolve_asset(g, "a0", AssetKind::Confidentiality), p);
    REQUIRE(r.abandoned.empty());
    CHECK(r.reported_points() == testing::taint_observe_points(g, asset, 2));
    check_witnesses(g, r);
    ++checked;
  }
  CHECK(checked == 25);
}
