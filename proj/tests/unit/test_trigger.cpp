#include <doctest.h>

#include <chrono>
#include <random>

#include "ifsguard/trigger.hpp"
#include "support/oracle.hpp"
#include "support/pipeline.hpp"

using namespace ifsguard;
using namespace ifsguard::benchgen;
using namespace ifsguard::trigger;
using ifs::AssetKind;

namespace {

std::vector<std::vector<benchgen::BusValue>> applied_patterns(const TriggerSequence& seq) {
  std::vector<std::vector<benchgen::BusValue>> out;
  for (const auto& s : seq.steps) {
    if (s.kind != SequenceStep::Kind::Apply) continue;
    std::vector<benchgen::BusValue> step;
    for (const auto& b : group_buses(s.inputs)) {
      CHECK(b.complete);
      step.push_back({b.bus, b.value});
    }
    out.push_back(step);
  }
  return out;
}

std::uint64_t held_cycles(const TriggerSequence& seq) {
  std::uint64_t n = 0;
  for (const auto& s : seq.steps)
    if (s.kind == SequenceStep::Kind::Hold) n += s.cycles;
  return n;
}

// Replays each STG edge one cycle on the independent simulator: state and
// counter registers loaded through scan, inputs from the cube with random
// don't-care fill. The register next values must land on the edge's target.
void check_edges_realizable(const CircuitGraph& g, const Stg& stg, std::mt19937& rng) {
  ScanConfig cfg;
  for (FfId f : stg.state_bits) cfg.scan_enabled.insert(f);
  for (const auto& c : stg.counters) cfg.scan_enabled.insert(c.bits.begin(), c.bits.end());
  const std::size_t tc_base = stg.input_vars.size() - stg.counters.size();
  for (const StgEdge& e : stg.edges) {
    for (int sample = 0; sample < 3; ++sample) {
      atpg::Stimulus stim = atpg::blank_stimulus(g, cfg, 1);
      for (auto& t : stim.initial_state) t = atpg::Tri::Zero;
      auto& fr = stim.frames[0];
      for (std::size_t i = 0; i < stim.inputs.size(); ++i) fr.inputs[i] = atpg::tri(rng() & 1);
      for (std::size_t k = 0; k < stim.scan_ffs.size(); ++k) {
        const FfId f = stim.scan_ffs[k];
        bool v = false;
        for (std::size_t i = 0; i < stg.state_bits.size(); ++i)
          if (stg.state_bits[i] == f) v = (stg.states[e.from] >> i) & 1;
        for (std::size_t c = 0; c < stg.counters.size(); ++c) {
          const auto& bits = stg.counters[c].bits;
          if (std::find(bits.begin(), bits.end(), f) == bits.end()) continue;
          const char tc = e.cube[tc_base + c];
          // tc = 0 stands for any value short of all ones; pick one at random.
          v = tc == '1' || (tc == '-' ? rng() & 1 : (f == bits[0] ? false : rng() & 1));
        }
        fr.scan[k] = atpg::tri(v);
      }
      for (std::size_t i = 0; i < tc_base; ++i) {
        if (e.cube[i] == '-') continue;
        const auto n = g.find_net(stg.input_vars[i]);
        REQUIRE(n);
        for (std::size_t j = 0; j < stim.inputs.size(); ++j)
          if (stim.inputs[j] == *n) fr.inputs[j] = atpg::tri(e.cube[i] == '1');
      }
      auto values = testing::event_simulate(g, stim, std::nullopt);
      std::uint64_t next = 0;
      for (std::size_t i = 0; i < stg.state_bits.size(); ++i)
        if (values[0][index(g.ff(stg.state_bits[i]).d)]) next |= 1ull << i;
      CHECK(next == stg.states[e.to]);
    }
  }
}

const char* kToggle = R"(
module toggle (clk, rstn, y);
  input clk, rstn;
  output y;
  wire q, d;
  NOT n0 (.Y(d), .A(q));
  BUF b0 (.Y(y), .A(q));
  DFF t (.D(d), .Q(q), .CK(clk), .RN(rstn));
endmodule
)";

}  // namespace

TEST_CASE("bus grouping") {
  std::vector<BitValue> bits{{"cnt[0]", false, 0}, {"cnt[2]", true, 0}, {"cnt[1]", false, 0}, {"cnt[5]", true, 0},
                             {"cnt[3]", false, 0}, {"cnt[4]", false, 0}, {"cnt[6]", true, 0},  {"en", true, 1}};
  auto buses = group_buses(bits);
  REQUIRE(buses.size() == 2);
  CHECK(buses[0].bus == "cnt");
  CHECK(buses[0].complete);
  CHECK(buses[0].value == 100);
  CHECK(buses[1].bus == "en");
  CHECK(buses[1].frame == 1);
  CHECK(format_buses(buses) == "cnt=100 en=1@-1");

  auto partial = group_buses({{"pt[0]", true, 0}, {"pt[3]", false, 0}});
  REQUIRE(partial.size() == 1);
  CHECK_FALSE(partial[0].complete);
  CHECK(format_buses(partial) == "pt[0]=1 pt[3]=0");
}

TEST_CASE("direct trigger: specific plaintext") {
  auto run = testing::run_fixture(testing::spec("rsa", Core::Cipher, TriggerKind::SpecificInput, PayloadKind::Bypass),
                                  AssetKind::Confidentiality);
  auto t = analyze_trigger(run.graph, run.report, run.valid);
  REQUIRE(t.direct.buses.size() == 1);
  CHECK(t.direct.buses[0].bus == "pt");
  CHECK(t.direct.buses[0].complete);
  CHECK(t.direct.buses[0].value == run.fixture.manifest.trigger_condition.at(0).value);
  CHECK_FALSE(t.stg);
  CHECK(applied_patterns(t.sequence) == run.fixture.manifest.trigger_sequence);

  // Applying the pattern makes the key visible on ct[0] in that cycle only.
  auto stim = testing::sequence_stimulus(run.graph, t.sequence, 1);
  const NetId key = run.graph.net_by_name("key[0]"), ct0 = run.graph.net_by_name("ct[0]");
  CHECK(testing::replay_confirms(run.graph, stim, key, ct0, 0));
  CHECK_FALSE(testing::replay_confirms(run.graph, stim, key, ct0, 1));
}

TEST_CASE("direct trigger: always-on payload") {
  auto run = testing::run_fixture(testing::spec("t100", Core::Cipher, TriggerKind::AlwaysOn, PayloadKind::XorLfsrLeak),
                                  AssetKind::Confidentiality);
  auto t = analyze_trigger(run.graph, run.report, run.valid);
  CHECK(t.direct.always_on);
  CHECK(t.direct.bits.empty());
  CHECK(t.sequence.found);
  CHECK(t.sequence.steps.empty());
}

TEST_CASE("direct trigger: counter value on the program counter hijack") {
  auto s = testing::spec("pic", Core::Processor, TriggerKind::Counter, PayloadKind::PcHijack);
  s.counter_bits = 7;
  s.counter_match = 100;
  auto run = testing::run_fixture(s, AssetKind::Integrity);
  auto t = analyze_trigger(run.graph, run.report, run.valid);
  REQUIRE(t.direct.buses.size() == 1);
  CHECK(t.direct.buses[0].bus == "cnt");
  CHECK(t.direct.buses[0].value == 100);
  CHECK(t.sequence.found);
  CHECK(held_cycles(t.sequence) == run.fixture.manifest.hold_cycles);

  // After the wait the program counter is forced to all ones whatever the
  // instruction stream says.
  auto stim = testing::sequence_stimulus(run.graph, t.sequence, 1);
  auto values = testing::event_simulate(run.graph, stim, std::nullopt);
  for (int i = 0; i < 4; ++i) {
    const NetId d = run.graph.ff(run.graph.ff_by_name("pc[" + std::to_string(i) + "]")).d;
    CHECK(values[100][index(d)]);
  }
}

TEST_CASE("direct trigger: scan-enable hijack") {
  auto run = testing::run_fixture(testing::spec("scan", Core::Processor, TriggerKind::Counter, PayloadKind::ScanHijack),
                                  AssetKind::Integrity);
  auto t = analyze_trigger(run.graph, run.report, run.valid);
  REQUIRE(t.direct.buses.size() == 1);
  CHECK(t.direct.buses[0].bus == "cnt");
  CHECK(t.direct.buses[0].value == 15);
}

TEST_CASE("FSM trigger: four planted plaintexts, end-to-end leak") {
  auto run = testing::run_fixture(testing::spec("t1100", Core::Cipher, TriggerKind::Fsm, PayloadKind::XorLfsrLeak),
                                  AssetKind::Confidentiality);
  auto t = analyze_trigger(run.graph, run.report, run.valid);
  REQUIRE(t.stg);
  CHECK(t.stg->states.size() == 5);
  CHECK(t.stg->counters.empty());
  CHECK(t.stg->initial == 0);
  CHECK(t.stg->targets == std::vector<std::uint64_t>{4});
  REQUIRE(t.sequence.found);
  CHECK(applied_patterns(t.sequence) == run.fixture.manifest.trigger_sequence);
  CHECK(held_cycles(t.sequence) == 0);

  std::mt19937 rng(5);
  check_edges_realizable(run.graph, *t.stg, rng);

  // Drive the sequence from reset: the leak port depends on the key from the
  // cycle after the last pattern, and not before.
  auto stim = testing::sequence_stimulus(run.graph, t.sequence, 1);
  const NetId key = run.graph.net_by_name("key[0]"), leak = run.graph.net_by_name("leak");
  for (std::uint32_t f = 0; f < 4; ++f) CHECK_FALSE(testing::replay_confirms(run.graph, stim, key, leak, f));
  CHECK(testing::replay_confirms(run.graph, stim, key, leak, 4));
}

TEST_CASE("FSM with a wait counter: the counter becomes a hold, whatever its width") {
  std::string reference_stg;
  std::vector<double> seconds;
  std::mt19937 rng(11);
  for (std::uint32_t width : {4u, 6u, 8u}) {
    CAPTURE(width);
    auto s = testing::spec("t1100m", Core::Cipher, TriggerKind::FsmCounter, PayloadKind::XorLfsrLeak);
    s.counter_bits = width;
    auto run = testing::run_fixture(s, AssetKind::Confidentiality);
    const auto start = std::chrono::steady_clock::now();
    auto t = analyze_trigger(run.graph, run.report, run.valid);
    seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    REQUIRE(t.stg);
    CHECK(t.stg->states.size() == 6);
    REQUIRE(t.stg->counters.size() == 1);
    CHECK(t.stg->counters[0].bits.size() == width);
    REQUIRE(t.sequence.found);
    CHECK(applied_patterns(t.sequence) == run.fixture.manifest.trigger_sequence);
    CHECK(held_cycles(t.sequence) == run.fixture.manifest.hold_cycles);
    CHECK(t.sequence.steps.back().kind == SequenceStep::Kind::Hold);
    check_edges_realizable(run.graph, *t.stg, rng);

    const std::string text = export_stg(run.graph, *t.stg);
    if (reference_stg.empty()) reference_stg = text;
    CHECK(text == reference_stg);

    auto stim = testing::sequence_stimulus(run.graph, t.sequence, 1);
    const NetId key = run.graph.net_by_name("key[0]"), leak = run.graph.net_by_name("leak");
    const std::uint32_t fire = 4 + (1u << width);
    CHECK_FALSE(testing::replay_confirms(run.graph, stim, key, leak, fire - 1));
    CHECK(testing::replay_confirms(run.graph, stim, key, leak, fire));
  }
}

TEST_CASE("one toggling register: two states, and an empty sequence when reset already fires") {
  CircuitGraph g = parse_netlist(kToggle);
  Stg stg = extract_stg(g, {{"t", true, 0}});
  CHECK(stg.states == std::vector<std::uint64_t>{0, 1});
  CHECK(stg.edges.size() == 2);
  auto seq = extract_trigger_sequence(g, stg, {{"t", true, 0}});
  REQUIRE(seq.found);
  REQUIRE(seq.steps.size() == 1);
  CHECK(seq.steps[0].kind == SequenceStep::Kind::Hold);
  CHECK(seq.steps[0].cycles == 1);

  Stg at_reset = extract_stg(g, {{"t", false, 0}});
  auto empty = extract_trigger_sequence(g, at_reset, {{"t", false, 0}});
  CHECK(empty.found);
  CHECK(empty.steps.empty());
}

TEST_CASE("state bound: an oversized FSM is reported partial") {
  auto run = testing::run_fixture(testing::spec("t1100", Core::Cipher, TriggerKind::Fsm, PayloadKind::XorLfsrLeak),
                                  AssetKind::Confidentiality);
  StgOptions tight;
  tight.max_state_bits = 2;
  auto t = analyze_trigger(run.graph, run.report, run.valid, tight);
  REQUIRE(t.stg);
  CHECK(t.stg->partial);
  CHECK_FALSE(t.sequence.found);
}

TEST_CASE("a clean report has no trigger") {
  auto run = testing::run_fixture(testing::spec("free", Core::Cipher, TriggerKind::None, PayloadKind::None),
                                  AssetKind::Confidentiality);
  auto t = analyze_trigger(run.graph, run.report, run.valid);
  CHECK_FALSE(t.direct.always_on);
  CHECK(t.direct.bits.empty());
  CHECK_FALSE(t.sequence.found);
}
