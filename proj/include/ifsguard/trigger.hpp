#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ifsguard/ifs.hpp"
#include "ifsguard/netlist.hpp"

namespace ifsguard::trigger {

/// A required value on a design element: a primary input (net name) or a
/// flip-flop (instance name). `frame` counts back from the frame in which
/// the payload is observed, so 0 is "same cycle".
struct BitValue {
  std::string name;
  bool value;
  std::uint32_t frame = 0;
  friend auto operator<=>(const BitValue&, const BitValue&) = default;
};

/// Bits of one bus (`name[i]`) folded into an integer when every index
/// 0..width-1 is present.
struct BusValue {
  std::string bus;
  std::uint32_t width = 0;
  std::uint64_t value = 0;
  std::uint64_t known = 0;  // mask of indices present
  bool complete = false;
  std::uint32_t frame = 0;
  friend bool operator==(const BusValue&, const BusValue&) = default;
};

std::vector<BusValue> group_buses(const std::vector<BitValue>& bits);
std::string format_buses(const std::vector<BusValue>& buses);

struct DirectTrigger {
  /// No bit is needed: the payload is active whenever the asset is.
  bool always_on = false;
  std::vector<BitValue> bits;
  std::vector<BusValue> buses;
  /// Bits required by one witness and contradicted by another.
  std::vector<std::string> conflicting;
};

/// Bits whose single flip destroys the witness's detection (three-valued
/// replay). The fault site itself is excluded.
std::vector<BitValue> necessary_bits(const CircuitGraph& graph, const ifs::ReportedPoint& point);

/// Merges the necessary bits of every malicious point's witness. Integrity
/// reports keep only bits on elements outside the valid points' fan-out
/// cone: the rest is legitimate datapath context, not trigger logic.
DirectTrigger extract_direct_trigger(const CircuitGraph& graph, const ifs::FlowReport& report,
                                     const std::set<Point>& valid);

/// A counter recognized next to the trigger FSM, abstracted to its
/// terminal-count bit.
struct Counter {
  std::vector<FfId> bits;  // least significant first
  std::string tc_name;     // "tc0", "tc1", ...
};

enum class CounterAction : std::uint8_t { None, Increment, Hold, Clear, Mixed };
const char* action_name(CounterAction a);

struct StgEdge {
  std::uint32_t from;
  std::uint32_t to;
  std::string cube;  // over Stg::input_vars, one of '0', '1', '-' per var
  std::vector<CounterAction> counter_actions;  // per counter
  friend bool operator==(const StgEdge&, const StgEdge&) = default;
};

struct StgOptions {
  std::uint32_t max_state_bits = 12;  // 4096 states
  std::uint32_t max_input_vars = 14;
  std::uint64_t budget = 1'000'000;
};

struct Stg {
  std::vector<FfId> state_bits;
  /// Input variable names: primary inputs, free flip-flops, then counter
  /// terminal counts.
  std::vector<std::string> input_vars;
  std::vector<Counter> counters;
  /// States are encoded as integers over state_bits (bit i = state_bits[i]).
  std::vector<std::uint64_t> states;
  std::uint64_t initial = 0;
  std::vector<std::uint64_t> targets;
  std::vector<StgEdge> edges;  // indices into `states`
  /// Set when the state space exceeded the bounds; the graph is incomplete.
  bool partial = false;
};

/// Recovers the state transition graph of the registers named by
/// `condition` (the state-register part of a direct trigger), keeping only
/// states reachable from reset that can reach the trigger condition.
Stg extract_stg(const CircuitGraph& graph, const std::vector<BitValue>& condition, const StgOptions& options = {});

struct SequenceStep {
  enum class Kind : std::uint8_t { Apply, Hold };
  Kind kind = Kind::Apply;
  std::vector<BitValue> inputs;
  std::uint64_t cycles = 1;
};

struct TriggerSequence {
  bool found = false;
  bool partial = false;
  std::vector<SequenceStep> steps;
};

/// Shortest activation sequence from reset. Runs of cycles without any
/// required input collapse into Hold steps; waiting on a counter becomes a
/// Hold of the remaining count.
TriggerSequence extract_trigger_sequence(const CircuitGraph& graph, const Stg& stg,
                                         const std::vector<BitValue>& condition);

/// Plain-text export, one edge per line:
/// `s<from> -> s<to> [inputs=...]`. Counter widths are not part of the text.
std::string export_stg(const CircuitGraph& graph, const Stg& stg);

/// Everything the CLI reports about a trigger.
struct TriggerReport {
  DirectTrigger direct;
  std::optional<Stg> stg;
  TriggerSequence sequence;
};

TriggerReport analyze_trigger(const CircuitGraph& graph, const ifs::FlowReport& report, const std::set<Point>& valid,
                              const StgOptions& options = {});

}  // namespace ifsguard::trigger
