#include <algorithm>
#include <deque>
#include <map>

#include "ifsguard/trigger.hpp"

namespace ifsguard::trigger {
namespace {

void push_hold(std::vector<SequenceStep>& steps, std::uint64_t cycles) {
  if (cycles == 0) return;
  if (!steps.empty() && steps.back().kind == SequenceStep::Kind::Hold) {
    steps.back().cycles += cycles;
    return;
  }
  steps.push_back(SequenceStep{SequenceStep::Kind::Hold, {}, cycles});
}

void push_apply(std::vector<SequenceStep>& steps, std::vector<BitValue> inputs) {
  if (inputs.empty()) {
    push_hold(steps, 1);
    return;
  }
  steps.push_back(SequenceStep{SequenceStep::Kind::Apply, std::move(inputs), 1});
}

std::uint64_t apply_action(CounterAction a, std::uint64_t value, std::uint64_t modulus, std::uint64_t times) {
  switch (a) {
    case CounterAction::Increment: return (value + times) % modulus;
    case CounterAction::Clear: return times ? 0 : value;
    default: return value;
  }
}

// Without state registers the condition is a per-frame input pattern.
TriggerSequence combinational_sequence(const CircuitGraph& g, const std::vector<BitValue>& condition) {
  TriggerSequence seq;
  seq.found = true;
  std::uint32_t max_frame = 0;
  for (const BitValue& b : condition) max_frame = std::max(max_frame, b.frame);
  for (std::uint32_t f = max_frame + 1; f-- > 0;) {
    std::vector<BitValue> inputs;
    for (const BitValue& b : condition) {
      if (b.frame != f) continue;
      if (g.find_ff(b.name)) {
        seq.partial = true;  // a register value this path does not justify
        continue;
      }
      inputs.push_back({b.name, b.value, 0});
    }
    push_apply(seq.steps, std::move(inputs));
  }
  return seq;
}

}  // namespace

TriggerSequence extract_trigger_sequence(const CircuitGraph& g, const Stg& stg,
                                         const std::vector<BitValue>& condition) {
  if (stg.state_bits.empty()) return combinational_sequence(g, condition);

  TriggerSequence seq;
  seq.partial = stg.partial;
  if (stg.states.empty()) return seq;

  std::map<std::uint64_t, std::uint32_t> idx;
  for (std::uint32_t i = 0; i < stg.states.size(); ++i) idx[stg.states[i]] = i;
  auto init = idx.find(stg.initial);
  if (init == idx.end()) return seq;
  std::vector<bool> target(stg.states.size(), false);
  for (std::uint64_t t : stg.targets) target[idx.at(t)] = true;

  std::vector<std::vector<std::uint32_t>> out(stg.states.size());
  for (std::uint32_t e = 0; e < stg.edges.size(); ++e) out[stg.edges[e].from].push_back(e);

  constexpr std::uint32_t kNone = ~0u;
  std::vector<std::uint32_t> via(stg.states.size(), kNone);
  std::vector<bool> seen(stg.states.size(), false);
  std::deque<std::uint32_t> queue{init->second};
  seen[init->second] = true;
  std::uint32_t reached = kNone;
  while (!queue.empty()) {
    std::uint32_t s = queue.front();
    queue.pop_front();
    if (target[s]) {
      reached = s;
      break;
    }
    for (std::uint32_t e : out[s]) {
      std::uint32_t to = stg.edges[e].to;
      if (seen[to]) continue;
      seen[to] = true;
      via[to] = e;
      queue.push_back(to);
    }
  }
  if (reached == kNone) return seq;

  std::vector<std::uint32_t> path;
  for (std::uint32_t s = reached; via[s] != kNone; s = stg.edges[via[s]].from) path.push_back(via[s]);
  std::reverse(path.begin(), path.end());

  const std::size_t tc_base = stg.input_vars.size() - stg.counters.size();
  std::vector<std::uint64_t> value(stg.counters.size(), 0), modulus(stg.counters.size());
  for (std::size_t c = 0; c < stg.counters.size(); ++c) {
    const auto& bits = stg.counters[c].bits;
    modulus[c] = bits.size() >= 64 ? ~0ull : 1ull << bits.size();
    for (std::size_t k = 0; k < bits.size() && k < 64; ++k) {
      const FlipFlop& ff = g.ff(bits[k]);
      if (ff.resettable() && ff.reset->value) value[c] |= 1ull << k;
    }
  }

  for (std::uint32_t e : path) {
    const StgEdge& edge = stg.edges[e];
    std::vector<BitValue> inputs;
    for (std::size_t i = 0; i < tc_base; ++i) {
      if (edge.cube[i] != '-') inputs.push_back({stg.input_vars[i], edge.cube[i] == '1', 0});
    }
    std::uint64_t wait = 0;
    for (std::size_t c = 0; c < stg.counters.size(); ++c) {
      if (edge.cube[tc_base + c] == '1') wait = std::max(wait, modulus[c] - value[c]);
    }
    if (wait) {
      // Idle in the current state until the counter saturates, then leave.
      push_hold(seq.steps, inputs.empty() ? wait : wait - 1);
      if (!inputs.empty()) push_apply(seq.steps, std::move(inputs));
      for (std::size_t c = 0; c < stg.counters.size(); ++c) {
        const CounterAction a = edge.counter_actions[c];
        value[c] = edge.cube[tc_base + c] == '1' ? apply_action(a, modulus[c] - 1, modulus[c], 1)
                                                 : apply_action(a, value[c], modulus[c], wait);
      }
    } else {
      push_apply(seq.steps, std::move(inputs));
      for (std::size_t c = 0; c < stg.counters.size(); ++c) {
        value[c] = apply_action(edge.counter_actions[c], value[c], modulus[c], 1);
      }
    }
  }

  // Inputs the condition needs alongside the final state.
  std::vector<BitValue> final_inputs;
  for (const BitValue& b : condition) {
    if (b.frame == 0 && !g.find_ff(b.name)) final_inputs.push_back({b.name, b.value, 0});
  }
  if (!final_inputs.empty()) push_apply(seq.steps, std::move(final_inputs));
  seq.found = true;
  return seq;
}

TriggerReport analyze_trigger(const CircuitGraph& g, const ifs::FlowReport& report, const std::set<Point>& valid,
                              const StgOptions& options) {
  TriggerReport r;
  r.direct = extract_direct_trigger(g, report, valid);
  if (r.direct.bits.empty()) {
    r.sequence.found = r.direct.always_on;
    return r;
  }
  Stg stg = extract_stg(g, r.direct.bits, options);
  r.sequence = extract_trigger_sequence(g, stg, r.direct.bits);
  if (!stg.state_bits.empty()) r.stg = std::move(stg);
  return r;
}

}  // namespace ifsguard::trigger
