#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "ifsguard/cnf.hpp"
#include "ifsguard/cone.hpp"
#include "ifsguard/sim.hpp"
#include "ifsguard/trigger.hpp"

namespace ifsguard::trigger {
namespace {

using sat::Lit;

struct Support {
  std::set<FfId> ffs;
  std::set<NetId> inputs;
};

Support support_of(const CircuitGraph& g, NetId net) {
  Support s;
  for (Point p : fanin_startpoints(g, net).endpoints) {
    if (p.is_ff()) {
      s.ffs.insert(p.ff());
    } else if (p.kind == Point::Kind::PrimaryInput) {
      s.inputs.insert(p.net());
    }
  }
  return s;
}

/// One combinational frame with every startpoint free. `shared` supplies
/// literals to reuse (a previous frame's), except for the listed FFs.
class Frame {
 public:
  Frame(sat::CnfBuilder& cnf, const CircuitGraph& g, const std::vector<Lit>* shared = nullptr,
        const std::set<FfId>& fresh_ffs = {}) {
    lits.assign(g.nets().size(), sat::kNoLit);
    for (const Net& n : g.nets()) {
      const auto id = index(n.id);
      switch (n.driver.kind) {
        case DriverKind::Constant: lits[id] = cnf.constant(n.driver.id != 0); break;
        case DriverKind::Latch: lits[id] = cnf.constant(false); break;
        case DriverKind::PrimaryInput: lits[id] = shared ? (*shared)[id] : cnf.fresh(); break;
        case DriverKind::FlipFlop:
          lits[id] = (shared && !fresh_ffs.count(FfId{n.driver.id})) ? (*shared)[id] : cnf.fresh();
          break;
        case DriverKind::None: lits[id] = cnf.constant(false); break;
        default: break;
      }
    }
    std::vector<bool> forced(g.nets().size(), false);
    sat::encode_frame(cnf, g, lits, forced, {});
  }
  std::vector<Lit> lits;
};

Lit equal_vec(sat::CnfBuilder& cnf, const std::vector<Lit>& a, const std::vector<Lit>& b) {
  std::vector<Lit> eqs;
  for (std::size_t i = 0; i < a.size(); ++i) eqs.push_back(~cnf.xor2(a[i], b[i]));
  return cnf.and_n(eqs);
}

// Next-state function of `group` is always one of g+1, g, 0, g-1.
bool behaves_as_counter(const CircuitGraph& g, const std::vector<FfId>& group, std::uint64_t budget) {
  sat::Solver solver;
  sat::CnfBuilder cnf(solver);
  Frame f(cnf, g);
  std::vector<Lit> q, d;
  for (FfId b : group) {
    q.push_back(f.lits[index(g.ff(b).q)]);
    d.push_back(f.lits[index(g.ff(b).d)]);
  }
  std::vector<Lit> inc, dec, zero(group.size(), cnf.constant(false));
  Lit carry = cnf.constant(true), borrow = cnf.constant(true);
  for (Lit b : q) {
    inc.push_back(cnf.xor2(b, carry));
    dec.push_back(cnf.xor2(b, borrow));
    std::vector<Lit> c{b, carry}, w{~b, borrow};
    carry = cnf.and_n(c);
    borrow = cnf.and_n(w);
  }
  for (const auto* target : {&inc, &q, &zero, &dec}) cnf.require(~equal_vec(cnf, d, *target));
  return solver.solve({budget}) == sat::Result::Unsat;
}

// The next state of `fsm` depends on the counter only through "all ones".
bool depends_only_on_terminal_count(const CircuitGraph& g, const std::vector<FfId>& fsm,
                                    const std::vector<FfId>& group, std::uint64_t budget) {
  sat::Solver solver;
  sat::CnfBuilder cnf(solver);
  Frame a(cnf, g);
  Frame b(cnf, g, &a.lits, std::set<FfId>(group.begin(), group.end()));
  std::vector<Lit> qa, qb;
  for (FfId c : group) {
    qa.push_back(a.lits[index(g.ff(c).q)]);
    qb.push_back(b.lits[index(g.ff(c).q)]);
  }
  cnf.require(~cnf.and_n(qa));
  cnf.require(~cnf.and_n(qb));
  std::vector<Lit> diffs;
  for (FfId s : fsm) {
    NetId d = g.ff(s).d;
    diffs.push_back(cnf.xor2(a.lits[index(d)], b.lits[index(d)]));
  }
  cnf.require_any(diffs);
  return solver.solve({budget}) == sat::Result::Unsat;
}

bool reset_value(const FlipFlop& ff) { return ff.resettable() && ff.reset->value; }

CounterAction action_from(std::uint64_t next_of_one) {
  switch (next_of_one) {
    case 2: return CounterAction::Increment;
    case 1: return CounterAction::Hold;
    case 0: return CounterAction::Clear;
    default: return CounterAction::Mixed;
  }
}

// Deterministic cube cover by Shannon expansion on the highest variable.
void cover(const std::vector<char>& tt, std::uint32_t vars, std::string& cube, std::vector<std::string>& out) {
  bool any = false, all = true;
  for (char c : tt) {
    any |= c != 0;
    all &= c != 0;
  }
  if (!any) return;
  if (all) {
    for (std::uint32_t i = 0; i < vars; ++i) cube[i] = '-';
    out.push_back(cube);
    return;
  }
  const std::uint32_t v = vars - 1;
  const std::size_t half = tt.size() / 2;
  std::vector<char> f0(tt.begin(), tt.begin() + half), f1(tt.begin() + half, tt.end()), both(half);
  for (std::size_t i = 0; i < half; ++i) {
    both[i] = f0[i] && f1[i];
    f0[i] = f0[i] && !both[i];
    f1[i] = f1[i] && !both[i];
  }
  const std::string saved = cube;
  cube[v] = '-';
  cover(both, v, cube, out);
  cube = saved;
  cube[v] = '0';
  cover(f0, v, cube, out);
  cube = saved;
  cube[v] = '1';
  cover(f1, v, cube, out);
  cube = saved;
}

}  // namespace

const char* action_name(CounterAction a) {
  switch (a) {
    case CounterAction::None: return "none";
    case CounterAction::Increment: return "inc";
    case CounterAction::Hold: return "hold";
    case CounterAction::Clear: return "clear";
    case CounterAction::Mixed: return "mixed";
  }
  return "?";
}

Stg extract_stg(const CircuitGraph& g, const std::vector<BitValue>& condition, const StgOptions& options) {
  Stg stg;
  const std::set<FfId> state_regs = identify_state_registers(g);

  // Condition values per register, from the frame closest to the payload.
  std::map<FfId, bool> wanted;
  {
    std::map<FfId, std::uint32_t> frame_of;
    for (const BitValue& b : condition) {
      auto f = g.find_ff(b.name);
      if (!f || !state_regs.count(*f)) continue;
      auto it = frame_of.find(*f);
      if (it == frame_of.end() || b.frame < it->second) {
        frame_of[*f] = b.frame;
        wanted[*f] = b.value;
      }
    }
  }
  if (wanted.empty()) return stg;

  std::set<FfId> S;
  for (const auto& [f, v] : wanted) S.insert(f);
  std::set<FfId> counted;
  std::vector<std::vector<FfId>> groups;

  // Close S over the state registers it reads; a neighbouring group that
  // acts as a counter and is only read through its terminal count is kept
  // out of the state space.
  for (;;) {
    std::set<FfId> cand;
    for (FfId s : S)
      for (FfId f : support_of(g, g.ff(s).d).ffs)
        if (state_regs.count(f) && !S.count(f) && !counted.count(f)) cand.insert(f);
    if (cand.empty()) break;
    for (std::vector<FfId> work(cand.begin(), cand.end()); !work.empty();) {
      FfId c = work.back();
      work.pop_back();
      for (FfId f : support_of(g, g.ff(c).d).ffs) {
        if (state_regs.count(f) && !S.count(f) && !counted.count(f) && cand.insert(f).second) work.push_back(f);
      }
    }
    std::vector<std::pair<std::size_t, FfId>> order;
    for (FfId c : cand) {
      const Support sup = support_of(g, g.ff(c).d);
      order.emplace_back(sup.ffs.size() + sup.inputs.size(), c);
    }
    std::sort(order.begin(), order.end());
    std::vector<FfId> group;
    for (const auto& [size, c] : order) group.push_back(c);

    const std::vector<FfId> fsm(S.begin(), S.end());
    if (group.size() >= 2 && group.size() < 64 && behaves_as_counter(g, group, options.budget) &&
        depends_only_on_terminal_count(g, fsm, group, options.budget)) {
      groups.push_back(group);
      counted.insert(group.begin(), group.end());
    } else {
      S.insert(group.begin(), group.end());
    }
    if (S.size() > options.max_state_bits) break;
  }
  stg.state_bits.assign(S.begin(), S.end());
  if (S.size() > options.max_state_bits) {
    stg.partial = true;
    return stg;
  }
  // Growing S after a group was accepted may have exposed other counter bits.
  for (auto it = groups.begin(); it != groups.end();) {
    if (depends_only_on_terminal_count(g, stg.state_bits, *it, options.budget)) {
      ++it;
      continue;
    }
    stg.partial = true;
    it = groups.erase(it);
  }

  // Free inputs of the enumeration: primary inputs and non-state flip-flops
  // feeding S or a counter, then one terminal-count variable per counter.
  std::set<NetId> pis;
  std::set<FfId> free_ffs;
  auto collect = [&](FfId f) {
    Support sup = support_of(g, g.ff(f).d);
    pis.insert(sup.inputs.begin(), sup.inputs.end());
    for (FfId x : sup.ffs)
      if (!S.count(x) && !counted.count(x)) free_ffs.insert(x);
  };
  for (FfId s : S) collect(s);
  for (const auto& grp : groups)
    for (FfId c : grp) collect(c);

  std::vector<NetId> var_nets;
  for (NetId n : pis) {
    stg.input_vars.push_back(g.net(n).name);
    var_nets.push_back(n);
  }
  for (FfId f : free_ffs) {
    stg.input_vars.push_back(g.ff(f).name);
    var_nets.push_back(g.ff(f).q);
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    stg.counters.push_back(Counter{groups[i], "tc" + std::to_string(i)});
    stg.input_vars.push_back(stg.counters.back().tc_name);
  }
  const auto n = static_cast<std::uint32_t>(stg.input_vars.size());
  const auto m = static_cast<std::uint32_t>(stg.state_bits.size());
  if (n > options.max_input_vars || n + m > 22) {
    stg.partial = true;
    return stg;
  }

  for (std::uint32_t i = 0; i < m; ++i) {
    if (reset_value(g.ff(stg.state_bits[i]))) stg.initial |= 1ull << i;
  }

  // Enumerate every (state, input) pair bit-parallel. Pattern p holds the
  // input assignment in its low n bits and the state in the rest.
  const std::uint64_t total = 1ull << (n + m);
  const std::uint64_t inputs_mask = (1ull << n) - 1;
  const std::size_t lanes = static_cast<std::size_t>(std::clamp<std::uint64_t>(total / 64, 1, 16));
  sim::BlockSimulator bs(g, {}, lanes);
  const std::uint32_t tc_base = n - static_cast<std::uint32_t>(groups.size());

  using EdgeKey = std::pair<std::uint64_t, std::uint32_t>;  // next state, packed actions
  std::vector<std::map<EdgeKey, std::vector<char>>> table(1ull << m);
  std::vector<std::uint64_t> next_words(m * lanes);
  std::vector<std::vector<std::uint64_t>> counter_next(groups.size());

  auto clear_sources = [&] {
    for (NetId pi : g.primary_inputs()) std::fill(bs.net(pi).begin(), bs.net(pi).end(), 0);
    for (const FlipFlop& ff : g.flipflops()) std::fill(bs.net(ff.q).begin(), bs.net(ff.q).end(), 0);
    for (const Latch& l : g.latches()) std::fill(bs.net(l.q).begin(), bs.net(l.q).end(), 0);
  };

  for (std::uint64_t start = 0; start < total; start += 64 * lanes) {
    clear_sources();
    for (std::uint32_t v = 0; v < tc_base; ++v) sim::enumeration_pattern(bs.net(var_nets[v]), v, start);
    for (std::uint32_t i = 0; i < m; ++i) sim::enumeration_pattern(bs.net(g.ff(stg.state_bits[i]).q), n + i, start);
    for (std::size_t c = 0; c < groups.size(); ++c) {
      // tc = 0 stands for any non-terminal value (0), tc = 1 for all ones.
      std::vector<std::uint64_t> tc(lanes);
      sim::enumeration_pattern(tc, tc_base + static_cast<std::uint32_t>(c), start);
      for (FfId b : groups[c]) std::copy(tc.begin(), tc.end(), bs.net(g.ff(b).q).begin());
    }
    bs.evaluate();
    for (std::uint32_t i = 0; i < m; ++i) {
      auto w = bs.net(g.ff(stg.state_bits[i]).d);
      std::copy(w.begin(), w.end(), next_words.begin() + i * lanes);
    }
    if (!groups.empty()) {
      // Counter action: load the value 1 and see where it goes.
      for (std::size_t c = 0; c < groups.size(); ++c) {
        for (std::size_t k = 0; k < groups[c].size(); ++k) {
          auto q = bs.net(g.ff(groups[c][k]).q);
          std::fill(q.begin(), q.end(), k == 0 ? ~0ull : 0ull);
        }
      }
      bs.evaluate();
      for (std::size_t c = 0; c < groups.size(); ++c) {
        counter_next[c].assign(groups[c].size() * lanes, 0);
        for (std::size_t k = 0; k < groups[c].size(); ++k) {
          auto w = bs.net(g.ff(groups[c][k]).d);
          std::copy(w.begin(), w.end(), counter_next[c].begin() + k * lanes);
        }
      }
    }
    for (std::size_t lane = 0; lane < lanes; ++lane) {
      for (std::uint32_t bit = 0; bit < 64; ++bit) {
        const std::uint64_t p = start + lane * 64 + bit;
        if (p >= total) break;
        std::uint64_t next = 0;
        for (std::uint32_t i = 0; i < m; ++i) next |= ((next_words[i * lanes + lane] >> bit) & 1) << i;
        std::uint32_t actions = 0;
        for (std::size_t c = 0; c < groups.size(); ++c) {
          std::uint64_t val = 0;
          for (std::size_t k = 0; k < groups[c].size() && k < 64; ++k) {
            val |= ((counter_next[c][k * lanes + lane] >> bit) & 1) << k;
          }
          actions |= static_cast<std::uint32_t>(action_from(val)) << (3 * c);
        }
        auto& tt = table[p >> n][{next, actions}];
        if (tt.empty()) tt.assign(1ull << n, 0);
        tt[p & inputs_mask] = 1;
      }
    }
  }

  // Targets: every state agreeing with the condition on the bits it names.
  const std::uint64_t states = 1ull << m;
  std::vector<bool> is_target(states, false);
  for (std::uint64_t s = 0; s < states; ++s) {
    bool ok = true;
    for (std::uint32_t i = 0; i < m && ok; ++i) {
      auto it = wanted.find(stg.state_bits[i]);
      if (it != wanted.end()) ok = (((s >> i) & 1) != 0) == it->second;
    }
    is_target[s] = ok;
  }

  std::vector<std::vector<std::uint64_t>> pred(states);
  for (std::uint64_t s = 0; s < states; ++s)
    for (const auto& [key, tt] : table[s]) pred[key.first].push_back(s);

  std::vector<bool> coreach(states, false);
  std::deque<std::uint64_t> queue;
  for (std::uint64_t s = 0; s < states; ++s) {
    if (is_target[s]) {
      coreach[s] = true;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    std::uint64_t s = queue.front();
    queue.pop_front();
    for (std::uint64_t p : pred[s]) {
      if (!coreach[p]) {
        coreach[p] = true;
        queue.push_back(p);
      }
    }
  }
  std::vector<bool> reach(states, false);
  reach[stg.initial] = true;
  queue.push_back(stg.initial);
  while (!queue.empty()) {
    std::uint64_t s = queue.front();
    queue.pop_front();
    for (const auto& [key, tt] : table[s]) {
      if (!reach[key.first]) {
        reach[key.first] = true;
        queue.push_back(key.first);
      }
    }
  }

  std::map<std::uint64_t, std::uint32_t> idx;
  for (std::uint64_t s = 0; s < states; ++s) {
    if (reach[s] && coreach[s]) {
      idx[s] = static_cast<std::uint32_t>(stg.states.size());
      stg.states.push_back(s);
      if (is_target[s]) stg.targets.push_back(s);
    }
  }
  for (std::uint64_t s : stg.states) {
    for (const auto& [key, tt] : table[s]) {
      auto to = idx.find(key.first);
      if (to == idx.end()) continue;
      std::vector<std::string> cubes;
      std::string cube(n, '-');
      cover(tt, n, cube, cubes);
      std::vector<CounterAction> actions;
      for (std::size_t c = 0; c < groups.size(); ++c) {
        actions.push_back(static_cast<CounterAction>((key.second >> (3 * c)) & 7));
      }
      for (const std::string& cb : cubes) stg.edges.push_back(StgEdge{idx[s], to->second, cb, actions});
    }
  }
  return stg;
}

std::string export_stg(const CircuitGraph& g, const Stg& stg) {
  std::ostringstream os;
  os << "state_bits";
  for (FfId f : stg.state_bits) os << ' ' << g.ff(f).name;
  os << "\ninputs";
  for (const std::string& v : stg.input_vars) os << ' ' << v;
  os << '\n';
  for (const Counter& c : stg.counters) os << "counter " << c.tc_name << '\n';
  os << "initial s" << stg.initial << "\ntargets";
  for (std::uint64_t t : stg.targets) os << " s" << t;
  os << '\n';
  if (stg.partial) os << "partial\n";
  for (const StgEdge& e : stg.edges) {
    os << 's' << stg.states[e.from] << " -> s" << stg.states[e.to] << " [inputs=" << e.cube;
    for (std::size_t c = 0; c < e.counter_actions.size(); ++c) {
      os << ' ' << stg.counters[c].tc_name << '=' << action_name(e.counter_actions[c]);
    }
    os << "]\n";
  }
  return os.str();
}

}  // namespace ifsguard::trigger
