#include <algorithm>
#include <stdexcept>

#include "ifsguard/atpg.hpp"
#include "ifsguard/cnf.hpp"

namespace ifsguard::atpg {

using sat::kNoLit;
using sat::Lit;

class UnrolledModel {
 public:
  UnrolledModel(const CircuitGraph& g, const ScanConfig& cfg, std::optional<StuckAtFault> fault, std::uint32_t depth,
                const Options& options, const std::vector<NetId>* hint)
      : graph(g), cfg(cfg), fault(fault), depth(depth), options(options), cnf(solver) {
    layout = blank_stimulus(g, cfg, depth, options);
    compute_needed(hint);
    encode();
  }

  const CircuitGraph& graph;
  ScanConfig cfg;
  std::optional<StuckAtFault> fault;
  std::uint32_t depth;
  Options options;
  sat::Solver solver;
  sat::CnfBuilder cnf;
  Stimulus layout;

  std::vector<std::vector<bool>> needed;  // [frame][net]
  std::vector<std::vector<Lit>> good, faulty;
  std::vector<std::vector<Lit>> pi_vars, scan_vars;  // [frame][slot]
  std::vector<Lit> init_vars;                          // aligned with layout.free_initial
  std::size_t input_variables = 0;
  std::uint32_t forced_frames = 0;

  Stimulus read_model() const {
    Stimulus s = layout;
    auto val = [&](Lit l) {
      if (l == kNoLit) return Tri::X;
      bool v = solver.model_value(l.var()) != l.negated();
      return tri(v);
    };
    for (std::size_t i = 0; i < init_vars.size(); ++i) s.initial_state[i] = val(init_vars[i]);
    for (std::uint32_t t = 0; t < depth; ++t) {
      for (std::size_t i = 0; i < pi_vars[t].size(); ++i) s.frames[t].inputs[i] = val(pi_vars[t][i]);
      for (std::size_t j = 0; j < scan_vars[t].size(); ++j) s.frames[t].scan[j] = val(scan_vars[t][j]);
    }
    return s;
  }

 private:
  Lit fresh_input() {
    ++input_variables;
    return cnf.fresh();
  }

  // Backward cone of influence per frame; a non-scan FF output needed in
  // frame t pulls its data net into frame t-1.
  void compute_needed(const std::vector<NetId>* hint) {
    const std::size_t n = graph.nets().size();
    needed.assign(depth, std::vector<bool>(n, hint == nullptr));
    if (hint == nullptr) return;
    auto topo = graph.topo_order();
    for (std::uint32_t t = depth; t-- > 0;) {
      auto& need = needed[t];
      for (NetId net : *hint) need[index(net)] = true;
      if (fault) need[index(fault->net)] = true;
      if (t + 1 < depth) {
        for (const FlipFlop& ff : graph.flipflops()) {
          if (!cfg.is_scan(ff.id) && !graph.is_frozen(ff.id) && needed[t + 1][index(ff.q)]) need[index(ff.d)] = true;
        }
      }
      for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        const Cell& c = graph.cell(*it);
        if (!need[index(c.output)]) continue;
        for (NetId in : c.inputs) need[index(in)] = true;
      }
    }
  }

  void encode() {
    const std::size_t n = graph.nets().size();
    std::vector<std::int32_t> pi_slot(n, -1);
    for (std::size_t i = 0; i < layout.inputs.size(); ++i) pi_slot[index(layout.inputs[i])] = static_cast<std::int32_t>(i);
    std::vector<std::int32_t> scan_slot(graph.flipflops().size(), -1);
    for (std::size_t j = 0; j < layout.scan_ffs.size(); ++j) scan_slot[index(layout.scan_ffs[j])] = static_cast<std::int32_t>(j);

    // Initial state literal per FF (reset constant or free variable).
    std::vector<Lit> init(graph.flipflops().size(), cnf.constant(false));
    for (const FlipFlop& ff : graph.flipflops()) {
      if (ff.resettable() && options.reset_initial) init[index(ff.id)] = cnf.constant(ff.reset->value);
    }
    for (FfId f : layout.free_initial) {
      init_vars.push_back(fresh_input());
      init[index(f)] = init_vars.back();
    }

    std::vector<bool> forced(n, false);
    if (fault) forced[index(fault->net)] = true;

    for (std::uint32_t t = 0; t < depth; ++t) {
      std::vector<Lit> g(n, kNoLit);
      pi_vars.emplace_back(layout.inputs.size(), kNoLit);
      scan_vars.emplace_back(layout.scan_ffs.size(), kNoLit);
      for (const Net& net : graph.nets()) {
        const auto id = index(net.id);
        switch (net.driver.kind) {
          case DriverKind::Constant: g[id] = cnf.constant(net.driver.id != 0); break;
          case DriverKind::PrimaryInput:
            if (pi_slot[id] >= 0) {
              if (needed[t][id]) pi_vars[t][pi_slot[id]] = fresh_input();
              g[id] = needed[t][id] ? pi_vars[t][pi_slot[id]] : cnf.constant(false);
            } else {
              g[id] = cnf.constant(false);
            }
            break;
          case DriverKind::FlipFlop: {
            FfId f{net.driver.id};
            if (scan_slot[index(f)] >= 0) {
              if (needed[t][id]) {
                scan_vars[t][scan_slot[index(f)]] = fresh_input();
                g[id] = scan_vars[t][scan_slot[index(f)]];
              }
            } else if (graph.is_frozen(f) || t == 0) {
              g[id] = init[index(f)];
            } else {
              g[id] = good[t - 1][index(graph.ff(f).d)];
            }
            break;
          }
          case DriverKind::Latch: g[id] = cnf.constant(false); break;
          default: break;
        }
      }
      std::vector<Lit> f;
      if (fault) {
        f = g;
        for (const FlipFlop& ff : graph.flipflops()) {
          if (t > 0 && !cfg.is_scan(ff.id) && !graph.is_frozen(ff.id)) f[index(ff.q)] = faulty[t - 1][index(ff.d)];
        }
        f[index(fault->net)] = cnf.constant(fault->value);
        ++forced_frames;
      }
      sat::encode_frame(cnf, graph, g, {}, needed[t]);
      if (fault) {
        // Activation: the good rail holds the opposite value in every frame.
        Lit a = g[index(fault->net)];
        cnf.require(fault->value ? ~a : a);
        sat::encode_frame(cnf, graph, f, forced, needed[t], &g);
      }
      good.push_back(std::move(g));
      faulty.push_back(std::move(f));
    }
  }
};

void UnrolledModelDeleter::operator()(UnrolledModel* m) const { delete m; }

UnrolledModelPtr build_unrolled_model(const CircuitGraph& graph, const ScanConfig& cfg, StuckAtFault fault,
                                      std::uint32_t depth, const Options& options,
                                      const std::vector<NetId>* cone_hint) {
  return UnrolledModelPtr(new UnrolledModel(graph, cfg, fault, depth, options, cone_hint));
}

ModelShape shape(const UnrolledModel& m) {
  std::size_t scan0 = 0;
  if (m.depth > 0) {
    for (Lit l : m.scan_vars[0]) scan0 += l != kNoLit;
  }
  return ModelShape{m.depth, m.solver.num_vars(), m.input_variables, m.forced_frames, scan0};
}

namespace {

bool target_usable(const CircuitGraph& g, const ScanConfig& cfg, const ObserveTarget& t) {
  if (!t.point) return true;
  return is_observable(g, cfg, *t.point) && !cfg.is_masked(*t.point);
}

// Greedy don't-care relaxation: a bit becomes X when the three-valued replay
// still shows a definite difference at the observed net.
void relax(const CircuitGraph& g, const ScanConfig& cfg, Stimulus& s, NetId fault_net, NetId target,
           std::uint32_t frame, const Options& options) {
  auto still_detects = [&]() {
    Trace a = simulate(g, cfg, s, Forcing{fault_net, false}, true, options);
    Trace b = simulate(g, cfg, s, Forcing{fault_net, true}, true, options);
    Tri x = a.values[frame][index(target)], y = b.values[frame][index(target)];
    return x != Tri::X && y != Tri::X && x != y;
  };
  auto try_bit = [&](Tri& bit) {
    if (bit == Tri::X) return;
    Tri keep = bit;
    bit = Tri::X;
    if (!still_detects()) bit = keep;
  };
  if (!still_detects()) return;  // keep the fully specified witness
  for (Tri& b : s.initial_state) try_bit(b);
  for (auto& f : s.frames) {
    for (Tri& b : f.inputs) try_bit(b);
    for (Tri& b : f.scan) try_bit(b);
  }
}

}  // namespace

Detection detect_fault(UnrolledModel& m, const std::vector<ObserveTarget>& targets, std::uint64_t budget) {
  if (!m.fault) throw std::logic_error("model has no fault");
  Detection d;
  std::vector<Lit> diffs;
  for (const ObserveTarget& tg : targets) {
    if (!target_usable(m.graph, m.cfg, tg)) continue;
    for (std::uint32_t t = 0; t < m.depth; ++t) {
      Lit a = m.good[t][index(tg.net)], b = m.faulty[t][index(tg.net)];
      if (a == kNoLit || b == kNoLit || a == b) continue;
      diffs.push_back(m.cnf.xor2(a, b));
    }
  }
  diffs.erase(std::remove(diffs.begin(), diffs.end(), m.cnf.constant(false)), diffs.end());
  if (diffs.empty()) return d;
  m.cnf.require_any(diffs);
  const auto before = m.solver.stats().decisions;
  sat::Result r = m.solver.solve(sat::Limits{budget});
  d.decisions = m.solver.stats().decisions - before;
  if (r == sat::Result::Unsat) return d;
  if (r == sat::Result::Unknown) {
    d.status = Detection::Status::Abandoned;
    return d;
  }

  Stimulus s = m.read_model();
  // Unencoded inputs replay as 0; make that explicit before relaxation.
  for (Tri& b : s.initial_state) b = tri(resolve(b));
  for (auto& f : s.frames) {
    for (Tri& b : f.inputs) b = tri(resolve(b));
    for (Tri& b : f.scan) b = tri(resolve(b));
  }
  const NetId fnet = m.fault->net;
  Trace a = simulate(m.graph, m.cfg, s, Forcing{fnet, false}, false, m.options);
  Trace b = simulate(m.graph, m.cfg, s, Forcing{fnet, true}, false, m.options);
  std::optional<std::pair<ObserveTarget, std::uint32_t>> hit;
  for (std::uint32_t t = 0; t < m.depth && !hit; ++t) {
    for (const ObserveTarget& tg : targets) {
      if (!target_usable(m.graph, m.cfg, tg)) continue;
      if (a.values[t][index(tg.net)] != b.values[t][index(tg.net)]) {
        hit.emplace(tg, t);
        break;
      }
    }
  }
  if (!hit) throw std::logic_error("solver witness does not replay");
  s.frames.resize(hit->second + 1);
  relax(m.graph, m.cfg, s, fnet, hit->first.net, hit->second, m.options);
  d.status = Detection::Status::Detected;
  d.target = hit->first;
  d.frame = hit->second;
  d.path = extract_path(m.graph, m.cfg, s, fnet, hit->first.net, hit->second, m.options);
  d.stimulus = std::move(s);
  return d;
}

Detection detect(const CircuitGraph& graph, const ScanConfig& cfg, StuckAtFault fault,
                 const std::vector<ObserveTarget>& targets, const Options& options) {
  std::vector<NetId> hint;
  for (const ObserveTarget& t : targets) hint.push_back(t.net);
  std::uint32_t depth = std::max<std::uint32_t>(1, options.depth);
  std::uint64_t spent = 0;
  for (;;) {
    auto model = build_unrolled_model(graph, cfg, fault, depth, options, &hint);
    Detection d = detect_fault(*model, targets, options.budget);
    spent += d.decisions;
    d.decisions = spent;
    if (d.status != Detection::Status::Undetectable || !options.adaptive || depth >= options.max_depth) return d;
    depth = std::min(depth * 2, options.max_depth);
  }
}

FlowResult check_flow(const CircuitGraph& graph, const ScanConfig& cfg, NetId net,
                      const std::vector<ObserveTarget>& targets, const Options& options) {
  FlowResult out;
  bool abandoned = false;
  for (const ObserveTarget& tg : targets) {
    if (!target_usable(graph, cfg, tg)) continue;
    Detection d0 = detect(graph, cfg, StuckAtFault{net, false}, {tg}, options);
    out.decisions += d0.decisions;
    if (d0.status == Detection::Status::Undetectable) continue;
    Detection d1 = detect(graph, cfg, StuckAtFault{net, true}, {tg}, options);
    out.decisions += d1.decisions;
    if (d0.status == Detection::Status::Detected && d1.status == Detection::Status::Detected) {
      out.status = Detection::Status::Detected;
      out.witness = std::move(d0);
      return out;
    }
    if (d1.status != Detection::Status::Undetectable) abandoned = true;
  }
  out.status = abandoned ? Detection::Status::Abandoned : Detection::Status::Undetectable;
  return out;
}

Detection::Status activatable(const CircuitGraph& graph, const ScanConfig& cfg, NetId net, bool value,
                              const Options& options) {
  std::vector<NetId> hint{net};
  UnrolledModel m(graph, cfg, std::nullopt, std::max<std::uint32_t>(1, options.depth), options, &hint);
  std::vector<Lit> hits;
  for (std::uint32_t t = 0; t < m.depth; ++t) {
    Lit l = m.good[t][index(net)];
    hits.push_back(value ? l : ~l);
  }
  m.cnf.require_any(hits);
  switch (m.solver.solve(sat::Limits{options.budget})) {
    case sat::Result::Sat: return Detection::Status::Detected;
    case sat::Result::Unsat: return Detection::Status::Undetectable;
    default: return Detection::Status::Abandoned;
  }
}

Justification justify_state(const CircuitGraph& graph, const ScanConfig& cfg, const std::vector<StateTarget>& target,
                            std::uint32_t depth, std::uint64_t budget, const Options& options) {
  Justification j;
  if (depth == 0) {
    j.stimulus = blank_stimulus(graph, cfg, 0, options);
    std::vector<int> want(graph.flipflops().size(), -1);
    for (const StateTarget& st : target) {
      int v = st.value ? 1 : 0;
      if (want[index(st.ff)] >= 0 && want[index(st.ff)] != v) return j;
      want[index(st.ff)] = v;
      const FlipFlop& ff = graph.ff(st.ff);
      if (!cfg.is_scan(st.ff) && ff.resettable() && options.reset_initial && ff.reset->value != st.value) return j;
    }
    for (std::size_t i = 0; i < j.stimulus.free_initial.size(); ++i) {
      int w = want[index(j.stimulus.free_initial[i])];
      if (w >= 0) j.stimulus.initial_state[i] = tri(w == 1);
    }
    j.status = Justification::Status::Reachable;
    return j;
  }
  std::vector<NetId> hint;
  for (const StateTarget& st : target) hint.push_back(graph.ff(st.ff).d);
  // Only the last frame's data nets matter; earlier frames follow from the
  // FF chaining in the cone computation.
  UnrolledModel m(graph, cfg, std::nullopt, depth, options, &hint);
  for (const StateTarget& st : target) {
    if (graph.is_frozen(st.ff)) {
      Lit q = m.good[0][index(graph.ff(st.ff).q)];
      m.cnf.require(st.value ? q : ~q);
      continue;
    }
    Lit l = m.good[depth - 1][index(graph.ff(st.ff).d)];
    m.cnf.require(st.value ? l : ~l);
  }
  switch (m.solver.solve(sat::Limits{budget})) {
    case sat::Result::Sat: break;
    case sat::Result::Unsat: return j;
    default: j.status = Justification::Status::Abandoned; return j;
  }
  j.stimulus = m.read_model();
  j.status = Justification::Status::Reachable;
  return j;
}

}  // namespace ifsguard::atpg
