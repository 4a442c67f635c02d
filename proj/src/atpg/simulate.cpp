#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

#include "ifsguard/atpg.hpp"

namespace ifsguard::atpg {
namespace {

Tri eval3(CellKind kind, const std::vector<Tri>& in) {
  auto inv = [](Tri t) { return t == Tri::X ? Tri::X : (t == Tri::One ? Tri::Zero : Tri::One); };
  switch (kind) {
    case CellKind::Buf: return in[0];
    case CellKind::Not: return inv(in[0]);
    case CellKind::Mux2: {
      if (in[0] == Tri::Zero) return in[1];
      if (in[0] == Tri::One) return in[2];
      return in[1] == in[2] ? in[1] : Tri::X;
    }
    case CellKind::And:
    case CellKind::Nand: {
      Tri r = Tri::One;
      for (Tri t : in) {
        if (t == Tri::Zero) {
          r = Tri::Zero;
          break;
        }
        if (t == Tri::X) r = Tri::X;
      }
      return kind == CellKind::Nand ? inv(r) : r;
    }
    case CellKind::Or:
    case CellKind::Nor: {
      Tri r = Tri::Zero;
      for (Tri t : in) {
        if (t == Tri::One) {
          r = Tri::One;
          break;
        }
        if (t == Tri::X) r = Tri::X;
      }
      return kind == CellKind::Nor ? inv(r) : r;
    }
    case CellKind::Xor:
    case CellKind::Xnor: {
      bool parity = false;
      for (Tri t : in) {
        if (t == Tri::X) return Tri::X;
        parity = parity != (t == Tri::One);
      }
      Tri r = tri(parity);
      return kind == CellKind::Xnor ? inv(r) : r;
    }
  }
  return Tri::X;
}

}  // namespace

char tri_char(Tri t) { return t == Tri::Zero ? '0' : t == Tri::One ? '1' : 'X'; }

std::size_t Stimulus::care_bits() const {
  std::size_t n = 0;
  for (Tri t : initial_state) n += t != Tri::X;
  for (const Frame& f : frames) {
    for (Tri t : f.inputs) n += t != Tri::X;
    for (Tri t : f.scan) n += t != Tri::X;
  }
  return n;
}

ObserveTarget observe_point(const CircuitGraph& g, Point p) {
  if (p.kind == Point::Kind::PrimaryInput) throw GraphError("a primary input is not an observe point");
  return ObserveTarget{p.is_ff() ? g.ff(p.ff()).d : p.net(), p};
}

ObserveTarget observe_net(NetId net) { return ObserveTarget{net, std::nullopt}; }

const char* status_name(Detection::Status s) {
  switch (s) {
    case Detection::Status::Detected: return "detected";
    case Detection::Status::Undetectable: return "undetectable";
    case Detection::Status::Abandoned: return "abandoned";
  }
  return "?";
}

Stimulus blank_stimulus(const CircuitGraph& g, const ScanConfig& cfg, std::uint32_t frames, const Options& options) {
  Stimulus s;
  s.inputs = g.data_inputs();
  for (const FlipFlop& ff : g.flipflops()) {
    if (cfg.is_scan(ff.id)) {
      s.scan_ffs.push_back(ff.id);
    } else if (!(ff.resettable() && options.reset_initial)) {
      s.free_initial.push_back(ff.id);
    }
  }
  s.initial_state.assign(s.free_initial.size(), Tri::X);
  s.frames.assign(frames, Stimulus::Frame{std::vector<Tri>(s.inputs.size(), Tri::X),
                                          std::vector<Tri>(s.scan_ffs.size(), Tri::X)});
  return s;
}

// Scan membership comes from the stimulus layout, which blank_stimulus
// derived from the configuration.
Trace simulate(const CircuitGraph& g, const ScanConfig& /*cfg*/, const Stimulus& stim, std::optional<Forcing> forcing,
               bool three_valued, const Options& options) {
  const std::size_t n_nets = g.nets().size();
  auto fix = [&](Tri t) { return three_valued ? t : tri(resolve(t)); };

  std::vector<Tri> state(g.flipflops().size(), Tri::Zero);
  for (const FlipFlop& ff : g.flipflops()) {
    if (ff.resettable() && options.reset_initial) state[index(ff.id)] = tri(ff.reset->value);
  }
  for (std::size_t i = 0; i < stim.free_initial.size(); ++i) {
    state[index(stim.free_initial[i])] = fix(stim.initial_state[i]);
  }
  const std::vector<Tri> initial = state;

  std::vector<std::int32_t> pi_slot(n_nets, -1);
  for (std::size_t i = 0; i < stim.inputs.size(); ++i) pi_slot[index(stim.inputs[i])] = static_cast<std::int32_t>(i);
  std::vector<std::int32_t> scan_slot(g.flipflops().size(), -1);
  for (std::size_t j = 0; j < stim.scan_ffs.size(); ++j) {
    scan_slot[index(stim.scan_ffs[j])] = static_cast<std::int32_t>(j);
  }

  Trace trace;
  std::vector<Tri> ins;
  for (std::size_t t = 0; t < stim.frames.size(); ++t) {
    const auto& frame = stim.frames[t];
    std::vector<Tri> v(n_nets, Tri::Zero);
    for (const Net& n : g.nets()) {
      switch (n.driver.kind) {
        case DriverKind::Constant: v[index(n.id)] = tri(n.driver.id != 0); break;
        case DriverKind::PrimaryInput:
          if (pi_slot[index(n.id)] >= 0) v[index(n.id)] = fix(frame.inputs[pi_slot[index(n.id)]]);
          break;
        case DriverKind::FlipFlop: {
          FfId f{n.driver.id};
          if (scan_slot[index(f)] >= 0) {
            v[index(n.id)] = fix(frame.scan[scan_slot[index(f)]]);
          } else if (g.is_frozen(f)) {
            v[index(n.id)] = initial[index(f)];
          } else {
            v[index(n.id)] = state[index(f)];
          }
          break;
        }
        default: break;  // latches read as 0
      }
    }
    if (forcing) v[index(forcing->net)] = tri(forcing->value);
    for (CellId cid : g.topo_order()) {
      const Cell& c = g.cell(cid);
      if (forcing && c.output == forcing->net) continue;
      ins.clear();
      for (NetId in : c.inputs) ins.push_back(v[index(in)]);
      v[index(c.output)] = eval3(c.kind, ins);
    }
    for (const FlipFlop& ff : g.flipflops()) {
      if (!g.is_frozen(ff.id)) state[index(ff.id)] = v[index(ff.d)];
    }
    trace.values.push_back(std::move(v));
  }
  trace.final_state = state;
  return trace;
}

bool differs(const CircuitGraph& g, const ScanConfig& cfg, const Stimulus& stim, NetId fault_net, NetId target,
             std::uint32_t frame, const Options& options) {
  if (frame >= stim.frames.size()) return false;
  Trace a = simulate(g, cfg, stim, Forcing{fault_net, false}, false, options);
  Trace b = simulate(g, cfg, stim, Forcing{fault_net, true}, false, options);
  return a.values[frame][index(target)] != b.values[frame][index(target)];
}

PropagationPath extract_path(const CircuitGraph& g, const ScanConfig& cfg, const Stimulus& stim, NetId fault_net,
                             NetId target, std::uint32_t frame, const Options& options) {
  Trace a = simulate(g, cfg, stim, Forcing{fault_net, false}, false, options);
  Trace b = simulate(g, cfg, stim, Forcing{fault_net, true}, false, options);
  const std::size_t n = g.nets().size();
  const std::size_t frames = frame + 1;
  auto diff = [&](std::size_t t, std::size_t net) { return a.values[t][net] != b.values[t][net]; };

  constexpr auto kInf = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> dist(frames * n, kInf);
  struct Parent {
    std::size_t node;
    PathStep step;
  };
  std::vector<std::optional<Parent>> parent(frames * n);
  std::deque<std::size_t> q;
  for (std::size_t t = 0; t < frames; ++t) {
    dist[t * n + index(fault_net)] = 0;
    q.push_back(t * n + index(fault_net));
  }
  while (!q.empty()) {
    std::size_t node = q.front();
    q.pop_front();
    std::size_t t = node / n, net = node % n;
    for (const Sink& s : g.net(NetId{static_cast<std::uint32_t>(net)}).sinks) {
      std::size_t next;
      std::uint32_t w;
      PathStep step;
      if (s.kind == SinkKind::Cell) {
        const Cell& c = g.cell(CellId{s.id});
        if (c.output == fault_net || !diff(t, index(c.output))) continue;
        next = t * n + index(c.output);
        w = 1;
        step = PathStep{static_cast<std::uint32_t>(t), PathStep::Kind::Cell, s.id};
      } else if (s.kind == SinkKind::FlipFlopData) {
        FfId f{s.id};
        if (cfg.is_scan(f) || g.is_frozen(f) || t + 1 >= frames) continue;
        NetId q_net = g.ff(f).q;
        if (q_net == fault_net || !diff(t + 1, index(q_net))) continue;
        next = (t + 1) * n + index(q_net);
        w = 0;
        step = PathStep{static_cast<std::uint32_t>(t), PathStep::Kind::FlipFlop, s.id};
      } else {
        continue;
      }
      if (dist[node] + w < dist[next]) {
        dist[next] = dist[node] + w;
        parent[next] = Parent{node, step};
        if (w == 0) {
          q.push_front(next);
        } else {
          q.push_back(next);
        }
      }
    }
  }

  PropagationPath path;
  std::size_t node = frame * n + index(target);
  if (dist[node] == kInf) return path;
  path.depth = dist[node];
  while (parent[node]) {
    path.steps.push_back(parent[node]->step);
    node = parent[node]->node;
  }
  std::reverse(path.steps.begin(), path.steps.end());
  return path;
}

}  // namespace ifsguard::atpg
