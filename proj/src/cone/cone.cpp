#include "ifsguard/cone.hpp"

#include <algorithm>
#include <functional>

namespace ifsguard {
namespace {

void check_net(const CircuitGraph& g, NetId n) {
  if (index(n) >= g.nets().size()) throw GraphError("unknown net id " + std::to_string(index(n)));
}

}  // namespace

ConeResult fanout_endpoints(const CircuitGraph& g, NetId net) {
  check_net(g, net);
  ConeResult r{net, {}, {}};
  std::vector<bool> seen(g.nets().size(), false);
  std::vector<NetId> stack{net};
  seen[index(net)] = true;
  while (!stack.empty()) {
    NetId n = stack.back();
    stack.pop_back();
    if (g.is_primary_output(n)) r.endpoints.insert(Point::output(n));
    for (const Sink& s : g.net(n).sinks) {
      if (s.kind == SinkKind::FlipFlopData) {
        r.endpoints.insert(Point::flipflop(FfId{s.id}));
      } else if (s.kind == SinkKind::Cell) {
        const Cell& c = g.cell(CellId{s.id});
        r.interior.insert(c.id);
        if (!seen[index(c.output)]) {
          seen[index(c.output)] = true;
          stack.push_back(c.output);
        }
      }
    }
  }
  return r;
}

ConeResult fanin_startpoints(const CircuitGraph& g, NetId net) {
  check_net(g, net);
  ConeResult r{net, {}, {}};
  std::vector<bool> seen(g.nets().size(), false);
  std::vector<NetId> stack{net};
  seen[index(net)] = true;
  while (!stack.empty()) {
    NetId n = stack.back();
    stack.pop_back();
    const Driver& d = g.net(n).driver;
    switch (d.kind) {
      case DriverKind::PrimaryInput: r.endpoints.insert(Point::input(n)); break;
      case DriverKind::FlipFlop: r.endpoints.insert(Point::flipflop(FfId{d.id})); break;
      case DriverKind::Cell: {
        const Cell& c = g.cell(CellId{d.id});
        r.interior.insert(c.id);
        for (NetId in : c.inputs) {
          if (!seen[index(in)]) {
            seen[index(in)] = true;
            stack.push_back(in);
          }
        }
        break;
      }
      default: break;
    }
  }
  return r;
}

NetId source_net(const CircuitGraph& g, Point p) {
  if (p.is_ff()) return g.ff(p.ff()).q;
  return p.net();
}

NetId sink_net(const CircuitGraph& g, Point p) {
  if (p.is_ff()) return g.ff(p.ff()).d;
  return p.net();
}

std::set<FfId> transitive_fanin_elements(const CircuitGraph& g, const std::set<Point>& points) {
  std::set<FfId> out;
  std::vector<NetId> work;
  for (Point p : points) {
    if (p.is_ff() && index(p.ff()) >= g.flipflops().size()) throw GraphError("unknown flip-flop in point set");
    if (!p.is_ff()) check_net(g, p.net());
    if (p.kind != Point::Kind::PrimaryInput) work.push_back(sink_net(g, p));
  }
  while (!work.empty()) {
    NetId n = work.back();
    work.pop_back();
    for (Point e : fanin_startpoints(g, n).endpoints) {
      if (e.is_ff() && out.insert(e.ff()).second) work.push_back(g.ff(e.ff()).d);
    }
  }
  return out;
}

std::set<FfId> transitive_fanout_elements(const CircuitGraph& g, const std::set<Point>& points) {
  std::set<FfId> out;
  std::vector<NetId> work;
  for (Point p : points) {
    if (p.is_ff() && index(p.ff()) >= g.flipflops().size()) throw GraphError("unknown flip-flop in point set");
    if (!p.is_ff()) check_net(g, p.net());
    work.push_back(source_net(g, p));
  }
  while (!work.empty()) {
    NetId n = work.back();
    work.pop_back();
    for (Point e : fanout_endpoints(g, n).endpoints) {
      if (e.is_ff() && out.insert(e.ff()).second) work.push_back(g.ff(e.ff()).q);
    }
  }
  return out;
}

std::vector<std::set<FfId>> register_dependencies(const CircuitGraph& g) {
  std::vector<std::set<FfId>> deps(g.flipflops().size());
  for (const FlipFlop& ff : g.flipflops()) {
    for (Point p : fanin_startpoints(g, ff.d).endpoints)
      if (p.is_ff()) deps[index(ff.id)].insert(p.ff());
  }
  return deps;
}

std::vector<std::vector<FfId>> state_register_groups(const CircuitGraph& g) {
  const auto deps = register_dependencies(g);
  const std::size_t n = deps.size();
  // Tarjan, iterative over the dependency edges (b depends on a: a -> b).
  std::vector<std::vector<std::uint32_t>> succ(n);
  for (std::uint32_t b = 0; b < n; ++b)
    for (FfId a : deps[b]) succ[index(a)].push_back(b);

  std::vector<int> idx(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::uint32_t> stack;
  std::vector<std::vector<FfId>> groups;
  int counter = 0;

  std::function<void(std::uint32_t)> strongconnect = [&](std::uint32_t v) {
    idx[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::uint32_t w : succ[v]) {
      if (idx[w] < 0) {
        strongconnect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], idx[w]);
      }
    }
    if (low[v] == idx[v]) {
      std::vector<FfId> comp;
      std::uint32_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(FfId{w});
      } while (w != v);
      bool feedback = comp.size() > 1 || deps[v].count(FfId{v});
      if (feedback) {
        std::sort(comp.begin(), comp.end());
        groups.push_back(std::move(comp));
      }
    }
  };
  for (std::uint32_t v = 0; v < n; ++v)
    if (idx[v] < 0) strongconnect(v);
  std::sort(groups.begin(), groups.end());
  return groups;
}

std::set<FfId> identify_state_registers(const CircuitGraph& g) {
  std::set<FfId> out;
  for (const auto& grp : state_register_groups(g)) out.insert(grp.begin(), grp.end());
  return out;
}

}  // namespace ifsguard
