#pragma once

#include <set>
#include <vector>

#include "ifsguard/netlist.hpp"
#include "ifsguard/scan.hpp"

namespace ifsguard {

/// One combinational cone. Endpoints are boundary points (primary I/O or
/// flip-flops); interior holds the cells traversed.
struct ConeResult {
  NetId origin;
  std::set<Point> endpoints;
  std::set<CellId> interior;
};

/// Primary outputs and FF data pins reachable from `net` without crossing a
/// flip-flop. A flip-flop endpoint is reported as its FF.
ConeResult fanout_endpoints(const CircuitGraph& graph, NetId net);

/// Primary inputs and FF outputs that reach `net` without crossing a
/// flip-flop.
ConeResult fanin_startpoints(const CircuitGraph& graph, NetId net);

/// Net a point stands for on the fan-out side: PI/PO net, or the FF's q.
NetId source_net(const CircuitGraph& graph, Point p);
/// Net a point observes on the fan-in side: PO net, or the FF's d.
NetId sink_net(const CircuitGraph& graph, Point p);

/// Every FF in the multi-cycle fan-in of the given points (fixpoint across
/// flip-flop boundaries).
std::set<FfId> transitive_fanin_elements(const CircuitGraph& graph, const std::set<Point>& points);
/// Every FF in the multi-cycle fan-out of the given points.
std::set<FfId> transitive_fanout_elements(const CircuitGraph& graph, const std::set<Point>& points);

/// Flip-flops whose output reaches their own input, directly or through a
/// cycle of other flip-flops. Computed as the non-trivial strongly connected
/// components of the register dependency graph.
std::set<FfId> identify_state_registers(const CircuitGraph& graph);

/// Register dependency graph: deps[b] holds every FF a whose q reaches b's d
/// combinationally.
std::vector<std::set<FfId>> register_dependencies(const CircuitGraph& graph);

/// Strongly connected groups of registers with feedback, each sorted by id.
std::vector<std::vector<FfId>> state_register_groups(const CircuitGraph& graph);

}  // namespace ifsguard
