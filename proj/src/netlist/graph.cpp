#include <algorithm>
#include <deque>
#include <set>

#include "graph_builder.hpp"
#include "ifsguard/netlist.hpp"

namespace ifsguard {

std::string SourceLocation::str() const {
  return "line " + std::to_string(line) + ", col " + std::to_string(column);
}

std::string_view to_string(CellKind kind) {
  switch (kind) {
    case CellKind::And: return "AND";
    case CellKind::Or: return "OR";
    case CellKind::Nand: return "NAND";
    case CellKind::Nor: return "NOR";
    case CellKind::Xor: return "XOR";
    case CellKind::Xnor: return "XNOR";
    case CellKind::Not: return "NOT";
    case CellKind::Buf: return "BUF";
    case CellKind::Mux2: return "MUX2";
  }
  return "?";
}

std::optional<CellKind> cell_kind_from_string(std::string_view keyword) {
  static constexpr CellKind kAll[] = {CellKind::And, CellKind::Or,   CellKind::Nand,
                                      CellKind::Nor, CellKind::Xor,  CellKind::Xnor,
                                      CellKind::Not, CellKind::Buf,  CellKind::Mux2};
  for (CellKind k : kAll)
    if (to_string(k) == keyword) return k;
  return std::nullopt;
}

std::string Diagnostic::message() const {
  switch (reason) {
    case Unanalyzable::Latch: return "latch: level-sensitive storage is not analyzable";
    case Unanalyzable::ConstantClock: return "uncontrollable: constant clock";
    case Unanalyzable::ConstantData: return "uncontrollable: constant data";
  }
  return "unanalyzable";
}

std::optional<NetId> CircuitGraph::find_net(std::string_view name) const {
  auto it = net_index_.find(std::string(name));
  if (it == net_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<FfId> CircuitGraph::find_ff(std::string_view name) const {
  auto it = ff_index_.find(std::string(name));
  if (it == ff_index_.end()) return std::nullopt;
  return it->second;
}

NetId CircuitGraph::net_by_name(std::string_view name) const {
  if (auto id = find_net(name)) return *id;
  throw GraphError("unknown net '" + std::string(name) + "'");
}

FfId CircuitGraph::ff_by_name(std::string_view name) const {
  if (auto id = find_ff(name)) return *id;
  throw GraphError("unknown flip-flop '" + std::string(name) + "'");
}

std::vector<NetId> CircuitGraph::data_inputs() const {
  std::vector<NetId> out;
  for (NetId pi : inputs_) {
    const auto& sinks = net(pi).sinks;
    bool data = std::any_of(sinks.begin(), sinks.end(), [](const Sink& s) {
      return s.kind == SinkKind::Cell || s.kind == SinkKind::FlipFlopData || s.kind == SinkKind::LatchData;
    });
    if (data) out.push_back(pi);
  }
  return out;
}

std::vector<Diagnostic> report_unanalyzable(const CircuitGraph& graph) {
  auto diags = std::vector<Diagnostic>(graph.diagnostics().begin(), graph.diagnostics().end());
  return diags;
}

// ---------------------------------------------------------------------------

GraphBuilder::GraphBuilder(std::string module_name) { g_.module_name_ = std::move(module_name); }

void GraphBuilder::declare_net(const std::string& name, SourceLocation loc) {
  if (g_.net_index_.count(name)) return;
  NetId id{static_cast<std::uint32_t>(g_.nets_.size())};
  g_.nets_.push_back(Net{id, name, {}, {}});
  g_.net_index_.emplace(name, id);
  decl_loc_.push_back(loc);
}

NetId GraphBuilder::use_net(const std::string& name, SourceLocation loc) {
  if (name == "1'b0" || name == "1'b1") {
    if (!g_.net_index_.count(name)) {
      declare_net(name, loc);
      auto id = g_.net_index_.at(name);
      g_.nets_[index(id)].driver = Driver{DriverKind::Constant, name == "1'b1" ? 1u : 0u};
    }
    return g_.net_index_.at(name);
  }
  auto it = g_.net_index_.find(name);
  if (it == g_.net_index_.end()) throw NetlistError("undeclared net '" + name + "'", loc);
  return it->second;
}

void GraphBuilder::drive(NetId net, Driver driver, SourceLocation loc) {
  Net& n = g_.nets_[index(net)];
  if (n.driver.kind == DriverKind::Constant) throw NetlistError("constant cannot be driven", loc);
  if (n.driver.kind != DriverKind::None) throw NetlistError("multi-driven net '" + n.name + "'", loc);
  n.driver = driver;
}

void GraphBuilder::add_sink(NetId net, Sink sink) {
  auto& sinks = g_.nets_[index(net)].sinks;
  if (std::find(sinks.begin(), sinks.end(), sink) == sinks.end()) sinks.push_back(sink);
}

void GraphBuilder::check_instance_name(const std::string& name, SourceLocation loc) {
  if (std::find(instance_names_.begin(), instance_names_.end(), name) != instance_names_.end()) {
    throw NetlistError("duplicate instance name '" + name + "'", loc);
  }
  instance_names_.push_back(name);
}

void GraphBuilder::add_primary_input(const std::string& name, SourceLocation loc) {
  NetId id = use_net(name, loc);
  drive(id, Driver{DriverKind::PrimaryInput, static_cast<std::uint32_t>(g_.inputs_.size())}, loc);
  g_.inputs_.push_back(id);
}

void GraphBuilder::add_primary_output(const std::string& name, SourceLocation loc) {
  NetId id = use_net(name, loc);
  if (std::find(g_.outputs_.begin(), g_.outputs_.end(), id) == g_.outputs_.end()) g_.outputs_.push_back(id);
}

void GraphBuilder::add_cell(const std::string& name, CellKind kind, const std::vector<std::string>& inputs,
                            const std::string& output, SourceLocation loc) {
  check_instance_name(name, loc);
  CellId id{static_cast<std::uint32_t>(g_.cells_.size())};
  Cell c{id, name, kind, {}, use_net(output, loc), loc};
  for (std::size_t pin = 0; pin < inputs.size(); ++pin) {
    NetId in = use_net(inputs[pin], loc);
    c.inputs.push_back(in);
    add_sink(in, Sink{SinkKind::Cell, index(id), static_cast<std::uint32_t>(pin)});
  }
  drive(c.output, Driver{DriverKind::Cell, index(id)}, loc);
  g_.cells_.push_back(std::move(c));
}

void GraphBuilder::add_ff(const std::string& name, const std::string& d, const std::string& q,
                          const std::string& clock, const std::optional<std::string>& reset_n, SourceLocation loc) {
  check_instance_name(name, loc);
  FfId id{static_cast<std::uint32_t>(g_.ffs_.size())};
  FlipFlop ff{id, name, use_net(d, loc), use_net(q, loc), use_net(clock, loc), std::nullopt, loc};
  if (reset_n) ff.reset = Reset{use_net(*reset_n, loc), true, ResetKind::Async, false};
  add_sink(ff.d, Sink{SinkKind::FlipFlopData, index(id), 0});
  add_sink(ff.clock, Sink{SinkKind::FlipFlopClock, index(id), 0});
  if (ff.reset) add_sink(ff.reset->net, Sink{SinkKind::FlipFlopReset, index(id), 0});
  drive(ff.q, Driver{DriverKind::FlipFlop, index(id)}, loc);
  g_.ff_index_.emplace(name, id);
  g_.ffs_.push_back(std::move(ff));
}

void GraphBuilder::add_latch(const std::string& name, const std::string& d, const std::string& q,
                             const std::string& enable, SourceLocation loc) {
  check_instance_name(name, loc);
  LatchId id{static_cast<std::uint32_t>(g_.latches_.size())};
  Latch l{id, name, use_net(d, loc), use_net(q, loc), use_net(enable, loc), loc};
  add_sink(l.d, Sink{SinkKind::LatchData, index(id), 0});
  add_sink(l.enable, Sink{SinkKind::LatchEnable, index(id), 0});
  drive(l.q, Driver{DriverKind::Latch, index(id)}, loc);
  g_.latches_.push_back(std::move(l));
}

SourceLocation GraphBuilder::sink_location(const Sink& s) const {
  switch (s.kind) {
    case SinkKind::Cell: return g_.cells_[s.id].location;
    case SinkKind::FlipFlopData:
    case SinkKind::FlipFlopClock:
    case SinkKind::FlipFlopReset: return g_.ffs_[s.id].location;
    case SinkKind::LatchData:
    case SinkKind::LatchEnable: return g_.latches_[s.id].location;
  }
  return {};
}

std::string GraphBuilder::sink_name(const Sink& s) const {
  switch (s.kind) {
    case SinkKind::Cell: return g_.cells_[s.id].name;
    case SinkKind::FlipFlopData:
    case SinkKind::FlipFlopClock:
    case SinkKind::FlipFlopReset: return g_.ffs_[s.id].name;
    case SinkKind::LatchData:
    case SinkKind::LatchEnable: return g_.latches_[s.id].name;
  }
  return {};
}

CircuitGraph GraphBuilder::finish() {
  const std::size_t n = g_.nets_.size();
  for (const Net& net : g_.nets_) {
    if (net.driver.kind != DriverKind::None) continue;
    for (const Sink& s : net.sinks) {
      throw NetlistError("undriven net '" + net.name + "' used as input of '" + sink_name(s) + "'",
                         sink_location(s));
    }
  }
  g_.pi_flag_.assign(n, false);
  g_.po_flag_.assign(n, false);
  for (NetId id : g_.inputs_) g_.pi_flag_[index(id)] = true;
  for (NetId id : g_.outputs_) {
    if (g_.nets_[index(id)].driver.kind == DriverKind::None) {
      throw NetlistError("undriven primary output '" + g_.nets_[index(id)].name + "'", decl_loc_[index(id)]);
    }
    g_.po_flag_[index(id)] = true;
  }

  // Kahn's algorithm over cells; FFs and latches cut the graph.
  std::vector<std::uint32_t> pending(g_.cells_.size());
  std::deque<std::uint32_t> ready;
  for (const Cell& c : g_.cells_) {
    std::uint32_t deps = 0;
    for (NetId in : c.inputs)
      if (g_.nets_[index(in)].driver.kind == DriverKind::Cell) ++deps;
    pending[index(c.id)] = deps;
    if (deps == 0) ready.push_back(index(c.id));
  }
  while (!ready.empty()) {
    std::uint32_t cid = ready.front();
    ready.pop_front();
    g_.topo_.push_back(CellId{cid});
    for (const Sink& s : g_.nets_[index(g_.cells_[cid].output)].sinks) {
      if (s.kind == SinkKind::Cell && --pending[s.id] == 0) ready.push_back(s.id);
    }
  }
  if (g_.topo_.size() != g_.cells_.size()) {
    for (const Cell& c : g_.cells_) {
      if (pending[index(c.id)] != 0) {
        throw NetlistError("combinational cycle through '" + c.name + "'", c.location);
      }
    }
  }

  g_.frozen_.assign(g_.ffs_.size(), false);
  for (const Latch& l : g_.latches_) g_.diagnostics_.push_back({l.name, Unanalyzable::Latch, l.location});
  for (const FlipFlop& ff : g_.ffs_) {
    if (g_.nets_[index(ff.clock)].driver.kind == DriverKind::Constant) {
      g_.frozen_[index(ff.id)] = true;
      g_.diagnostics_.push_back({ff.name, Unanalyzable::ConstantClock, ff.location});
    } else if (g_.nets_[index(ff.d)].driver.kind == DriverKind::Constant) {
      g_.diagnostics_.push_back({ff.name, Unanalyzable::ConstantData, ff.location});
    }
  }
  return std::move(g_);
}

}  // namespace ifsguard
