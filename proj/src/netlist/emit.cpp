#include <json.hpp>
#include <sstream>

#include "ifsguard/netlist.hpp"

namespace ifsguard {
namespace {

void emit_list(std::ostringstream& os, const char* kw, const std::vector<std::string>& names) {
  if (names.empty()) return;
  os << "  " << kw << ' ';
  for (std::size_t i = 0; i < names.size(); ++i) os << (i ? ", " : "") << names[i];
  os << ";\n";
}

const char* driver_kind_name(DriverKind k) {
  switch (k) {
    case DriverKind::None: return "none";
    case DriverKind::PrimaryInput: return "input";
    case DriverKind::Cell: return "cell";
    case DriverKind::FlipFlop: return "ff";
    case DriverKind::Latch: return "latch";
    case DriverKind::Constant: return "const";
  }
  return "?";
}

const char* sink_kind_name(SinkKind k) {
  switch (k) {
    case SinkKind::Cell: return "cell";
    case SinkKind::FlipFlopData: return "ff.D";
    case SinkKind::FlipFlopClock: return "ff.CK";
    case SinkKind::FlipFlopReset: return "ff.RN";
    case SinkKind::LatchData: return "latch.D";
    case SinkKind::LatchEnable: return "latch.G";
  }
  return "?";
}

}  // namespace

std::string emit_netlist(const CircuitGraph& g) {
  std::vector<std::string> ins, outs, wires, ports;
  for (NetId id : g.primary_inputs()) ins.push_back(g.net(id).name);
  for (NetId id : g.primary_outputs()) outs.push_back(g.net(id).name);
  ports = ins;
  for (NetId id : g.primary_outputs())
    if (!g.is_primary_input(id)) ports.push_back(g.net(id).name);
  for (const Net& n : g.nets()) {
    if (g.is_primary_input(n.id) || g.is_primary_output(n.id) || n.driver.kind == DriverKind::Constant) continue;
    wires.push_back(n.name);
  }

  std::ostringstream os;
  os << "module " << g.module_name() << " (";
  for (std::size_t i = 0; i < ports.size(); ++i) os << (i ? ", " : "") << ports[i];
  os << ");\n";
  emit_list(os, "input", ins);
  emit_list(os, "output", outs);
  emit_list(os, "wire", wires);
  auto name = [&](NetId id) -> const std::string& { return g.net(id).name; };
  for (const Cell& c : g.cells()) {
    os << "  " << to_string(c.kind) << ' ' << c.name << " (.Y(" << name(c.output) << ")";
    if (c.kind == CellKind::Mux2) {
      os << ", .S(" << name(c.inputs[0]) << "), .A(" << name(c.inputs[1]) << "), .B(" << name(c.inputs[2]) << ")";
    } else {
      for (std::size_t i = 0; i < c.inputs.size(); ++i) {
        os << ", ." << static_cast<char>('A' + i) << '(' << name(c.inputs[i]) << ')';
      }
    }
    os << ");\n";
  }
  for (const FlipFlop& ff : g.flipflops()) {
    os << "  DFF " << ff.name << " (.D(" << name(ff.d) << "), .Q(" << name(ff.q) << "), .CK(" << name(ff.clock)
       << ")";
    if (ff.reset) os << ", .RN(" << name(ff.reset->net) << ")";
    os << ");\n";
  }
  for (const Latch& l : g.latches()) {
    os << "  DLATCH " << l.name << " (.D(" << name(l.d) << "), .Q(" << name(l.q) << "), .G(" << name(l.enable)
       << "));\n";
  }
  os << "endmodule\n";
  return os.str();
}

std::string dump_graph_json(const CircuitGraph& g) {
  using nlohmann::json;
  json j;
  j["module"] = g.module_name();
  json nets = json::array();
  for (const Net& n : g.nets()) {
    json sinks = json::array();
    for (const Sink& s : n.sinks) sinks.push_back({{"kind", sink_kind_name(s.kind)}, {"id", s.id}, {"pin", s.pin}});
    nets.push_back({{"id", index(n.id)},
                    {"name", n.name},
                    {"driver", {{"kind", driver_kind_name(n.driver.kind)}, {"id", n.driver.id}}},
                    {"sinks", sinks}});
  }
  j["nets"] = nets;
  json cells = json::array();
  for (const Cell& c : g.cells()) {
    json ins = json::array();
    for (NetId in : c.inputs) ins.push_back(index(in));
    cells.push_back({{"id", index(c.id)},
                     {"name", c.name},
                     {"kind", std::string(to_string(c.kind))},
                     {"inputs", ins},
                     {"output", index(c.output)}});
  }
  j["cells"] = cells;
  json ffs = json::array();
  for (const FlipFlop& ff : g.flipflops()) {
    json f = {{"id", index(ff.id)}, {"name", ff.name}, {"d", index(ff.d)}, {"q", index(ff.q)},
              {"clock", index(ff.clock)}, {"resettable", ff.resettable()}};
    if (ff.reset) f["reset"] = {{"net", index(ff.reset->net)}, {"active_low", ff.reset->active_low},
                                {"value", ff.reset->value}};
    ffs.push_back(f);
  }
  j["flipflops"] = ffs;
  json latches = json::array();
  for (const Latch& l : g.latches()) {
    latches.push_back({{"id", index(l.id)}, {"name", l.name}, {"d", index(l.d)}, {"q", index(l.q)},
                       {"enable", index(l.enable)}});
  }
  j["latches"] = latches;
  json pis = json::array(), pos = json::array();
  for (NetId id : g.primary_inputs()) pis.push_back(index(id));
  for (NetId id : g.primary_outputs()) pos.push_back(index(id));
  j["primary_inputs"] = pis;
  j["primary_outputs"] = pos;
  json diags = json::array();
  for (const Diagnostic& d : g.diagnostics()) {
    diags.push_back({{"element", d.element}, {"reason", d.message()}, {"line", d.location.line},
                     {"column", d.location.column}});
  }
  j["diagnostics"] = diags;
  return j.dump(2);
}

}  // namespace ifsguard
