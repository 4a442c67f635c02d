#include "ifsguard/report.hpp"

#include <iomanip>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace ifsguard::report {
namespace {

using nlohmann::json;
using atpg::Tri;

const char* asset_kind_name(ifs::AssetKind k) {
  return k == ifs::AssetKind::Integrity ? "integrity" : "confidentiality";
}

Point::Kind point_kind_from(const std::string& s) {
  if (s == "PI") return Point::Kind::PrimaryInput;
  if (s == "PO") return Point::Kind::PrimaryOutput;
  if (s == "FF") return Point::Kind::FlipFlop;
  throw std::runtime_error("unknown point kind '" + s + "'");
}

Point point_from(const CircuitGraph& g, const std::string& kind, const std::string& name) {
  switch (point_kind_from(kind)) {
    case Point::Kind::PrimaryInput: return Point::input(g.net_by_name(name));
    case Point::Kind::PrimaryOutput: return Point::output(g.net_by_name(name));
    case Point::Kind::FlipFlop: return Point::flipflop(g.ff_by_name(name));
  }
  throw std::runtime_error("bad point");
}

json point_json(const CircuitGraph& g, Point p) {
  return {{"name", point_name(g, p)}, {"kind", std::string(point_kind_name(p.kind))}};
}

// Care bits only; the layout lists which registers were scan loads or free
// initial values so the stimulus can be rebuilt exactly.
json stimulus_json(const CircuitGraph& g, const atpg::Stimulus& s) {
  json j;
  json scan = json::array(), free_init = json::array(), init = json::object();
  for (FfId f : s.scan_ffs) scan.push_back(g.ff(f).name);
  for (std::size_t i = 0; i < s.free_initial.size(); ++i) {
    free_init.push_back(g.ff(s.free_initial[i]).name);
    if (s.initial_state[i] != Tri::X) init[g.ff(s.free_initial[i]).name] = atpg::resolve(s.initial_state[i]) ? 1 : 0;
  }
  json frames = json::array();
  for (const auto& f : s.frames) {
    json inputs = json::object(), loads = json::object();
    for (std::size_t i = 0; i < s.inputs.size(); ++i)
      if (f.inputs[i] != Tri::X) inputs[g.net(s.inputs[i]).name] = atpg::resolve(f.inputs[i]) ? 1 : 0;
    for (std::size_t k = 0; k < s.scan_ffs.size(); ++k)
      if (f.scan[k] != Tri::X) loads[g.ff(s.scan_ffs[k]).name] = atpg::resolve(f.scan[k]) ? 1 : 0;
    frames.push_back({{"inputs", inputs}, {"scan", loads}});
  }
  j["scan_ffs"] = scan;
  j["free_initial"] = free_init;
  j["initial"] = init;
  j["frames"] = frames;
  return j;
}

atpg::Stimulus stimulus_from(const CircuitGraph& g, const json& j) {
  atpg::Stimulus s;
  s.inputs = g.data_inputs();
  for (const auto& n : j.at("scan_ffs")) s.scan_ffs.push_back(g.ff_by_name(n.get<std::string>()));
  for (const auto& n : j.at("free_initial")) s.free_initial.push_back(g.ff_by_name(n.get<std::string>()));
  s.initial_state.assign(s.free_initial.size(), Tri::X);
  for (std::size_t i = 0; i < s.free_initial.size(); ++i) {
    const auto& init = j.at("initial");
    auto it = init.find(g.ff(s.free_initial[i]).name);
    if (it != init.end()) s.initial_state[i] = atpg::tri(it->get<int>() != 0);
  }
  for (const auto& fj : j.at("frames")) {
    atpg::Stimulus::Frame f{std::vector<Tri>(s.inputs.size(), Tri::X), std::vector<Tri>(s.scan_ffs.size(), Tri::X)};
    for (std::size_t i = 0; i < s.inputs.size(); ++i) {
      auto it = fj.at("inputs").find(g.net(s.inputs[i]).name);
      if (it != fj.at("inputs").end()) f.inputs[i] = atpg::tri(it->get<int>() != 0);
    }
    for (std::size_t k = 0; k < s.scan_ffs.size(); ++k) {
      auto it = fj.at("scan").find(g.ff(s.scan_ffs[k]).name);
      if (it != fj.at("scan").end()) f.scan[k] = atpg::tri(it->get<int>() != 0);
    }
    s.frames.push_back(std::move(f));
  }
  return s;
}

json path_json(const CircuitGraph& g, const atpg::PropagationPath& p) {
  json steps = json::array();
  for (const atpg::PathStep& s : p.steps) {
    const bool cell = s.kind == atpg::PathStep::Kind::Cell;
    steps.push_back({{"frame", s.frame},
                     {"kind", cell ? "cell" : "ff"},
                     {"name", cell ? g.cell(CellId{s.id}).name : g.ff(FfId{s.id}).name}});
  }
  return steps;
}

json bits_json(const std::vector<trigger::BitValue>& bits) {
  json out = json::array();
  for (const auto& b : trigger::group_buses(bits)) {
    json e{{"bus", b.bus}, {"frame", b.frame}, {"width", b.width}, {"complete", b.complete}};
    if (b.complete) {
      e["value"] = b.value;
    } else {
      json known = json::object();
      for (std::uint32_t i = 0; i < b.width && i < 64; ++i)
        if ((b.known >> i) & 1) known[std::to_string(i)] = (b.value >> i) & 1;
      e["bits"] = known;
    }
    out.push_back(e);
  }
  return out;
}

json sequence_json(const trigger::TriggerSequence& seq) {
  json steps = json::array();
  for (const auto& s : seq.steps) {
    if (s.kind == trigger::SequenceStep::Kind::Hold) {
      steps.push_back({{"hold", s.cycles}});
    } else {
      steps.push_back({{"apply", bits_json(s.inputs)}});
    }
  }
  return steps;
}

json trigger_json(const CircuitGraph& g, const trigger::TriggerReport& t) {
  json j;
  if (t.direct.always_on) {
    j["kind"] = "always-on";
  } else if (t.direct.bits.empty()) {
    j["kind"] = "none";
  } else {
    j["kind"] = t.stg ? "sequence" : "condition";
  }
  j["condition"] = bits_json(t.direct.bits);
  j["conflicting"] = t.direct.conflicting;
  j["sequence"] = sequence_json(t.sequence);
  j["sequence_found"] = t.sequence.found;
  j["partial"] = t.sequence.partial;
  if (t.stg) {
    json lines = json::array();
    std::istringstream in(trigger::export_stg(g, *t.stg));
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    j["stg"] = lines;
  }
  return j;
}

json analysis_json(const CircuitGraph& g, const AssetAnalysis& a) {
  const ifs::FlowReport& r = a.flow;
  json j;
  j["asset"] = {{"name", r.asset.label}, {"net", g.net(r.asset.net).name}, {"kind", asset_kind_name(r.asset.kind)}};
  json levels = json::array();
  for (const auto& lvl : r.levels) {
    json points = json::array();
    for (const ifs::ReportedPoint& rp : lvl) {
      json p = point_json(g, rp.point);
      p["depth"] = rp.witness.path.depth;
      p["frame"] = rp.witness.frame;
      p["target"] = g.net(rp.witness.target.net).name;
      p["source"] = g.net(rp.fault_net).name;
      p["stimulus"] = stimulus_json(g, rp.witness.stimulus);
      p["path"] = path_json(g, rp.witness.path);
      points.push_back(p);
    }
    levels.push_back({{"level", lvl.empty() ? 0 : lvl.front().level}, {"points", points}});
  }
  j["levels"] = levels;
  json valid = json::array();
  for (Point p : a.valid) valid.push_back(point_json(g, p));
  j["valid"] = valid;
  json mal = json::array();
  for (const auto& m : r.malicious) {
    json p = point_json(g, m.point);
    p["reason"] = ifs::reason_name(m.reason);
    mal.push_back(p);
  }
  j["malicious"] = mal;
  j["verdict"] = ifs::verdict_name(r.verdict);
  json ab = json::array();
  for (const auto& x : r.abandoned) {
    json p = point_json(g, x.point);
    p["level"] = x.level;
    ab.push_back(p);
  }
  j["abandoned"] = ab;
  j["timing"] = {{"sat_decisions", r.effort.decisions}, {"atpg_runs", r.effort.atpg_runs}};
  if (r.depth) {
    json depths = json::array();
    for (const auto& [p, d] : r.depth->depths) {
      json e = point_json(g, p);
      e["depth"] = d;
      depths.push_back(e);
    }
    j["depth_analysis"] = {{"theta", r.depth->theta}, {"median", r.depth->median}, {"valid_depths", depths}};
  }
  json diags = json::array();
  for (const Diagnostic& d : r.diagnostics) {
    diags.push_back({{"element", d.element}, {"message", d.message()}, {"location", d.location.str()}});
  }
  j["unanalyzable"] = diags;
  if (a.trigger) j["trigger"] = trigger_json(g, *a.trigger);
  return j;
}

}  // namespace

std::string render_json(const CircuitGraph& g, std::string_view command, const std::vector<AssetAnalysis>& runs) {
  json j;
  j["version"] = kSchemaVersion;
  j["command"] = std::string(command);
  j["design"] = g.module_name();
  json reports = json::array();
  for (const AssetAnalysis& a : runs) reports.push_back(analysis_json(g, a));
  j["reports"] = reports;
  return j.dump(2) + "\n";
}

std::vector<AssetAnalysis> load_json(const CircuitGraph& g, std::string_view text) {
  json j = json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded()) throw std::runtime_error("report is not valid JSON");
  try {
    if (j.at("version").get<int>() != kSchemaVersion) throw std::runtime_error("unsupported report version");
    std::vector<AssetAnalysis> out;
    for (const json& rj : j.at("reports")) {
      AssetAnalysis a;
      const json& asset = rj.at("asset");
      const auto kind =
          asset.at("kind").get<std::string>() == "integrity" ? ifs::AssetKind::Integrity : ifs::AssetKind::Confidentiality;
      a.flow.asset = ifs::Asset{g.net_by_name(asset.at("net").get<std::string>()), asset.at("name").get<std::string>(), kind};
      for (const json& lj : rj.at("levels")) {
        std::vector<ifs::ReportedPoint> lvl;
        for (const json& pj : lj.at("points")) {
          ifs::ReportedPoint rp;
          rp.point = point_from(g, pj.at("kind").get<std::string>(), pj.at("name").get<std::string>());
          rp.level = lj.at("level").get<std::uint32_t>();
          rp.fault_net = g.net_by_name(pj.at("source").get<std::string>());
          rp.witness.status = atpg::Detection::Status::Detected;
          rp.witness.stimulus = stimulus_from(g, pj.at("stimulus"));
          rp.witness.frame = pj.at("frame").get<std::uint32_t>();
          rp.witness.target = atpg::observe_net(g.net_by_name(pj.at("target").get<std::string>()));
          rp.witness.path.depth = pj.at("depth").get<std::uint32_t>();
          lvl.push_back(std::move(rp));
        }
        a.flow.levels.push_back(std::move(lvl));
      }
      for (const json& vj : rj.at("valid")) {
        a.valid.insert(point_from(g, vj.at("kind").get<std::string>(), vj.at("name").get<std::string>()));
      }
      for (const json& mj : rj.at("malicious")) {
        Point p = point_from(g, mj.at("kind").get<std::string>(), mj.at("name").get<std::string>());
        const auto reason = mj.at("reason").get<std::string>() == ifs::reason_name(ifs::MaliciousReason::ShallowDepth)
                                ? ifs::MaliciousReason::ShallowDepth
                                : ifs::MaliciousReason::OutsideValidCone;
        a.flow.malicious.push_back({p, reason});
      }
      a.flow.verdict = ifs::compute_verdict(a.flow.malicious);
      for (const json& x : rj.at("abandoned")) {
        a.flow.abandoned.push_back(
            {point_from(g, x.at("kind").get<std::string>(), x.at("name").get<std::string>()), x.at("level").get<std::uint32_t>()});
      }
      out.push_back(std::move(a));
    }
    return out;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed report: ") + e.what());
  } catch (const GraphError& e) {
    throw std::runtime_error(std::string("report does not match the netlist: ") + e.what());
  }
}

std::string format_sequence(const trigger::TriggerSequence& seq) {
  if (!seq.found) return "(not found)";
  if (seq.steps.empty()) return "(already active after reset)";
  std::ostringstream os;
  for (std::size_t i = 0; i < seq.steps.size(); ++i) {
    const auto& s = seq.steps[i];
    if (i) os << ", ";
    if (s.kind == trigger::SequenceStep::Kind::Hold) {
      os << "hold " << s.cycles;
    } else {
      os << trigger::format_buses(trigger::group_buses(s.inputs));
    }
  }
  if (seq.partial) os << " (partial)";
  return os.str();
}

std::string render_trigger(const CircuitGraph& g, const trigger::TriggerReport& t) {
  std::ostringstream os;
  if (t.direct.always_on) {
    os << "  trigger: always-on\n";
    return os.str();
  }
  if (t.direct.bits.empty()) return os.str();
  os << "  trigger condition: " << trigger::format_buses(t.direct.buses) << '\n';
  if (!t.direct.conflicting.empty()) {
    os << "  conflicting bits:";
    for (const auto& c : t.direct.conflicting) os << ' ' << c;
    os << '\n';
  }
  if (t.stg) {
    os << "  trigger FSM: " << t.stg->states.size() << " states over";
    for (FfId f : t.stg->state_bits) os << ' ' << g.ff(f).name;
    for (const auto& c : t.stg->counters) os << ", counter of " << c.bits.size() << " bits";
    os << '\n';
  }
  os << "  trigger sequence: " << format_sequence(t.sequence) << '\n';
  return os.str();
}

std::string render_summary(const CircuitGraph& g, const std::vector<AssetAnalysis>& runs) {
  std::ostringstream os;
  for (const AssetAnalysis& a : runs) {
    const ifs::FlowReport& r = a.flow;
    const bool integrity = r.asset.kind == ifs::AssetKind::Integrity;
    std::size_t total = 0;
    for (const auto& lvl : r.levels) total += lvl.size();
    os << "asset " << r.asset.label << " (" << asset_kind_name(r.asset.kind) << ")\n";
    os << "  " << (integrity ? "control" : "observe") << " points: " << total << " in " << r.levels.size()
       << " level(s)\n";
    for (const auto& lvl : r.levels) {
      if (lvl.empty()) continue;
      os << "    level " << lvl.front().level << ':';
      for (const auto& rp : lvl) os << ' ' << point_name(g, rp.point) << "(depth " << rp.witness.path.depth << ')';
      os << '\n';
    }
    os << "  malicious points: " << r.malicious.size() << '\n';
    for (const auto& m : r.malicious) os << "    " << point_name(g, m.point) << "  " << ifs::reason_name(m.reason) << '\n';
    if (r.depth && r.depth->depths.size() >= 2) {
      os << "  valid-point median depth: " << r.depth->median << " (theta " << r.depth->theta << ")\n";
    }
    for (const auto& x : r.abandoned) os << "  abandoned: " << point_name(g, x.point) << " at level " << x.level << '\n';
    for (const Diagnostic& d : r.diagnostics) {
      os << "  unanalyzable: " << d.element << " (" << d.location.str() << "): " << d.message() << '\n';
    }
    if (a.trigger) os << render_trigger(g, *a.trigger);
    os << "  verdict: " << ifs::verdict_name(r.verdict) << '\n';
  }
  return os.str();
}

}  // namespace ifsguard::report
