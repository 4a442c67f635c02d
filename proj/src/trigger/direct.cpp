#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "ifsguard/cone.hpp"
#include "ifsguard/trigger.hpp"

namespace ifsguard::trigger {
namespace {

using atpg::Tri;

bool definite_difference(const CircuitGraph& g, const atpg::Stimulus& stim, NetId fault, NetId target,
                         std::uint32_t frame) {
  if (frame >= stim.frames.size()) return false;
  const ScanConfig none;
  atpg::Trace a = atpg::simulate(g, none, stim, atpg::Forcing{fault, false}, true);
  atpg::Trace b = atpg::simulate(g, none, stim, atpg::Forcing{fault, true}, true);
  Tri x = a.values[frame][index(target)];
  Tri y = b.values[frame][index(target)];
  return x != Tri::X && y != Tri::X && x != y;
}

// Splits "bus[3]" into ("bus", 3); plain names come back with no index.
std::pair<std::string, std::optional<std::uint32_t>> split_index(const std::string& name) {
  if (name.size() < 3 || name.back() != ']') return {name, std::nullopt};
  std::size_t open = name.rfind('[');
  if (open == std::string::npos || open == 0) return {name, std::nullopt};
  std::uint32_t i = 0;
  const char* first = name.data() + open + 1;
  const char* last = name.data() + name.size() - 1;
  auto [ptr, ec] = std::from_chars(first, last, i);
  if (ec != std::errc{} || ptr != last) return {name, std::nullopt};
  return {name.substr(0, open), i};
}

}  // namespace

std::vector<BitValue> necessary_bits(const CircuitGraph& g, const ifs::ReportedPoint& point) {
  const atpg::Detection& w = point.witness;
  if (w.status != atpg::Detection::Status::Detected) return {};
  atpg::Stimulus stim = w.stimulus;
  const NetId target = w.target.net;
  const std::uint32_t frame = w.frame;
  const NetId fault = point.fault_net;

  if (!definite_difference(g, stim, fault, target, frame)) {
    // Relaxation left the difference undecided; fall back to the fully
    // specified replay, which is what the search actually proved.
    for (Tri& t : stim.initial_state) t = atpg::tri(atpg::resolve(t));
    for (auto& f : stim.frames) {
      for (Tri& t : f.inputs) t = atpg::tri(atpg::resolve(t));
      for (Tri& t : f.scan) t = atpg::tri(atpg::resolve(t));
    }
    if (!definite_difference(g, stim, fault, target, frame)) return {};
  }

  std::vector<BitValue> out;
  auto probe = [&](Tri& slot, const std::string& name, std::uint32_t offset) {
    if (slot == Tri::X) return;
    const Tri saved = slot;
    slot = saved == Tri::One ? Tri::Zero : Tri::One;
    if (!definite_difference(g, stim, fault, target, frame)) out.push_back({name, saved == Tri::One, offset});
    slot = saved;
  };

  for (std::size_t i = 0; i < stim.free_initial.size(); ++i) {
    const FlipFlop& ff = g.ff(stim.free_initial[i]);
    if (ff.q == fault) continue;
    probe(stim.initial_state[i], ff.name, frame);
  }
  for (std::uint32_t t = 0; t <= frame && t < stim.frames.size(); ++t) {
    auto& f = stim.frames[t];
    for (std::size_t i = 0; i < stim.inputs.size(); ++i) {
      if (stim.inputs[i] == fault) continue;
      probe(f.inputs[i], g.net(stim.inputs[i]).name, frame - t);
    }
    for (std::size_t j = 0; j < stim.scan_ffs.size(); ++j) {
      const FlipFlop& ff = g.ff(stim.scan_ffs[j]);
      if (ff.q == fault) continue;
      probe(f.scan[j], ff.name, frame - t);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

DirectTrigger extract_direct_trigger(const CircuitGraph& g, const ifs::FlowReport& report,
                                     const std::set<Point>& valid) {
  DirectTrigger result;
  if (report.malicious.empty()) return result;

  const bool integrity = report.asset.kind == ifs::AssetKind::Integrity;
  std::set<FfId> legit;
  if (integrity) legit = transitive_fanout_elements(g, valid);
  auto keep = [&](const std::string& name) {
    if (!integrity) return true;
    if (auto f = g.find_ff(name)) return !legit.count(*f) && !valid.count(Point::flipflop(*f));
    if (auto n = g.find_net(name)) return !valid.count(Point::input(*n));
    return true;
  };

  std::map<std::pair<std::string, std::uint32_t>, bool> merged;
  std::set<std::pair<std::string, std::uint32_t>> conflicts;
  std::set<Point> seen;
  for (const ifs::MaliciousPoint& m : report.malicious) {
    if (!seen.insert(m.point).second) continue;
    const ifs::ReportedPoint* rp = report.find(m.point);
    if (!rp) continue;
    for (const BitValue& b : necessary_bits(g, *rp)) {
      if (!keep(b.name)) continue;
      auto key = std::make_pair(b.name, b.frame);
      if (conflicts.count(key)) continue;
      auto [it, inserted] = merged.emplace(key, b.value);
      if (!inserted && it->second != b.value) {
        conflicts.insert(key);
        merged.erase(it);
      }
    }
  }
  for (const auto& [key, v] : merged) result.bits.push_back({key.first, v, key.second});
  std::sort(result.bits.begin(), result.bits.end(),
            [](const BitValue& a, const BitValue& b) { return std::tie(a.frame, a.name) < std::tie(b.frame, b.name); });
  for (const auto& [name, frame] : conflicts) result.conflicting.push_back(name);
  result.conflicting.erase(std::unique(result.conflicting.begin(), result.conflicting.end()), result.conflicting.end());
  result.buses = group_buses(result.bits);
  result.always_on = result.bits.empty() && conflicts.empty();
  return result;
}

std::vector<BusValue> group_buses(const std::vector<BitValue>& bits) {
  struct Acc {
    std::map<std::uint32_t, bool> bits;
    bool scalar = false;
    bool value = false;
  };
  std::map<std::pair<std::uint32_t, std::string>, Acc> groups;
  for (const BitValue& b : bits) {
    auto [base, idx] = split_index(b.name);
    Acc& acc = groups[{b.frame, idx ? base : b.name}];
    if (idx) {
      acc.bits[*idx] = b.value;
    } else {
      acc.scalar = true;
      acc.value = b.value;
    }
  }
  std::vector<BusValue> out;
  for (const auto& [key, acc] : groups) {
    BusValue bv;
    bv.bus = key.second;
    bv.frame = key.first;
    if (acc.scalar) {
      bv.width = 1;
      bv.value = acc.value;
      bv.known = 1;
      bv.complete = true;
    } else {
      bv.width = acc.bits.rbegin()->first + 1;
      bv.complete = acc.bits.size() == bv.width && bv.width <= 64;
      for (const auto& [i, v] : acc.bits) {
        if (i >= 64) continue;
        bv.known |= 1ull << i;
        if (v) bv.value |= 1ull << i;
      }
    }
    out.push_back(bv);
  }
  return out;
}

std::string format_buses(const std::vector<BusValue>& buses) {
  std::ostringstream os;
  bool first = true;
  for (const BusValue& b : buses) {
    if (!first) os << ' ';
    first = false;
    if (b.complete) {
      os << b.bus << '=' << b.value;
    } else {
      // Partial bus: list the known bits individually.
      bool f = true;
      for (std::uint32_t i = 0; i < b.width && i < 64; ++i) {
        if (!((b.known >> i) & 1)) continue;
        if (!f) os << ' ';
        os << b.bus << '[' << i << "]=" << ((b.value >> i) & 1);
        f = false;
      }
    }
    if (b.frame) os << "@-" << b.frame;
  }
  return os.str();
}

}  // namespace ifsguard::trigger
