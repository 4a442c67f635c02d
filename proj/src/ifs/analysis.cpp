#include <algorithm>

#include "ifsguard/cone.hpp"
#include "ifsguard/ifs.hpp"
#include "ifsguard/sim.hpp"

namespace ifsguard::ifs {

Verdict compute_verdict(const std::vector<MaliciousPoint>& malicious) {
  bool type1 = false, type2 = false;
  for (const MaliciousPoint& m : malicious) {
    type1 |= m.reason == MaliciousReason::ShallowDepth;
    type2 |= m.reason == MaliciousReason::OutsideValidCone;
  }
  if (type1 && type2) return Verdict::Both;
  if (type1) return Verdict::TypeI;
  if (type2) return Verdict::TypeII;
  return Verdict::NoneFound;
}

void intersect_analysis(const CircuitGraph& g, FlowReport& report, const std::set<Point>& valid) {
  const bool integrity = report.asset.kind == AssetKind::Integrity;
  std::set<FfId> cone = integrity ? transitive_fanout_elements(g, valid) : transitive_fanin_elements(g, valid);
  std::erase_if(report.malicious, [](const MaliciousPoint& m) { return m.reason == MaliciousReason::OutsideValidCone; });
  for (Point p : report.reported_points()) {
    if (valid.count(p)) continue;
    if (p.is_ff() && cone.count(p.ff())) continue;
    report.malicious.push_back({p, MaliciousReason::OutsideValidCone});
  }
  std::sort(report.malicious.begin(), report.malicious.end(), [](const MaliciousPoint& a, const MaliciousPoint& b) {
    return std::tie(a.point, a.reason) < std::tie(b.point, b.reason);
  });
  report.verdict = compute_verdict(report.malicious);
}

void depth_analysis(FlowReport& report, const std::set<Point>& valid, double theta) {
  std::erase_if(report.malicious, [](const MaliciousPoint& m) { return m.reason == MaliciousReason::ShallowDepth; });
  DepthSummary summary;
  summary.theta = theta;
  for (const auto& lvl : report.levels)
    for (const ReportedPoint& rp : lvl)
      if (valid.count(rp.point)) summary.depths.emplace_back(rp.point, rp.witness.path.depth);
  std::sort(summary.depths.begin(), summary.depths.end());
  if (summary.depths.size() >= 2) {
    std::vector<std::uint32_t> d;
    for (const auto& [p, depth] : summary.depths) d.push_back(depth);
    std::sort(d.begin(), d.end());
    const std::size_t n = d.size();
    summary.median = n % 2 ? d[n / 2] : (d[n / 2 - 1] + d[n / 2]) / 2.0;
    for (const auto& [p, depth] : summary.depths) {
      if (depth < theta * summary.median) report.malicious.push_back({p, MaliciousReason::ShallowDepth});
    }
  }
  std::sort(report.malicious.begin(), report.malicious.end(), [](const MaliciousPoint& a, const MaliciousPoint& b) {
    return std::tie(a.point, a.reason) < std::tie(b.point, b.reason);
  });
  report.depth = std::move(summary);
  report.verdict = compute_verdict(report.malicious);
}

PropertyResult check_equality_property(const CircuitGraph& g, NetId source, NetId sink) {
  // One frame, every startpoint free. Enumerate patterns in blocks until the
  // assertion fails; its disjunction covers both polarities, so any pattern
  // where both nets are defined decides it.
  std::vector<NetId> free;
  for (NetId pi : g.primary_inputs()) free.push_back(pi);
  for (const FlipFlop& ff : g.flipflops()) free.push_back(ff.q);
  for (const Latch& l : g.latches()) free.push_back(l.q);
  constexpr std::size_t kLanes = 4;
  const std::uint32_t vars = static_cast<std::uint32_t>(std::min<std::size_t>(free.size(), 40));
  const std::uint64_t patterns = 1ull << vars;
  sim::BlockSimulator bs(g, {}, kLanes);
  PropertyResult result;
  for (std::uint64_t start = 0; start < patterns; start += 64 * kLanes) {
    for (std::uint32_t v = 0; v < free.size(); ++v) {
      if (v < vars) {
        sim::enumeration_pattern(bs.net(free[v]), v, start);
      } else {
        std::fill(bs.net(free[v]).begin(), bs.net(free[v]).end(), 0);
      }
    }
    bs.evaluate();
    auto s = bs.net(source), o = bs.net(sink);
    for (std::size_t w = 0; w < kLanes; ++w) {
      std::uint64_t hit = ~(s[w] ^ o[w]) | (s[w] ^ o[w]);  // (s == o) || (!s == o)
      if (start + 64 * w >= patterns) hit = 0;
      if (!hit) continue;
      const int bit = __builtin_ctzll(hit);
      result.violated = true;
      for (NetId n : free) result.witness.emplace_back(g.net(n).name, (bs.net(n)[w] >> bit) & 1);
      return result;
    }
  }
  return result;
}

}  // namespace ifsguard::ifs
