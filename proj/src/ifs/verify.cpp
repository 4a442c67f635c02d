#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>

#include "ifsguard/cone.hpp"
#include "ifsguard/ifs.hpp"

namespace ifsguard::ifs {
namespace {

// Runs fn(0..n-1) on up to `jobs` threads. Results are written by index, so
// the merge order never depends on scheduling.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

FlowReport start_report(const CircuitGraph& g, const Asset& asset) {
  FlowReport r;
  r.asset = asset;
  r.diagnostics.assign(g.diagnostics().begin(), g.diagnostics().end());
  return r;
}

}  // namespace

const char* reason_name(MaliciousReason r) {
  return r == MaliciousReason::OutsideValidCone ? "outside-valid-cone" : "shallow-depth";
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::NoneFound: return "none";
    case Verdict::TypeI: return "Type I";
    case Verdict::TypeII: return "Type II";
    case Verdict::Both: return "Type I+II";
  }
  return "?";
}

std::set<Point> FlowReport::reported_points() const {
  std::set<Point> out;
  for (const auto& lvl : levels)
    for (const ReportedPoint& p : lvl) out.insert(p.point);
  return out;
}

const ReportedPoint* FlowReport::find(Point p) const {
  for (const auto& lvl : levels)
    for (const ReportedPoint& rp : lvl)
      if (rp.point == p) return &rp;
  return nullptr;
}

Asset resolve_asset(const CircuitGraph& g, std::string_view name, AssetKind kind) {
  if (auto net = g.find_net(name)) return Asset{*net, std::string(name), kind};
  if (auto ff = g.find_ff(name)) {
    const FlipFlop& f = g.ff(*ff);
    return Asset{kind == AssetKind::Integrity ? f.d : f.q, std::string(name), kind};
  }
  // "key0" is accepted for "key[0]".
  const std::size_t digits = name.find_last_not_of("0123456789") + 1;
  if (digits > 0 && digits < name.size() && name.find('[') == std::string_view::npos) {
    std::string bus = std::string(name.substr(0, digits)) + "[" + std::string(name.substr(digits)) + "]";
    if (g.find_net(bus) || g.find_ff(bus)) return resolve_asset(g, bus, kind);
  }
  throw GraphError("unknown asset '" + std::string(name) + "'");
}

FlowReport confidentiality_verify(const CircuitGraph& g, const Asset& asset, const Params& params) {
  FlowReport report = start_report(g, asset);
  ScanConfig cfg = full_scan(g);
  std::set<Point> level = fanout_endpoints(g, asset.net).endpoints;
  std::set<Point> reported;
  // Every endpoint starts masked so a detection is attributed to exactly the
  // point unmasked for that check.
  auto mask_new = [&](const std::set<Point>& pts) {
    std::vector<Point> m;
    for (Point p : pts)
      if (is_observable(g, cfg, p) && !cfg.is_masked(p)) m.push_back(p);
    cfg = mask(g, cfg, m);
  };
  mask_new(level);

  for (std::uint32_t lvl = 1; !level.empty(); ++lvl) {
    std::vector<Point> candidates;
    for (Point p : level) {
      if (reported.count(p) || !is_observable(g, cfg, p)) continue;
      candidates.push_back(p);
    }
    std::vector<atpg::FlowResult> results(candidates.size());
    parallel_for(candidates.size(), params.jobs, [&](std::size_t i) {
      ScanConfig local = unmask(g, cfg, candidates[i]);
      results[i] = atpg::check_flow(g, local, asset.net, {atpg::observe_point(g, candidates[i])}, params.atpg);
    });

    std::set<Point> next;
    std::vector<FfId> demote;
    std::vector<ReportedPoint> found;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      Point p = candidates[i];
      report.effort.decisions += results[i].decisions;
      ++report.effort.atpg_runs;
      if (results[i].status == atpg::Detection::Status::Abandoned) {
        report.abandoned.push_back({p, lvl});
        continue;
      }
      if (results[i].status != atpg::Detection::Status::Detected) continue;
      reported.insert(p);
      found.push_back(ReportedPoint{p, lvl, std::move(results[i].witness), asset.net});
      if (p.is_ff()) {
        demote.push_back(p.ff());
        auto more = fanout_endpoints(g, g.ff(p.ff()).q).endpoints;
        next.insert(more.begin(), more.end());
      }
    }
    for (FfId f : demote) cfg = remove_scan_ability(g, cfg, f);
    mask_new(next);
    if (found.empty()) break;
    report.levels.push_back(std::move(found));
    level = std::move(next);
  }
  return report;
}

FlowReport integrity_verify(const CircuitGraph& g, const Asset& asset, const Params& params) {
  FlowReport report = start_report(g, asset);
  ScanConfig cfg = full_scan(g);

  // The asset must be controllable to both values at all before individual
  // control points are confirmed.
  for (bool v : {false, true}) {
    ++report.effort.atpg_runs;
    if (atpg::activatable(g, cfg, asset.net, v, params.atpg) == atpg::Detection::Status::Undetectable) return report;
  }

  auto own_register = [&](Point p) { return p.is_ff() && g.ff(p.ff()).d == asset.net; };
  std::set<Point> level = fanin_startpoints(g, asset.net).endpoints;
  std::set<Point> reported;
  const std::vector<atpg::ObserveTarget> target{atpg::observe_net(asset.net)};

  for (std::uint32_t lvl = 1; !level.empty(); ++lvl) {
    std::vector<Point> candidates;
    for (Point p : level) {
      if (reported.count(p) || own_register(p)) continue;
      if (p.is_ff() && !cfg.is_scan(p.ff())) continue;
      candidates.push_back(p);
    }
    std::vector<atpg::FlowResult> results(candidates.size());
    parallel_for(candidates.size(), params.jobs, [&](std::size_t i) {
      results[i] = atpg::check_flow(g, cfg, source_net(g, candidates[i]), target, params.atpg);
    });

    std::set<Point> next;
    std::vector<FfId> demote;
    std::vector<ReportedPoint> found;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      Point p = candidates[i];
      report.effort.decisions += results[i].decisions;
      ++report.effort.atpg_runs;
      if (results[i].status == atpg::Detection::Status::Abandoned) {
        report.abandoned.push_back({p, lvl});
        continue;
      }
      if (results[i].status != atpg::Detection::Status::Detected) continue;
      reported.insert(p);
      found.push_back(ReportedPoint{p, lvl, std::move(results[i].witness), source_net(g, p)});
      if (p.is_ff()) {
        demote.push_back(p.ff());
        auto more = fanin_startpoints(g, g.ff(p.ff()).d).endpoints;
        next.insert(more.begin(), more.end());
      }
    }
    for (FfId f : demote) cfg = remove_scan_ability(g, cfg, f);
    if (found.empty()) break;
    report.levels.push_back(std::move(found));
    level = std::move(next);
  }
  return report;
}

}  // namespace ifsguard::ifs
