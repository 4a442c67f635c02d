#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ifsguard/atpg.hpp"
#include "ifsguard/netlist.hpp"
#include "ifsguard/scan.hpp"

namespace ifsguard::ifs {

enum class AssetKind : std::uint8_t { Confidentiality, Integrity };

struct Asset {
  NetId net;
  std::string label;
  AssetKind kind;
};

/// Resolves an asset name. Confidentiality assets may name a net or a
/// flip-flop (its output); integrity assets naming a flip-flop resolve to the
/// register's data input, which is what an adversary has to control.
Asset resolve_asset(const CircuitGraph& graph, std::string_view name, AssetKind kind);

struct Params {
  atpg::Options atpg;
  unsigned jobs = 1;
};

/// One observe point (confidentiality) or control point (integrity) with the
/// witness that established it.
struct ReportedPoint {
  Point point;
  std::uint32_t level = 0;  // 1-based
  atpg::Detection witness;
  /// Net the witness forces; the asset for confidentiality, the control
  /// point's source for integrity.
  NetId fault_net{};
};

enum class MaliciousReason : std::uint8_t { OutsideValidCone, ShallowDepth };
const char* reason_name(MaliciousReason r);

struct MaliciousPoint {
  Point point;
  MaliciousReason reason;
  friend bool operator==(const MaliciousPoint&, const MaliciousPoint&) = default;
};

struct AbandonedItem {
  Point point;
  std::uint32_t level;
};

enum class Verdict : std::uint8_t { NoneFound, TypeI, TypeII, Both };
const char* verdict_name(Verdict v);

/// Deterministic effort counters (wall-clock time is never stored here).
struct Effort {
  std::uint64_t decisions = 0;
  std::uint32_t atpg_runs = 0;
};

struct DepthSummary {
  double theta = 0;
  double median = 0;
  std::vector<std::pair<Point, std::uint32_t>> depths;  // valid points only
};

struct FlowReport {
  Asset asset;
  std::vector<std::vector<ReportedPoint>> levels;
  std::vector<MaliciousPoint> malicious;
  Verdict verdict = Verdict::NoneFound;
  std::vector<AbandonedItem> abandoned;
  Effort effort;
  std::optional<DepthSummary> depth;
  /// Unanalyzable elements of the design, copied from the graph so the report
  /// never hides them.
  std::vector<Diagnostic> diagnostics;

  std::set<Point> reported_points() const;
  const ReportedPoint* find(Point p) const;
};

/// Level-by-level observe point search from a confidentiality asset.
FlowReport confidentiality_verify(const CircuitGraph& graph, const Asset& asset, const Params& params = {});

/// Level-by-level control point search towards an integrity asset.
FlowReport integrity_verify(const CircuitGraph& graph, const Asset& asset, const Params& params = {});

/// Flags reported points that are neither declared valid nor inside the
/// valid points' multi-cycle cone (fan-in for confidentiality, fan-out for
/// integrity). Recomputes the verdict.
void intersect_analysis(const CircuitGraph& graph, FlowReport& report, const std::set<Point>& valid);

/// Flags valid points whose propagation depth is below theta times the
/// median depth over the reported valid points. Needs at least two of them.
void depth_analysis(FlowReport& report, const std::set<Point>& valid, double theta);

Verdict compute_verdict(const std::vector<MaliciousPoint>& malicious);

/// Baseline property `(s0 == o) || (!s0 == o)` in one combinational frame.
struct PropertyResult {
  bool violated = false;
  /// Startpoint assignment of the violating pattern (names -> values).
  std::vector<std::pair<std::string, bool>> witness;
};
PropertyResult check_equality_property(const CircuitGraph& graph, NetId source, NetId sink);

}  // namespace ifsguard::ifs
