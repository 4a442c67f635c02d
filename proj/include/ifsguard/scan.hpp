#pragma once

#include <compare>
#include <set>
#include <span>
#include <string>

#include "ifsguard/netlist.hpp"

namespace ifsguard {

/// A boundary element through which a value is observed or controlled:
/// a primary input/output (identified by its net) or a flip-flop.
struct Point {
  enum class Kind : std::uint8_t { PrimaryInput, PrimaryOutput, FlipFlop };
  Kind kind;
  std::uint32_t id;

  static Point input(NetId n) { return {Kind::PrimaryInput, index(n)}; }
  static Point output(NetId n) { return {Kind::PrimaryOutput, index(n)}; }
  static Point flipflop(FfId f) { return {Kind::FlipFlop, index(f)}; }

  bool is_ff() const { return kind == Kind::FlipFlop; }
  FfId ff() const { return FfId{id}; }
  NetId net() const { return NetId{id}; }

  friend auto operator<=>(const Point&, const Point&) = default;
};

std::string point_name(const CircuitGraph& graph, Point p);
std::string_view point_kind_name(Point::Kind kind);

/// Resolves a user-facing name: primary output/input net names first, then
/// flip-flop instance names, then flip-flop output net names.
Point resolve_point(const CircuitGraph& graph, std::string_view name, bool prefer_inputs = false);

/// Partial-scan overlay: which FFs are scan-enabled and which observe points
/// have their capture masked. Values only; the graph is never touched.
struct ScanConfig {
  std::set<FfId> scan_enabled;
  std::set<Point> capture_masked;

  bool is_scan(FfId f) const { return scan_enabled.count(f) != 0; }
  bool is_masked(Point p) const { return capture_masked.count(p) != 0; }
  friend bool operator==(const ScanConfig&, const ScanConfig&) = default;
};

ScanConfig full_scan(const CircuitGraph& graph);

ScanConfig add_scan_ability(const CircuitGraph& graph, ScanConfig cfg, std::span<const FfId> ffs);
/// Removing scan also drops any capture mask on the FF.
ScanConfig remove_scan_ability(const CircuitGraph& graph, ScanConfig cfg, FfId ff);
ScanConfig mask(const CircuitGraph& graph, ScanConfig cfg, std::span<const Point> points);
ScanConfig unmask(const CircuitGraph& graph, ScanConfig cfg, Point point);

/// True when `p` is currently an observe point: a primary output, or a
/// scan-enabled FF.
bool is_observable(const CircuitGraph& graph, const ScanConfig& cfg, Point p);

}  // namespace ifsguard
