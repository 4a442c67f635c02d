#include "ifsguard/scan.hpp"

namespace ifsguard {
namespace {

void check_ff(const CircuitGraph& g, FfId f) {
  if (index(f) >= g.flipflops().size()) throw GraphError("unknown flip-flop id " + std::to_string(index(f)));
}

void check_point(const CircuitGraph& g, Point p) {
  switch (p.kind) {
    case Point::Kind::FlipFlop: check_ff(g, p.ff()); return;
    case Point::Kind::PrimaryInput:
      if (index(p.net()) >= g.nets().size() || !g.is_primary_input(p.net()))
        throw GraphError("point " + std::to_string(p.id) + " is not a primary input");
      return;
    case Point::Kind::PrimaryOutput:
      if (index(p.net()) >= g.nets().size() || !g.is_primary_output(p.net()))
        throw GraphError("point " + std::to_string(p.id) + " is not a primary output");
      return;
  }
}

}  // namespace

std::string_view point_kind_name(Point::Kind kind) {
  switch (kind) {
    case Point::Kind::PrimaryInput: return "PI";
    case Point::Kind::PrimaryOutput: return "PO";
    case Point::Kind::FlipFlop: return "FF";
  }
  return "?";
}

std::string point_name(const CircuitGraph& g, Point p) {
  if (p.is_ff()) return g.ff(p.ff()).name;
  return g.net(p.net()).name;
}

Point resolve_point(const CircuitGraph& g, std::string_view name, bool prefer_inputs) {
  if (auto n = g.find_net(name)) {
    if (prefer_inputs && g.is_primary_input(*n)) return Point::input(*n);
    if (g.is_primary_output(*n)) return Point::output(*n);
    if (g.is_primary_input(*n)) return Point::input(*n);
  }
  if (auto f = g.find_ff(name)) return Point::flipflop(*f);
  if (auto n = g.find_net(name)) {
    const Net& net = g.net(*n);
    if (net.driver.kind == DriverKind::FlipFlop) return Point::flipflop(FfId{net.driver.id});
  }
  throw GraphError("'" + std::string(name) + "' is not a primary input/output or flip-flop");
}

ScanConfig full_scan(const CircuitGraph& g) {
  ScanConfig cfg;
  for (const FlipFlop& ff : g.flipflops()) cfg.scan_enabled.insert(ff.id);
  return cfg;
}

ScanConfig add_scan_ability(const CircuitGraph& g, ScanConfig cfg, std::span<const FfId> ffs) {
  for (FfId f : ffs) check_ff(g, f);
  cfg.scan_enabled.insert(ffs.begin(), ffs.end());
  return cfg;
}

ScanConfig remove_scan_ability(const CircuitGraph& g, ScanConfig cfg, FfId ff) {
  check_ff(g, ff);
  cfg.scan_enabled.erase(ff);
  cfg.capture_masked.erase(Point::flipflop(ff));
  return cfg;
}

bool is_observable(const CircuitGraph& g, const ScanConfig& cfg, Point p) {
  switch (p.kind) {
    case Point::Kind::PrimaryOutput: return g.is_primary_output(p.net());
    case Point::Kind::FlipFlop: return cfg.is_scan(p.ff());
    case Point::Kind::PrimaryInput: return false;
  }
  return false;
}

ScanConfig mask(const CircuitGraph& g, ScanConfig cfg, std::span<const Point> points) {
  for (Point p : points) {
    check_point(g, p);
    if (!is_observable(g, cfg, p)) {
      throw GraphError("cannot mask '" + point_name(g, p) + "': not a scan flip-flop or primary output");
    }
  }
  cfg.capture_masked.insert(points.begin(), points.end());
  return cfg;
}

ScanConfig unmask(const CircuitGraph& g, ScanConfig cfg, Point point) {
  check_point(g, point);
  cfg.capture_masked.erase(point);
  return cfg;
}

}  // namespace ifsguard
