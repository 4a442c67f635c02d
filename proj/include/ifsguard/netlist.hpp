#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ifsguard {

enum class NetId : std::uint32_t {};
enum class CellId : std::uint32_t {};
enum class FfId : std::uint32_t {};
enum class LatchId : std::uint32_t {};

constexpr std::uint32_t index(NetId id) { return static_cast<std::uint32_t>(id); }
constexpr std::uint32_t index(CellId id) { return static_cast<std::uint32_t>(id); }
constexpr std::uint32_t index(FfId id) { return static_cast<std::uint32_t>(id); }
constexpr std::uint32_t index(LatchId id) { return static_cast<std::uint32_t>(id); }

struct SourceLocation {
  std::uint32_t line = 0;
  std::uint32_t column = 0;
  std::string str() const;
};

/// Thrown for every rejected netlist: syntax errors and structural
/// violations (multi-driven nets, undriven inputs, combinational cycles).
class NetlistError : public std::runtime_error {
 public:
  NetlistError(const std::string& what, SourceLocation loc)
      : std::runtime_error(loc.str() + ": " + what), location_(loc) {}
  SourceLocation location() const { return location_; }

 private:
  SourceLocation location_;
};

/// Lookup or argument errors against an already built graph.
class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class CellKind : std::uint8_t { And, Or, Nand, Nor, Xor, Xnor, Not, Buf, Mux2 };

std::string_view to_string(CellKind kind);
std::optional<CellKind> cell_kind_from_string(std::string_view keyword);

enum class DriverKind : std::uint8_t { None, PrimaryInput, Cell, FlipFlop, Latch, Constant };

struct Driver {
  DriverKind kind = DriverKind::None;
  std::uint32_t id = 0;  // element index; constant value for DriverKind::Constant
};

enum class SinkKind : std::uint8_t { Cell, FlipFlopData, FlipFlopClock, FlipFlopReset, LatchData, LatchEnable };

struct Sink {
  SinkKind kind;
  std::uint32_t id;
  std::uint32_t pin;  // input position for cells, 0 otherwise
  friend bool operator==(const Sink&, const Sink&) = default;
};

struct Net {
  NetId id;
  std::string name;
  Driver driver;
  std::vector<Sink> sinks;
};

struct Cell {
  CellId id;
  std::string name;
  CellKind kind;
  std::vector<NetId> inputs;  // Mux2: select, a, b (Y = select ? b : a)
  NetId output;
  SourceLocation location;
};

enum class ResetKind : std::uint8_t { Async, Sync };

struct Reset {
  NetId net;
  bool active_low = true;
  ResetKind kind = ResetKind::Async;
  bool value = false;
};

struct FlipFlop {
  FfId id;
  std::string name;
  NetId d;
  NetId q;
  NetId clock;
  std::optional<Reset> reset;
  SourceLocation location;
  bool resettable() const { return reset.has_value(); }
};

/// Level-sensitive latch. Parsed and reported but never analyzed.
struct Latch {
  LatchId id;
  std::string name;
  NetId d;
  NetId q;
  NetId enable;
  SourceLocation location;
};

enum class Unanalyzable : std::uint8_t { Latch, ConstantClock, ConstantData };

struct Diagnostic {
  std::string element;
  Unanalyzable reason;
  SourceLocation location;
  std::string message() const;
};

/// Immutable, validated gate-level design.
class CircuitGraph {
 public:
  const std::string& module_name() const { return module_name_; }

  std::span<const Net> nets() const { return nets_; }
  std::span<const Cell> cells() const { return cells_; }
  std::span<const FlipFlop> flipflops() const { return ffs_; }
  std::span<const Latch> latches() const { return latches_; }
  std::span<const NetId> primary_inputs() const { return inputs_; }
  std::span<const NetId> primary_outputs() const { return outputs_; }
  std::span<const Diagnostic> diagnostics() const { return diagnostics_; }

  const Net& net(NetId id) const { return nets_.at(index(id)); }
  const Cell& cell(CellId id) const { return cells_.at(index(id)); }
  const FlipFlop& ff(FfId id) const { return ffs_.at(index(id)); }
  const Latch& latch(LatchId id) const { return latches_.at(index(id)); }

  std::optional<NetId> find_net(std::string_view name) const;
  std::optional<FfId> find_ff(std::string_view name) const;
  NetId net_by_name(std::string_view name) const;  // throws GraphError
  FfId ff_by_name(std::string_view name) const;    // throws GraphError

  bool is_primary_input(NetId id) const { return pi_flag_.at(index(id)); }
  bool is_primary_output(NetId id) const { return po_flag_.at(index(id)); }
  /// Clock stuck at a constant: the register can never change state.
  bool is_frozen(FfId id) const { return frozen_.at(index(id)); }

  /// Cells in topological order (inputs before outputs).
  std::span<const CellId> topo_order() const { return topo_; }

  /// Primary inputs that reach at least one cell input or FF data pin.
  std::vector<NetId> data_inputs() const;

 private:
  friend class GraphBuilder;

  std::string module_name_;
  std::vector<Net> nets_;
  std::vector<Cell> cells_;
  std::vector<FlipFlop> ffs_;
  std::vector<Latch> latches_;
  std::vector<NetId> inputs_;
  std::vector<NetId> outputs_;
  std::vector<Diagnostic> diagnostics_;
  std::vector<CellId> topo_;
  std::vector<bool> pi_flag_;
  std::vector<bool> po_flag_;
  std::vector<bool> frozen_;
  std::unordered_map<std::string, NetId> net_index_;
  std::unordered_map<std::string, FfId> ff_index_;
};

/// Parses the structural netlist subset. Multiple modules are allowed in one
/// source; the top module is the last one not instantiated by another, and
/// instances of user modules are flattened one level deep with `inst/` name
/// prefixes.
CircuitGraph parse_netlist(std::string_view source);

/// Prints a graph back in the same grammar.
std::string emit_netlist(const CircuitGraph& graph);

/// Deterministic JSON dump (ids ascending) for golden-file comparisons.
std::string dump_graph_json(const CircuitGraph& graph);

/// Latches and uncontrollable flip-flops, with locations.
std::vector<Diagnostic> report_unanalyzable(const CircuitGraph& graph);

}  // namespace ifsguard
