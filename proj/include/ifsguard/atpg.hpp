#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ifsguard/netlist.hpp"
#include "ifsguard/scan.hpp"

namespace ifsguard::atpg {

/// The asset-as-fault model: `net` pinned to `value`.
struct StuckAtFault {
  NetId net;
  bool value;
};

enum class Tri : std::uint8_t { Zero, One, X };

inline Tri tri(bool v) { return v ? Tri::One : Tri::Zero; }
inline bool resolve(Tri t) { return t == Tri::One; }  // don't-care replays as 0
char tri_char(Tri t);

/// Witness input sequence.
///
/// Frame semantics of the unrolled model: every frame applies one vector to
/// the data primary inputs, and scan-enabled flip-flops act as pseudo-primary
/// inputs whose values are loaded for that frame (frame 0 is the initial scan
/// load). Non-scan flip-flops chain from one frame to the next; those without
/// a reset start from the value in `initial_state`.
struct Stimulus {
  std::vector<NetId> inputs;
  std::vector<FfId> scan_ffs;
  std::vector<FfId> free_initial;  // non-scan, non-resettable FFs
  std::vector<Tri> initial_state;  // aligned with free_initial
  struct Frame {
    std::vector<Tri> inputs;  // aligned with Stimulus::inputs
    std::vector<Tri> scan;    // aligned with Stimulus::scan_ffs
  };
  std::vector<Frame> frames;

  std::size_t frame_count() const { return frames.size(); }
  std::size_t care_bits() const;
};

/// One hop of the sensitized difference: a cell evaluated in `frame`, or a
/// non-scan flip-flop carrying the difference from `frame` into `frame + 1`.
struct PathStep {
  enum class Kind : std::uint8_t { Cell, FlipFlop };
  std::uint32_t frame;
  Kind kind;
  std::uint32_t id;
  friend bool operator==(const PathStep&, const PathStep&) = default;
};

struct PropagationPath {
  std::vector<PathStep> steps;
  std::uint32_t depth = 0;  // number of combinational cells
};

/// What the search may observe: the value of `net` in any frame. Points
/// carry their own net (PO net, or the scan FF's d for a capture).
struct ObserveTarget {
  NetId net;
  std::optional<Point> point;
};

ObserveTarget observe_point(const CircuitGraph& graph, Point p);
ObserveTarget observe_net(NetId net);

struct Options {
  std::uint32_t depth = 8;
  bool adaptive = false;        // double depth on Undetectable, up to max_depth
  std::uint32_t max_depth = 32;
  std::uint64_t budget = 1'000'000;  // decisions per fault
  bool reset_initial = true;    // resettable non-scan FFs start at reset value
};

class UnrolledModel;
struct UnrolledModelDeleter {
  void operator()(UnrolledModel* m) const;
};
using UnrolledModelPtr = std::unique_ptr<UnrolledModel, UnrolledModelDeleter>;

/// Time-frame expansion with good and faulty rails. The faulty rail pins the
/// fault net to the fault value in every frame; the good rail is constrained
/// to the opposite value (fault activation) in every frame, so a detected
/// difference is exactly a difference between the two forced runs. Rails
/// share all input variables; faulty-rail gates whose inputs match the good
/// rail reuse the good literals.
UnrolledModelPtr build_unrolled_model(const CircuitGraph& graph, const ScanConfig& cfg,
                                      StuckAtFault fault, std::uint32_t depth, const Options& options = {},
                                      const std::vector<NetId>* cone_hint = nullptr);

/// Introspection used by tests.
struct ModelShape {
  std::uint32_t frames;
  std::size_t variables;
  std::size_t input_variables;  // PI + scan-load + free initial state variables
  /// Frames in which the faulty rail pins the fault net to a constant.
  std::uint32_t forced_frames;
  /// Scan-enabled FFs whose q is a free variable in frame 0.
  std::size_t scan_free_at_frame0;
};
ModelShape shape(const UnrolledModel& model);

struct Detection {
  enum class Status : std::uint8_t { Detected, Undetectable, Abandoned };
  Status status = Status::Undetectable;
  Stimulus stimulus;
  PropagationPath path;
  ObserveTarget target{};
  std::uint32_t frame = 0;  // frame in which the difference is observed
  std::uint64_t decisions = 0;
};

const char* status_name(Detection::Status s);

/// Searches for a stimulus under which the two rails differ at one of the
/// targets. Masked or non-observable points in `targets` are ignored.
Detection detect_fault(UnrolledModel& model, const std::vector<ObserveTarget>& targets, std::uint64_t budget);

/// Builds the model for `fault` and runs detect_fault, with optional
/// adaptive deepening.
Detection detect(const CircuitGraph& graph, const ScanConfig& cfg, StuckAtFault fault,
                 const std::vector<ObserveTarget>& targets, const Options& options);

/// Information flow from `net` to a target: both stuck-at-0 and stuck-at-1
/// must be detected at the same target. Returns the stuck-at-0 witness.
struct FlowResult {
  Detection::Status status = Detection::Status::Undetectable;
  Detection witness;
  std::uint64_t decisions = 0;
};
FlowResult check_flow(const CircuitGraph& graph, const ScanConfig& cfg, NetId net,
                      const std::vector<ObserveTarget>& targets, const Options& options);

/// True when some stimulus drives `net` to `value` within `depth` frames.
Detection::Status activatable(const CircuitGraph& graph, const ScanConfig& cfg, NetId net, bool value,
                              const Options& options);

struct StateTarget {
  FfId ff;
  bool value;
};

struct Justification {
  enum class Status : std::uint8_t { Reachable, Unreachable, Abandoned };
  Status status = Status::Unreachable;
  Stimulus stimulus;  // exactly `depth` frames
};

/// Finds a `depth`-frame stimulus after which the flip-flops hold `target`.
/// depth 0 checks the initial state alone.
Justification justify_state(const CircuitGraph& graph, const ScanConfig& cfg, const std::vector<StateTarget>& target,
                            std::uint32_t depth, std::uint64_t budget, const Options& options = {});

/// Two-valued (don't-cares as 0) or three-valued replay of a stimulus.
struct Trace {
  std::vector<std::vector<Tri>> values;  // [frame][net]
  std::vector<Tri> final_state;          // [ff] state after the last frame
};

struct Forcing {
  NetId net;
  bool value;
};

Trace simulate(const CircuitGraph& graph, const ScanConfig& cfg, const Stimulus& stimulus,
               std::optional<Forcing> forcing, bool three_valued, const Options& options = {});

/// Empty stimulus layout for a configuration (all bits X, `frames` frames).
Stimulus blank_stimulus(const CircuitGraph& graph, const ScanConfig& cfg, std::uint32_t frames,
                        const Options& options = {});

/// Shortest sensitized path between the forced net and `target` in frame
/// `frame`, from replays with the net forced to 0 and to 1.
PropagationPath extract_path(const CircuitGraph& graph, const ScanConfig& cfg, const Stimulus& stimulus, NetId fault_net,
                             NetId target, std::uint32_t frame, const Options& options = {});

/// Replays with the fault net forced to 0 and to 1 (don't-cares as 0) and
/// reports whether `target` differs in `frame`.
bool differs(const CircuitGraph& graph, const ScanConfig& cfg, const Stimulus& stimulus, NetId fault_net, NetId target,
             std::uint32_t frame, const Options& options = {});

}  // namespace ifsguard::atpg
