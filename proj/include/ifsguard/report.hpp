#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ifsguard/ifs.hpp"
#include "ifsguard/trigger.hpp"

namespace ifsguard::report {

inline constexpr int kSchemaVersion = 1;

/// One analyzed asset: the flow report plus what the analyses needed.
struct AssetAnalysis {
  ifs::FlowReport flow;
  std::set<Point> valid;
  std::optional<trigger::TriggerReport> trigger;
};

/// Deterministic JSON (sorted keys, no timing) for a whole run.
std::string render_json(const CircuitGraph& graph, std::string_view command, const std::vector<AssetAnalysis>& runs);

/// Rebuilds the flow reports of a saved run against the same netlist, with
/// witnesses complete enough to re-run trigger extraction. Throws
/// std::runtime_error on schema mismatches.
std::vector<AssetAnalysis> load_json(const CircuitGraph& graph, std::string_view text);

/// Table-style human summary for standard output.
std::string render_summary(const CircuitGraph& graph, const std::vector<AssetAnalysis>& runs);

/// Trigger summary lines (also used by extract-trigger).
std::string render_trigger(const CircuitGraph& graph, const trigger::TriggerReport& trig);

std::string format_sequence(const trigger::TriggerSequence& seq);

}  // namespace ifsguard::report
