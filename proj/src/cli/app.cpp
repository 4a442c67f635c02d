#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "ifsguard/benchgen.hpp"
#include "ifsguard/cli.hpp"
#include "ifsguard/cone.hpp"
#include "ifsguard/ifs.hpp"
#include "ifsguard/report.hpp"
#include "ifsguard/trigger.hpp"

namespace ifsguard::cli {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

struct Common {
  std::string netlist;
  std::vector<std::string> assets;
  std::vector<std::string> valid;
  std::uint32_t depth = 8;
  std::uint32_t max_depth = 32;
  std::uint64_t budget = 1'000'000;
  double theta = 0.5;
  std::uint64_t seed = 1;
  std::string json;
  unsigned jobs = 1;
  bool adaptive = false;
  bool no_trigger = false;
};

std::uint64_t effective_seed(std::uint64_t flag) {
  if (const char* env = std::getenv("IFSGUARD_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("IFSGUARD_SEED is not a number: '") + env + "'");
    }
  }
  return flag;
}

ifs::Params params_of(const Common& c) {
  ifs::Params p;
  p.atpg.depth = c.depth;
  p.atpg.max_depth = std::max(c.max_depth, c.depth);
  p.atpg.adaptive = c.adaptive;
  p.atpg.budget = c.budget;
  p.jobs = std::max(1u, c.jobs);
  return p;
}

int exit_code_for(const std::vector<report::AssetAnalysis>& runs) {
  bool violation = false, incomplete = false;
  for (const auto& a : runs) {
    violation |= a.flow.verdict != ifs::Verdict::NoneFound;
    incomplete |= !a.flow.abandoned.empty();
  }
  if (violation) return kViolation;
  return incomplete ? kIncomplete : kClean;
}

void emit(const CircuitGraph& g, const std::string& command, const Common& c,
          const std::vector<report::AssetAnalysis>& runs, double seconds, std::ostream& out) {
  out << report::render_summary(g, runs);
  out << "time: " << std::fixed << std::setprecision(3) << seconds << " s\n";
  out.unsetf(std::ios::floatfield);
  if (!c.json.empty()) write_file(c.json, report::render_json(g, command, runs));
}

int verify(const Common& c, ifs::AssetKind kind, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const CircuitGraph g = parse_netlist(read_file(c.netlist));
  const bool integrity = kind == ifs::AssetKind::Integrity;
  std::set<Point> valid;
  for (const std::string& v : expand_names(c.valid)) valid.insert(resolve_point(g, v, integrity));
  const ifs::Params params = params_of(c);

  std::vector<report::AssetAnalysis> runs;
  for (const std::string& name : expand_names(c.assets)) {
    const ifs::Asset asset = ifs::resolve_asset(g, name, kind);
    report::AssetAnalysis a;
    a.valid = valid;
    a.flow = integrity ? ifs::integrity_verify(g, asset, params) : ifs::confidentiality_verify(g, asset, params);
    if (!valid.empty()) {
      ifs::intersect_analysis(g, a.flow, valid);
      if (!integrity) ifs::depth_analysis(a.flow, valid, c.theta);
    }
    if (!c.no_trigger && !a.flow.malicious.empty()) {
      trigger::StgOptions opt;
      opt.budget = c.budget;
      a.trigger = trigger::analyze_trigger(g, a.flow, valid, opt);
    }
    runs.push_back(std::move(a));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit(g, integrity ? "verify-int" : "verify-conf", c, runs, secs, out);
  return exit_code_for(runs);
}

int extract_trigger(const std::string& netlist, const std::string& saved, const std::string& json, std::uint64_t budget,
                    std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const CircuitGraph g = parse_netlist(read_file(netlist));
  auto runs = report::load_json(g, read_file(saved));
  for (auto& a : runs) {
    trigger::StgOptions opt;
    opt.budget = budget;
    a.trigger = trigger::analyze_trigger(g, a.flow, a.valid, opt);
  }
  Common c;
  c.json = json;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit(g, "extract-trigger", c, runs, secs, out);
  return exit_code_for(runs);
}

int check_property(const std::string& netlist, const std::string& source, const std::string& sink,
                   std::uint32_t depth, std::uint64_t budget, std::ostream& out) {
  const CircuitGraph g = parse_netlist(read_file(netlist));
  const NetId src = g.net_by_name(source);
  const NetId dst = g.net_by_name(sink);
  const ifs::PropertyResult prop = ifs::check_equality_property(g, src, dst);
  out << "property (" << source << " == " << sink << ") || (!" << source << " == " << sink
      << "): " << (prop.violated ? "violated" : "holds") << '\n';
  if (prop.violated) {
    out << "  counterexample:";
    for (const auto& [name, v] : prop.witness) out << ' ' << name << '=' << v;
    out << '\n';
  }
  atpg::Options opt;
  opt.depth = depth;
  opt.budget = budget;
  const auto flow = atpg::check_flow(g, full_scan(g), src, {atpg::observe_net(dst)}, opt);
  switch (flow.status) {
    case atpg::Detection::Status::Detected:
      out << "flow check: information flows from " << source << " to " << sink << '\n';
      break;
    case atpg::Detection::Status::Undetectable:
      out << "flow check: no information flow from " << source << " to " << sink << '\n';
      break;
    case atpg::Detection::Status::Abandoned:
      out << "flow check: abandoned (budget exhausted)\n";
      break;
  }
  if (prop.violated && flow.status == atpg::Detection::Status::Undetectable) {
    out << "note: the property fails although no information flows; the failure is a false positive\n";
  }
  return prop.violated ? kViolation : kClean;
}

struct BenchArgs {
  std::string name = "bench";
  std::string core = "cipher";
  std::string trigger = "none";
  std::string payload = "none";
  std::uint32_t counter_bits = 4;
  std::uint64_t counter_match = 0;
  bool latch = false;
  bool uncontrollable = false;
  std::uint64_t seed = 1;
  std::string out;
  std::string manifest;
};

int gen_bench(const BenchArgs& b, std::ostream& out) {
  benchgen::FixtureSpec spec;
  spec.name = b.name;
  spec.core = b.core == "processor" ? benchgen::Core::Processor : benchgen::Core::Cipher;
  const std::map<std::string, benchgen::TriggerKind> triggers{
      {"none", benchgen::TriggerKind::None},       {"always-on", benchgen::TriggerKind::AlwaysOn},
      {"specific-input", benchgen::TriggerKind::SpecificInput}, {"counter", benchgen::TriggerKind::Counter},
      {"fsm", benchgen::TriggerKind::Fsm},         {"fsm-counter", benchgen::TriggerKind::FsmCounter}};
  const std::map<std::string, benchgen::PayloadKind> payloads{
      {"none", benchgen::PayloadKind::None},
      {"bypass", benchgen::PayloadKind::Bypass},
      {"xor-lfsr-leak", benchgen::PayloadKind::XorLfsrLeak},
      {"shift-register", benchgen::PayloadKind::ShiftRegister},
      {"key-replace", benchgen::PayloadKind::KeyReplace},
      {"pc-hijack", benchgen::PayloadKind::PcHijack},
      {"scan-hijack", benchgen::PayloadKind::ScanHijack}};
  spec.trigger = triggers.at(b.trigger);
  spec.payload = payloads.at(b.payload);
  spec.counter_bits = b.counter_bits;
  spec.counter_match = b.counter_match;
  spec.planted_latch = b.latch;
  spec.uncontrollable_ff = b.uncontrollable;
  spec.seed = effective_seed(b.seed);
  benchgen::Fixture f;
  try {
    f = benchgen::generate(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (b.out.empty()) {
    out << f.netlist;
  } else {
    write_file(b.out, f.netlist);
    out << "wrote " << b.out << '\n';
  }
  if (!b.manifest.empty()) {
    write_file(b.manifest, f.manifest.to_json());
    out << "wrote " << b.manifest << '\n';
  }
  return kClean;
}

int lint(const std::string& netlist, std::ostream& out) {
  const CircuitGraph g = parse_netlist(read_file(netlist));
  const auto diags = report_unanalyzable(g);
  out << g.module_name() << ": " << g.primary_inputs().size() << " inputs, " << g.primary_outputs().size()
      << " outputs, " << g.cells().size() << " cells, " << g.flipflops().size() << " flip-flops, "
      << g.latches().size() << " latches\n";
  if (diags.empty()) {
    out << "no unanalyzable elements\n";
    return kClean;
  }
  for (const Diagnostic& d : diags) out << d.element << " (" << d.location.str() << "): " << d.message() << '\n';
  return kClean;
}

void add_common(CLI::App* sub, Common& c, const char* valid_flag, const char* valid_help) {
  sub->add_option("--netlist", c.netlist, "Gate-level netlist")->required();
  sub->add_option("--asset", c.assets, "Asset net or register; buses as name[7:0]")->required()->delimiter(',');
  sub->add_option(valid_flag, c.valid, valid_help)->delimiter(',');
  sub->add_option("--depth", c.depth, "Time frames to unroll")->check(CLI::Range(1u, 4096u));
  sub->add_option("--max-depth", c.max_depth, "Upper bound for --adaptive")->check(CLI::Range(1u, 4096u));
  sub->add_option("--budget", c.budget, "SAT decisions per check before abandoning");
  sub->add_option("--seed", c.seed, "Seed (IFSGUARD_SEED overrides)");
  sub->add_option("--json", c.json, "Write the JSON report here");
  sub->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::Range(1u, 256u));
  sub->add_flag("--adaptive", c.adaptive, "Double the depth while nothing is found");
  sub->add_flag("--no-trigger", c.no_trigger, "Skip trigger extraction");
}

}  // namespace

std::vector<std::string> expand_names(const std::vector<std::string>& specs) {
  std::vector<std::string> out;
  for (const std::string& raw : specs) {
    std::stringstream ss(raw);
    for (std::string s; std::getline(ss, s, ',');) {
      if (s.empty()) continue;
      const auto open = s.rfind('[');
      const auto colon = s.find(':', open == std::string::npos ? 0 : open);
      if (open != std::string::npos && colon != std::string::npos && s.back() == ']') {
        const std::string base = s.substr(0, open);
        int hi = 0, lo = 0;
        try {
          hi = std::stoi(s.substr(open + 1, colon - open - 1));
          lo = std::stoi(s.substr(colon + 1, s.size() - colon - 2));
        } catch (const std::exception&) {
          throw UsageError("bad bus range '" + s + "'");
        }
        const int step = hi >= lo ? -1 : 1;
        for (int i = hi;; i += step) {
          out.push_back(base + "[" + std::to_string(i) + "]");
          if (i == lo) break;
        }
      } else {
        out.push_back(s);
      }
    }
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gate-level information-flow verification for hardware Trojan detection", "ifsguard"};
  app.require_subcommand(1);

  Common conf, integ;
  auto* vc = app.add_subcommand("verify-conf", "Confidentiality: where can the asset be observed?");
  add_common(vc, conf, "--valid-out", "Valid observe points");
  vc->add_option("--theta", conf.theta, "Depth-analysis threshold")->check(CLI::Range(0.0, 1.0));
  auto* vi = app.add_subcommand("verify-int", "Integrity: what can control the asset?");
  add_common(vi, integ, "--valid-in", "Valid control points");

  std::string et_netlist, et_report, et_json;
  std::uint64_t et_budget = 1'000'000;
  auto* et = app.add_subcommand("extract-trigger", "Re-run trigger extraction on a saved report");
  et->add_option("--netlist", et_netlist, "Gate-level netlist")->required();
  et->add_option("--report", et_report, "JSON report from verify-conf or verify-int")->required();
  et->add_option("--json", et_json, "Write the updated JSON report here");
  et->add_option("--budget", et_budget, "SAT decisions per check");

  std::string cp_netlist, cp_source, cp_sink;
  std::uint32_t cp_depth = 1;
  std::uint64_t cp_budget = 1'000'000;
  auto* cp = app.add_subcommand("check-property", "Single-frame equality property (baseline) plus a flow check");
  cp->add_option("--netlist", cp_netlist, "Gate-level netlist")->required();
  cp->add_option("--source", cp_source, "Source net")->required();
  cp->add_option("--sink", cp_sink, "Sink net")->required();
  cp->add_option("--depth", cp_depth, "Frames for the flow check")->check(CLI::Range(1u, 4096u));
  cp->add_option("--budget", cp_budget, "SAT decisions per check");

  BenchArgs bench;
  auto* gb = app.add_subcommand("gen-bench", "Generate a fixture netlist and its manifest");
  gb->add_option("--name", bench.name, "Module name");
  gb->add_option("--core", bench.core, "cipher or processor")->check(CLI::IsMember({"cipher", "processor"}));
  gb->add_option("--trigger", bench.trigger)
      ->check(CLI::IsMember({"none", "always-on", "specific-input", "counter", "fsm", "fsm-counter"}));
  gb->add_option("--payload", bench.payload)
      ->check(CLI::IsMember(
          {"none", "bypass", "xor-lfsr-leak", "shift-register", "key-replace", "pc-hijack", "scan-hijack"}));
  gb->add_option("--counter-bits", bench.counter_bits)->check(CLI::Range(2u, 32u));
  gb->add_option("--counter-match", bench.counter_match, "Counter value that fires (0 = all ones)");
  gb->add_flag("--latch", bench.latch, "Plant a latch");
  gb->add_flag("--uncontrollable-ff", bench.uncontrollable, "Plant a flip-flop with a constant clock");
  gb->add_option("--seed", bench.seed, "Seed (IFSGUARD_SEED overrides)");
  gb->add_option("--out", bench.out, "Netlist path (default: standard output)");
  gb->add_option("--manifest", bench.manifest, "Manifest JSON path");

  std::string lint_netlist;
  auto* li = app.add_subcommand("lint", "List elements the analysis cannot handle");
  li->add_option("--netlist", lint_netlist, "Gate-level netlist")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kClean : kUsage;
  }

  try {
    if (*vc) return verify(conf, ifs::AssetKind::Confidentiality, out);
    if (*vi) return verify(integ, ifs::AssetKind::Integrity, out);
    if (*et) return extract_trigger(et_netlist, et_report, et_json, et_budget, out);
    if (*cp) return check_property(cp_netlist, cp_source, cp_sink, cp_depth, cp_budget, out);
    if (*gb) return gen_bench(bench, out);
    if (*li) return lint(lint_netlist, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace ifsguard::cli
