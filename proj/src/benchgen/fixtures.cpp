#include <json.hpp>
#include <map>
#include <set>
#include <stdexcept>

#include "ifsguard/benchgen.hpp"
#include "writer.hpp"

namespace ifsguard::benchgen {
namespace {

std::string bit(const std::string& bus, std::uint32_t i) { return bus + "[" + std::to_string(i) + "]"; }

std::vector<std::string> bus_names(const std::string& bus, std::uint32_t width) {
  std::vector<std::string> out;
  for (std::uint32_t i = 0; i < width; ++i) out.push_back(bit(bus, i));
  return out;
}

class Generator {
 public:
  explicit Generator(const FixtureSpec& spec) : spec_(spec), w_(spec.name), rng_(static_cast<std::uint32_t>(spec.seed)) {
    m_.name = spec.name;
    m_.core = spec.core == Core::Cipher ? "cipher" : "processor";
    m_.trigger = trigger_name(spec.trigger);
    m_.payload = payload_name(spec.payload);
  }

  Fixture run() {
    w_.input("clk");
    w_.input("rstn");
    if (spec_.core == Core::Cipher) {
      cipher();
    } else {
      processor();
    }
    if (spec_.planted_latch) planted_latch();
    if (spec_.uncontrollable_ff) uncontrollable_ff();
    return Fixture{w_.text(), m_};
  }

 private:
  // Eight-bit equality against a constant.
  std::string equals(const std::vector<std::string>& bus, std::uint64_t value) {
    std::vector<std::string> lits;
    for (std::uint32_t i = 0; i < bus.size(); ++i) lits.push_back((value >> i) & 1 ? bus[i] : inverted(bus[i]));
    return w_.reduce("AND", lits);
  }

  std::string inverted(const std::string& net) {
    auto it = inverted_.find(net);
    if (it != inverted_.end()) return it->second;
    return inverted_[net] = w_.not_(net);
  }

  // Ripple incrementer; returns the q+1 nets.
  std::vector<std::string> increment(const std::vector<std::string>& q) {
    std::vector<std::string> out;
    std::string carry;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (i == 0) {
        out.push_back(inverted(q[0]));
        carry = q[0];
      } else {
        out.push_back(w_.xor2(q[i], carry));
        if (i + 1 < q.size()) carry = w_.reduce("AND", {q[i], carry});
      }
    }
    return out;
  }

  // Register bank `name[i]` with q nets `name_q[i]` (or caller-chosen names).
  std::vector<std::string> declare_register(const std::string& name, std::uint32_t width) {
    std::vector<std::string> q;
    for (std::uint32_t i = 0; i < width; ++i) {
      q.push_back(bit(name + "_q", i));
      w_.wire(q.back());
    }
    return q;
  }

  std::uint64_t random_byte(std::set<std::uint64_t>& used) {
    for (;;) {
      std::uint64_t v = 1 + rng_() % 255;
      if (used.insert(v).second) return v;
    }
  }

  std::string counter_trigger() {
    const std::uint32_t k = spec_.counter_bits;
    const std::uint64_t all = (k >= 64) ? ~0ull : (1ull << k) - 1;
    const std::uint64_t match = spec_.counter_match ? spec_.counter_match : all;
    auto q = declare_register("cnt", k);
    auto next = increment(q);
    for (std::uint32_t i = 0; i < k; ++i) w_.dff(bit("cnt", i), next[i], q[i], true);
    for (auto& n : bus_names("cnt", k)) m_.counter_registers.push_back(n);
    m_.trigger_condition.push_back({"cnt", match});
    m_.hold_cycles = match;
    return equals(q, match);
  }

  std::string fsm_trigger(const std::vector<std::string>& pt, bool with_counter) {
    std::set<std::uint64_t> used;
    std::vector<std::uint64_t> pattern;
    for (int i = 0; i < 4; ++i) pattern.push_back(random_byte(used));
    const std::uint32_t states = with_counter ? 6 : 5;
    auto st = declare_register("fsm", 3);
    std::vector<std::string> in_state;
    for (std::uint32_t j = 0; j < states; ++j) {
      in_state.push_back(w_.reduce("AND", {(j & 1) ? st[0] : inverted(st[0]), (j & 2) ? st[1] : inverted(st[1]),
                                           (j & 4) ? st[2] : inverted(st[2])}));
    }
    std::vector<std::string> eq;
    for (std::uint64_t p : pattern) eq.push_back(equals(pt, p));
    std::vector<std::vector<std::string>> to(states);
    for (std::uint32_t j = 0; j < 4; ++j) {
      to[j + 1].push_back(w_.reduce("AND", {in_state[j], eq[j]}));
      to[j].push_back(w_.reduce("AND", {in_state[j], inverted(eq[j])}));
    }
    std::string tc;
    if (with_counter) {
      const std::uint32_t k = spec_.counter_bits;
      auto q = declare_register("wcnt", k);
      auto next = increment(q);
      // Counts while waiting in state 4, cleared everywhere else.
      for (std::uint32_t i = 0; i < k; ++i) w_.dff(bit("wcnt", i), w_.reduce("AND", {in_state[4], next[i]}), q[i], true);
      tc = w_.reduce("AND", q);
      to[4].push_back(w_.reduce("AND", {in_state[4], inverted(tc)}));
      to[5].push_back(w_.reduce("AND", {in_state[4], tc}));
      to[5].push_back(in_state[5]);
      for (auto& n : bus_names("wcnt", k)) m_.counter_registers.push_back(n);
      m_.hold_cycles = 1ull << k;
    } else {
      to[4].push_back(in_state[4]);
    }
    for (std::uint32_t b = 0; b < 3; ++b) {
      std::vector<std::string> terms;
      for (std::uint32_t j = 0; j < states; ++j) {
        if ((j >> b) & 1) {
          for (const auto& t : to[j]) terms.push_back(t);
        }
      }
      w_.dff(bit("fsm", b), w_.reduce("OR", terms), st[b], true);
    }
    for (auto& n : bus_names("fsm", 3)) m_.state_registers.push_back(n);
    m_.trigger_condition.push_back({"fsm", states - 1});
    for (std::uint64_t p : pattern) m_.trigger_sequence.push_back({{"pt", p}});
    return in_state[states - 1];
  }

  std::string make_trigger(const std::vector<std::string>& pt) {
    switch (spec_.trigger) {
      case TriggerKind::None: return "1'b0";
      case TriggerKind::AlwaysOn: return "1'b1";
      case TriggerKind::SpecificInput: {
        std::set<std::uint64_t> used;
        std::uint64_t magic = random_byte(used);
        m_.trigger_condition.push_back({"pt", magic});
        m_.trigger_sequence.push_back({{"pt", magic}});
        return equals(pt, magic);
      }
      case TriggerKind::Counter: return counter_trigger();
      case TriggerKind::Fsm: return fsm_trigger(pt, false);
      case TriggerKind::FsmCounter: return fsm_trigger(pt, true);
    }
    return "1'b0";
  }

  void cipher() {
    std::vector<std::string> pt, key;
    for (std::uint32_t i = 0; i < 8; ++i) pt.push_back(w_.input(bit("pt", i)));
    for (std::uint32_t i = 0; i < 8; ++i) key.push_back(w_.input(bit("key", i)));
    for (std::uint32_t i = 0; i < 8; ++i) w_.output(bit("ct", i));
    const bool trojan = spec_.payload != PayloadKind::None;
    if (spec_.payload == PayloadKind::KeyReplace && spec_.trigger != TriggerKind::Counter &&
        spec_.trigger != TriggerKind::AlwaysOn) {
      // A trigger reading the plaintext lies in the valid inputs' fan-out,
      // so it would be legitimate by construction.
      throw std::invalid_argument(std::string("trigger not available with key replacement: ") +
                                  trigger_name(spec_.trigger));
    }
    const std::string trig = trojan ? make_trigger(pt) : "1'b0";

    std::vector<std::string> k_eff = key;
    if (spec_.payload == PayloadKind::KeyReplace) {
      for (std::uint32_t i = 0; i < 8; ++i) k_eff[i] = w_.mux(trig, key[i], pt[i]);
    }
    std::vector<std::string> s;
    for (std::uint32_t i = 0; i < 8; ++i) s.push_back(w_.xor2(pt[i], k_eff[i]));

    const bool bypass = spec_.payload == PayloadKind::Bypass;
    for (std::uint32_t r = 1; r <= 4; ++r) {
      // mix: s ^ rotl(s, 1)
      std::vector<std::string> m, y(8), z(8);
      for (std::uint32_t i = 0; i < 8; ++i) m.push_back(w_.xor2(s[i], s[(i + 7) % 8]));
      std::vector<std::string> nm;
      for (std::uint32_t i = 0; i < 8; ++i) nm.push_back(w_.not_(m[i]));
      // chi on each nibble
      for (std::uint32_t base : {0u, 4u}) {
        for (std::uint32_t j = 0; j < 4; ++j) {
          std::uint32_t i = base + j, i1 = base + (j + 1) % 4, i2 = base + (j + 2) % 4;
          y[i] = w_.xor2(m[i], w_.reduce("AND", {nm[i1], m[i2]}));
        }
      }
      for (std::uint32_t i = 0; i < 8; ++i) z[i] = y[(i + 3) % 8];
      std::vector<std::string> q;
      const std::string reg = "r" + std::to_string(r);
      for (std::uint32_t i = 0; i < 8; ++i) {
        std::string qn = (r == 4 && !(bypass && i == 0)) ? bit("ct", i) : bit(reg + "_q", i);
        if (qn.rfind("ct", 0) != 0) w_.wire(qn);
        w_.dff(bit(reg, i), z[i], qn, true);
        q.push_back(qn);
      }
      s = q;
    }
    m_.confidentiality_assets.push_back("key[0]");
    for (auto& n : bus_names("ct", 8)) m_.valid_points.push_back(n);

    switch (spec_.payload) {
      case PayloadKind::Bypass:
        w_.mux(trig, s[0], key[0], "ct[0]");
        m_.malicious_points.push_back("ct[0]");
        break;
      case PayloadKind::XorLfsrLeak: {
        w_.output("leak");
        auto l = declare_register("lfsr", 4);
        std::string kx = w_.reduce("AND", {trig, key[0]});
        w_.dff("lfsr[0]", w_.gate("XOR", {l[3], l[2], kx}), l[0], true);
        for (std::uint32_t i = 1; i < 4; ++i) w_.dff(bit("lfsr", i), l[i - 1], l[i], true);
        w_.xor2(l[3], kx, "leak");
        m_.malicious_points.push_back("leak");
        for (auto& n : bus_names("lfsr", 4)) m_.malicious_points.push_back(n);
        break;
      }
      case PayloadKind::ShiftRegister: {
        auto l = declare_register("shr", 4);
        w_.dff("shr[0]", w_.reduce("AND", {trig, key[0]}), l[0], true);
        for (std::uint32_t i = 1; i < 4; ++i) w_.dff(bit("shr", i), l[i - 1], l[i], true);
        for (auto& n : bus_names("shr", 4)) m_.malicious_points.push_back(n);
        break;
      }
      case PayloadKind::KeyReplace:
        m_.integrity_assets.push_back("r1[0]");
        m_.valid_points.clear();
        for (auto& n : bus_names("pt", 8)) m_.valid_points.push_back(n);
        for (auto& n : bus_names("key", 8)) m_.valid_points.push_back(n);
        for (auto& n : m_.state_registers) m_.malicious_points.push_back(n);
        for (auto& n : m_.counter_registers) m_.malicious_points.push_back(n);
        break;
      default:
        if (trojan) throw std::invalid_argument(std::string("payload not available on the cipher core: ") +
                                                payload_name(spec_.payload));
        break;
    }
  }

  void processor() {
    std::vector<std::string> imem;
    for (std::uint32_t i = 0; i < 4; ++i) imem.push_back(w_.input(bit("imem", i)));
    const bool hijack_scan = spec_.payload == PayloadKind::ScanHijack;
    std::string test_se, test_si;
    if (hijack_scan) {
      test_se = w_.input("test_se");
      test_si = w_.input("test_si");
      w_.output("test_so");
    }
    for (std::uint32_t i = 0; i < 4; ++i) w_.output(bit("addr", i));
    const bool trojan = spec_.payload != PayloadKind::None;
    if (trojan && spec_.trigger != TriggerKind::Counter && spec_.trigger != TriggerKind::AlwaysOn) {
      throw std::invalid_argument(std::string("trigger not available on the processor core: ") +
                                  trigger_name(spec_.trigger));
    }
    const std::string trig = trojan ? make_trigger({}) : "1'b0";

    auto ir = declare_register("ir", 4);
    std::string se;
    if (hijack_scan) {
      w_.wire("se_int");
      se = w_.reduce("OR", {test_se, trig}, "se_int");
    }
    for (std::uint32_t i = 0; i < 4; ++i) {
      std::string d = imem[i];
      if (hijack_scan) d = w_.mux(se, imem[i], i == 0 ? test_si : ir[i - 1]);
      w_.dff(bit("ir", i), d, ir[i], true);
    }
    if (hijack_scan) w_.buf(ir[3], "test_so");

    std::vector<std::string> pc;
    for (std::uint32_t i = 0; i < 4; ++i) pc.push_back(bit("addr", i));
    auto inc = increment(pc);
    for (std::uint32_t i = 0; i < 4; ++i) {
      std::string target = i < 3 ? ir[i] : "1'b0";
      std::string next = w_.mux(ir[3], inc[i], target);
      if (spec_.payload == PayloadKind::PcHijack) next = w_.mux(trig, next, "1'b1");
      w_.dff(bit("pc", i), next, pc[i], true);
    }

    for (auto& n : bus_names("pc", 4)) m_.integrity_assets.push_back(n);
    for (auto& n : bus_names("imem", 4)) m_.valid_points.push_back(n);
    switch (spec_.payload) {
      case PayloadKind::PcHijack:
        for (auto& n : m_.counter_registers) m_.malicious_points.push_back(n);
        for (auto& n : m_.state_registers) m_.malicious_points.push_back(n);
        break;
      case PayloadKind::ScanHijack:
        m_.integrity_assets = {"se_int"};
        m_.valid_points = {"test_se"};
        for (auto& n : m_.counter_registers) m_.malicious_points.push_back(n);
        for (auto& n : m_.state_registers) m_.malicious_points.push_back(n);
        break;
      default:
        if (trojan) throw std::invalid_argument(std::string("payload not available on the processor core: ") +
                                                payload_name(spec_.payload));
        break;
    }
  }

  void planted_latch() {
    w_.output("dbg_l");
    w_.wire("lat_q");
    const std::string src = spec_.core == Core::Cipher ? "pt[1]" : "imem[1]";
    w_.latch("lat0", src, "lat_q", "clk");
    w_.reduce("AND", {"lat_q", spec_.core == Core::Cipher ? "key[1]" : "imem[2]"}, "dbg_l");
    m_.unanalyzable.push_back("lat0");
  }

  void uncontrollable_ff() {
    w_.output("dbg_f");
    w_.wire("stuck_q");
    const std::string src = spec_.core == Core::Cipher ? "key[2]" : "imem[3]";
    w_.dff("stuck0", src, "stuck_q", false, "1'b0");
    w_.xor2("stuck_q", spec_.core == Core::Cipher ? "pt[3]" : "imem[0]", "dbg_f");
    m_.unanalyzable.push_back("stuck0");
  }

  const FixtureSpec& spec_;
  NetlistWriter w_;
  std::mt19937 rng_;
  Manifest m_;
  std::map<std::string, std::string> inverted_;
};

}  // namespace

const char* trigger_name(TriggerKind k) {
  switch (k) {
    case TriggerKind::None: return "none";
    case TriggerKind::AlwaysOn: return "always-on";
    case TriggerKind::SpecificInput: return "specific-input";
    case TriggerKind::Counter: return "counter";
    case TriggerKind::Fsm: return "fsm";
    case TriggerKind::FsmCounter: return "fsm-counter";
  }
  return "?";
}

const char* payload_name(PayloadKind k) {
  switch (k) {
    case PayloadKind::None: return "none";
    case PayloadKind::Bypass: return "bypass";
    case PayloadKind::XorLfsrLeak: return "xor-lfsr-leak";
    case PayloadKind::ShiftRegister: return "shift-register";
    case PayloadKind::KeyReplace: return "key-replace";
    case PayloadKind::PcHijack: return "pc-hijack";
    case PayloadKind::ScanHijack: return "scan-hijack";
  }
  return "?";
}

std::string Manifest::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["core"] = core;
  j["trigger"] = trigger;
  j["payload"] = payload;
  j["confidentiality_assets"] = confidentiality_assets;
  j["integrity_assets"] = integrity_assets;
  j["valid_points"] = valid_points;
  j["malicious_points"] = malicious_points;
  nlohmann::json cond = nlohmann::json::array();
  for (const BusValue& b : trigger_condition) cond.push_back({{"bus", b.bus}, {"value", b.value}});
  j["trigger_condition"] = cond;
  nlohmann::json seq = nlohmann::json::array();
  for (const auto& step : trigger_sequence) {
    nlohmann::json s = nlohmann::json::object();
    for (const BusValue& b : step) s[b.bus] = b.value;
    seq.push_back(s);
  }
  j["trigger_sequence"] = seq;
  j["hold_cycles"] = hold_cycles;
  j["state_registers"] = state_registers;
  j["counter_registers"] = counter_registers;
  j["unanalyzable"] = unanalyzable;
  return j.dump(2) + "\n";
}

Fixture generate(const FixtureSpec& spec) { return Generator(spec).run(); }

}  // namespace ifsguard::benchgen
