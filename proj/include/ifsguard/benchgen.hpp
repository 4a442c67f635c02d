#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace ifsguard::benchgen {

enum class Core : std::uint8_t { Cipher, Processor };

enum class TriggerKind : std::uint8_t { None, AlwaysOn, SpecificInput, Counter, Fsm, FsmCounter };

enum class PayloadKind : std::uint8_t {
  None,
  Bypass,         // key bit muxed onto a ciphertext bit (leaks through a valid port)
  XorLfsrLeak,    // key bit mixed into an LFSR driving an extra port
  ShiftRegister,  // key bit shifted into an isolated register chain
  KeyReplace,     // key replaced by plaintext while triggered
  PcHijack,       // program counter forced to a fixed address
  ScanHijack,     // internal logic drives scan enable
};

const char* trigger_name(TriggerKind k);
const char* payload_name(PayloadKind k);

struct FixtureSpec {
  std::string name = "fixture";
  Core core = Core::Cipher;
  TriggerKind trigger = TriggerKind::None;
  PayloadKind payload = PayloadKind::None;
  std::uint32_t counter_bits = 4;
  /// Counter value that fires a Counter trigger; 0 means all ones.
  std::uint64_t counter_match = 0;
  bool planted_latch = false;
  bool uncontrollable_ff = false;
  std::uint64_t seed = 1;
};

struct BusValue {
  std::string bus;
  std::uint64_t value;
  friend bool operator==(const BusValue&, const BusValue&) = default;
};

/// Ground truth recorded while generating a fixture.
struct Manifest {
  std::string name;
  std::string core;
  std::string trigger;
  std::string payload;
  std::vector<std::string> confidentiality_assets;
  std::vector<std::string> integrity_assets;
  std::vector<std::string> valid_points;
  std::vector<std::string> malicious_points;
  /// Direct trigger condition (bus values on registers or inputs).
  std::vector<BusValue> trigger_condition;
  /// Planted activation sequence: one input pattern per step, then
  /// `hold_cycles` cycles of waiting (0 when there is no counter).
  std::vector<std::vector<BusValue>> trigger_sequence;
  std::uint64_t hold_cycles = 0;
  std::vector<std::string> state_registers;
  std::vector<std::string> counter_registers;
  std::vector<std::string> unanalyzable;

  std::string to_json() const;
};

struct Fixture {
  std::string netlist;
  Manifest manifest;
};

/// Deterministic for a given spec (the seed picks the magic constants).
Fixture generate(const FixtureSpec& spec);

/// Random small sequential design for property tests: `inputs` data inputs
/// a0.., `ffs` flip-flops (some resettable), `cells` gates and `outputs`
/// primary outputs y0...
struct RandomSpec {
  int inputs = 3;
  int ffs = 3;
  int cells = 14;
  int outputs = 2;
};
std::string random_design(std::mt19937& rng, const RandomSpec& spec);

}  // namespace ifsguard::benchgen
