#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ifsguard/netlist.hpp"

namespace ifsguard::sim {

/// Pattern-parallel evaluation backends. Every backend computes the same
/// function; Scalar is the bit-at-a-time reference the others are tested
/// against.
enum class Backend : std::uint8_t { Scalar, Word, Avx2 };

const char* backend_name(Backend b);
bool backend_available(Backend b);
/// Widest backend supported by the running CPU.
Backend best_backend();

enum class OpCode : std::uint8_t { And, Or, Nand, Nor, Xor, Xnor, Not, Buf, Mux2, Zero, One };

struct Op {
  OpCode code;
  std::uint8_t arity;
  std::uint32_t out;    // slot
  std::uint32_t first;  // offset into operands
};

struct ForcedNet {
  NetId net;
  bool value;
};

/// Combinational logic of a graph compiled to a flat op list, one slot per
/// net. Constant nets and forced nets are materialized by leading Zero/One
/// ops; the cell driving a forced net is dropped.
struct Program {
  std::vector<Op> ops;
  std::vector<std::uint32_t> operands;
  std::uint32_t slot_count = 0;

  static Program compile(const CircuitGraph& graph, std::span<const ForcedNet> forced = {});
};

/// slots holds slot_count blocks of `lanes` 64-bit words; slot s occupies
/// words [s*lanes, (s+1)*lanes). Each bit is one pattern.
void evaluate(const Program& program, std::span<std::uint64_t> slots, std::size_t lanes, Backend backend);

namespace kernels {
void eval_scalar(const Program& p, std::uint64_t* slots, std::size_t lanes);
void eval_word(const Program& p, std::uint64_t* slots, std::size_t lanes);
void eval_avx2(const Program& p, std::uint64_t* slots, std::size_t lanes);
}  // namespace kernels

/// Convenience wrapper owning the slot storage for one block of patterns.
class BlockSimulator {
 public:
  BlockSimulator(const CircuitGraph& graph, std::span<const ForcedNet> forced, std::size_t lanes,
                 Backend backend = best_backend());

  std::size_t lanes() const { return lanes_; }
  std::span<std::uint64_t> net(NetId id) { return {slots_.data() + index(id) * lanes_, lanes_}; }
  std::span<const std::uint64_t> net(NetId id) const { return {slots_.data() + index(id) * lanes_, lanes_}; }
  void evaluate();

 private:
  Program program_;
  std::vector<std::uint64_t> slots_;
  std::size_t lanes_;
  Backend backend_;
};

/// Fills `words` with the bit-pattern of enumeration variable `var` for the
/// block starting at pattern `block_start` (a multiple of 64 * words.size()).
void enumeration_pattern(std::span<std::uint64_t> words, std::uint32_t var, std::uint64_t block_start);

}  // namespace ifsguard::sim
