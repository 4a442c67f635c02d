// Bit-at-a-time reference kernel. Deliberately naive: one boolean per
// pattern, no word-level tricks, so the wide kernels have something plain to
// be compared against.

#include "ifsguard/sim.hpp"

namespace ifsguard::sim::kernels {
namespace {

bool eval_bit(const Program& p, const Op& op, const std::uint64_t* slots, std::size_t lanes, std::size_t word,
              unsigned bit) {
  auto in = [&](unsigned k) -> bool {
    return (slots[static_cast<std::size_t>(p.operands[op.first + k]) * lanes + word] >> bit) & 1u;
  };
  switch (op.code) {
    case OpCode::Zero: return false;
    case OpCode::One: return true;
    case OpCode::Buf: return in(0);
    case OpCode::Not: return !in(0);
    case OpCode::Mux2: return in(0) ? in(2) : in(1);
    default: break;
  }
  bool any = false, all = true, parity = false;
  for (unsigned k = 0; k < op.arity; ++k) {
    bool v = in(k);
    any = any || v;
    all = all && v;
    parity = parity != v;
  }
  switch (op.code) {
    case OpCode::And: return all;
    case OpCode::Nand: return !all;
    case OpCode::Or: return any;
    case OpCode::Nor: return !any;
    case OpCode::Xor: return parity;
    case OpCode::Xnor: return !parity;
    default: return false;
  }
}

}  // namespace

void eval_scalar(const Program& p, std::uint64_t* slots, std::size_t lanes) {
  for (const Op& op : p.ops) {
    std::uint64_t* out = slots + static_cast<std::size_t>(op.out) * lanes;
    for (std::size_t w = 0; w < lanes; ++w) {
      std::uint64_t word = 0;
      for (unsigned bit = 0; bit < 64; ++bit) {
        if (eval_bit(p, op, slots, lanes, w, bit)) word |= std::uint64_t{1} << bit;
      }
      out[w] = word;
    }
  }
}

}  // namespace ifsguard::sim::kernels
