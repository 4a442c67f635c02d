#include "ifsguard/sim.hpp"

namespace ifsguard::sim::kernels {

void eval_word(const Program& p, std::uint64_t* slots, std::size_t lanes) {
  for (const Op& op : p.ops) {
    std::uint64_t* out = slots + static_cast<std::size_t>(op.out) * lanes;
    const std::uint32_t* args = p.operands.data() + op.first;
    auto in = [&](unsigned k) { return slots + static_cast<std::size_t>(args[k]) * lanes; };
    switch (op.code) {
      case OpCode::Zero:
      case OpCode::One: {
        const std::uint64_t v = op.code == OpCode::One ? ~0ull : 0ull;
        for (std::size_t w = 0; w < lanes; ++w) out[w] = v;
        break;
      }
      case OpCode::Buf:
      case OpCode::Not: {
        const std::uint64_t inv = op.code == OpCode::Not ? ~0ull : 0ull;
        const std::uint64_t* a = in(0);
        for (std::size_t w = 0; w < lanes; ++w) out[w] = a[w] ^ inv;
        break;
      }
      case OpCode::Mux2: {
        const std::uint64_t *s = in(0), *a = in(1), *b = in(2);
        for (std::size_t w = 0; w < lanes; ++w) out[w] = (s[w] & b[w]) | (~s[w] & a[w]);
        break;
      }
      case OpCode::And:
      case OpCode::Nand: {
        const std::uint64_t inv = op.code == OpCode::Nand ? ~0ull : 0ull;
        for (std::size_t w = 0; w < lanes; ++w) {
          std::uint64_t acc = ~0ull;
          for (unsigned k = 0; k < op.arity; ++k) acc &= in(k)[w];
          out[w] = acc ^ inv;
        }
        break;
      }
      case OpCode::Or:
      case OpCode::Nor: {
        const std::uint64_t inv = op.code == OpCode::Nor ? ~0ull : 0ull;
        for (std::size_t w = 0; w < lanes; ++w) {
          std::uint64_t acc = 0;
          for (unsigned k = 0; k < op.arity; ++k) acc |= in(k)[w];
          out[w] = acc ^ inv;
        }
        break;
      }
      case OpCode::Xor:
      case OpCode::Xnor: {
        const std::uint64_t inv = op.code == OpCode::Xnor ? ~0ull : 0ull;
        for (std::size_t w = 0; w < lanes; ++w) {
          std::uint64_t acc = 0;
          for (unsigned k = 0; k < op.arity; ++k) acc ^= in(k)[w];
          out[w] = acc ^ inv;
        }
        break;
      }
    }
  }
}

}  // namespace ifsguard::sim::kernels
