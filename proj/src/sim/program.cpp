#include <algorithm>

#include "ifsguard/sim.hpp"

namespace ifsguard::sim {
namespace {

OpCode opcode(CellKind k) {
  switch (k) {
    case CellKind::And: return OpCode::And;
    case CellKind::Or: return OpCode::Or;
    case CellKind::Nand: return OpCode::Nand;
    case CellKind::Nor: return OpCode::Nor;
    case CellKind::Xor: return OpCode::Xor;
    case CellKind::Xnor: return OpCode::Xnor;
    case CellKind::Not: return OpCode::Not;
    case CellKind::Buf: return OpCode::Buf;
    case CellKind::Mux2: return OpCode::Mux2;
  }
  return OpCode::Buf;
}

}  // namespace

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Word: return "word64";
    case Backend::Avx2: return "avx2";
  }
  return "?";
}

bool backend_available(Backend b) {
  if (b != Backend::Avx2) return true;
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend best_backend() {
  static const Backend best = backend_available(Backend::Avx2) ? Backend::Avx2 : Backend::Word;
  return best;
}

Program Program::compile(const CircuitGraph& g, std::span<const ForcedNet> forced) {
  Program p;
  p.slot_count = static_cast<std::uint32_t>(g.nets().size());
  std::vector<bool> is_forced(g.nets().size(), false);
  for (const ForcedNet& f : forced) {
    is_forced[index(f.net)] = true;
    p.ops.push_back(Op{f.value ? OpCode::One : OpCode::Zero, 0, index(f.net), 0});
  }
  for (const Net& n : g.nets()) {
    if (n.driver.kind == DriverKind::Constant && !is_forced[index(n.id)]) {
      p.ops.push_back(Op{n.driver.id ? OpCode::One : OpCode::Zero, 0, index(n.id), 0});
    }
  }
  for (CellId cid : g.topo_order()) {
    const Cell& c = g.cell(cid);
    if (is_forced[index(c.output)]) continue;
    Op op{opcode(c.kind), static_cast<std::uint8_t>(c.inputs.size()), index(c.output),
          static_cast<std::uint32_t>(p.operands.size())};
    for (NetId in : c.inputs) p.operands.push_back(index(in));
    p.ops.push_back(op);
  }
  return p;
}

void evaluate(const Program& program, std::span<std::uint64_t> slots, std::size_t lanes, Backend backend) {
  switch (backend) {
    case Backend::Scalar: kernels::eval_scalar(program, slots.data(), lanes); return;
    case Backend::Word: kernels::eval_word(program, slots.data(), lanes); return;
    case Backend::Avx2:
      if (backend_available(Backend::Avx2)) {
        kernels::eval_avx2(program, slots.data(), lanes);
      } else {
        kernels::eval_word(program, slots.data(), lanes);
      }
      return;
  }
}

BlockSimulator::BlockSimulator(const CircuitGraph& graph, std::span<const ForcedNet> forced, std::size_t lanes,
                               Backend backend)
    : program_(Program::compile(graph, forced)),
      slots_(static_cast<std::size_t>(program_.slot_count) * lanes, 0),
      lanes_(lanes),
      backend_(backend) {}

void BlockSimulator::evaluate() { sim::evaluate(program_, slots_, lanes_, backend_); }

void enumeration_pattern(std::span<std::uint64_t> words, std::uint32_t var, std::uint64_t block_start) {
  static constexpr std::uint64_t kLow[6] = {0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
                                            0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
  for (std::size_t w = 0; w < words.size(); ++w) {
    if (var < 6) {
      words[w] = kLow[var];
    } else {
      std::uint64_t pattern = block_start + 64 * w;
      words[w] = ((pattern >> var) & 1) ? ~0ull : 0ull;
    }
  }
}

}  // namespace ifsguard::sim
