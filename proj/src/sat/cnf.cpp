#include <algorithm>

#include "ifsguard/cnf.hpp"

namespace ifsguard::sat {

CnfBuilder::CnfBuilder(Solver& solver) : solver_(solver), true_(Lit::make(solver.new_var())) {
  solver_.add_clause({true_});
}

Lit CnfBuilder::and_n(std::span<const Lit> ins) {
  std::vector<Lit> xs;
  for (Lit l : ins) {
    if (l == constant(false)) return constant(false);
    if (l == constant(true)) continue;
    xs.push_back(l);
  }
  std::sort(xs.begin(), xs.end(), [](Lit a, Lit b) { return a.code < b.code; });
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    if (xs[i + 1] == ~xs[i]) return constant(false);
  if (xs.empty()) return constant(true);
  if (xs.size() == 1) return xs[0];
  Lit out = fresh();
  std::vector<Lit> big{out};
  for (Lit l : xs) {
    solver_.add_clause({~out, l});
    big.push_back(~l);
  }
  solver_.add_clause(big);
  return out;
}

Lit CnfBuilder::or_n(std::span<const Lit> ins) {
  std::vector<Lit> neg;
  for (Lit l : ins) neg.push_back(~l);
  return ~and_n(neg);
}

Lit CnfBuilder::xor2(Lit a, Lit b) {
  if (is_constant(a)) return a == constant(true) ? ~b : b;
  if (is_constant(b)) return b == constant(true) ? ~a : a;
  if (a == b) return constant(false);
  if (a == ~b) return constant(true);
  Lit out = fresh();
  solver_.add_clause({~out, a, b});
  solver_.add_clause({~out, ~a, ~b});
  solver_.add_clause({out, ~a, b});
  solver_.add_clause({out, a, ~b});
  return out;
}

Lit CnfBuilder::xor_n(std::span<const Lit> ins) {
  Lit acc = constant(false);
  for (Lit l : ins) acc = xor2(acc, l);
  return acc;
}

Lit CnfBuilder::mux(Lit sel, Lit a, Lit b) {
  if (sel == constant(true)) return b;
  if (sel == constant(false)) return a;
  if (a == b) return a;
  Lit out = fresh();
  solver_.add_clause({sel, ~a, out});
  solver_.add_clause({sel, a, ~out});
  solver_.add_clause({~sel, ~b, out});
  solver_.add_clause({~sel, b, ~out});
  solver_.add_clause({~a, ~b, out});
  solver_.add_clause({a, b, ~out});
  return out;
}

Lit CnfBuilder::gate(CellKind kind, std::span<const Lit> ins) {
  switch (kind) {
    case CellKind::And: return and_n(ins);
    case CellKind::Nand: return ~and_n(ins);
    case CellKind::Or: return or_n(ins);
    case CellKind::Nor: return ~or_n(ins);
    case CellKind::Xor: return xor_n(ins);
    case CellKind::Xnor: return ~xor_n(ins);
    case CellKind::Not: return ~ins[0];
    case CellKind::Buf: return ins[0];
    case CellKind::Mux2: return mux(ins[0], ins[1], ins[2]);
  }
  return ins[0];
}

void CnfBuilder::require_equal(Lit a, Lit b) {
  solver_.add_clause({~a, b});
  solver_.add_clause({a, ~b});
}

void CnfBuilder::require_any(std::span<const Lit> lits) { solver_.add_clause(lits); }

void encode_frame(CnfBuilder& cnf, const CircuitGraph& g, std::vector<Lit>& lits, const std::vector<bool>& forced,
                  const std::vector<bool>& needed, const std::vector<Lit>* reference) {
  std::vector<Lit> ins;
  for (CellId cid : g.topo_order()) {
    const Cell& c = g.cell(cid);
    const auto out = index(c.output);
    if (!forced.empty() && forced[out]) continue;
    if (!needed.empty() && !needed[out]) continue;
    ins.clear();
    bool same = reference != nullptr;
    for (NetId in : c.inputs) {
      Lit l = lits[index(in)];
      ins.push_back(l);
      if (same && (*reference)[index(in)] != l) same = false;
    }
    if (same && (*reference)[out] != kNoLit) {
      lits[out] = (*reference)[out];
    } else {
      lits[out] = cnf.gate(c.kind, ins);
    }
  }
}

}  // namespace ifsguard::sat
