#pragma once

#include <span>
#include <vector>

#include "ifsguard/netlist.hpp"
#include "ifsguard/sat.hpp"

namespace ifsguard::sat {

/// Tseitin encoding with constant folding and structural short-cuts
/// (duplicate / complementary inputs). Gates whose inputs fold to a single
/// literal produce no clauses.
class CnfBuilder {
 public:
  explicit CnfBuilder(Solver& solver);

  Solver& solver() { return solver_; }
  Lit constant(bool v) const { return v ? true_ : ~true_; }
  bool is_constant(Lit l) const { return l.var() == true_.var(); }
  Lit fresh() { return Lit::make(solver_.new_var()); }

  Lit and_n(std::span<const Lit> ins);
  Lit or_n(std::span<const Lit> ins);
  Lit xor_n(std::span<const Lit> ins);
  Lit xor2(Lit a, Lit b);
  Lit mux(Lit sel, Lit a, Lit b);  // sel ? b : a
  Lit gate(CellKind kind, std::span<const Lit> ins);

  void require(Lit l) { solver_.add_clause({l}); }
  void require_equal(Lit a, Lit b);
  void require_any(std::span<const Lit> lits);

 private:
  Solver& solver_;
  Lit true_;
};

/// Sentinel for "net not encoded in this frame".
inline constexpr Lit kNoLit{~0u};

/// Encodes one combinational frame. `lits` must hold a literal for every
/// startpoint (primary inputs, FF and latch outputs) that feeds a needed net;
/// `forced` nets keep their preset literal even when driven by a cell. Only
/// cells whose outputs are flagged in `needed` are encoded (empty = all).
/// When `reference` is given, a cell whose input literals all equal the
/// reference frame's reuses the reference output literal.
void encode_frame(CnfBuilder& cnf, const CircuitGraph& graph, std::vector<Lit>& lits,
                  const std::vector<bool>& forced, const std::vector<bool>& needed,
                  const std::vector<Lit>* reference = nullptr);

}  // namespace ifsguard::sat
