#include <doctest.h>

#include <random>

#include "ifsguard/cnf.hpp"
#include "ifsguard/sat.hpp"

using namespace ifsguard::sat;

namespace {

bool brute_force(int vars, const std::vector<std::vector<int>>& cnf) {
  for (int m = 0; m < (1 << vars); ++m) {
    bool ok = true;
    for (const auto& c : cnf) {
      bool sat = false;
      for (int l : c) sat |= (((m >> (std::abs(l) - 1)) & 1) == 1) == (l > 0);
      if (!sat) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("random 3-SAT agrees with brute force and models satisfy") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 4 + trial % 9;
    const int m = static_cast<int>(n * (3.0 + (trial % 5) * 0.4));
    std::vector<std::vector<int>> cnf;
    for (int i = 0; i < m; ++i) {
      std::vector<int> c;
      for (int k = 0; k < 3; ++k) {
        int v = 1 + static_cast<int>(rng() % n);
        c.push_back(rng() % 2 ? v : -v);
      }
      cnf.push_back(c);
    }
    Solver s;
    for (int v = 0; v < n; ++v) s.new_var();
    for (const auto& c : cnf) {
      std::vector<Lit> lits;
      for (int l : c) lits.push_back(Lit::make(static_cast<Var>(std::abs(l) - 1), l < 0));
      s.add_clause(lits);
    }
    Result r = s.solve();
    CHECK((r == Result::Sat) == brute_force(n, cnf));
    if (r == Result::Sat) {
      for (const auto& c : cnf) {
        bool sat = false;
        for (int l : c) sat |= s.model_value(static_cast<Var>(std::abs(l) - 1)) == (l > 0);
        CHECK(sat);
      }
    }
  }
}

TEST_CASE("pigeonhole is unsat and a tight budget gives up") {
  auto php = [](Solver& s, int holes) {
    const int pigeons = holes + 1;
    auto x = [&](int p, int h) { return Lit::make(static_cast<Var>(p * holes + h)); };
    for (int i = 0; i < pigeons * holes; ++i) s.new_var();
    for (int p = 0; p < pigeons; ++p) {
      std::vector<Lit> c;
      for (int h = 0; h < holes; ++h) c.push_back(x(p, h));
      s.add_clause(c);
    }
    for (int h = 0; h < holes; ++h)
      for (int p = 0; p < pigeons; ++p)
        for (int q = p + 1; q < pigeons; ++q) s.add_clause({~x(p, h), ~x(q, h)});
  };
  Solver small;
  php(small, 5);
  CHECK(small.solve() == Result::Unsat);
  Solver big;
  php(big, 9);
  CHECK(big.solve(Limits{50}) == Result::Unknown);
}

TEST_CASE("cnf builder gates match their truth tables") {
  using ifsguard::CellKind;
  for (CellKind k : {CellKind::And, CellKind::Or, CellKind::Nand, CellKind::Nor, CellKind::Xor, CellKind::Xnor,
                     CellKind::Mux2}) {
    for (int m = 0; m < 8; ++m) {
      Solver s;
      CnfBuilder b(s);
      Lit a = b.fresh(), c = b.fresh(), d = b.fresh();
      Lit out = b.gate(k, std::vector<Lit>{a, c, d});
      b.require((m & 1) ? a : ~a);
      b.require((m & 2) ? c : ~c);
      b.require((m & 4) ? d : ~d);
      REQUIRE(s.solve() == Result::Sat);
      bool x = m & 1, y = m & 2, z = m & 4;
      bool want = false;
      switch (k) {
        case CellKind::And: want = x && y && z; break;
        case CellKind::Or: want = x || y || z; break;
        case CellKind::Nand: want = !(x && y && z); break;
        case CellKind::Nor: want = !(x || y || z); break;
        case CellKind::Xor: want = x ^ y ^ z; break;
        case CellKind::Xnor: want = !(x ^ y ^ z); break;
        case CellKind::Mux2: want = x ? z : y; break;
        default: break;
      }
      CHECK(s.model_value(out) == want);
    }
  }
}
