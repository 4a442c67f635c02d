#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace ifsguard::sat {

using Var = std::uint32_t;

struct Lit {
  std::uint32_t code;

  static Lit make(Var v, bool negated = false) { return Lit{(v << 1) | static_cast<std::uint32_t>(negated)}; }
  Var var() const { return code >> 1; }
  bool negated() const { return code & 1u; }
  Lit operator~() const { return Lit{code ^ 1u}; }
  friend bool operator==(Lit, Lit) = default;
};

enum class Result : std::uint8_t { Sat, Unsat, Unknown };

struct Limits {
  std::uint64_t max_decisions = 1'000'000;
};

struct Stats {
  std::uint64_t decisions = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t propagations = 0;
};

/// Conflict-driven clause-learning solver: two watched literals, first-UIP
/// learning, VSIDS with phase saving, Luby restarts, activity-based learnt
/// clause reduction. Single use per query is the expected pattern.
class Solver {
 public:
  Solver();

  Var new_var();
  std::size_t num_vars() const { return assigns_.size(); }

  /// Returns false once the formula is known unsatisfiable at level 0.
  bool add_clause(std::span<const Lit> lits);
  bool add_clause(std::initializer_list<Lit> lits) { return add_clause(std::span<const Lit>(lits.begin(), lits.size())); }

  Result solve(const Limits& limits = {});

  /// Model value after Sat.
  bool model_value(Var v) const { return model_[v]; }
  bool model_value(Lit l) const { return model_[l.var()] != l.negated(); }

  const Stats& stats() const { return stats_; }

 private:
  using CRef = std::uint32_t;
  static constexpr CRef kNoReason = ~CRef{0};

  struct Clause {
    std::vector<Lit> lits;
    double activity = 0;
    bool learnt = false;
    bool deleted = false;
  };
  struct Watcher {
    CRef cref;
    Lit blocker;
  };

  // -1 false, 0 unassigned, 1 true
  int value(Lit l) const {
    int v = assigns_[l.var()];
    return l.negated() ? -v : v;
  }
  std::uint32_t decision_level() const { return static_cast<std::uint32_t>(trail_lim_.size()); }

  void enqueue(Lit l, CRef reason);
  CRef propagate();
  void analyze(CRef conflict, std::vector<Lit>& learnt, std::uint32_t& backtrack_level);
  void backtrack(std::uint32_t level);
  CRef attach(std::vector<Lit> lits, bool learnt);
  void reduce_learnts();
  Lit pick_branch();

  void bump_var(Var v);
  void bump_clause(Clause& c);
  void heap_insert(Var v);
  void heap_up(std::size_t i);
  void heap_down(std::size_t i);
  Var heap_pop();

  std::vector<Clause> clauses_;
  std::vector<CRef> learnts_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<int> assigns_;
  std::vector<bool> phase_;
  std::vector<std::uint32_t> level_;
  std::vector<CRef> reason_;
  std::vector<Lit> trail_;
  std::vector<std::uint32_t> trail_lim_;
  std::size_t qhead_ = 0;

  std::vector<double> activity_;
  double var_inc_ = 1.0;
  double clause_inc_ = 1.0;
  std::vector<Var> heap_;
  std::vector<int> heap_pos_;

  std::vector<bool> seen_;
  std::vector<bool> model_;
  bool ok_ = true;
  Stats stats_;
};

}  // namespace ifsguard::sat
