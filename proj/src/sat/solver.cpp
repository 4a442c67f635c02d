#include <algorithm>
#include <cmath>

#include "ifsguard/sat.hpp"

namespace ifsguard::sat {
namespace {

double luby(double y, std::uint64_t x) {
  std::uint64_t size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

constexpr double kVarDecay = 0.95;
constexpr double kClauseDecay = 0.999;
constexpr std::uint64_t kRestartBase = 100;

}  // namespace

Solver::Solver() = default;

Var Solver::new_var() {
  Var v = static_cast<Var>(assigns_.size());
  assigns_.push_back(0);
  phase_.push_back(false);
  level_.push_back(0);
  reason_.push_back(kNoReason);
  activity_.push_back(0.0);
  seen_.push_back(false);
  heap_pos_.push_back(-1);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_insert(v);
  return v;
}

bool Solver::add_clause(std::span<const Lit> in) {
  if (!ok_) return false;
  std::vector<Lit> lits(in.begin(), in.end());
  std::sort(lits.begin(), lits.end(), [](Lit a, Lit b) { return a.code < b.code; });
  std::vector<Lit> out;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    Lit l = lits[i];
    if (value(l) == 1) return true;
    if (i + 1 < lits.size() && lits[i + 1] == ~l) return true;
    if (value(l) == -1) continue;
    if (!out.empty() && out.back() == l) continue;
    out.push_back(l);
  }
  if (out.empty()) return ok_ = false;
  if (out.size() == 1) {
    enqueue(out[0], kNoReason);
    if (propagate() != kNoReason) ok_ = false;
    return ok_;
  }
  attach(std::move(out), false);
  return true;
}

Solver::CRef Solver::attach(std::vector<Lit> lits, bool learnt) {
  CRef cref = static_cast<CRef>(clauses_.size());
  watches_[lits[0].code].push_back({cref, lits[1]});
  watches_[lits[1].code].push_back({cref, lits[0]});
  clauses_.push_back(Clause{std::move(lits), 0.0, learnt, false});
  if (learnt) learnts_.push_back(cref);
  return cref;
}

void Solver::enqueue(Lit l, CRef reason) {
  assigns_[l.var()] = l.negated() ? -1 : 1;
  level_[l.var()] = decision_level();
  reason_[l.var()] = reason;
  trail_.push_back(l);
}

Solver::CRef Solver::propagate() {
  CRef conflict = kNoReason;
  while (qhead_ < trail_.size()) {
    Lit p = trail_[qhead_++];
    Lit false_lit = ~p;
    auto& ws = watches_[false_lit.code];
    std::size_t i = 0, j = 0;
    ++stats_.propagations;
    while (i < ws.size()) {
      Watcher w = ws[i++];
      if (value(w.blocker) == 1) {
        ws[j++] = w;
        continue;
      }
      Clause& c = clauses_[w.cref];
      if (c.deleted) continue;
      if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
      Lit first = c.lits[0];
      if (first != w.blocker && value(first) == 1) {
        ws[j++] = Watcher{w.cref, first};
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.lits.size(); ++k) {
        if (value(c.lits[k]) != -1) {
          std::swap(c.lits[1], c.lits[k]);
          watches_[c.lits[1].code].push_back(Watcher{w.cref, first});
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = Watcher{w.cref, first};
      if (value(first) == -1) {
        conflict = w.cref;
        qhead_ = trail_.size();
        while (i < ws.size()) ws[j++] = ws[i++];
      } else {
        enqueue(first, w.cref);
      }
    }
    ws.resize(j);
    if (conflict != kNoReason) break;
  }
  return conflict;
}

void Solver::analyze(CRef conflict, std::vector<Lit>& learnt, std::uint32_t& backtrack_level) {
  learnt.clear();
  learnt.push_back(Lit{0});
  int path = 0;
  bool have_p = false;
  Lit p{0};
  std::size_t idx = trail_.size();
  CRef confl = conflict;
  do {
    Clause& c = clauses_[confl];
    if (c.learnt) bump_clause(c);
    for (std::size_t j = have_p ? 1 : 0; j < c.lits.size(); ++j) {
      Lit q = c.lits[j];
      Var v = q.var();
      if (!seen_[v] && level_[v] > 0) {
        bump_var(v);
        seen_[v] = true;
        if (level_[v] >= decision_level()) {
          ++path;
        } else {
          learnt.push_back(q);
        }
      }
    }
    do {
      --idx;
    } while (!seen_[trail_[idx].var()]);
    p = trail_[idx];
    have_p = true;
    confl = reason_[p.var()];
    seen_[p.var()] = false;
    --path;
  } while (path > 0);
  learnt[0] = ~p;

  backtrack_level = 0;
  if (learnt.size() > 1) {
    std::size_t max_i = 1;
    for (std::size_t i = 2; i < learnt.size(); ++i)
      if (level_[learnt[i].var()] > level_[learnt[max_i].var()]) max_i = i;
    std::swap(learnt[1], learnt[max_i]);
    backtrack_level = level_[learnt[1].var()];
  }
  for (Lit l : learnt) seen_[l.var()] = false;
}

void Solver::backtrack(std::uint32_t level) {
  if (decision_level() <= level) return;
  for (std::size_t i = trail_.size(); i-- > trail_lim_[level];) {
    Var v = trail_[i].var();
    phase_[v] = assigns_[v] == 1;
    assigns_[v] = 0;
    reason_[v] = kNoReason;
    heap_insert(v);
  }
  trail_.resize(trail_lim_[level]);
  trail_lim_.resize(level);
  qhead_ = trail_.size();
}

void Solver::reduce_learnts() {
  std::vector<CRef> live;
  for (CRef c : learnts_)
    if (!clauses_[c].deleted) live.push_back(c);
  std::sort(live.begin(), live.end(),
            [&](CRef a, CRef b) { return clauses_[a].activity < clauses_[b].activity; });
  std::size_t drop = live.size() / 2;
  std::vector<CRef> kept;
  for (std::size_t i = 0; i < live.size(); ++i) {
    Clause& c = clauses_[live[i]];
    Var v0 = c.lits[0].var();
    bool locked = reason_[v0] == live[i] && value(c.lits[0]) == 1;
    if (i < drop && !locked && c.lits.size() > 2) {
      c.deleted = true;
      c.lits.clear();
      c.lits.shrink_to_fit();
    } else {
      kept.push_back(live[i]);
    }
  }
  learnts_ = std::move(kept);
  // Purge watchers of deleted clauses so lits[0]/lits[1] accesses stay valid.
  for (auto& ws : watches_) {
    ws.erase(std::remove_if(ws.begin(), ws.end(), [&](const Watcher& w) { return clauses_[w.cref].deleted; }),
             ws.end());
  }
}

Lit Solver::pick_branch() {
  while (!heap_.empty()) {
    Var v = heap_pop();
    if (assigns_[v] == 0) return Lit::make(v, !phase_[v]);
  }
  return Lit{~0u};
}

Result Solver::solve(const Limits& limits) {
  if (!ok_) return Result::Unsat;
  if (propagate() != kNoReason) {
    ok_ = false;
    return Result::Unsat;
  }
  std::uint64_t restart_no = 0;
  std::uint64_t conflicts_until_restart = static_cast<std::uint64_t>(luby(2, restart_no) * kRestartBase);
  std::size_t max_learnts = std::max<std::size_t>(2000, clauses_.size() / 3);
  std::uint64_t decisions_here = 0;
  std::vector<Lit> learnt;

  for (;;) {
    CRef confl = propagate();
    if (confl != kNoReason) {
      ++stats_.conflicts;
      if (decision_level() == 0) {
        ok_ = false;
        return Result::Unsat;
      }
      std::uint32_t bt;
      analyze(confl, learnt, bt);
      backtrack(bt);
      if (learnt.size() == 1) {
        enqueue(learnt[0], kNoReason);
      } else {
        CRef cr = attach(learnt, true);
        bump_clause(clauses_[cr]);
        enqueue(learnt[0], cr);
      }
      var_inc_ /= kVarDecay;
      clause_inc_ /= kClauseDecay;
      if (conflicts_until_restart > 0) --conflicts_until_restart;
      continue;
    }
    if (conflicts_until_restart == 0) {
      backtrack(0);
      ++restart_no;
      conflicts_until_restart = static_cast<std::uint64_t>(luby(2, restart_no) * kRestartBase);
    }
    if (learnts_.size() > max_learnts + trail_.size()) {
      reduce_learnts();
      max_learnts = max_learnts + max_learnts / 10;
    }
    Lit next = pick_branch();
    if (next.code == ~0u) {
      model_.assign(assigns_.size(), false);
      for (std::size_t v = 0; v < assigns_.size(); ++v) model_[v] = assigns_[v] == 1;
      backtrack(0);
      return Result::Sat;
    }
    if (decisions_here >= limits.max_decisions) {
      backtrack(0);
      heap_insert(next.var());
      return Result::Unknown;
    }
    ++decisions_here;
    ++stats_.decisions;
    trail_lim_.push_back(static_cast<std::uint32_t>(trail_.size()));
    enqueue(next, kNoReason);
  }
}

void Solver::bump_var(Var v) {
  if ((activity_[v] += var_inc_) > 1e100) {
    for (double& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_pos_[v] >= 0) heap_up(static_cast<std::size_t>(heap_pos_[v]));
}

void Solver::bump_clause(Clause& c) {
  if ((c.activity += clause_inc_) > 1e20) {
    for (CRef r : learnts_) clauses_[r].activity *= 1e-20;
    clause_inc_ *= 1e-20;
  }
}

void Solver::heap_insert(Var v) {
  if (heap_pos_[v] >= 0) return;
  heap_pos_[v] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_.size() - 1);
}

void Solver::heap_up(std::size_t i) {
  Var v = heap_[i];
  while (i > 0) {
    std::size_t parent = (i - 1) / 2;
    if (activity_[heap_[parent]] >= activity_[v]) break;
    heap_[i] = heap_[parent];
    heap_pos_[heap_[i]] = static_cast<int>(i);
    i = parent;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<int>(i);
}

void Solver::heap_down(std::size_t i) {
  Var v = heap_[i];
  for (;;) {
    std::size_t child = 2 * i + 1;
    if (child >= heap_.size()) break;
    if (child + 1 < heap_.size() && activity_[heap_[child + 1]] > activity_[heap_[child]]) ++child;
    if (activity_[heap_[child]] <= activity_[v]) break;
    heap_[i] = heap_[child];
    heap_pos_[heap_[i]] = static_cast<int>(i);
    i = child;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<int>(i);
}

Var Solver::heap_pop() {
  Var top = heap_.front();
  heap_pos_[top] = -1;
  Var last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[last] = 0;
    heap_down(0);
  }
  return top;
}

}  // namespace ifsguard::sat
