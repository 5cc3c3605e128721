#include "modunif/propsat.hpp"

#include <algorithm>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include "modunif/error.hpp"

namespace modunif::sat {

void Cnf::validate() const {
  if (num_atoms < 0) throw Error("negative atom count");
  for (const auto& c : clauses) {
    for (Lit l : c) {
      if (l == 0) throw Error("literal 0 in clause");
      if (std::abs(l) > num_atoms) throw Error("literal " + std::to_string(l) + " exceeds atom count");
    }
  }
}

bool satisfies(const Cnf& f, const Assignment& a) {
  for (const auto& c : f.clauses) {
    bool ok = false;
    for (Lit l : c) {
      if (std::abs(l) < static_cast<int>(a.values.size()) && a.value(l)) {
        ok = true;
        break;
      }
    }
    if (!ok) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Solver internals use 0-based variables and literal codes 2*v + sign.

namespace {

constexpr int kUndef = 2;

int code_of(Lit l) { return 2 * (std::abs(l) - 1) + (l < 0 ? 1 : 0); }
int var_of(int code) { return code >> 1; }
int negate(int code) { return code ^ 1; }

double luby(double y, int x) {
  int size = 1;
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
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

}  // namespace

struct Solver::Impl {
  std::vector<std::vector<int>> clauses;
  std::vector<std::vector<int>> watches;  // by literal code
  std::vector<std::uint8_t> assigns;      // 0 false, 1 true, kUndef
  std::vector<int> level;
  std::vector<int> reason;
  std::vector<std::uint8_t> polarity;  // saved phase, 1 = negative
  std::vector<double> activity;
  std::vector<std::uint8_t> seen;
  std::vector<int> trail;
  std::vector<int> trail_lim;
  std::size_t qhead = 0;
  double var_inc = 1.0;
  bool ok = true;
  std::uint64_t conflicts = 0;
  std::vector<std::uint8_t> model;

  // max-heap of variables keyed by activity
  std::vector<int> heap;
  std::vector<int> heap_pos;

  int nvars() const { return static_cast<int>(assigns.size()); }
  int decision_level() const { return static_cast<int>(trail_lim.size()); }

  int lit_value(int code) const {
    std::uint8_t a = assigns[var_of(code)];
    if (a == kUndef) return kUndef;
    return (a ^ (code & 1)) & 1;
  }

  bool heap_less(int a, int b) const { return activity[a] > activity[b] || (activity[a] == activity[b] && a < b); }

  void heap_up(int i) {
    int v = heap[i];
    while (i > 0) {
      int parent = (i - 1) / 2;
      if (!heap_less(v, heap[parent])) break;
      heap[i] = heap[parent];
      heap_pos[heap[i]] = i;
      i = parent;
    }
    heap[i] = v;
    heap_pos[v] = i;
  }

  void heap_down(int i) {
    int v = heap[i];
    int n = static_cast<int>(heap.size());
    while (true) {
      int child = 2 * i + 1;
      if (child >= n) break;
      if (child + 1 < n && heap_less(heap[child + 1], heap[child])) ++child;
      if (!heap_less(heap[child], v)) break;
      heap[i] = heap[child];
      heap_pos[heap[i]] = i;
      i = child;
    }
    heap[i] = v;
    heap_pos[v] = i;
  }

  void heap_insert(int v) {
    if (heap_pos[v] >= 0) return;
    heap.push_back(v);
    heap_pos[v] = static_cast<int>(heap.size()) - 1;
    heap_up(heap_pos[v]);
  }

  int heap_pop() {
    int v = heap[0];
    heap_pos[v] = -1;
    int last = heap.back();
    heap.pop_back();
    if (!heap.empty()) {
      heap[0] = last;
      heap_pos[last] = 0;
      heap_down(0);
    }
    return v;
  }

  int new_var() {
    int v = nvars();
    assigns.push_back(kUndef);
    level.push_back(0);
    reason.push_back(-1);
    polarity.push_back(1);
    activity.push_back(0.0);
    seen.push_back(0);
    heap_pos.push_back(-1);
    watches.emplace_back();
    watches.emplace_back();
    heap_insert(v);
    return v;
  }

  void bump(int v) {
    activity[v] += var_inc;
    if (activity[v] > 1e100) {
      for (double& a : activity) a *= 1e-100;
      var_inc *= 1e-100;
    }
    if (heap_pos[v] >= 0) heap_up(heap_pos[v]);
  }

  void enqueue(int code, int from) {
    int v = var_of(code);
    assigns[v] = static_cast<std::uint8_t>((code & 1) ^ 1);
    level[v] = decision_level();
    reason[v] = from;
    trail.push_back(code);
  }

  void cancel_until(int lvl) {
    if (decision_level() <= lvl) return;
    for (int i = static_cast<int>(trail.size()) - 1; i >= trail_lim[lvl]; --i) {
      int v = var_of(trail[i]);
      polarity[v] = static_cast<std::uint8_t>(trail[i] & 1);
      assigns[v] = kUndef;
      reason[v] = -1;
      heap_insert(v);
    }
    trail.resize(trail_lim[lvl]);
    trail_lim.resize(lvl);
    qhead = trail.size();
  }

  int propagate() {
    while (qhead < trail.size()) {
      int p = trail[qhead++];
      int false_lit = negate(p);
      auto& ws = watches[false_lit];
      std::size_t i = 0;
      std::size_t j = 0;
      while (i < ws.size()) {
        int ci = ws[i++];
        auto& c = clauses[ci];
        if (c[0] == false_lit) std::swap(c[0], c[1]);
        if (lit_value(c[0]) == 1) {
          ws[j++] = ci;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (lit_value(c[k]) != 0) {
            std::swap(c[1], c[k]);
            watches[c[1]].push_back(ci);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = ci;
        if (lit_value(c[0]) == 0) {
          while (i < ws.size()) ws[j++] = ws[i++];
          ws.resize(j);
          qhead = trail.size();
          return ci;
        }
        enqueue(c[0], ci);
      }
      ws.resize(j);
    }
    return -1;
  }

  void analyze(int confl, std::vector<int>& learnt, int& bt_level) {
    learnt.assign(1, -1);
    int path = 0;
    int p = -1;
    int index = static_cast<int>(trail.size()) - 1;
    do {
      const auto& c = clauses[confl];
      for (std::size_t k = (p == -1 ? 0 : 1); k < c.size(); ++k) {
        int q = c[k];
        int v = var_of(q);
        if (!seen[v] && level[v] > 0) {
          bump(v);
          seen[v] = 1;
          if (level[v] >= decision_level())
            ++path;
          else
            learnt.push_back(q);
        }
      }
      while (!seen[var_of(trail[index])]) --index;
      p = trail[index--];
      confl = reason[var_of(p)];
      seen[var_of(p)] = 0;
      --path;
    } while (path > 0);
    learnt[0] = negate(p);
    for (std::size_t k = 1; k < learnt.size(); ++k) seen[var_of(learnt[k])] = 0;

    bt_level = 0;
    if (learnt.size() > 1) {
      std::size_t max_i = 1;
      for (std::size_t k = 2; k < learnt.size(); ++k)
        if (level[var_of(learnt[k])] > level[var_of(learnt[max_i])]) max_i = k;
      std::swap(learnt[1], learnt[max_i]);
      bt_level = level[var_of(learnt[1])];
    }
  }

  int attach(std::vector<int> c) {
    int ci = static_cast<int>(clauses.size());
    watches[c[0]].push_back(ci);
    watches[c[1]].push_back(ci);
    clauses.push_back(std::move(c));
    return ci;
  }

  void add_clause(std::span<const Lit> ext) {
    if (!ok) return;
    cancel_until(0);
    std::vector<int> c;
    c.reserve(ext.size());
    for (Lit l : ext) {
      if (l == 0) throw Error("literal 0 in clause");
      while (std::abs(l) > nvars()) new_var();
      c.push_back(code_of(l));
    }
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    std::vector<int> kept;
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (k + 1 < c.size() && c[k + 1] == negate(c[k])) return;  // tautology
      int val = lit_value(c[k]);
      if (val == 1) return;
      if (val == 0) continue;
      kept.push_back(c[k]);
    }
    if (kept.empty()) {
      ok = false;
      return;
    }
    if (kept.size() == 1) {
      enqueue(kept[0], -1);
      if (propagate() != -1) ok = false;
      return;
    }
    attach(std::move(kept));
  }

  int pick_branch() {
    while (!heap.empty()) {
      int v = heap_pop();
      if (assigns[v] == kUndef) return 2 * v + polarity[v];
    }
    return -1;
  }

  bool solve(const SolveOptions& opts) {
    model.clear();
    if (!ok) return false;
    cancel_until(0);
    if (propagate() != -1) {
      ok = false;
      return false;
    }
    const std::uint64_t start = conflicts;
    int restart_index = 0;
    std::uint64_t restart_limit = static_cast<std::uint64_t>(100 * luby(2, restart_index));
    std::uint64_t since_restart = 0;
    std::vector<int> learnt;
    while (true) {
      int confl = propagate();
      if (confl != -1) {
        ++conflicts;
        ++since_restart;
        if (decision_level() == 0) {
          ok = false;
          return false;
        }
        if (opts.conflict_budget != 0 && conflicts - start > opts.conflict_budget) {
          cancel_until(0);
          throw ResourceLimit("SAT conflict budget exhausted");
        }
        int bt = 0;
        analyze(confl, learnt, bt);
        cancel_until(bt);
        if (learnt.size() == 1) {
          enqueue(learnt[0], -1);
        } else {
          int ci = attach(learnt);
          enqueue(clauses[ci][0], ci);
        }
        var_inc /= 0.95;
        if (since_restart >= restart_limit) {
          since_restart = 0;
          ++restart_index;
          restart_limit = static_cast<std::uint64_t>(100 * luby(2, restart_index));
          cancel_until(0);
        }
      } else {
        int next = pick_branch();
        if (next < 0) {
          model.assign(assigns.begin(), assigns.end());
          return true;
        }
        trail_lim.push_back(static_cast<int>(trail.size()));
        enqueue(next, -1);
      }
    }
  }
};

Solver::Solver() : impl_(new Impl) {}
Solver::~Solver() { delete impl_; }
Solver::Solver(Solver&& o) noexcept : impl_(o.impl_) { o.impl_ = nullptr; }
Solver& Solver::operator=(Solver&& o) noexcept {
  if (this != &o) {
    delete impl_;
    impl_ = o.impl_;
    o.impl_ = nullptr;
  }
  return *this;
}

int Solver::new_atom() { return impl_->new_var() + 1; }
int Solver::num_atoms() const { return impl_->nvars(); }
void Solver::add_clause(std::span<const Lit> clause) { impl_->add_clause(clause); }
void Solver::add_cnf(const Cnf& f) {
  while (num_atoms() < f.num_atoms) new_atom();
  for (const auto& c : f.clauses) add_clause(c);
}
bool Solver::solve(const SolveOptions& opts) { return impl_->solve(opts); }
bool Solver::value(Lit l) const {
  std::uint8_t a = impl_->model.at(std::abs(l) - 1);
  return l > 0 ? a == 1 : a == 0;
}
Assignment Solver::model() const {
  Assignment a;
  a.values.assign(impl_->model.size() + 1, false);
  for (std::size_t v = 0; v < impl_->model.size(); ++v) a.values[v + 1] = impl_->model[v] == 1;
  return a;
}
std::uint64_t Solver::conflicts() const { return impl_->conflicts; }

SatResult solve(const Cnf& f, const SolveOptions& opts) {
  f.validate();
  Solver s;
  while (s.num_atoms() < f.num_atoms) s.new_atom();
  s.add_cnf(f);
  if (!s.solve(opts)) return {};
  Assignment a = s.model();
  a.values.resize(static_cast<std::size_t>(f.num_atoms) + 1, false);
  if (!satisfies(f, a)) throw InvariantViolation("SAT model fails clause check");
  return {std::move(a)};
}

// ---------------------------------------------------------------------------

CircuitBuilder::CircuitBuilder(Cnf& out) : cnf_(out) {
  if (cnf_.num_atoms != 0) throw Error("CircuitBuilder needs an empty CNF");
  cnf_.new_atom();
  cnf_.add({1});
}

Lit CircuitBuilder::make_and(std::vector<Lit> ins) {
  std::vector<Lit> xs;
  xs.reserve(ins.size());
  for (Lit l : ins) {
    if (l == 1) continue;
    if (l == -1) return -1;
    xs.push_back(l);
  }
  std::sort(xs.begin(), xs.end(), [](Lit a, Lit b) {
    return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a < b;
  });
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    if (xs[i] == -xs[i + 1]) return -1;
  if (xs.empty()) return 1;
  if (xs.size() == 1) return xs[0];
  auto it = and_cache_.find(xs);
  if (it != and_cache_.end()) return it->second;
  Lit g = cnf_.new_atom();
  std::vector<Lit> big{g};
  for (Lit x : xs) {
    cnf_.add({-g, x});
    big.push_back(-x);
  }
  cnf_.add(std::move(big));
  and_cache_.emplace(std::move(xs), g);
  return g;
}

Lit CircuitBuilder::make_or(std::vector<Lit> ins) {
  for (Lit& l : ins) l = -l;
  return -make_and(std::move(ins));
}

Lit CircuitBuilder::make_iff(Lit a, Lit b) { return make_and(make_or(-a, b), make_or(a, -b)); }

void CircuitBuilder::require(Lit l) {
  if (l == 1) return;
  cnf_.add({l});
}

// ---------------------------------------------------------------------------

void write_dimacs(std::ostream& os, const Cnf& f) {
  os << "p cnf " << f.num_atoms << ' ' << f.clauses.size() << '\n';
  for (const auto& c : f.clauses) {
    for (Lit l : c) os << l << ' ';
    os << "0\n";
  }
}

std::string to_dimacs(const Cnf& f) {
  std::ostringstream os;
  write_dimacs(os, f);
  return os.str();
}

Cnf parse_dimacs(std::string_view text) {
  Cnf f;
  bool header = false;
  std::size_t declared = 0;
  std::vector<Lit> current;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    std::size_t line_start = offset;
    offset += line.size() + 1;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "c") continue;
    if (first == "%") break;
    if (first == "p") {
      std::string fmt;
      long atoms = -1;
      long count = -1;
      if (header || !(ls >> fmt >> atoms >> count) || fmt != "cnf" || atoms < 0 || count < 0)
        throw SyntaxError(line_start, "'p cnf <atoms> <clauses>'");
      header = true;
      f.num_atoms = static_cast<int>(atoms);
      declared = static_cast<std::size_t>(count);
      continue;
    }
    if (!header) throw SyntaxError(line_start, "'p cnf' header");
    std::istringstream nums(line);
    long v = 0;
    while (nums >> v) {
      if (v == 0) {
        f.clauses.push_back(std::move(current));
        current.clear();
      } else {
        if (std::abs(v) > f.num_atoms) throw SyntaxError(line_start, "literal within declared atom count");
        current.push_back(static_cast<Lit>(v));
      }
    }
    if (!nums.eof()) throw SyntaxError(line_start, "integer literals");
  }
  if (!header) throw SyntaxError(0, "'p cnf' header");
  if (!current.empty()) throw SyntaxError(offset, "clause terminated by 0");
  if (f.clauses.size() != declared) throw SyntaxError(offset, std::to_string(declared) + " clauses");
  return f;
}

}  // namespace modunif::sat
