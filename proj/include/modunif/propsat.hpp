#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace modunif::sat {

// A literal is a nonzero signed atom index, DIMACS style.
using Lit = int;

struct Cnf {
  int num_atoms = 0;
  std::vector<std::vector<Lit>> clauses;

  int new_atom() { return ++num_atoms; }
  void add(std::vector<Lit> clause) { clauses.push_back(std::move(clause)); }
  // Throws modunif::Error if a literal is 0 or names an atom above num_atoms.
  void validate() const;
};

// assignment[v] is the value of atom v; index 0 is unused.
struct Assignment {
  std::vector<bool> values;
  bool value(Lit l) const { return l > 0 ? values.at(l) : !values.at(-l); }
};

struct SatResult {
  std::optional<Assignment> model;  // empty when unsatisfiable
  bool sat() const noexcept { return model.has_value(); }
};

struct SolveOptions {
  // Conflicts allowed before ResourceLimit is thrown; 0 means unlimited.
  std::uint64_t conflict_budget = 0;
};

// True iff every clause has a literal made true by `a`.
bool satisfies(const Cnf& f, const Assignment& a);

// Complete and deterministic. A Sat answer is re-checked clause by clause.
SatResult solve(const Cnf& f, const SolveOptions& opts = {});

// Incremental CDCL solver: two watched literals, first-UIP learning,
// activity-ordered decisions, phase saving and Luby restarts.
class Solver {
 public:
  Solver();
  ~Solver();
  Solver(Solver&&) noexcept;
  Solver& operator=(Solver&&) noexcept;
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  int new_atom();
  int num_atoms() const;
  // Clauses may be added between calls to solve().
  void add_clause(std::span<const Lit> clause);
  void add_clause(std::initializer_list<Lit> clause) { add_clause(std::span<const Lit>(clause.begin(), clause.size())); }
  void add_cnf(const Cnf& f);

  // Throws ResourceLimit when the budget is exhausted.
  bool solve(const SolveOptions& opts = {});
  // Valid after solve() returned true.
  bool value(Lit l) const;
  Assignment model() const;
  std::uint64_t conflicts() const;

 private:
  struct Impl;
  Impl* impl_;
};

// Builds Tseitin-style gates with constant folding and structural sharing.
// Atom 1 is reserved and forced true, so true_lit() == 1 and false_lit() == -1.
class CircuitBuilder {
 public:
  explicit CircuitBuilder(Cnf& out);

  Lit true_lit() const { return 1; }
  Lit false_lit() const { return -1; }
  Lit constant(bool b) const { return b ? 1 : -1; }
  bool is_const(Lit l) const { return l == 1 || l == -1; }

  Lit fresh() { return cnf_.new_atom(); }
  Lit make_and(std::vector<Lit> ins);
  Lit make_or(std::vector<Lit> ins);
  Lit make_and(Lit a, Lit b) { return make_and(std::vector<Lit>{a, b}); }
  Lit make_or(Lit a, Lit b) { return make_or(std::vector<Lit>{a, b}); }
  Lit make_iff(Lit a, Lit b);
  void require(Lit l);

  Cnf& cnf() { return cnf_; }

 private:
  Cnf& cnf_;
  std::map<std::vector<Lit>, Lit> and_cache_;
};

// DIMACS: "p cnf <atoms> <clauses>" header, clauses terminated by 0, 'c' comments.
void write_dimacs(std::ostream& os, const Cnf& f);
std::string to_dimacs(const Cnf& f);
Cnf parse_dimacs(std::string_view text);

}  // namespace modunif::sat
