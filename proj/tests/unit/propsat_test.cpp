#include "doctest.h"
#include "modunif/error.hpp"
#include "modunif/propsat.hpp"
#include "oracles.hpp"

using namespace modunif;

TEST_CASE("small CNFs") {
  sat::Cnf contradiction;
  contradiction.num_atoms = 1;
  contradiction.add({1});
  contradiction.add({-1});
  CHECK_FALSE(sat::solve(contradiction).sat());
  CHECK(sat::solve(sat::Cnf{}).sat());
  sat::Cnf bad;
  bad.num_atoms = 1;
  bad.add({2});
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("solver agrees with the truth table") {
  oracle::Rng rng(6);
  for (int i = 0; i < 400; ++i) {
    const int atoms = 1 + static_cast<int>(rng() % 16);
    const sat::Cnf f = oracle::random_cnf(rng, atoms, static_cast<int>(atoms * 4.3) + 1);
    const sat::SatResult r = sat::solve(f);
    CHECK(r.sat() == oracle::truth_table_sat(f).has_value());
    if (r.sat()) CHECK(sat::satisfies(f, *r.model));
  }
}

TEST_CASE("pigeonhole 6 into 5 is unsatisfiable") {
  sat::Cnf f;
  auto var = [](int p, int h) { return p * 5 + h + 1; };
  f.num_atoms = 30;
  for (int p = 0; p < 6; ++p) {
    std::vector<sat::Lit> some;
    for (int h = 0; h < 5; ++h) some.push_back(var(p, h));
    f.add(some);
  }
  for (int h = 0; h < 5; ++h)
    for (int p = 0; p < 6; ++p)
      for (int q = p + 1; q < 6; ++q) f.add({-var(p, h), -var(q, h)});
  CHECK_FALSE(sat::solve(f).sat());
  sat::SolveOptions tight;
  tight.conflict_budget = 3;
  CHECK_THROWS_AS(sat::solve(f, tight), ResourceLimit);
}

TEST_CASE("incremental solving") {
  sat::Solver s;
  const int a = s.new_atom(), b = s.new_atom();
  s.add_clause({a, b});
  CHECK(s.solve());
  s.add_clause({-a});
  CHECK(s.solve());
  CHECK(s.value(b));
  s.add_clause({-b});
  CHECK_FALSE(s.solve());
}

TEST_CASE("DIMACS round trip") {
  oracle::Rng rng(7);
  const sat::Cnf f = oracle::random_cnf(rng, 8, 20);
  const sat::Cnf g = sat::parse_dimacs(sat::to_dimacs(f));
  CHECK(g.num_atoms == f.num_atoms);
  CHECK(g.clauses == f.clauses);
}

TEST_CASE("circuit builder folds constants") {
  sat::Cnf f;
  sat::CircuitBuilder cb(f);
  const sat::Lit x = cb.fresh();
  CHECK(cb.make_and(x, cb.false_lit()) == cb.false_lit());
  CHECK(cb.make_or(x, cb.true_lit()) == cb.true_lit());
  CHECK(cb.make_and(x, cb.true_lit()) == x);
  CHECK(cb.make_and(x, -x) == cb.false_lit());
}
