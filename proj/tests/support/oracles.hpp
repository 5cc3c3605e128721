#pragma once

// Reference implementations and generators for the tests. Nothing here
// calls the code under test to compute an expected value.

#include <optional>
#include <random>
#include <vector>

#include "modunif/encoding.hpp"
#include "modunif/eqtheory.hpp"
#include "modunif/formula.hpp"
#include "modunif/kripke.hpp"
#include "modunif/propsat.hpp"
#include "modunif/witness.hpp"

namespace oracle {

using Rng = std::mt19937_64;
using namespace modunif;

struct GenOptions {
  Language lang = Language::L;
  int depth = 4;
  int vars = 2;
  int noms = 1;  // H2 only
};

Formula random_formula(Rng& rng, const GenOptions& g);
Term random_term(Rng& rng, int depth, int vars);

// Clauses of width 1..3 over atoms 1..atoms.
sat::Cnf random_cnf(Rng& rng, int atoms, int clauses);
// Exhaustive search, 64 assignments per word. Returns a model when satisfiable.
std::optional<std::vector<bool>> truth_table_sat(const sat::Cnf& f);

// Direct recursive evaluation from the clauses of the truth definition.
bool naive_truth(const Model& m, int x, const Formula& f);
// Every valuation of the formula's variables and nominals, checked with naive_truth.
bool brute_frame_valid(const Frame& frame, const Formula& f);
// All frames on n points: every R, and every S too for H2.
std::vector<Frame> all_frames(int n, Language kind);

// Every shifted tower index of the trace is at least 1, i.e. the witness
// never uses alpha^1_0 or alpha^2_0.
bool zero_free(const Trace& t);

struct PerturbOptions {
  double drop_e_point = 0.3;
  int max_extra_points = 3;
  int max_edge_flips = 2;
};

// The canonical frame with some e-points removed, a few extra points and a
// few flipped R edges. Hybrid frames get S = W x W or a random S. The
// valuation is random.
Model perturbed_canonical(const CanonicalFrame& cf, Rng& rng, const Mode& mode, const PerturbOptions& opts = {});

}  // namespace oracle
