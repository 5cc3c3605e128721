#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "modunif/decision.hpp"
#include "modunif/encoding.hpp"
#include "modunif/formula.hpp"
#include "modunif/kripke.hpp"
#include "modunif/minsky.hpp"

namespace modunif {

// ---------------------------------------------------------------------------
// Random models

struct RandomModelOptions {
  int max_points = 8;
  bool transitive = false;
  bool full_s = false;  // H2 only
};

// Frame from random_frame plus a uniform valuation of `vars` and one uniform
// point per nominal. Deterministic in all arguments.
Model random_model(std::uint64_t seed, Language kind, const std::set<int>& vars, const std::set<int>& noms,
                   const RandomModelOptions& opts = {});

// Seed of trial i derived from a master seed (splitmix64 step).
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t i);

struct SuiteOptions {
  std::size_t trials = 1000;
  int max_points = 8;
  std::uint64_t seed = 1;
  // 0 picks the hardware concurrency. Results do not depend on it.
  unsigned threads = 0;
};

struct SuiteCounterexample {
  std::size_t trial = 0;
  PointedModel model;
};

struct SuiteResult {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  int max_points = 0;
  std::optional<SuiteCounterexample> counter;  // lowest failing trial
  bool passed() const noexcept { return !counter.has_value(); }
};

// Checks that f holds at every point of `trials` random models. Trials
// alternate transitive and arbitrary R; in H2 they also alternate S = W x W
// and a random S.
SuiteResult random_suite(const Formula& f, Language kind, const SuiteOptions& opts = {});

// Points reachable from x0 in at most `max_steps` steps along R u S.
std::set<int> within_distance(const Frame& frame, int x0, int max_steps);

// Every point within distance kNomLength of x0 agrees with x0 on <h>n_k.
bool nom_local(const Model& m, int x0, int nominal = 1);

// ---------------------------------------------------------------------------
// Pipeline

struct ValidityEvidence {
  enum class Method { TableauProof, RandomModelSuite } method = Method::TableauProof;
  Logic logic = Logic::Ku;
  std::size_t work = 0;    // TableauProof: labels used
  std::size_t budget = 0;  // TableauProof: label budget
  std::size_t trials = 0;  // RandomModelSuite
  std::uint64_t seed = 0;  // RandomModelSuite
  int max_points = 0;      // RandomModelSuite
};

std::string to_string(ValidityEvidence::Method m);  // "tableau" / "random-suite"

struct CertificateCheck {
  bool ax_valid = false;           // (i) the frame validates AxP
  bool antecedent_everywhere = false;  // (ii)
  bool consequent_nowhere = false;     // (iii)
  bool ok() const noexcept { return ax_valid && antecedent_everywhere && consequent_nowhere; }
};

struct FormulaSizes {
  std::size_t psi = 0;       // dag size of psi
  std::size_t ax = 0;        // dag size of AxP
  std::size_t instance = 0;  // dag size of sigma(psi), 0 when there is none
};

struct PipelineVerdict {
  enum class Kind { Unifiable, NotUnifiable, Unknown } kind = Kind::Unknown;
  Substitution sigma;                         // Unifiable, and Unknown after a refuted witness
  std::optional<ValidityEvidence> evidence;   // Unifiable
  std::optional<CanonicalFrame> certificate;  // NotUnifiable
  std::string reason;                         // Unknown
  std::optional<PointedModel> refutation;     // Unknown: a model refuting sigma(psi)

  Mode mode;
  std::size_t trace_length = 0;
  FormulaSizes sizes;
};

std::string to_string(PipelineVerdict::Kind k);  // "unifiable" / "not-unifiable" / "unknown"

struct PipelineOptions {
  std::size_t label_budget = 50'000;
  SuiteOptions suite;
};

// Unifiable when a reaches b: sigma is the witness substitution, checked by
// the decision procedure within budget and otherwise by the random suite.
// NotUnifiable when the run from a halts or loops without meeting b and the
// canonical frame passes check_certificate. Unknown otherwise, including
// when the witness is refuted.
PipelineVerdict check_unifiable_via_reduction(const Program& p, const Config& a, const Config& b, long bound,
                                              const Mode& mode, const PipelineOptions& opts = {});

// (i) frame_valid(F, AxP); (ii) exists eps(a) holds everywhere and (iii)
// exists eps(b) fails everywhere, for every placement of the nominal in
// Hybrid mode.
CertificateCheck check_certificate(const CanonicalFrame& cert, const Program& p, const Config& a, const Config& b,
                                   const Mode& mode);

// Each of the ground instances of psi fails somewhere on the frame, under
// every placement of the nominal in Hybrid mode.
bool ground_instances_refuted(const CanonicalFrame& cert, const Program& p, const Config& a, const Config& b,
                              const Mode& mode);

// Sound but incomplete for Ku and KH2: tries the ground substitutions in
// order and returns the first whose instance is valid.
std::optional<Substitution> ground_unifiable(const Formula& f, Logic logic, const DecisionOptions& opts = {});

// ---------------------------------------------------------------------------
// Reports

// Everything needed to replay a verdict without recomputing it.
struct Report {
  Program program;
  Config start, target;
  long bound = 0;
  PipelineVerdict verdict;
};

std::string to_json(const Report& r, int indent = 2);
// Throws SyntaxError on malformed documents.
Report parse_report(std::string_view json);

struct ReplayResult {
  bool ok = false;
  std::string detail;
};

// Unifiable: re-runs the recorded method (the suite with a fresh seed).
// NotUnifiable: check_certificate and ground_instances_refuted on the stored
// frame. Unknown: nothing to check.
ReplayResult replay(const Report& r, const PipelineOptions& opts = {});

}  // namespace modunif
