// One line per acceptance criterion. Exit status 1 if any criterion fails.
// Lines starting with "info" are observations, not criteria.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "modunif/decision.hpp"
#include "modunif/encoding.hpp"
#include "modunif/eqtheory.hpp"
#include "modunif/error.hpp"
#include "modunif/witness.hpp"
#include "modunif/workbench.hpp"
#include "oracles.hpp"

using namespace modunif;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Instance {
  const char* program;
  Config a, b;
};

struct Sample {
  const char* program;
  Config start;
};

// Three runs: halting, halting through a Dec zero branch, looping.
const Sample kSamples[] = {
    {"1 -> 2,+1,0; 2 -> 3,0,+1", {1, 1, 1}},
    {"1 -> 2,-1,0 | 3,0,0; 2 -> 1,0,+1", {1, 2, 1}},
    {"1 -> 2,+1,0; 2 -> 1,-1,0 | 1,0,0", {1, 0, 0}},
};

constexpr long kBound = 50;

std::set<int> failed;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("criterion %2d %s  %s (%s)\n", id, pass ? "PASS" : "FAIL", what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) failed.insert(id);
}

void info(const std::string& text) {
  std::printf("info          %s\n", text.c_str());
  std::fflush(stdout);
}

std::string fmt_time(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", s);
  return buf;
}

Formula label_formula(const PointLabel& l) {
  if (const auto* c = std::get_if<CharName>(&l)) return char_formula(*c);
  const Config& c = std::get<Config>(l);
  return epsilon(c.state, tower(1, c.c1), tower(2, c.c2));
}

Trace trace_of(const Instance& in) {
  const ReachResult rr = reaches(parse_program(in.program), in.a, in.b, kBound);
  if (rr.verdict != Reach::Yes) throw Error(std::string("instance not reachable: ") + in.program);
  return Trace::from_run(rr.trace);
}

Formula instance_formula(const Instance& in, const Mode& mode) {
  const Program p = parse_program(in.program);
  return apply_subst(witness_substitution(trace_of(in), mode), psi(p, in.a, in.b, mode));
}

// Shifted tower index computed from the definition, independently of witness.
long bar(const Trace& t, std::size_t i, int which) {
  const Config& c = t.configs[i];
  const long k = which == 1 ? c.c1 : c.c2;
  const Op dec = which == 1 ? Op::Dec1 : Op::Dec2;
  return k != 0 && t.instrs[i].op == dec ? k - 1 : k;
}

// ---------------------------------------------------------------------------

void criterion1() {
  double worst = 0;
  std::size_t checked = 0;
  std::set<std::string> inexact;
  for (const Sample& s : kSamples) {
    const auto t0 = Clock::now();
    const CanonicalFrame cf = canonical_frame(parse_program(s.program), s.start, kBound, Mode::universal());
    const Model m(cf.frame, {});
    for (int x = 0; x < cf.frame.size(); ++x) {
      const std::vector<bool> ext = extension(m, label_formula(cf.labels[x]));
      for (int y = 0; y < cf.frame.size(); ++y)
        if (ext[y] != (y == x)) inexact.insert(to_string(cf.labels[x]) + " at " + cf.frame.name(y));
      ++checked;
    }
    worst = std::max(worst, since(t0));
  }
  std::string where;
  for (const std::string& w : inexact) where += (where.empty() ? "" : ", ") + w;
  report(1, inexact.empty() && worst < 5.0, "characteristic exactness on 3 canonical frames",
         std::to_string(checked) + " labelled points, slowest frame " + fmt_time(worst) +
             (where.empty() ? "" : ", also true: " + where));
}

void criterion2() {
  const auto t0 = Clock::now();
  std::size_t counter = 0, checks = 0;
  for (int i = 0; i <= 2; ++i) {
    for (long j = 0; j <= 3; ++j) {
      const Formula a = implies(tower(i, j), neg(diamond(Modality::Rel, tower(i, j))));
      std::vector<Formula> rest{diamond(Modality::Rel, tower(i, 0))};
      for (int k = 0; k <= 2; ++k)
        if (k != i) rest.push_back(neg(diamond(Modality::Rel, tower(k, 0))));
      const Formula b = implies(tower(i, j + 1), conj(rest));
      for (const Formula& f : {a, b}) {
        for (int n = 0; n < 200; ++n) {
          const Frame fr =
              random_frame(trial_seed(2000 + 97 * i + 13 * j, n), 8, Language::L, n % 2 == 0);
          ++checks;
          if (!frame_valid(fr, f).valid()) ++counter;
        }
      }
    }
  }
  const double t = since(t0);
  report(2, counter == 0 && t < 60.0, "tower schemata valid on random frames",
         std::to_string(checks) + " frame checks, " + std::to_string(counter) + " counterexamples, " + fmt_time(t));
}

void criterion3() {
  const auto t0 = Clock::now();
  bool pass = true;
  for (const Sample& s : kSamples) {
    const Program p = parse_program(s.program);
    for (const Mode& mode : {Mode::universal(), Mode::hybrid(1)}) {
      const CanonicalFrame cf = canonical_frame(p, s.start, kBound, mode);
      pass = pass && frame_valid(cf.frame, ax_program(p, mode)).valid();
    }
  }
  const double t = since(t0);
  report(3, pass && t < 120.0, "canonical frames validate AxP in both modes", "3 programs x 2 modes, " + fmt_time(t));
}

// Reachable instances whose witness never needs alpha^1_0 or alpha^2_0, plus
// two that do (a Dec zero branch, which is fine, and an Inc from zero).
const Instance kReachable[] = {
    {"1 -> 2,+1,0", {1, 1, 1}, {2, 2, 1}},
    {"1 -> 2,0,+1", {1, 1, 1}, {2, 1, 2}},
    {"1 -> 2,-1,0 | 3,0,0", {1, 2, 1}, {2, 1, 1}},
    {"1 -> 2,0,-1 | 3,0,0", {1, 1, 2}, {2, 1, 1}},
    {"1 -> 2,+1,0; 2 -> 3,0,+1", {1, 1, 1}, {3, 2, 2}},
    {"1 -> 2,-1,0 | 3,0,0", {1, 0, 1}, {3, 0, 1}},
};
const Instance kZeroIndex = {"1 -> 2,+1,0", {1, 0, 0}, {2, 1, 0}};

void criterion4() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  for (const Instance& in : kReachable) {
    const ValidVerdict v = valid(instance_formula(in, Mode::universal()), Logic::Ku);
    pass = pass && v.valid() && trace_of(in).length() <= 2;
    detail += std::to_string(v.work) + (v.valid() ? "" : "!") + " ";
  }
  const double t = since(t0);
  report(4, pass && t < 600.0, "sigma(psi) valid in Ku for 6 reachable instances, trace length <= 2",
         "labels " + detail + fmt_time(t));

  const ValidVerdict z = valid(instance_formula(kZeroIndex, Mode::universal()), Logic::Ku);
  info(std::string("Inc1 from <1,0,0> to <2,1,0>: sigma(psi) is ") +
       (z.valid() ? "valid" : "refuted by a " + std::to_string(z.counter->model.frame().size()) + "-point model"));
}

const Instance kLonger[] = {
    {"1 -> 2,+1,0; 2 -> 3,0,+1; 3 -> 4,+1,0", {1, 1, 1}, {4, 3, 2}},
    {"1 -> 2,+1,0; 2 -> 3,0,+1; 3 -> 4,+1,0; 4 -> 5,0,+1", {1, 1, 1}, {5, 3, 3}},
    {"1 -> 2,+1,0; 2 -> 3,0,+1; 3 -> 4,+1,0; 4 -> 5,0,+1; 5 -> 6,-1,0 | 7,0,0", {1, 1, 1}, {6, 2, 3}},
    {"1 -> 2,-1,0 | 3,0,0; 2 -> 1,0,+1", {1, 3, 1}, {1, 2, 2}},
    {"1 -> 2,0,+1; 2 -> 3,0,+1; 3 -> 4,-1,0 | 5,0,0", {1, 2, 1}, {4, 1, 3}},
};

void criterion5() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::size_t models = 0, nonvacuous = 0, perturbed = 0, perturbed_fail = 0, perturbed_nonvacuous = 0;
  oracle::Rng rng(5);
  for (const Instance& in : kLonger) {
    const Program p = parse_program(in.program);
    pass = pass && trace_of(in).length() <= 5;
    for (const Mode& mode : {Mode::universal(), Mode::hybrid(1)}) {
      const Formula f = instance_formula(in, mode);
      SuiteOptions so;
      so.seed = 5;
      const SuiteResult sr = random_suite(f, mode.language(), so);
      pass = pass && sr.passed();
      models += sr.trials;
      // How many of those models make the antecedent true somewhere.
      const Formula ante = config_exists(in.a, mode);
      for (std::size_t i = 0; i < so.trials; ++i) {
        const Model m = random_model(trial_seed(so.seed, i), mode.language(), {}, nominals(f),
                                     {so.max_points, i % 2 == 1, mode.is_hybrid() && (i / 2) % 2 == 0});
        const auto ext = extension(m, ante);
        if (std::find(ext.begin(), ext.end(), true) != ext.end()) ++nonvacuous;
      }
      // Canonical frames with perturbations, where the antecedent does bite.
      const CanonicalFrame cf = canonical_frame(p, in.a, kBound, mode);
      for (int k = 0; k < 100; ++k) {
        const Model m = oracle::perturbed_canonical(cf, rng, mode);
        ++perturbed;
        const auto ext = extension(m, f);
        if (std::find(ext.begin(), ext.end(), false) != ext.end()) ++perturbed_fail;
        const auto ea = extension(m, ante);
        if (std::find(ea.begin(), ea.end(), true) != ea.end()) ++perturbed_nonvacuous;
      }
    }
  }
  report(5, pass, "sigma(psi) holds on 1000 random models per instance and mode",
         std::to_string(models) + " models, 5 instances, seed 5, " + fmt_time(since(t0)));
  info(std::to_string(nonvacuous) + " of those random models satisfy the antecedent anywhere");
  info("perturbed canonical models: " + std::to_string(perturbed_fail) + " failures in " + std::to_string(perturbed) +
       ", antecedent true in " + std::to_string(perturbed_nonvacuous));
}

const Instance kUnreachable[] = {
    {"", {1, 0, 0}, {2, 0, 0}},
    {"1 -> 2,+1,0; 2 -> 3,0,+1", {1, 1, 1}, {3, 1, 1}},
    {"1 -> 2,-1,0 | 3,0,0; 2 -> 1,0,+1", {1, 2, 1}, {2, 2, 2}},
    {"1 -> 2,+1,0; 2 -> 1,-1,0 | 1,0,0", {1, 0, 0}, {3, 0, 0}},
    {"1 -> 2,0,+1", {1, 0, 0}, {1, 0, 1}},
};

void criterion6() {
  const auto t0 = Clock::now();
  const fs::path dir = fs::temp_directory_path() / "modunif_acceptance";
  fs::create_directories(dir);
  bool pass = true;
  int n = 0;
  std::string sizes;
  for (const Instance& in : kUnreachable) {
    for (const Mode& mode : {Mode::universal(), Mode::hybrid(1)}) {
      Report r{parse_program(in.program), in.a, in.b, kBound, {}};
      r.verdict = check_unifiable_via_reduction(r.program, in.a, in.b, kBound, mode);
      pass = pass && r.verdict.kind == PipelineVerdict::Kind::NotUnifiable;
      if (!mode.is_hybrid() && r.verdict.certificate)
        sizes += std::to_string(r.verdict.certificate->frame.size()) + " ";
      const fs::path file = dir / ("report" + std::to_string(n++) + ".json");
      {
        std::ofstream out(file);
        out << to_json(r);
      }
      std::ifstream back(file);
      std::stringstream ss;
      ss << back.rdbuf();
      const Report loaded = parse_report(ss.str());
      pass = pass && loaded.verdict.certificate && replay(loaded).ok;
    }
  }
  report(6, pass, "unreachable instances give reloadable certificates refuting all ground instances",
         "5 instances x 2 modes, certificate sizes " + sizes + fmt_time(since(t0)));
}

// Models of a canonical frame's perturbations on which some defect_i holds.
struct AgreementStats {
  std::size_t models = 0, violations = 0, attempts = 0;
};

AgreementStats agreement_suite(const Instance& in, int which, std::size_t wanted, std::uint64_t seed) {
  const Trace t = trace_of(in);
  const Program p = parse_program(in.program);
  const Mode mode = Mode::universal();
  const Substitution s = witness_substitution(t, mode);
  const CanonicalFrame cf = canonical_frame(p, in.a, kBound, mode);
  std::vector<Formula> defects;
  for (std::size_t i = 0; i < t.length(); ++i) defects.push_back(defect(static_cast<long>(i), t, mode));
  const Formula pi = apply_subst(s, pi_tau(which == 1 ? PiTau::Pi1 : PiTau::Pi2));
  const Formula ta = apply_subst(s, pi_tau(which == 1 ? PiTau::Tau1 : PiTau::Tau2));
  oracle::Rng rng(seed);
  oracle::PerturbOptions po;
  po.drop_e_point = 0.4;
  AgreementStats st;
  while (st.models < wanted && st.attempts < 200 * wanted) {
    ++st.attempts;
    const Model m = oracle::perturbed_canonical(cf, rng, mode, po);
    std::optional<std::size_t> holding;
    for (std::size_t i = 0; i < defects.size() && !holding; ++i)
      if (extension(m, defects[i])[0]) holding = i;
    if (!holding) continue;
    ++st.models;
    const long shift = which == 1 ? 0 : 1;
    const auto e_pi = extension(m, pi), e_ta = extension(m, ta);
    const auto a1 = extension(m, tower(1, bar(t, *holding, 1) + shift));
    const auto a2 = extension(m, tower(2, bar(t, *holding, 2) + shift));
    for (int z = 0; z < m.frame().size(); ++z)
      if (e_pi[z] != a1[z] || e_ta[z] != a2[z]) {
        ++st.violations;
        break;
      }
  }
  return st;
}

void criterion7() {
  const auto t0 = Clock::now();
  const Instance in = {"1 -> 2,+1,0; 2 -> 3,0,+1; 3 -> 4,-1,0 | 5,0,0", {1, 1, 1}, {4, 1, 2}};
  const AgreementStats c1 = agreement_suite(in, 1, 500, 71);
  const AgreementStats c2 = agreement_suite(in, 2, 500, 72);
  const bool pass = c1.models == 500 && c2.models == 500 && c1.violations == 0 && c2.violations == 0;
  report(7, pass, "sigma(pi), sigma(tau) match shifted towers under a defect",
         "pi1/tau1: " + std::to_string(c1.violations) + " violations in " + std::to_string(c1.models) +
             " models, pi2/tau2: " + std::to_string(c2.violations) + " in " + std::to_string(c2.models) + ", " +
             fmt_time(since(t0)));
  const AgreementStats z = agreement_suite(kZeroIndex, 1, 200, 73);
  info("pi1/tau1 with alpha^1_0 and alpha^2_0 in the witness: " + std::to_string(z.violations) + " violations in " +
       std::to_string(z.models) + " models");
}

void criterion8() {
  const auto t0 = Clock::now();
  const Instance in = {"1 -> 2,+1,0; 2 -> 3,0,+1; 3 -> 4,+1,0", {1, 1, 1}, {4, 3, 2}};
  const Trace t = trace_of(in);
  bool pass = t.length() == 3;
  int pairs = 0;
  for (long i = 0; i < 3; ++i)
    for (long j = 0; j < 3; ++j) {
      if (i == j) continue;
      ++pairs;
      pass = pass && !satisfiable(conj(defect(i, t, Mode::universal()), defect(j, t, Mode::universal())), Logic::Ku).sat();
    }
  const double dt = since(t0);
  report(8, pass && dt < 60.0, "defects pairwise unsatisfiable", std::to_string(pairs) + " pairs, " + fmt_time(dt));
}

// Reachability in at most `steps` steps along R u S, by repeated relaxation.
std::set<int> near(const Frame& f, int x0, int steps) {
  std::set<int> cur{x0};
  for (int k = 0; k < steps; ++k) {
    std::set<int> next = cur;
    for (const auto& [x, y] : f.r())
      if (cur.count(x)) next.insert(y);
    for (const auto& [x, y] : *f.s())
      if (cur.count(x)) next.insert(y);
    cur = std::move(next);
  }
  return cur;
}

void criterion9() {
  const auto t0 = Clock::now();
  std::size_t expected = 0;
  for (int k = 1; k <= 6; ++k) expected += 2 * (std::size_t{1} << k);
  bool pass = nom_conjuncts(6).size() == expected && expected == 252;
  const Formula nom = nom_formula(6);
  const Formula sees = diamond(Modality::Hyb, Formula::nominal(1));
  std::size_t found = 0, tried = 0;
  while (found < 300 && tried < 200000) {
    const Model m = random_model(trial_seed(9, tried++), Language::H2, {}, {1}, {8, tried % 2 == 0, false});
    if (!model_check(m, 0, nom)) continue;
    ++found;
    const auto ext = extension(m, sees);
    for (int x : near(m.frame(), 0, 6)) pass = pass && ext[x] == ext[0];
  }
  pass = pass && found == 300;
  report(9, pass, "Nom has 252 conjuncts and forces local agreement on <h>n",
         std::to_string(found) + " models with Nom at the root out of " + std::to_string(tried) + ", " +
             fmt_time(since(t0)));
}

void criterion10() {
  const auto t0 = Clock::now();
  oracle::Rng rng(10);
  std::size_t mismatches = 0, checks = 0;
  for (int n = 0; n < 200; ++n) {
    const Model m = random_model(trial_seed(10, n), Language::H2, {1, 2}, {1}, {8, n % 2 == 0, true});
    for (int k = 0; k < 50; ++k) {
      const Formula phi = oracle::random_formula(rng, {Language::H2, 3, 2, 1});
      bool somewhere = false;
      for (int x = 0; x < m.frame().size(); ++x) somewhere = somewhere || oracle::naive_truth(m, x, phi);
      const auto ext = extension(m, exists(phi, Mode::hybrid(1)));
      for (int x = 0; x < m.frame().size(); ++x) {
        ++checks;
        if (ext[x] != somewhere) ++mismatches;
      }
    }
  }
  report(10, mismatches == 0, "surrogate existential equals 'somewhere' when S = W x W",
         std::to_string(checks) + " point checks, 200 frames x 50 formulas, " + fmt_time(since(t0)));
}

void criterion11() {
  const auto t0 = Clock::now();
  oracle::Rng rng(11);
  int bad = 0;
  for (int i = 0; i < 500; ++i) {
    const Term t = oracle::random_term(rng, 5, 3);
    if (!(formula_to_term(term_to_formula(t)) == t)) ++bad;
  }
  bool tvalid = true;
  for (const Inequality& q : theory_t()) tvalid = tvalid && valid(inequality_formula(q), Logic::Ku).valid();
  report(11, bad == 0 && tvalid, "term translation round trip and the theory T",
         std::to_string(bad) + " round-trip failures in 500, T inequalities " + (tvalid ? "valid" : "NOT valid") +
             ", " + fmt_time(since(t0)));
}

void criterion12() {
  const auto t0 = Clock::now();
  oracle::Rng rng(12);
  int sat_bad = 0;
  for (int i = 0; i < 500; ++i) {
    const int atoms = 1 + static_cast<int>(rng() % 20);
    const sat::Cnf f = oracle::random_cnf(rng, atoms, static_cast<int>(atoms * 4.3) + 1);
    const sat::SatResult r = sat::solve(f);
    const auto tt = oracle::truth_table_sat(f);
    if (r.sat() != tt.has_value() || (r.sat() && !sat::satisfies(f, *r.model))) ++sat_bad;
  }
  int model_bad = 0, sat_models = 0;
  for (int i = 0; i < 400; ++i) {
    const Logic logic = i % 2 ? Logic::KH2 : Logic::Ku;
    const Formula f = oracle::random_formula(rng, {language_of(logic), 4, 2, 1});
    DecisionOptions d;
    d.engine = i % 4 < 2 ? Engine::Auto : Engine::Tableau;
    const SatVerdict v = satisfiable(f, logic, d);
    if (!v.sat()) continue;
    ++sat_models;
    if (!model_check(v.witness->model, v.witness->point, f)) ++model_bad;
  }
  // Every frame on at most 3 points. Four formulas per frame, one on the
  // 262144 three-point H2 frames.
  int fv_bad = 0, fv_checks = 0;
  for (Language lang : {Language::L, Language::H2}) {
    for (int n = 1; n <= 3; ++n) {
      const int per_frame = lang == Language::H2 && n == 3 ? 1 : 4;
      for (const Frame& fr : oracle::all_frames(n, lang)) {
        for (int k = 0; k < per_frame; ++k) {
          const Formula f = oracle::random_formula(rng, {lang, 3, 2, lang == Language::H2 ? 1 : 0});
          ++fv_checks;
          if (frame_valid(fr, f).valid() != oracle::brute_frame_valid(fr, f)) ++fv_bad;
        }
      }
    }
  }
  report(12, sat_bad == 0 && model_bad == 0 && fv_bad == 0, "solver, tableau models and frame validity vs oracles",
         "propsat " + std::to_string(sat_bad) + "/500 disagreements, " + std::to_string(model_bad) + "/" +
             std::to_string(sat_models) + " bad models, frame_valid " + std::to_string(fv_bad) + "/" +
             std::to_string(fv_checks) + " disagreements, " + fmt_time(since(t0)));
}

}  // namespace

// --expect-fail lists criteria known to fail; the exit status is 0 only when
// exactly those fail.
int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> expected;
  app.add_option("--expect-fail", expected, "criteria expected to fail");
  CLI11_PARSE(app, argc, argv);

  const std::function<void()> all[] = {criterion1, criterion2, criterion3,  criterion4,  criterion5,  criterion6,
                                       criterion7, criterion8, criterion9, criterion10, criterion11, criterion12};
  for (std::size_t i = 0; i < std::size(all); ++i) {
    try {
      all[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i) + 1, false, "exception", e.what());
    }
  }
  const std::set<int> want(expected.begin(), expected.end());
  std::printf("%zu criteria failed", failed.size());
  if (!want.empty()) std::printf(", %s the expected set", failed == want ? "matching" : "NOT matching");
  std::printf("\n");
  return failed == want ? 0 : 1;
}
