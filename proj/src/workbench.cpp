#include "modunif/workbench.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "modunif/error.hpp"
#include "modunif/witness.hpp"

namespace modunif {

// ---------------------------------------------------------------------------
// Random models

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t i) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (i + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Model random_model(std::uint64_t seed, Language kind, const std::set<int>& vars, const std::set<int>& noms,
                   const RandomModelOptions& opts) {
  Frame frame = random_frame(seed, opts.max_points, kind, opts.transitive, RandomFrameOptions{opts.full_s});
  std::mt19937_64 rng(trial_seed(seed, 0x76616c));
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> pick(0, frame.size() - 1);
  Valuation v;
  for (int p : vars) {
    auto& ext = v.vars[p];
    for (int x = 0; x < frame.size(); ++x)
      if (coin(rng)) ext.insert(x);
  }
  for (int k : noms) v.noms[k] = pick(rng);
  return Model(std::move(frame), std::move(v));
}

namespace {

Model suite_model(const Formula& f, Language kind, const SuiteOptions& opts, std::size_t i) {
  RandomModelOptions mo;
  mo.max_points = opts.max_points;
  mo.transitive = i % 2 == 1;
  mo.full_s = kind == Language::H2 && (i / 2) % 2 == 0;
  return random_model(trial_seed(opts.seed, i), kind, variables(f), nominals(f), mo);
}

std::optional<int> failing_point(const Model& m, const Formula& f) {
  const std::vector<bool> ext = extension(m, f);
  auto it = std::find(ext.begin(), ext.end(), false);
  if (it == ext.end()) return std::nullopt;
  return static_cast<int>(it - ext.begin());
}

}  // namespace

SuiteResult random_suite(const Formula& f, Language kind, const SuiteOptions& opts) {
  require_language(f, kind);
  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(opts.trials, 1)));
  std::atomic<std::size_t> first_fail{std::numeric_limits<std::size_t>::max()};
  auto work = [&](unsigned tid) {
    for (std::size_t i = tid; i < opts.trials; i += threads) {
      if (i > first_fail.load()) return;
      if (failing_point(suite_model(f, kind, opts, i), f)) {
        std::size_t cur = first_fail.load();
        while (i < cur && !first_fail.compare_exchange_weak(cur, i)) {
        }
        return;
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& t : pool) t.join();
  }
  SuiteResult r{opts.trials, opts.seed, opts.max_points, std::nullopt};
  if (std::size_t i = first_fail.load(); i != std::numeric_limits<std::size_t>::max()) {
    Model m = suite_model(f, kind, opts, i);
    const int x = *failing_point(m, f);
    r.counter = SuiteCounterexample{i, PointedModel{std::move(m), x}};
  }
  return r;
}

std::set<int> within_distance(const Frame& frame, int x0, int max_steps) {
  std::set<int> seen{x0};
  std::vector<int> layer{x0};
  for (int step = 0; step < max_steps && !layer.empty(); ++step) {
    std::vector<int> next;
    for (int x : layer) {
      for (int y : frame.successors(Modality::Rel, x))
        if (seen.insert(y).second) next.push_back(y);
      if (frame.hybrid())
        for (int y : frame.successors(Modality::Hyb, x))
          if (seen.insert(y).second) next.push_back(y);
    }
    layer = std::move(next);
  }
  return seen;
}

bool nom_local(const Model& m, int x0, int nominal) {
  const std::vector<bool> sees = extension(m, diamond(Modality::Hyb, Formula::nominal(nominal)));
  for (int x : within_distance(m.frame(), x0, kNomLength))
    if (sees[x] != sees[x0]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Pipeline

std::string to_string(ValidityEvidence::Method m) {
  return m == ValidityEvidence::Method::TableauProof ? "tableau" : "random-suite";
}

std::string to_string(PipelineVerdict::Kind k) {
  switch (k) {
    case PipelineVerdict::Kind::Unifiable:
      return "unifiable";
    case PipelineVerdict::Kind::NotUnifiable:
      return "not-unifiable";
    case PipelineVerdict::Kind::Unknown:
      break;
  }
  return "unknown";
}

namespace {

Logic logic_of(const Mode& mode) { return mode.is_hybrid() ? Logic::KH2 : Logic::Ku; }

// Valuations to try for a ground formula: the empty one, or one per
// placement of the designated nominal.
std::vector<Valuation> placements(const Frame& frame, const Mode& mode) {
  if (!mode.is_hybrid()) return {Valuation{}};
  std::vector<Valuation> out;
  for (int x = 0; x < frame.size(); ++x) {
    Valuation v;
    v.noms[mode.nominal] = x;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<bool> ground_extension(const Frame& frame, const Valuation& base, const Formula& f) {
  Valuation v = base;
  for (int p : variables(f)) v.vars[p];
  return extension(Model(frame, std::move(v)), f);
}

bool everywhere(const std::vector<bool>& ext, bool value) {
  return std::all_of(ext.begin(), ext.end(), [&](bool b) { return b == value; });
}

}  // namespace

CertificateCheck check_certificate(const CanonicalFrame& cert, const Program& p, const Config& a, const Config& b,
                                   const Mode& mode) {
  CertificateCheck c;
  c.ax_valid = frame_valid(cert.frame, ax_program(p, mode)).valid();
  const Formula ante = config_exists(a, mode);
  const Formula cons = config_exists(b, mode);
  c.antecedent_everywhere = true;
  c.consequent_nowhere = true;
  for (const Valuation& v : placements(cert.frame, mode)) {
    c.antecedent_everywhere = c.antecedent_everywhere && everywhere(ground_extension(cert.frame, v, ante), true);
    c.consequent_nowhere = c.consequent_nowhere && everywhere(ground_extension(cert.frame, v, cons), false);
  }
  return c;
}

bool ground_instances_refuted(const CanonicalFrame& cert, const Program& p, const Config& a, const Config& b,
                              const Mode& mode) {
  const Formula ps = psi(p, a, b, mode);
  for (const Substitution& s : ground_substitutions({1, 2})) {
    const Formula inst = apply_subst(s, ps);
    for (const Valuation& v : placements(cert.frame, mode))
      if (everywhere(ground_extension(cert.frame, v, inst), true)) return false;
  }
  return true;
}

PipelineVerdict check_unifiable_via_reduction(const Program& p, const Config& a, const Config& b, long bound,
                                              const Mode& mode, const PipelineOptions& opts) {
  PipelineVerdict v;
  v.mode = mode;
  const Formula ps = psi(p, a, b, mode);
  v.sizes.psi = dag_size(ps);
  v.sizes.ax = dag_size(ax_program(p, mode));
  const ReachResult rr = reaches(p, a, b, bound);
  v.trace_length = rr.trace.length();

  if (rr.verdict == Reach::Yes) {
    v.sigma = witness_substitution(Trace::from_run(rr.trace), mode);
    const Formula inst = apply_subst(v.sigma, ps);
    v.sizes.instance = dag_size(inst);
    const Logic logic = logic_of(mode);
    try {
      DecisionOptions dopts;
      dopts.label_budget = opts.label_budget;
      ValidVerdict vv = valid(inst, logic, dopts);
      if (vv.valid()) {
        v.kind = PipelineVerdict::Kind::Unifiable;
        ValidityEvidence e;
        e.method = ValidityEvidence::Method::TableauProof;
        e.logic = logic;
        e.work = vv.work;
        e.budget = opts.label_budget;
        v.evidence = e;
      } else {
        v.reason = "witness refuted by the decision procedure";
        v.refutation = std::move(vv.counter);
      }
      return v;
    } catch (const ResourceLimit&) {
    }
    SuiteResult sr = random_suite(inst, mode.language(), opts.suite);
    if (sr.passed()) {
      v.kind = PipelineVerdict::Kind::Unifiable;
      ValidityEvidence e;
      e.method = ValidityEvidence::Method::RandomModelSuite;
      e.logic = logic;
      e.trials = sr.trials;
      e.seed = sr.seed;
      e.max_points = sr.max_points;
      v.evidence = e;
    } else {
      v.reason = "witness refuted by the random suite";
      v.refutation = std::move(sr.counter->model);
    }
    return v;
  }

  if (rr.verdict == Reach::No) {
    CanonicalFrame cert = canonical_frame(p, a, bound, mode);
    const CertificateCheck c = check_certificate(cert, p, a, b, mode);
    if (c.ok()) {
      v.kind = PipelineVerdict::Kind::NotUnifiable;
      v.certificate = std::move(cert);
    } else {
      std::string failed;
      if (!c.ax_valid) failed += " (i)";
      if (!c.antecedent_everywhere) failed += " (ii)";
      if (!c.consequent_nowhere) failed += " (iii)";
      v.reason = "certificate check failed:" + failed;
    }
    return v;
  }

  v.reason = "run from " + to_string(a) + " neither reaches " + to_string(b) + " nor halts or loops within " +
             std::to_string(bound) + " steps";
  return v;
}

std::optional<Substitution> ground_unifiable(const Formula& f, Logic logic, const DecisionOptions& opts) {
  for (const Substitution& s : ground_substitutions(variables(f)))
    if (valid(apply_subst(s, f), logic, opts).valid()) return s;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

using json = nlohmann::ordered_json;

std::string hex(std::size_t h) {
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

// Substitutions are stored by fingerprint: the witness is rebuilt on replay
// and its text can be exponential in the counter values.
json sigma_json(const Substitution& s) {
  json out = json::object();
  for (const auto& [var, f] : s.entries()) out["p" + std::to_string(var)] = hex(f.hash());
  return out;
}

json evidence_json(const ValidityEvidence& e) {
  json out = {{"method", to_string(e.method)}, {"logic", to_string(e.logic)}};
  if (e.method == ValidityEvidence::Method::TableauProof) {
    out["work"] = e.work;
    out["budget"] = e.budget;
  } else {
    out["trials"] = e.trials;
    out["seed"] = e.seed;
    out["max_points"] = e.max_points;
  }
  return out;
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw SyntaxError(0, std::string("report field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw SyntaxError(0, std::string("a different type for report field '") + key + "'");
  }
}

}  // namespace

std::string to_json(const Report& r, int indent) {
  const PipelineVerdict& v = r.verdict;
  json j;
  j["verdict"] = to_string(v.kind);
  j["mode"] = to_string(v.mode);
  j["nominal"] = v.mode.nominal;
  j["program"] = to_string(r.program);
  j["start"] = to_string(r.start);
  j["target"] = to_string(r.target);
  j["bound"] = r.bound;
  j["trace_length"] = v.trace_length;
  j["sizes"] = {{"psi", v.sizes.psi}, {"ax", v.sizes.ax}, {"instance", v.sizes.instance}};
  j["evidence_method"] = v.evidence ? json(to_string(v.evidence->method)) : json(nullptr);
  j["seed"] = v.evidence && v.evidence->method == ValidityEvidence::Method::RandomModelSuite ? json(v.evidence->seed)
                                                                                            : json(nullptr);
  if (!v.sigma.empty()) j["sigma"] = sigma_json(v.sigma);
  if (v.evidence) j["evidence"] = evidence_json(*v.evidence);
  if (v.certificate) j["certificate"] = v.certificate->to_text();
  if (!v.reason.empty()) j["reason"] = v.reason;
  if (v.refutation) {
    const Model& m = v.refutation->model;
    j["refutation"] = {{"frame", to_text(m.frame())},
                       {"valuation", to_text(m.frame(), m.valuation())},
                       {"point", m.frame().name(v.refutation->point)}};
  }
  return j.dump(indent);
}

Report parse_report(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SyntaxError(e.byte, "a JSON report");
  }
  Report r;
  r.program = parse_program(field<std::string>(j, "program"));
  r.start = parse_config(field<std::string>(j, "start"));
  r.target = parse_config(field<std::string>(j, "target"));
  r.bound = field<long>(j, "bound");
  PipelineVerdict& v = r.verdict;
  v.mode = parse_mode(field<std::string>(j, "mode"), field<int>(j, "nominal"));
  v.trace_length = field<std::size_t>(j, "trace_length");
  const std::string kind = field<std::string>(j, "verdict");
  if (kind == "unifiable")
    v.kind = PipelineVerdict::Kind::Unifiable;
  else if (kind == "not-unifiable")
    v.kind = PipelineVerdict::Kind::NotUnifiable;
  else if (kind == "unknown")
    v.kind = PipelineVerdict::Kind::Unknown;
  else
    throw SyntaxError(0, "a known verdict");
  const json& sizes = j.at("sizes");
  v.sizes = {field<std::size_t>(sizes, "psi"), field<std::size_t>(sizes, "ax"), field<std::size_t>(sizes, "instance")};
  if (j.contains("evidence")) {
    const json& e = j.at("evidence");
    ValidityEvidence ev;
    const std::string method = field<std::string>(e, "method");
    ev.logic = parse_logic(field<std::string>(e, "logic"));
    if (method == "tableau") {
      ev.method = ValidityEvidence::Method::TableauProof;
      ev.work = field<std::size_t>(e, "work");
      ev.budget = field<std::size_t>(e, "budget");
    } else if (method == "random-suite") {
      ev.method = ValidityEvidence::Method::RandomModelSuite;
      ev.trials = field<std::size_t>(e, "trials");
      ev.seed = field<std::uint64_t>(e, "seed");
      ev.max_points = field<int>(e, "max_points");
    } else {
      throw SyntaxError(0, "a known evidence method");
    }
    v.evidence = ev;
  }
  if (j.contains("certificate")) v.certificate = parse_canonical_frame(field<std::string>(j, "certificate"));
  if (j.contains("reason")) v.reason = field<std::string>(j, "reason");
  if (j.contains("sigma")) {
    // Rebuilt from the trace; the stored fingerprints are compared on replay.
    const ReachResult rr = reaches(r.program, r.start, r.target, r.bound);
    if (rr.verdict == Reach::Yes) v.sigma = witness_substitution(Trace::from_run(rr.trace), v.mode);
    if (sigma_json(v.sigma) != j.at("sigma")) throw SyntaxError(0, "a substitution matching the recorded fingerprint");
  }
  return r;
}

ReplayResult replay(const Report& r, const PipelineOptions& opts) {
  const PipelineVerdict& v = r.verdict;
  switch (v.kind) {
    case PipelineVerdict::Kind::Unknown:
      return {true, "nothing to replay"};
    case PipelineVerdict::Kind::NotUnifiable: {
      if (!v.certificate) return {false, "no certificate"};
      const CertificateCheck c = check_certificate(*v.certificate, r.program, r.start, r.target, v.mode);
      if (!c.ok()) return {false, "certificate check failed"};
      if (!ground_instances_refuted(*v.certificate, r.program, r.start, r.target, v.mode))
        return {false, "a ground instance holds everywhere"};
      return {true, "certificate checks (i)-(iii) hold and every ground instance is refuted"};
    }
    case PipelineVerdict::Kind::Unifiable:
      break;
  }
  if (!v.evidence) return {false, "no evidence"};
  const Formula inst = apply_subst(v.sigma, psi(r.program, r.start, r.target, v.mode));
  if (v.evidence->method == ValidityEvidence::Method::TableauProof) {
    DecisionOptions d;
    d.label_budget = std::max(v.evidence->budget, opts.label_budget);
    return valid(inst, v.evidence->logic, d).valid() ? ReplayResult{true, "decision procedure proves the instance"}
                                                     : ReplayResult{false, "decision procedure refutes the instance"};
  }
  SuiteOptions s = opts.suite;
  s.trials = v.evidence->trials;
  s.max_points = v.evidence->max_points;
  s.seed = trial_seed(v.evidence->seed, 1);
  SuiteResult sr = random_suite(inst, v.mode.language(), s);
  return sr.passed() ? ReplayResult{true, "fresh-seed random suite passes"}
                     : ReplayResult{false, "fresh-seed random suite finds a counterexample"};
}

}  // namespace modunif
