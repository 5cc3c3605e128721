// modunif command line. Exit codes: 0 verdict produced, 1 usage or input
// error, 2 resource limit, 3 internal invariant violation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "modunif/decision.hpp"
#include "modunif/encoding.hpp"
#include "modunif/error.hpp"
#include "modunif/witness.hpp"
#include "modunif/workbench.hpp"

namespace fs = std::filesystem;
using namespace modunif;

namespace {

// Formula text written to disk is capped; psi grows with the counter values.
constexpr std::uint64_t kMaxPrintedTree = 2'000'000;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

std::string printable(const Formula& f, const char* what) {
  if (tree_size(f) > kMaxPrintedTree)
    throw ResourceLimit(std::string(what) + " unfolds to more than " + std::to_string(kMaxPrintedTree) + " nodes");
  return to_string(f);
}

void print_model(const PointedModel& pm) {
  const Model& m = pm.model;
  std::cout << to_text(m.frame());
  const std::string val = to_text(m.frame(), m.valuation());
  if (!val.empty()) std::cout << val;
  std::cout << "point: " << m.frame().name(pm.point) << "\n";
}

DecisionOptions decision_options(std::size_t budget, const std::string& engine) {
  DecisionOptions d;
  d.label_budget = budget;
  if (engine == "tableau")
    d.engine = Engine::Tableau;
  else if (engine != "auto")
    throw Error("engine must be auto or tableau");
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minsky machine to modal unification reduction workbench"};
  app.require_subcommand(1);

  std::string program_path, start, target, mode_text = "universal", out, logic_text = "ku", formula_text;
  std::string frame_path, valuation_path, point, engine = "auto", report_path;
  long bound = 1000;
  std::size_t budget = 50'000, trials = 1000;
  std::uint64_t seed = 1;
  int nominal = 1;

  auto add_mode = [&](CLI::App* c) {
    c->add_option("--mode", mode_text, "universal or hybrid")->check(CLI::IsMember({"universal", "hybrid"}));
    c->add_option("--nominal", nominal, "nominal index used in hybrid mode")->check(CLI::PositiveNumber);
  };

  auto* reduce = app.add_subcommand("reduce", "write psi, AxP and, when the target is reached, sigma");
  reduce->add_option("--program", program_path)->required();
  reduce->add_option("--start", start)->required();
  reduce->add_option("--target", target)->required();
  reduce->add_option("--bound", bound, "step bound for the reachability check");
  reduce->add_option("--out", out)->required();
  add_mode(reduce);

  auto* frame = app.add_subcommand("frame", "write the canonical frame of a run");
  frame->add_option("--program", program_path)->required();
  frame->add_option("--start", start)->required();
  frame->add_option("--bound", bound)->required();
  frame->add_option("--out", out, "file; stdout when omitted");
  add_mode(frame);

  auto* mc = app.add_subcommand("modelcheck", "truth of a formula at a point");
  mc->add_option("--frame", frame_path)->required();
  mc->add_option("--valuation", valuation_path);
  mc->add_option("--point", point)->required();
  mc->add_option("--formula", formula_text)->required();

  auto* valid_cmd = app.add_subcommand("valid", "decide validity");
  auto* sat_cmd = app.add_subcommand("sat", "decide satisfiability");
  auto* ground_cmd = app.add_subcommand("ground-unify", "search the ground substitutions for a unifier");
  for (auto* c : {valid_cmd, sat_cmd, ground_cmd}) {
    c->add_option("--logic", logic_text)->check(CLI::IsMember({"ku", "kh2"}));
    c->add_option("--formula", formula_text)->required();
    c->add_option("--budget", budget, "label budget");
    c->add_option("--engine", engine)->check(CLI::IsMember({"auto", "tableau"}));
  }

  auto* verify = app.add_subcommand("verify", "run the reduction pipeline and print a JSON report");
  verify->add_option("--program", program_path)->required();
  verify->add_option("--start", start)->required();
  verify->add_option("--target", target)->required();
  verify->add_option("--bound", bound)->required();
  verify->add_option("--seed", seed);
  verify->add_option("--trials", trials);
  verify->add_option("--budget", budget, "label budget");
  verify->add_option("--out", out, "also write the report here");
  add_mode(verify);

  auto* replay_cmd = app.add_subcommand("replay", "re-check a saved report");
  replay_cmd->add_option("--report", report_path)->required();
  replay_cmd->add_option("--budget", budget, "label budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const Mode mode = parse_mode(mode_text, nominal);
    if (*reduce) {
      const Program p = parse_program(slurp(program_path));
      const Config a = parse_config(start), b = parse_config(target);
      fs::create_directories(out);
      spill(fs::path(out) / "psi.txt", printable(psi(p, a, b, mode), "psi"));
      spill(fs::path(out) / "ax.txt", printable(ax_program(p, mode), "AxP"));
      const ReachResult rr = reaches(p, a, b, bound);
      if (rr.verdict == Reach::Yes) {
        const Substitution s = witness_substitution(Trace::from_run(rr.trace), mode);
        for (const auto& [var, f] : s.entries()) printable(f, "sigma");
        spill(fs::path(out) / "sigma.txt", to_string(s));
      }
      std::cout << "reachable: " << (rr.verdict == Reach::Yes ? "yes" : rr.verdict == Reach::No ? "no" : "unknown")
                << "\n";
      return 0;
    }
    if (*frame) {
      const CanonicalFrame cf = canonical_frame(parse_program(slurp(program_path)), parse_config(start), bound, mode);
      if (out.empty())
        std::cout << cf.to_text();
      else
        spill(out, cf.to_text());
      return 0;
    }
    if (*mc) {
      const FrameDocument doc = parse_frame_document(slurp(frame_path));
      const Valuation v = valuation_path.empty() ? Valuation{} : parse_valuation(slurp(valuation_path), doc.frame);
      const Formula f = parse_formula(formula_text, doc.frame.language());
      std::cout << (model_check(Model(doc.frame, v), point, f) ? "true" : "false") << "\n";
      return 0;
    }
    if (*valid_cmd || *sat_cmd || *ground_cmd) {
      const Logic logic = parse_logic(logic_text);
      const Formula f = parse_formula(formula_text, language_of(logic));
      const DecisionOptions d = decision_options(budget, engine);
      if (*valid_cmd) {
        const ValidVerdict v = valid(f, logic, d);
        std::cout << (v.valid() ? "valid" : "not valid") << "\n";
        if (!v.valid()) print_model(*v.counter);
      } else if (*sat_cmd) {
        const SatVerdict v = satisfiable(f, logic, d);
        std::cout << (v.sat() ? "sat" : "unsat") << "\n";
        if (v.sat()) print_model(*v.witness);
      } else {
        const auto s = ground_unifiable(f, logic, d);
        if (s)
          std::cout << "unifier\n" << to_string(*s);
        else
          std::cout << "none\n";
      }
      return 0;
    }
    if (*verify) {
      PipelineOptions po;
      po.label_budget = budget;
      po.suite.seed = seed;
      po.suite.trials = trials;
      Report r;
      r.program = parse_program(slurp(program_path));
      r.start = parse_config(start);
      r.target = parse_config(target);
      r.bound = bound;
      r.verdict = check_unifiable_via_reduction(r.program, r.start, r.target, bound, mode, po);
      const std::string js = to_json(r);
      std::cout << js << "\n";
      if (!out.empty()) spill(out, js);
      return 0;
    }
    if (*replay_cmd) {
      PipelineOptions po;
      po.label_budget = budget;
      const ReplayResult rr = replay(parse_report(slurp(report_path)), po);
      std::cout << (rr.ok ? "ok" : "failed") << ": " << rr.detail << "\n";
      return rr.ok ? 0 : 3;
    }
  } catch (const ResourceLimit& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 2;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
