// Ku satisfiability in two layers. The outer layer searches truth values for
// the global subformulas [u]X (each is true everywhere or nowhere); for a
// candidate assignment the inner layer checks, in plain K with the TBox
// {X : [u]X true}, that the root and every witness ~X of a false [u]X are
// satisfiable. Failed checks come back as learned clauses over global atoms.

#include <algorithm>
#include <climits>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include "engines.hpp"
#include "modunif/error.hpp"
#include "modunif/propsat.hpp"
#include "nnf.hpp"

namespace modunif::dec {

namespace {

using Label = std::vector<int>;

// Thrown when a local allowance (not the overall budget) runs out.
struct AllowanceSpent {};

class Budget {
 public:
  explicit Budget(std::size_t limit) : limit_(limit) {}
  void charge() {
    if (++used_ > limit_) throw ResourceLimit("label budget of " + std::to_string(limit_) + " exhausted");
    if (used_ > cap_) throw AllowanceSpent{};
  }
  std::size_t used() const { return used_; }
  void allow(std::size_t extra) { cap_ = used_ + extra; }
  void unlimit() { cap_ = SIZE_MAX; }

 private:
  std::size_t limit_;
  std::size_t used_ = 0;
  std::size_t cap_ = SIZE_MAX;
};

// Canonical atom for a node: letters by their positive form, modal nodes by
// their Box form. Returns (key, positive?).
std::pair<int, bool> atom_key(Store& st, int n) {
  switch (st.kind(n)) {
    case NK::Var:
    case NK::Nom:
    case NK::Box:
      return {n, true};
    case NK::NVar:
    case NK::NNom:
    case NK::Dia:
      return {st.negate(n), false};
    default:
      throw InvariantViolation("atom_key on a non-atomic node");
  }
}

// A diamond whose argument only folds to false once negated, e.g. <>(A & ~A)
// with A composite, has a constant key.
std::optional<bool> constant_key(Store& st, int key) {
  if (st.kind(key) == NK::True) return true;
  if (st.kind(key) == NK::False) return false;
  return std::nullopt;
}

// K with a TBox. [u]-nodes are opaque letters here.
class KProver {
 public:
  struct Info {
    std::vector<int> letters;  // justified letter nodes (either polarity)
    std::vector<Label> succ;
  };

  KProver(Store& st, Label tbox, Budget& budget) : st_(st), tbox_(std::move(tbox)), budget_(budget) {}

  bool sat(const Label& label) { return solve(label, 0).sat; }

  // After an aborted search: forget everything not yet settled.
  void abandon() {
    on_stack_.clear();
    rollback(0);
  }

  const Info* info(const Label& label) const {
    auto it = cache_.find(label);
    if (it == cache_.end() || it->second.status == Status::Unsat) return nullptr;
    return &it->second.info;
  }

 private:
  enum class Status { Sat, Unsat, Provisional };
  struct Entry {
    Status status;
    int low = INT_MAX;
    Info info;
  };
  struct Res {
    bool sat;
    int low;
  };

  Res solve(const Label& label, int depth) {
    if (auto it = cache_.find(label); it != cache_.end()) {
      if (it->second.status == Status::Unsat) return {false, INT_MAX};
      if (it->second.status == Status::Sat) return {true, INT_MAX};
      return {true, it->second.low};
    }
    // A label already under construction: assume it and let the caller
    // carry the dependency (K has no eventualities, so loops are models).
    if (auto it = on_stack_.find(label); it != on_stack_.end()) return {true, it->second};
    budget_.charge();
    on_stack_.emplace(label, depth);
    const std::size_t mark = log_.size();
    int low = INT_MAX;
    Info info;
    bool ok = expand(label, depth, low, info);
    on_stack_.erase(label);
    if (!ok) {
      rollback(mark);
      cache_[label] = Entry{Status::Unsat, INT_MAX, {}};
      return {false, INT_MAX};
    }
    if (low >= depth) {
      for (std::size_t i = mark; i < log_.size(); ++i) {
        auto it = cache_.find(log_[i]);
        if (it != cache_.end() && it->second.status == Status::Provisional) it->second.status = Status::Sat;
      }
      log_.resize(mark);
      cache_[label] = Entry{Status::Sat, INT_MAX, std::move(info)};
      return {true, INT_MAX};
    }
    for (std::size_t i = mark; i < log_.size(); ++i) {
      auto it = cache_.find(log_[i]);
      if (it != cache_.end()) it->second.low = std::min(it->second.low, low);
    }
    cache_[label] = Entry{Status::Provisional, low, std::move(info)};
    log_.push_back(label);
    return {true, low};
  }

  bool expand(const Label& label, int depth, int& low, Info& info) {
    sat::Cnf cnf;
    sat::CircuitBuilder cb(cnf);
    std::map<int, sat::Lit> atoms;
    std::map<int, sat::Lit> lits;
    // Iterative Tseitin over the propositional cone.
    auto lit_of = [&](int root) {
      std::vector<std::pair<int, bool>> stack{{root, false}};
      while (!stack.empty()) {
        auto [n, ready] = stack.back();
        stack.pop_back();
        if (lits.count(n)) continue;
        const NK k = st_.kind(n);
        if (k == NK::True || k == NK::False) {
          lits[n] = k == NK::True ? cb.true_lit() : cb.false_lit();
          continue;
        }
        if (k != NK::And && k != NK::Or) {
          auto [key, pos] = atom_key(st_, n);
          if (auto c = constant_key(st_, key)) {
            lits[n] = *c == pos ? cb.true_lit() : cb.false_lit();
            continue;
          }
          auto it = atoms.find(key);
          if (it == atoms.end()) it = atoms.emplace(key, cb.fresh()).first;
          lits[n] = pos ? it->second : -it->second;
          continue;
        }
        const auto kids = st_.node(n).kids;
        if (!ready) {
          stack.push_back({n, true});
          for (int c : kids)
            if (!lits.count(c)) stack.push_back({c, false});
          continue;
        }
        std::vector<sat::Lit> ins;
        for (int c : kids) ins.push_back(lits.at(c));
        lits[n] = k == NK::And ? cb.make_and(std::move(ins)) : cb.make_or(std::move(ins));
      }
      return lits.at(root);
    };
    std::vector<int> roots = label;
    roots.insert(roots.end(), tbox_.begin(), tbox_.end());
    for (int r : roots) cb.require(lit_of(r));

    sat::Solver solver;
    solver.add_cnf(cnf);
    while (true) {
      if (!solver.solve()) return false;
      // Justify the roots with as few atoms as the model allows.
      std::set<int> seen;
      std::vector<int> letters, boxes, dias;
      std::vector<int> todo = roots;
      while (!todo.empty()) {
        int n = todo.back();
        todo.pop_back();
        if (!seen.insert(n).second) continue;
        switch (st_.kind(n)) {
          case NK::True:
            break;
          case NK::False:
            throw InvariantViolation("justified a false node");
          case NK::And:
            for (int c : st_.node(n).kids) todo.push_back(c);
            break;
          case NK::Or: {
            const auto& kids = st_.node(n).kids;
            auto it = std::find_if(kids.begin(), kids.end(), [&](int c) { return seen.count(c) != 0; });
            if (it == kids.end())
              it = std::find_if(kids.begin(), kids.end(), [&](int c) { return solver.value(lits.at(c)); });
            if (it == kids.end()) throw InvariantViolation("no true disjunct in a satisfying assignment");
            todo.push_back(*it);
            break;
          }
          case NK::Box:
            if (st_.node(n).m == Modality::Rel) boxes.push_back(n);
            break;
          case NK::Dia:
            if (st_.node(n).m == Modality::Rel) dias.push_back(n);
            break;
          default:
            letters.push_back(n);
            break;
        }
      }
      std::sort(boxes.begin(), boxes.end());
      std::sort(dias.begin(), dias.end());
      std::vector<Label> succ;
      bool refuted = false;
      for (int d : dias) {
        Label s = successor(d, boxes);
        Res r = solve(s, depth + 1);
        if (r.sat) {
          low = std::min(low, r.low);
          succ.push_back(std::move(s));
          continue;
        }
        // Shrinking this clause by deletion costs a label per probe and did
        // not pay for itself on the reduction formulas.
        std::vector<sat::Lit> clause{-lits.at(d)};
        for (int b : boxes) clause.push_back(-lits.at(b));
        solver.add_clause(clause);
        refuted = true;
        break;
      }
      if (refuted) continue;
      info.letters = std::move(letters);
      info.succ = std::move(succ);
      return true;
    }
  }

  void rollback(std::size_t mark) {
    for (std::size_t i = mark; i < log_.size(); ++i) {
      auto it = cache_.find(log_[i]);
      if (it != cache_.end() && it->second.status == Status::Provisional) cache_.erase(it);
    }
    log_.resize(mark);
  }

  Label successor(int dia, const std::vector<int>& boxes) {
    Label s{st_.child(dia)};
    for (int b : boxes) s.push_back(st_.child(b));
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
  }

  Store& st_;
  Label tbox_;
  Budget& budget_;
  std::map<Label, Entry> cache_;
  std::map<Label, int> on_stack_;
  std::vector<Label> log_;
};

// Replaces decided global atoms by constants; undecided ones stay opaque.
class Specializer {
 public:
  Specializer(Store& st, const std::map<int, int>& global_index, const std::vector<int>& values)
      : st_(st), global_index_(global_index), values_(values) {}

  // values_[g]: 1 true, 0 false, -1 undecided
  int operator()(int root) {
    std::vector<std::pair<int, bool>> stack{{root, false}};
    while (!stack.empty()) {
      auto [n, ready] = stack.back();
      stack.pop_back();
      if (memo_.count(n)) continue;
      const NNode node = st_.node(n);
      if (node.kind == NK::True || node.kind == NK::False || st_.is_letter(n)) {
        memo_[n] = n;
        continue;
      }
      if ((node.kind == NK::Box || node.kind == NK::Dia) && node.m == Modality::Univ) {
        auto [key, pos] = atom_key(st_, n);
        if (auto c = constant_key(st_, key)) {
          memo_[n] = *c == pos ? st_.top() : st_.bot();
          continue;
        }
        int v = values_[global_index_.at(key)];
        memo_[n] = v < 0 ? n : ((v == 1) == pos ? st_.top() : st_.bot());
        continue;
      }
      if (!ready) {
        stack.push_back({n, true});
        for (int c : node.kids)
          if (!memo_.count(c)) stack.push_back({c, false});
        continue;
      }
      std::vector<int> kids;
      for (int c : node.kids) kids.push_back(memo_.at(c));
      switch (node.kind) {
        case NK::And:
          memo_[n] = st_.make_and(std::move(kids));
          break;
        case NK::Or:
          memo_[n] = st_.make_or(std::move(kids));
          break;
        case NK::Box:
          memo_[n] = st_.box(node.m, kids[0]);
          break;
        case NK::Dia:
          memo_[n] = st_.dia(node.m, kids[0]);
          break;
        default:
          throw InvariantViolation("unexpected node in specialization");
      }
    }
    return memo_.at(root);
  }

 private:
  Store& st_;
  const std::map<int, int>& global_index_;
  const std::vector<int>& values_;
  std::map<int, int> memo_;
};

class KuSolver {
  static constexpr std::size_t kProbeAllowance = 150;

 public:
  KuSolver(const Formula& f, std::size_t budget) : f_(f), budget_(budget) {
    root_ = st_.from_formula(f);
    collect_globals();
  }

  SatVerdict run() {
    sat::Solver outer;
    add_skeleton(outer);
    const int k = static_cast<int>(globals_.size());
    while (true) {
      if (!outer.solve()) return SatVerdict{std::nullopt, budget_.used()};
      std::vector<int> values(k);
      for (int g = 0; g < k; ++g) values[g] = outer.value(g + 1) ? 1 : 0;
      std::optional<int> failed = check(values);
      if (!failed) return SatVerdict{build_model(values), budget_.used()};
      outer.add_clause(learn(values, *failed));
    }
  }

 private:
  // Witness -1 is the root; witness g is ~X for a false [u]X.
  int witness_node(int w) { return w < 0 ? root_ : st_.negate(st_.child(globals_[w])); }

  KProver& prover_for(Label tbox) {
    std::sort(tbox.begin(), tbox.end());
    tbox.erase(std::unique(tbox.begin(), tbox.end()), tbox.end());
    auto it = provers_.find(tbox);
    if (it == provers_.end()) it = provers_.emplace(tbox, std::make_unique<KProver>(st_, tbox, budget_)).first;
    return *it->second;
  }

  // values with -1 entries are partial; only witness `only` is checked if given.
  std::optional<int> check(const std::vector<int>& values, std::optional<int> only = std::nullopt) {
    Specializer spec(st_, global_index_, values);
    Label tbox;
    for (std::size_t g = 0; g < globals_.size(); ++g)
      if (values[g] == 1) tbox.push_back(spec(st_.child(globals_[g])));
    if (std::find(tbox.begin(), tbox.end(), st_.bot()) != tbox.end()) return only ? *only : -1;
    tbox.erase(std::remove(tbox.begin(), tbox.end(), st_.top()), tbox.end());
    KProver& prover = prover_for(tbox);
    std::vector<int> order;
    if (only) {
      order.push_back(*only);
    } else {
      order.push_back(-1);
      for (std::size_t g = 0; g < globals_.size(); ++g)
        if (values[g] == 0) order.push_back(static_cast<int>(g));
    }
    for (int w : order) {
      int node = spec(witness_node(w));
      if (!prover.sat(Label{node})) return w;
    }
    return std::nullopt;
  }

  // Clause ruling out the assignment, shrunk by dropping literals whose
  // removal keeps witness `w` unsatisfiable. Each probe gets a small label
  // allowance; a probe that runs out keeps its literal.
  std::vector<sat::Lit> learn(std::vector<int> values, int w) {
    for (std::size_t g = 0; g < values.size(); ++g) {
      if (static_cast<int>(g) == w || values[g] < 0) continue;
      int saved = values[g];
      values[g] = -1;
      budget_.allow(kProbeAllowance);
      try {
        if (!check(values, w)) values[g] = saved;
      } catch (const AllowanceSpent&) {
        values[g] = saved;
        for (auto& [t, p] : provers_) p->abandon();
      }
      budget_.unlimit();
    }
    std::vector<sat::Lit> clause;
    for (std::size_t g = 0; g < values.size(); ++g) {
      if (values[g] < 0) continue;
      sat::Lit l = static_cast<sat::Lit>(g + 1);
      clause.push_back(values[g] == 1 ? -l : l);
    }
    return clause;
  }

  // Every [u]-node reachable from the root or from a witness/TBox formula
  // of an already known global, up to fixpoint.
  void collect_globals() {
    std::set<int> seen;
    std::vector<int> todo{root_};
    while (!todo.empty()) {
      int n = todo.back();
      todo.pop_back();
      if (!seen.insert(n).second) continue;
      const NNode node = st_.node(n);
      if ((node.kind == NK::Box || node.kind == NK::Dia) && node.m == Modality::Univ) {
        int key = atom_key(st_, n).first;
        if (!constant_key(st_, key) && !global_index_.count(key)) {
          global_index_[key] = static_cast<int>(globals_.size());
          globals_.push_back(key);
          todo.push_back(st_.child(key));
          todo.push_back(st_.negate(st_.child(key)));
        }
      }
      for (int c : node.kids) todo.push_back(c);
    }
  }

  // Propositional skeleton of the root: non-global atoms become free letters.
  void add_skeleton(sat::Solver& outer) {
    sat::Cnf cnf;
    sat::CircuitBuilder cb(cnf);
    // Atom 1 is the builder's constant; globals take atoms 2..k+1, so shift.
    // Simpler: give globals their own block after the constant.
    std::map<int, sat::Lit> gl;
    for (std::size_t g = 0; g < globals_.size(); ++g) gl[globals_[g]] = cb.fresh();
    std::map<int, sat::Lit> free_atoms, lits;
    std::vector<std::pair<int, bool>> stack{{root_, false}};
    while (!stack.empty()) {
      auto [n, ready] = stack.back();
      stack.pop_back();
      if (lits.count(n)) continue;
      const NNode node = st_.node(n);
      if (node.kind == NK::True || node.kind == NK::False) {
        lits[n] = node.kind == NK::True ? cb.true_lit() : cb.false_lit();
        continue;
      }
      if (node.kind != NK::And && node.kind != NK::Or) {
        auto [key, pos] = atom_key(st_, n);
        if (auto c = constant_key(st_, key)) {
          lits[n] = *c == pos ? cb.true_lit() : cb.false_lit();
          continue;
        }
        sat::Lit a;
        if (auto it = gl.find(key); it != gl.end()) {
          a = it->second;
        } else {
          auto jt = free_atoms.find(key);
          if (jt == free_atoms.end()) jt = free_atoms.emplace(key, cb.fresh()).first;
          a = jt->second;
        }
        lits[n] = pos ? a : -a;
        continue;
      }
      if (!ready) {
        stack.push_back({n, true});
        for (int c : node.kids)
          if (!lits.count(c)) stack.push_back({c, false});
        continue;
      }
      std::vector<sat::Lit> ins;
      for (int c : node.kids) ins.push_back(lits.at(c));
      lits[n] = node.kind == NK::And ? cb.make_and(std::move(ins)) : cb.make_or(std::move(ins));
    }
    cb.require(lits.at(root_));
    // Builder atoms: 1 = constant true, 2..k+1 = globals. The outer solver
    // reads global g as atom g+1, so renumber by dropping atom 1.
    sat::Solver& s = outer;
    for (int i = 0; i < cnf.num_atoms - 1; ++i) s.new_atom();
    for (auto clause : cnf.clauses) {
      std::vector<sat::Lit> out;
      bool satisfied = false;
      for (sat::Lit l : clause) {
        if (l == 1) {
          satisfied = true;
          break;
        }
        if (l == -1) continue;
        out.push_back(l > 0 ? l - 1 : l + 1);
      }
      if (satisfied) continue;
      s.add_clause(out);
    }
    while (s.num_atoms() < static_cast<int>(globals_.size())) s.new_atom();
  }

  std::optional<PointedModel> build_model(const std::vector<int>& values) {
    Specializer spec(st_, global_index_, values);
    Label tbox;
    for (std::size_t g = 0; g < globals_.size(); ++g)
      if (values[g] == 1) tbox.push_back(spec(st_.child(globals_[g])));
    tbox.erase(std::remove(tbox.begin(), tbox.end(), st_.top()), tbox.end());
    KProver& prover = prover_for(tbox);

    std::map<Label, int> point;
    std::vector<Label> order;
    auto visit = [&](const Label& start) {
      std::vector<Label> todo{start};
      while (!todo.empty()) {
        Label l = todo.back();
        todo.pop_back();
        if (point.count(l)) continue;
        const KProver::Info* info = prover.info(l);
        if (!info) throw InvariantViolation("satisfiable label without a recorded expansion");
        point[l] = static_cast<int>(order.size());
        order.push_back(l);
        for (const auto& s : info->succ) todo.push_back(s);
      }
    };
    Label root_label{spec(root_)};
    visit(root_label);
    for (std::size_t g = 0; g < globals_.size(); ++g)
      if (values[g] == 0) visit(Label{spec(witness_node(static_cast<int>(g)))});

    std::vector<std::string> names;
    for (std::size_t i = 0; i < order.size(); ++i) names.push_back("k" + std::to_string(i));
    std::set<Edge> r;
    Valuation v;
    for (int var : variables(f_)) v.vars[var];
    for (const auto& l : order) {
      const KProver::Info* info = prover.info(l);
      const int x = point.at(l);
      for (const auto& s : info->succ) r.insert({x, point.at(s)});
      for (int n : info->letters)
        if (st_.kind(n) == NK::Var) v.vars[st_.node(n).index].insert(x);
    }
    return PointedModel{Model(Frame(std::move(names), std::move(r)), std::move(v)), point.at(root_label)};
  }

  Formula f_;
  Store st_;
  Budget budget_;
  int root_ = 0;
  std::vector<int> globals_;         // Box(Univ, X) node ids
  std::map<int, int> global_index_;  // node id -> position in globals_
  std::map<Label, std::unique_ptr<KProver>> provers_;
};

}  // namespace

SatVerdict ku_satisfiable(const Formula& f, std::size_t budget) { return KuSolver(f, budget).run(); }

}  // namespace modunif::dec
