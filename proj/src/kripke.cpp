#include "modunif/kripke.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <sstream>
#include <unordered_map>

#include "modunif/error.hpp"
#include "modunif/propsat.hpp"

namespace modunif {

bool valid_point_name(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name) {
    if (std::isspace(static_cast<unsigned char>(c))) return false;
    if (c == ',' || c == '{' || c == '}' || c == '=' || c == '#') return false;
  }
  return true;
}

Frame::Frame(std::vector<std::string> points, std::set<Edge> r, std::optional<std::set<Edge>> s)
    : points_(std::move(points)), r_(std::move(r)), s_(std::move(s)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!valid_point_name(points_[i])) throw Error("invalid point name '" + points_[i] + "'");
    if (!index_.emplace(points_[i], static_cast<int>(i)).second)
      throw Error("duplicate point name '" + points_[i] + "'");
  }
  const int n = size();
  auto build = [n](const std::set<Edge>& rel, std::vector<std::vector<int>>& succ) {
    succ.assign(n, {});
    for (const auto& [x, y] : rel) {
      if (x < 0 || x >= n || y < 0 || y >= n) throw UnknownPoint("edge endpoint out of range");
      succ[x].push_back(y);
    }
  };
  build(r_, r_succ_);
  if (s_) build(*s_, s_succ_);
}

Frame Frame::from_names(std::vector<std::string> points, const std::vector<std::pair<std::string, std::string>>& r,
                        const std::optional<std::vector<std::pair<std::string, std::string>>>& s) {
  std::map<std::string, int, std::less<>> idx;
  for (std::size_t i = 0; i < points.size(); ++i) idx.emplace(points[i], static_cast<int>(i));
  auto lookup = [&](const std::string& name) {
    auto it = idx.find(name);
    if (it == idx.end()) throw UnknownPoint("unknown point '" + name + "'");
    return it->second;
  };
  std::set<Edge> rr;
  for (const auto& [x, y] : r) rr.insert({lookup(x), lookup(y)});
  std::optional<std::set<Edge>> ss;
  if (s) {
    ss.emplace();
    for (const auto& [x, y] : *s) ss->insert({lookup(x), lookup(y)});
  }
  return Frame(std::move(points), std::move(rr), std::move(ss));
}

int Frame::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw UnknownPoint("unknown point '" + std::string(name) + "'");
  return it->second;
}

std::optional<int> Frame::find(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::vector<int>& Frame::successors(Modality m, int x) const {
  if (x < 0 || x >= size()) throw UnknownPoint("point index " + std::to_string(x) + " out of range");
  switch (m) {
    case Modality::Rel:
      return r_succ_[x];
    case Modality::Hyb:
      if (!s_) throw LanguageMismatch("[h] used on a frame without S");
      return s_succ_[x];
    case Modality::Univ:
      break;
  }
  throw Error("the universal modality has no successor list");
}

bool Frame::has_edge(Modality m, int x, int y) const {
  if (m == Modality::Univ) return true;
  if (m == Modality::Rel) return r_.count({x, y}) != 0;
  return s_ && s_->count({x, y}) != 0;
}

Model::Model(Frame frame, Valuation valuation) : frame_(std::move(frame)), valuation_(std::move(valuation)) {
  const int n = frame_.size();
  for (const auto& [v, pts] : valuation_.vars) {
    if (v < 1) throw Error("variable index must be >= 1");
    for (int x : pts)
      if (x < 0 || x >= n) throw UnknownPoint("valuation of p" + std::to_string(v) + " leaves the frame");
  }
  for (const auto& [k, x] : valuation_.noms) {
    if (k < 1) throw Error("nominal index must be >= 1");
    if (x < 0 || x >= n) throw UnknownPoint("valuation of n" + std::to_string(k) + " leaves the frame");
  }
}

namespace {

void check_frame_language(const Frame& frame, const Formula& f) {
  const Language lang = frame.language();
  if (!in_language(f, lang)) {
    throw LanguageMismatch(std::string("formula is not in ") + (lang == Language::L ? "L" : "H2") +
                           ", the language of the frame");
  }
}

}  // namespace

std::vector<bool> extension(const Model& m, const Formula& f) {
  const Frame& fr = m.frame();
  check_frame_language(fr, f);
  const int n = fr.size();
  std::vector<Formula> order = postorder(f);
  std::unordered_map<const void*, std::size_t> slot;
  slot.reserve(order.size());
  std::vector<std::vector<char>> val(order.size());
  auto get = [&](const Formula& g) -> const std::vector<char>& { return val[slot.at(g.id())]; };

  for (std::size_t i = 0; i < order.size(); ++i) {
    const Formula& g = order[i];
    slot.emplace(g.id(), i);
    std::vector<char> out(n, 0);
    switch (g.kind()) {
      case Kind::Var: {
        auto it = m.valuation().vars.find(g.index());
        if (it == m.valuation().vars.end()) throw UnboundSymbol("p" + std::to_string(g.index()) + " has no value");
        for (int x : it->second) out[x] = 1;
        break;
      }
      case Kind::Nominal: {
        auto it = m.valuation().noms.find(g.index());
        if (it == m.valuation().noms.end()) throw UnboundSymbol("n" + std::to_string(g.index()) + " has no value");
        out[it->second] = 1;
        break;
      }
      case Kind::Top:
        std::fill(out.begin(), out.end(), 1);
        break;
      case Kind::Bot:
        break;
      case Kind::Not: {
        const auto& c = get(g.child());
        for (int x = 0; x < n; ++x) out[x] = !c[x];
        break;
      }
      case Kind::And:
      case Kind::Or:
      case Kind::Implies:
      case Kind::Iff: {
        const auto& a = get(g.lhs());
        const auto& b = get(g.rhs());
        for (int x = 0; x < n; ++x) {
          switch (g.kind()) {
            case Kind::And:
              out[x] = a[x] && b[x];
              break;
            case Kind::Or:
              out[x] = a[x] || b[x];
              break;
            case Kind::Implies:
              out[x] = !a[x] || b[x];
              break;
            default:
              out[x] = (a[x] != 0) == (b[x] != 0);
              break;
          }
        }
        break;
      }
      case Kind::Box:
      case Kind::Diamond: {
        const auto& c = get(g.child());
        const bool is_box = g.kind() == Kind::Box;
        if (g.modality() == Modality::Univ) {
          bool all = std::all_of(c.begin(), c.end(), [](char v) { return v != 0; });
          bool any = std::any_of(c.begin(), c.end(), [](char v) { return v != 0; });
          std::fill(out.begin(), out.end(), is_box ? all : any);
          break;
        }
        for (int x = 0; x < n; ++x) {
          const auto& succ = fr.successors(g.modality(), x);
          if (is_box)
            out[x] = std::all_of(succ.begin(), succ.end(), [&](int y) { return c[y] != 0; });
          else
            out[x] = std::any_of(succ.begin(), succ.end(), [&](int y) { return c[y] != 0; });
        }
        break;
      }
    }
    val[i] = std::move(out);
  }
  const auto& root = val.back();
  return std::vector<bool>(root.begin(), root.end());
}

bool model_check(const Model& m, int x, const Formula& f) {
  if (x < 0 || x >= m.frame().size()) throw UnknownPoint("point index " + std::to_string(x) + " out of range");
  return extension(m, f)[x];
}

bool model_check(const Model& m, std::string_view x, const Formula& f) {
  return model_check(m, m.frame().index_of(x), f);
}

FrameValidity frame_valid(const Frame& frame, const Formula& f, const FrameValidOptions& opts) {
  check_frame_language(frame, f);
  const int n = frame.size();
  sat::Cnf cnf;
  sat::CircuitBuilder cb(cnf);
  auto over_budget = [&] {
    if (opts.clause_budget && cnf.clauses.size() > opts.clause_budget)
      throw ResourceLimit("frame validity encoding exceeded " + std::to_string(opts.clause_budget) + " clauses");
  };

  std::map<int, std::vector<sat::Lit>> var_atoms;
  for (int v : variables(f)) {
    auto& atoms = var_atoms[v];
    for (int x = 0; x < n; ++x) atoms.push_back(cb.fresh());
  }
  std::map<int, std::vector<sat::Lit>> nom_atoms;
  for (int k : nominals(f)) {
    auto& atoms = nom_atoms[k];
    for (int x = 0; x < n; ++x) atoms.push_back(cb.fresh());
    cnf.add(atoms);
    for (int x = 0; x < n; ++x)
      for (int y = x + 1; y < n; ++y) cnf.add({-atoms[x], -atoms[y]});
  }
  over_budget();

  std::vector<Formula> order = postorder(f);
  std::unordered_map<const void*, std::size_t> slot;
  std::vector<std::vector<sat::Lit>> lits(order.size());
  auto get = [&](const Formula& g) -> const std::vector<sat::Lit>& { return lits[slot.at(g.id())]; };

  for (std::size_t i = 0; i < order.size(); ++i) {
    const Formula& g = order[i];
    slot.emplace(g.id(), i);
    std::vector<sat::Lit> out(n);
    for (int x = 0; x < n; ++x) {
      switch (g.kind()) {
        case Kind::Var:
          out[x] = var_atoms.at(g.index())[x];
          break;
        case Kind::Nominal:
          out[x] = nom_atoms.at(g.index())[x];
          break;
        case Kind::Top:
          out[x] = cb.true_lit();
          break;
        case Kind::Bot:
          out[x] = cb.false_lit();
          break;
        case Kind::Not:
          out[x] = -get(g.child())[x];
          break;
        case Kind::And:
          out[x] = cb.make_and(get(g.lhs())[x], get(g.rhs())[x]);
          break;
        case Kind::Or:
          out[x] = cb.make_or(get(g.lhs())[x], get(g.rhs())[x]);
          break;
        case Kind::Implies:
          out[x] = cb.make_or(-get(g.lhs())[x], get(g.rhs())[x]);
          break;
        case Kind::Iff:
          out[x] = cb.make_iff(get(g.lhs())[x], get(g.rhs())[x]);
          break;
        case Kind::Box:
        case Kind::Diamond: {
          const auto& c = get(g.child());
          std::vector<sat::Lit> ins;
          if (g.modality() == Modality::Univ) {
            ins = c;
          } else {
            for (int y : frame.successors(g.modality(), x)) ins.push_back(c[y]);
          }
          out[x] = g.kind() == Kind::Box ? cb.make_and(std::move(ins)) : cb.make_or(std::move(ins));
          break;
        }
      }
    }
    lits[i] = std::move(out);
    over_budget();
  }

  std::vector<sat::Lit> somewhere_false;
  for (sat::Lit l : lits.back()) somewhere_false.push_back(-l);
  cb.require(cb.make_or(std::move(somewhere_false)));
  over_budget();

  sat::SatResult r = sat::solve(cnf, sat::SolveOptions{opts.conflict_budget});
  if (!r.sat()) return {};

  CounterModel cm;
  for (const auto& [v, atoms] : var_atoms) {
    auto& pts = cm.valuation.vars[v];
    for (int x = 0; x < n; ++x)
      if (r.model->value(atoms[x])) pts.insert(x);
  }
  for (const auto& [k, atoms] : nom_atoms) {
    for (int x = 0; x < n; ++x)
      if (r.model->value(atoms[x])) cm.valuation.noms[k] = x;
  }
  cm.point = -1;
  for (int x = 0; x < n; ++x) {
    if (!r.model->value(lits.back()[x])) {
      cm.point = x;
      break;
    }
  }
  if (cm.point < 0 || model_check(Model(frame, cm.valuation), cm.point, f))
    throw InvariantViolation("frame_valid produced a counter model that does not refute the formula");
  return {std::move(cm)};
}

Frame random_frame(std::uint64_t seed, int max_points, Language kind, bool transitive, const RandomFrameOptions& opts) {
  if (max_points < 1) throw Error("random_frame needs max_points >= 1");
  std::mt19937_64 rng(seed);
  const int n = std::uniform_int_distribution<int>(1, max_points)(rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_relation = [&] {
    const double density = 0.05 + 0.6 * unit(rng);
    std::set<Edge> rel;
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        if (unit(rng) < density) rel.insert({x, y});
    return rel;
  };
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("w" + std::to_string(i));
  std::set<Edge> r = random_relation();
  if (transitive) r = transitive_closure(r);
  std::optional<std::set<Edge>> s;
  if (kind == Language::H2) {
    if (opts.full_s) {
      s.emplace();
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) s->insert({x, y});
    } else {
      s = random_relation();
    }
  }
  return Frame(std::move(names), std::move(r), std::move(s));
}

// ---------------------------------------------------------------------------
// Text formats

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

struct Line {
  std::string_view text;
  std::size_t offset;
};

std::vector<Line> content_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t offset = 0;
  while (offset <= text.size()) {
    std::size_t eol = text.find('\n', offset);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = trim(text.substr(offset, eol - offset));
    if (!line.empty() && line[0] != '#') out.push_back({line, offset});
    offset = eol + 1;
  }
  return out;
}

}  // namespace

FrameDocument parse_frame_document(std::string_view text) {
  std::optional<std::vector<std::string>> points;
  std::vector<std::pair<std::string, std::string>> r, s;
  bool hybrid = false;
  std::map<std::string, std::string> labels;
  for (const Line& line : content_lines(text)) {
    std::size_t colon = line.text.find(':');
    if (colon == std::string_view::npos) throw SyntaxError(line.offset, "'<key>: ...'");
    std::string_view key = trim(line.text.substr(0, colon));
    std::string_view rest = trim(line.text.substr(colon + 1));
    if (key == "points") {
      if (points) throw SyntaxError(line.offset, "a single points line");
      points = words(rest);
    } else if (key == "R" || key == "S") {
      auto ws = words(rest);
      if (ws.size() != 2) throw SyntaxError(line.offset, "exactly two point names");
      (key == "R" ? r : s).emplace_back(ws[0], ws[1]);
      if (key == "S") hybrid = true;
    } else if (key == "kind") {
      if (rest == "H2")
        hybrid = true;
      else if (rest != "L")
        throw SyntaxError(line.offset, "'L' or 'H2'");
    } else if (key == "label") {
      std::size_t sp = rest.find_first_of(" \t");
      if (sp == std::string_view::npos) throw SyntaxError(line.offset, "'label: <point> <text>'");
      labels[std::string(rest.substr(0, sp))] = std::string(trim(rest.substr(sp)));
    } else {
      throw SyntaxError(line.offset, "one of points, R, S, kind, label");
    }
  }
  if (!points) throw SyntaxError(text.size(), "a points line");
  std::optional<std::vector<std::pair<std::string, std::string>>> sopt;
  if (hybrid) sopt = s;
  FrameDocument doc{Frame::from_names(*points, r, sopt), std::move(labels)};
  for (const auto& [p, _] : doc.labels) doc.frame.index_of(p);
  return doc;
}

Frame parse_frame(std::string_view text) { return parse_frame_document(text).frame; }

std::string to_text(const Frame& frame, const std::map<std::string, std::string>& labels) {
  std::string out = "points:";
  for (const auto& p : frame.points()) out += ' ' + p;
  out += '\n';
  if (frame.hybrid()) out += "kind: H2\n";
  for (const auto& [x, y] : frame.r()) out += "R: " + frame.name(x) + ' ' + frame.name(y) + '\n';
  if (frame.s())
    for (const auto& [x, y] : *frame.s()) out += "S: " + frame.name(x) + ' ' + frame.name(y) + '\n';
  for (const auto& [p, text] : labels) out += "label: " + p + ' ' + text + '\n';
  return out;
}

std::string to_text(const Frame& frame, const Valuation& v) {
  std::string out;
  for (const auto& [k, pts] : v.vars) {
    out += 'p' + std::to_string(k) + " = {";
    bool first = true;
    for (int x : pts) {
      if (!first) out += ", ";
      first = false;
      out += frame.name(x);
    }
    out += "}\n";
  }
  for (const auto& [k, x] : v.noms) out += 'n' + std::to_string(k) + " = " + frame.name(x) + '\n';
  return out;
}

Valuation parse_valuation(std::string_view text, const Frame& frame) {
  Valuation v;
  for (const Line& line : content_lines(text)) {
    std::size_t eq = line.text.find('=');
    if (eq == std::string_view::npos) throw SyntaxError(line.offset, "'p<k> = {...}' or 'n<k> = <point>'");
    Formula sym = parse_formula_any(trim(line.text.substr(0, eq)));
    std::string_view rhs = trim(line.text.substr(eq + 1));
    if (sym.kind() == Kind::Var) {
      if (rhs.size() < 2 || rhs.front() != '{' || rhs.back() != '}') throw SyntaxError(line.offset, "'{...}'");
      if (v.vars.count(sym.index())) throw SyntaxError(line.offset, "each variable once");
      auto& pts = v.vars[sym.index()];
      std::string body(rhs.substr(1, rhs.size() - 2));
      std::replace(body.begin(), body.end(), ',', ' ');
      for (const auto& w : words(body)) pts.insert(frame.index_of(w));
    } else if (sym.kind() == Kind::Nominal) {
      if (v.noms.count(sym.index())) throw SyntaxError(line.offset, "each nominal once");
      v.noms[sym.index()] = frame.index_of(rhs);
    } else {
      throw SyntaxError(line.offset, "a variable or nominal");
    }
  }
  return v;
}

}  // namespace modunif
