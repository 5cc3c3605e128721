#include "modunif/eqtheory.hpp"

#include <cctype>
#include <unordered_map>
#include <utility>

#include "modunif/error.hpp"

namespace modunif {

namespace detail {
struct TermNode {
  TermKind kind;
  int index;
  Term a, b;
};
}  // namespace detail

namespace {
const Term& one_term() {
  static const Term t = Term::one();
  return t;
}
}  // namespace

Term::Term() : Term(one_term()) {}

Term Term::make(TermKind k, int index, Term a, Term b) {
  return Term(std::make_shared<const detail::TermNode>(detail::TermNode{k, index, std::move(a), std::move(b)}));
}

Term Term::ind_var(int index) {
  if (index < 1) throw IndexOutOfRange("term variable index " + std::to_string(index) + " is below 1");
  return make(TermKind::IndVar, index, Term(nullptr), Term(nullptr));
}

Term Term::one() { return make(TermKind::One, 0, Term(nullptr), Term(nullptr)); }
Term Term::meet(Term a, Term b) { return make(TermKind::Meet, 0, std::move(a), std::move(b)); }
Term Term::complement(Term t) { return make(TermKind::Complement, 0, std::move(t), Term(nullptr)); }

Term Term::box_op(int which, Term t) {
  if (which != 1 && which != 2) throw IndexOutOfRange("operator [" + std::to_string(which) + "] does not exist");
  return make(TermKind::BoxOp, which, std::move(t), Term(nullptr));
}

TermKind Term::kind() const noexcept { return node_->kind; }
int Term::index() const noexcept { return node_->index; }
const Term& Term::lhs() const { return node_->a; }
const Term& Term::rhs() const { return node_->b; }

bool operator==(const Term& x, const Term& y) {
  std::vector<std::pair<const Term*, const Term*>> todo{{&x, &y}};
  while (!todo.empty()) {
    auto [a, b] = todo.back();
    todo.pop_back();
    if (a->id() == b->id()) continue;
    if (a->kind() != b->kind() || a->index() != b->index()) return false;
    switch (a->kind()) {
      case TermKind::Meet:
        todo.push_back({&a->rhs(), &b->rhs()});
        [[fallthrough]];
      case TermKind::Complement:
      case TermKind::BoxOp:
        todo.push_back({&a->lhs(), &b->lhs()});
        break;
      default:
        break;
    }
  }
  return true;
}

Formula term_to_formula(const Term& t) {
  std::unordered_map<const void*, Formula> memo;
  std::vector<std::pair<const Term*, bool>> stack{{&t, false}};
  while (!stack.empty()) {
    auto [u, ready] = stack.back();
    stack.pop_back();
    if (memo.count(u->id())) continue;
    const bool binary = u->kind() == TermKind::Meet;
    const bool unary = u->kind() == TermKind::Complement || u->kind() == TermKind::BoxOp;
    if (!ready && (binary || unary)) {
      stack.push_back({u, true});
      stack.push_back({&u->lhs(), false});
      if (binary) stack.push_back({&u->rhs(), false});
      continue;
    }
    Formula f;
    switch (u->kind()) {
      case TermKind::IndVar:
        f = Formula::var(u->index());
        break;
      case TermKind::One:
        f = Formula::top();
        break;
      case TermKind::Meet:
        f = conj(memo.at(u->lhs().id()), memo.at(u->rhs().id()));
        break;
      case TermKind::Complement:
        f = neg(memo.at(u->lhs().id()));
        break;
      case TermKind::BoxOp:
        f = box(u->index() == 1 ? Modality::Univ : Modality::Rel, memo.at(u->lhs().id()));
        break;
    }
    memo.emplace(u->id(), std::move(f));
  }
  return memo.at(t.id());
}

Term formula_to_term(const Formula& input) {
  if (!nominals(input).empty()) throw LanguageMismatch("nominals have no term counterpart");
  if (uses_modality(input, Modality::Hyb)) throw LanguageMismatch("[h] has no term counterpart");
  const Formula f = desugar(input);
  std::unordered_map<const void*, Term> memo;
  for (const Formula& g : postorder(f)) {
    Term t;
    switch (g.kind()) {
      case Kind::Var:
        t = Term::ind_var(g.index());
        break;
      case Kind::Top:
        t = Term::one();
        break;
      case Kind::Bot:
        t = Term::complement(Term::one());
        break;
      case Kind::Not:
        t = Term::complement(memo.at(g.child().id()));
        break;
      case Kind::And:
        t = Term::meet(memo.at(g.lhs().id()), memo.at(g.rhs().id()));
        break;
      case Kind::Box:
        t = Term::box_op(g.modality() == Modality::Univ ? 1 : 2, memo.at(g.child().id()));
        break;
      default:
        throw InvariantViolation("desugared formula still has sugar");
    }
    memo.emplace(g.id(), std::move(t));
  }
  return memo.at(f.id());
}

Formula unification_instance(const Equation& e) { return iff(term_to_formula(e.lhs), term_to_formula(e.rhs)); }

Formula inequality_formula(const Inequality& q) { return implies(term_to_formula(q.lo), term_to_formula(q.hi)); }

std::vector<Inequality> theory_t() {
  const Term x = Term::ind_var(1);
  auto b1 = [](Term t) { return Term::box_op(1, std::move(t)); };
  auto b2 = [](Term t) { return Term::box_op(2, std::move(t)); };
  auto c = [](Term t) { return Term::complement(std::move(t)); };
  return {
      {b1(x), b2(x)},
      {b1(x), x},
      {b1(x), b1(b1(x))},
      {x, b1(c(b1(c(x))))},
  };
}

// ---------------------------------------------------------------------------
// Syntax

namespace {

class TermParser {
 public:
  explicit TermParser(std::string_view text) : text_(text) {}

  Term meet() {
    Term t = unary();
    while (eat('&')) t = Term::meet(std::move(t), unary());
    return t;
  }

  Term unary() {
    skip();
    if (eat('~')) return Term::complement(unary());
    if (peek("[1]") || peek("[2]")) {
      int which = text_[pos_ + 1] - '0';
      pos_ += 3;
      return Term::box_op(which, unary());
    }
    if (eat('(')) {
      Term t = meet();
      expect(')', "')'");
      return t;
    }
    if (eat('1')) return Term::one();
    if (eat('x')) {
      const std::size_t start = pos_;
      long value = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        value = value * 10 + (text_[pos_++] - '0');
        if (value > 1'000'000'000) throw SyntaxError(start, "a variable index below 10^9");
      }
      if (pos_ == start || value < 1) throw SyntaxError(start, "a positive variable index");
      return Term::ind_var(static_cast<int>(value));
    }
    throw SyntaxError(pos_, "a term");
  }

  void expect(char c, const char* what) {
    if (!eat(c)) throw SyntaxError(pos_, what);
  }

  void finish() {
    skip();
    if (pos_ != text_.size()) throw SyntaxError(pos_, "end of input");
  }

  bool eat(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

 private:
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool peek(std::string_view s) const { return text_.substr(pos_).starts_with(s); }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void print(const Term& t, std::string& out) {
  switch (t.kind()) {
    case TermKind::IndVar:
      out += "x" + std::to_string(t.index());
      return;
    case TermKind::One:
      out += "1";
      return;
    case TermKind::Complement:
    case TermKind::BoxOp: {
      out += t.kind() == TermKind::Complement ? "~" : "[" + std::to_string(t.index()) + "]";
      const bool paren = t.child().kind() == TermKind::Meet;
      if (paren) out += "(";
      print(t.child(), out);
      if (paren) out += ")";
      return;
    }
    case TermKind::Meet: {
      print(t.lhs(), out);
      out += " & ";
      const bool paren = t.rhs().kind() == TermKind::Meet;
      if (paren) out += "(";
      print(t.rhs(), out);
      if (paren) out += ")";
      return;
    }
  }
}

}  // namespace

Term parse_term(std::string_view text) {
  TermParser p(text);
  Term t = p.meet();
  p.finish();
  return t;
}

Equation parse_equation(std::string_view text) {
  TermParser p(text);
  Term lhs = p.meet();
  p.expect('=', "'='");
  Term rhs = p.meet();
  p.finish();
  return {std::move(lhs), std::move(rhs)};
}

std::string to_string(const Term& t) {
  std::string out;
  print(t, out);
  return out;
}

std::string to_string(const Equation& e) { return to_string(e.lhs) + " = " + to_string(e.rhs); }

}  // namespace modunif
