#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "modunif/formula.hpp"

namespace modunif {

enum class TermKind : std::uint8_t { IndVar, One, Meet, Complement, BoxOp };

namespace detail {
struct TermNode;
}

// Term over meet, complement, 1 and two unary operators. Operator 1 is read
// as the universal box, operator 2 as the relational box.
class Term {
 public:
  Term();  // One

  // Throws IndexOutOfRange for index < 1.
  static Term ind_var(int index);
  static Term one();
  static Term meet(Term a, Term b);
  static Term complement(Term t);
  // Throws IndexOutOfRange unless which is 1 or 2.
  static Term box_op(int which, Term t);

  TermKind kind() const noexcept;
  // Variable index for IndVar, operator number for BoxOp, 0 otherwise.
  int index() const noexcept;
  const Term& lhs() const;
  const Term& rhs() const;
  const Term& child() const { return lhs(); }
  const void* id() const noexcept { return node_.get(); }

  friend bool operator==(const Term& a, const Term& b);

 private:
  explicit Term(std::shared_ptr<const detail::TermNode> n) : node_(std::move(n)) {}
  static Term make(TermKind k, int index, Term a, Term b);

  std::shared_ptr<const detail::TermNode> node_;
};

struct Equation {
  Term lhs, rhs;
};

// s <= t, i.e. s & t = s.
struct Inequality {
  Term lo, hi;
};

// x_k -> p_k, 1 -> true, meet -> &, complement -> ~, [1] -> [u], [2] -> [].
Formula term_to_formula(const Term& t);
// Inverse of term_to_formula. Sugar is desugared first and false becomes ~1.
// Throws LanguageMismatch on nominals and [h].
Term formula_to_term(const Formula& f);

// lhs <-> rhs under the translation.
Formula unification_instance(const Equation& e);
// s -> t under the translation.
Formula inequality_formula(const Inequality& q);

// [1]x <= [2]x, [1]x <= x, [1]x <= [1][1]x, x <= [1]~[1]~x, with x = x1.
std::vector<Inequality> theory_t();

// Terms use `x<k>`, `1`, `~`, `&`, `[1]`, `[2]` and parentheses; an equation
// is `term = term`.
Term parse_term(std::string_view text);
Equation parse_equation(std::string_view text);
std::string to_string(const Term& t);
std::string to_string(const Equation& e);

}  // namespace modunif
