#include <cctype>
#include <ostream>
#include <sstream>

#include "modunif/error.hpp"
#include "modunif/formula.hpp"

namespace modunif {

namespace {

enum class Tok {
  Not,
  And,
  Or,
  Implies,
  Iff,
  Box,
  Diamond,
  True,
  False,
  Var,
  Nominal,
  LParen,
  RParen,
  End,
};

struct Token {
  Tok kind;
  std::size_t pos;
  Modality modality = Modality::Rel;
  int index = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= text_.size()) return {Tok::End, start};
    auto rest = text_.substr(pos_);
    auto take = [&](std::size_t n, Tok k, Modality m = Modality::Rel) {
      pos_ += n;
      return Token{k, start, m};
    };
    if (rest.starts_with("<->")) return take(3, Tok::Iff);
    if (rest.starts_with("->")) return take(2, Tok::Implies);
    if (rest.starts_with("[]")) return take(2, Tok::Box, Modality::Rel);
    if (rest.starts_with("<>")) return take(2, Tok::Diamond, Modality::Rel);
    if (rest.starts_with("[u]")) return take(3, Tok::Box, Modality::Univ);
    if (rest.starts_with("<u>")) return take(3, Tok::Diamond, Modality::Univ);
    if (rest.starts_with("[h]")) return take(3, Tok::Box, Modality::Hyb);
    if (rest.starts_with("<h>")) return take(3, Tok::Diamond, Modality::Hyb);
    switch (rest[0]) {
      case '~':
        return take(1, Tok::Not);
      case '&':
        return take(1, Tok::And);
      case '|':
        return take(1, Tok::Or);
      case '(':
        return take(1, Tok::LParen);
      case ')':
        return take(1, Tok::RParen);
      default:
        break;
    }
    if (std::isalpha(static_cast<unsigned char>(rest[0]))) {
      std::size_t n = 0;
      while (n < rest.size() && std::isalnum(static_cast<unsigned char>(rest[n]))) ++n;
      std::string_view word = rest.substr(0, n);
      if (word == "true") return take(n, Tok::True);
      if (word == "false") return take(n, Tok::False);
      if ((word[0] == 'p' || word[0] == 'n') && word.size() > 1) {
        long value = 0;
        bool digits = true;
        for (char c : word.substr(1)) {
          if (!std::isdigit(static_cast<unsigned char>(c))) {
            digits = false;
            break;
          }
          value = value * 10 + (c - '0');
          if (value > 1'000'000'000) throw SyntaxError(start, "a symbol index below 10^9");
        }
        if (digits) {
          if (value < 1) throw SyntaxError(start + 1, "an index >= 1");
          Token t = take(n, word[0] == 'p' ? Tok::Var : Tok::Nominal);
          t.index = static_cast<int>(value);
          return t;
        }
      }
    }
    throw SyntaxError(start, "a formula token");
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  Parser(std::string_view text, std::optional<Language> lang) : lexer_(text), lang_(lang) { advance(); }

  Formula parse() {
    Formula f = parse_iff();
    if (cur_.kind != Tok::End) throw SyntaxError(cur_.pos, "end of input");
    return f;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  Formula parse_iff() {
    Formula lhs = parse_imp();
    if (cur_.kind == Tok::Iff) {
      advance();
      return iff(lhs, parse_iff());
    }
    return lhs;
  }

  Formula parse_imp() {
    Formula lhs = parse_or();
    if (cur_.kind == Tok::Implies) {
      advance();
      return implies(lhs, parse_imp());
    }
    return lhs;
  }

  Formula parse_or() {
    Formula acc = parse_and();
    while (cur_.kind == Tok::Or) {
      advance();
      acc = disj(acc, parse_and());
    }
    return acc;
  }

  Formula parse_and() {
    Formula acc = parse_unary();
    while (cur_.kind == Tok::And) {
      advance();
      acc = conj(acc, parse_unary());
    }
    return acc;
  }

  void check_modality(const Token& t) {
    if (!lang_) return;
    if (*lang_ == Language::L && t.modality == Modality::Hyb) throw LanguageError("[h]/<h> is not in L");
    if (*lang_ == Language::H2 && t.modality == Modality::Univ) throw LanguageError("[u]/<u> is not in H2");
  }

  Formula parse_unary() {
    Token t = cur_;
    switch (t.kind) {
      case Tok::Not:
        advance();
        return neg(parse_unary());
      case Tok::Box:
        check_modality(t);
        advance();
        return box(t.modality, parse_unary());
      case Tok::Diamond:
        check_modality(t);
        advance();
        return diamond(t.modality, parse_unary());
      default:
        return parse_atom();
    }
  }

  Formula parse_atom() {
    Token t = cur_;
    switch (t.kind) {
      case Tok::True:
        advance();
        return Formula::top();
      case Tok::False:
        advance();
        return Formula::bot();
      case Tok::Var:
        advance();
        return Formula::var(t.index);
      case Tok::Nominal:
        if (lang_ && *lang_ == Language::L)
          throw LanguageError("nominal n" + std::to_string(t.index) + " is not in L");
        advance();
        return Formula::nominal(t.index);
      case Tok::LParen: {
        advance();
        Formula f = parse_iff();
        if (cur_.kind != Tok::RParen) throw SyntaxError(cur_.pos, "')'");
        advance();
        return f;
      }
      default:
        throw SyntaxError(t.pos, "an atom, unary operator or '('");
    }
  }

  Lexer lexer_;
  std::optional<Language> lang_;
  Token cur_{Tok::End, 0};
};

// Binding strength; larger binds tighter.
constexpr int kIff = 1;
constexpr int kImp = 2;
constexpr int kOr = 3;
constexpr int kAnd = 4;
constexpr int kUnary = 5;

const char* box_token(Modality m) {
  switch (m) {
    case Modality::Rel:
      return "[]";
    case Modality::Univ:
      return "[u]";
    case Modality::Hyb:
      return "[h]";
  }
  return "?";
}

const char* diamond_token(Modality m) {
  switch (m) {
    case Modality::Rel:
      return "<>";
    case Modality::Univ:
      return "<u>";
    case Modality::Hyb:
      return "<h>";
  }
  return "?";
}

void print(const Formula& f, int min_prec, std::string& out) {
  auto binary = [&](int prec, int lprec, int rprec, const char* op) {
    bool parens = prec < min_prec;
    if (parens) out += '(';
    print(f.lhs(), lprec, out);
    out += op;
    print(f.rhs(), rprec, out);
    if (parens) out += ')';
  };
  switch (f.kind()) {
    case Kind::Var:
      out += 'p';
      out += std::to_string(f.index());
      return;
    case Kind::Nominal:
      out += 'n';
      out += std::to_string(f.index());
      return;
    case Kind::Top:
      out += "true";
      return;
    case Kind::Bot:
      out += "false";
      return;
    case Kind::Not:
      out += '~';
      print(f.child(), kUnary, out);
      return;
    case Kind::Box:
      out += box_token(f.modality());
      print(f.child(), kUnary, out);
      return;
    case Kind::Diamond:
      out += diamond_token(f.modality());
      print(f.child(), kUnary, out);
      return;
    case Kind::And:
      binary(kAnd, kAnd, kAnd + 1, " & ");
      return;
    case Kind::Or:
      binary(kOr, kOr, kOr + 1, " | ");
      return;
    case Kind::Implies:
      binary(kImp, kImp + 1, kImp, " -> ");
      return;
    case Kind::Iff:
      binary(kIff, kIff + 1, kIff, " <-> ");
      return;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Formula parse_formula(std::string_view text, Language lang) { return Parser(text, lang).parse(); }

Formula parse_formula_any(std::string_view text) { return Parser(text, std::nullopt).parse(); }

std::string to_string(const Formula& f) {
  std::string out;
  print(f, 0, out);
  return out;
}

std::ostream& operator<<(std::ostream& os, const Formula& f) { return os << to_string(f); }

std::string to_string(const Substitution& s) {
  std::string out;
  for (const auto& [v, f] : s.entries()) {
    out += 'p' + std::to_string(v) + " := " + to_string(f) + '\n';
  }
  return out;
}

Substitution parse_substitution(std::string_view text, Language lang) {
  Substitution s;
  std::size_t offset = 0;
  while (offset <= text.size()) {
    std::size_t eol = text.find('\n', offset);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = trim(text.substr(offset, eol - offset));
    const std::size_t line_start = offset;
    offset = eol + 1;
    if (line.empty() || line[0] == '#') continue;
    std::size_t sep = line.find(":=");
    if (sep == std::string_view::npos) throw SyntaxError(line_start, "'p<k> := <formula>'");
    std::string_view lhs = trim(line.substr(0, sep));
    Formula var = parse_formula(lhs, lang);
    if (var.kind() != Kind::Var) throw SyntaxError(line_start, "a variable left of ':='");
    if (s.contains(var.index())) throw SyntaxError(line_start, "each variable bound once");
    s.set(var.index(), parse_formula(line.substr(sep + 2), lang));
  }
  return s;
}

}  // namespace modunif
