#include "modunif/minsky.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "modunif/error.hpp"

namespace modunif {

Program::Program(const std::vector<Instruction>& instrs) {
  for (const auto& ins : instrs) add(ins);
}

void Program::add(const Instruction& ins) {
  if (ins.from < 0 || ins.to < 0 || (ins.is_dec() && ins.zero_to < 0))
    throw Error("states must be nonnegative: " + to_string(ins));
  if (by_state_.count(ins.from)) throw DeterminismError(ins.from);
  by_state_[ins.from] = instrs_.size();
  instrs_.push_back(ins);
}

const Instruction* Program::find(long state) const {
  auto it = by_state_.find(state);
  return it == by_state_.end() ? nullptr : &instrs_[it->second];
}

long Program::max_state() const noexcept {
  long m = 0;
  for (const auto& ins : instrs_) m = std::max({m, ins.from, ins.to, ins.is_dec() ? ins.zero_to : 0L});
  return m;
}

namespace {

class Cursor {
 public:
  Cursor(std::string_view text, std::size_t base) : text_(text), base_(base) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }
  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_).starts_with(tok)) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view tok) {
    if (!accept(tok)) throw SyntaxError(where(), "'" + std::string(tok) + "'");
  }
  long number() {
    skip_ws();
    std::size_t start = pos_;
    long v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + (text_[pos_] - '0');
      if (v > 1'000'000'000'000L) throw SyntaxError(base_ + start, "a smaller number");
      ++pos_;
    }
    if (pos_ == start) throw SyntaxError(base_ + start, "a nonnegative integer");
    return v;
  }
  // "+1", "-1" or "0"
  int delta() {
    if (accept("+1")) return 1;
    if (accept("-1")) return -1;
    if (accept("0")) return 0;
    throw SyntaxError(where(), "'+1', '-1' or '0'");
  }
  std::size_t where() const { return base_ + pos_; }

 private:
  std::string_view text_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

Instruction parse_instruction(std::string_view line, std::size_t base) {
  Cursor c(line, base);
  Instruction ins;
  ins.from = c.number();
  c.expect("->");
  ins.to = c.number();
  c.expect(",");
  std::size_t delta_pos = c.where();
  int d1 = c.delta();
  c.expect(",");
  int d2 = c.delta();
  if ((d1 != 0) == (d2 != 0)) throw SyntaxError(delta_pos, "exactly one nonzero counter delta");
  ins.op = d1 == 1 ? Op::Inc1 : d1 == -1 ? Op::Dec1 : d2 == 1 ? Op::Inc2 : Op::Dec2;
  if (ins.is_dec()) {
    c.expect("|");
    ins.zero_to = c.number();
    c.expect(",");
    c.expect("0");
    c.expect(",");
    c.expect("0");
  } else if (!c.at_end() && c.accept("|")) {
    throw SyntaxError(c.where(), "no zero branch on an increment");
  }
  if (!c.at_end()) throw SyntaxError(c.where(), "end of instruction");
  return ins;
}

}  // namespace

Program parse_program(std::string_view text) {
  Program p;
  std::size_t offset = 0;
  while (offset <= text.size()) {
    std::size_t eol = text.find_first_of("\n;", offset);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(offset, eol - offset);
    std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) p.add(parse_instruction(line, offset));
    offset = eol + 1;
  }
  return p;
}

Config parse_config(std::string_view text) {
  Cursor c(text, 0);
  Config cfg;
  cfg.state = c.number();
  c.expect(",");
  cfg.c1 = c.number();
  c.expect(",");
  cfg.c2 = c.number();
  if (!c.at_end()) throw SyntaxError(c.where(), "end of configuration");
  return cfg;
}

std::string to_string(const Config& c) {
  return std::to_string(c.state) + ',' + std::to_string(c.c1) + ',' + std::to_string(c.c2);
}

std::string to_string(const Instruction& ins) {
  std::string out = std::to_string(ins.from) + " -> " + std::to_string(ins.to) + ',';
  switch (ins.op) {
    case Op::Inc1:
      return out + "+1,0";
    case Op::Inc2:
      return out + "0,+1";
    case Op::Dec1:
      return out + "-1,0 | " + std::to_string(ins.zero_to) + ",0,0";
    case Op::Dec2:
      return out + "0,-1 | " + std::to_string(ins.zero_to) + ",0,0";
  }
  return out;
}

std::string to_string(const Program& p) {
  std::string out;
  for (const auto& ins : p.instructions()) out += to_string(ins) + '\n';
  return out;
}

std::optional<Config> step(const Program& p, const Config& c) {
  const Instruction* ins = p.find(c.state);
  if (!ins) return std::nullopt;
  Config n = c;
  switch (ins->op) {
    case Op::Inc1:
      n = {ins->to, c.c1 + 1, c.c2};
      break;
    case Op::Inc2:
      n = {ins->to, c.c1, c.c2 + 1};
      break;
    case Op::Dec1:
      n = c.c1 > 0 ? Config{ins->to, c.c1 - 1, c.c2} : Config{ins->zero_to, c.c1, c.c2};
      break;
    case Op::Dec2:
      n = c.c2 > 0 ? Config{ins->to, c.c1, c.c2 - 1} : Config{ins->zero_to, c.c1, c.c2};
      break;
  }
  return n;
}

Run run_trace(const Program& p, const Config& start, long bound) {
  if (bound < 0) throw Error("bound must be >= 0");
  if (start.state < 0 || start.c1 < 0 || start.c2 < 0) throw Error("configuration components must be >= 0");
  Run run;
  run.configs.push_back(start);
  std::set<Config> seen{start};
  while (true) {
    const Config& cur = run.configs.back();
    std::optional<Config> next = step(p, cur);
    if (!next) {
      run.end = RunEnd::Halted;
      return run;
    }
    if (seen.count(*next)) {
      run.end = RunEnd::Looped;
      return run;
    }
    if (static_cast<long>(run.instrs.size()) >= bound) {
      run.end = RunEnd::Bounded;
      return run;
    }
    run.instrs.push_back(*p.find(cur.state));
    run.configs.push_back(*next);
    seen.insert(*next);
  }
}

ReachResult reaches(const Program& p, const Config& a, const Config& b, long bound) {
  ReachResult r;
  r.trace = run_trace(p, a, bound);
  auto it = std::find(r.trace.configs.begin(), r.trace.configs.end(), b);
  if (it != r.trace.configs.end()) {
    std::size_t len = static_cast<std::size_t>(it - r.trace.configs.begin());
    r.trace.configs.resize(len + 1);
    r.trace.instrs.resize(len);
    r.verdict = Reach::Yes;
  } else {
    r.verdict = r.trace.end == RunEnd::Bounded ? Reach::Unknown : Reach::No;
  }
  return r;
}

}  // namespace modunif
