#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace modunif {

struct Config {
  long state = 0;
  long c1 = 0;
  long c2 = 0;

  friend auto operator<=>(const Config&, const Config&) = default;
};

enum class Op { Inc1, Inc2, Dec1, Dec2 };

struct Instruction {
  Op op = Op::Inc1;
  long from = 0;
  long to = 0;
  long zero_to = 0;  // decrements only: target when the counter is 0

  bool is_dec() const noexcept { return op == Op::Dec1 || op == Op::Dec2; }
  friend bool operator==(const Instruction&, const Instruction&) = default;
};

// Deterministic: at most one instruction per source state.
class Program {
 public:
  Program() = default;
  explicit Program(const std::vector<Instruction>& instrs);

  // Throws DeterminismError if `from` already has an instruction.
  void add(const Instruction& ins);
  const Instruction* find(long state) const;
  const std::vector<Instruction>& instructions() const noexcept { return instrs_; }
  bool empty() const noexcept { return instrs_.empty(); }
  std::size_t size() const noexcept { return instrs_.size(); }
  long max_state() const noexcept;

 private:
  std::vector<Instruction> instrs_;
  std::map<long, std::size_t> by_state_;
};

// One instruction per line (';' also separates): "1 -> 2,+1,0", "1 -> 2,-1,0 | 3,0,0".
Program parse_program(std::string_view text);
Config parse_config(std::string_view text);  // "s,m,n"

std::string to_string(const Config& c);
std::string to_string(const Instruction& ins);
std::string to_string(const Program& p);

// nullopt when no instruction applies (Halt).
std::optional<Config> step(const Program& p, const Config& c);

enum class RunEnd { Halted, Looped, Bounded };

// configs[0] is the start; instrs[j] takes configs[j] to configs[j+1].
struct Run {
  std::vector<Config> configs;
  std::vector<Instruction> instrs;
  RunEnd end = RunEnd::Bounded;

  std::size_t length() const noexcept { return instrs.size(); }
};

// At most `bound` steps. Halted and Looped are detected one step ahead, so a
// run of exactly `bound` steps still reports them.
Run run_trace(const Program& p, const Config& start, long bound);

enum class Reach { Yes, No, Unknown };

struct ReachResult {
  Reach verdict = Reach::Unknown;
  Run trace;  // for Yes: the prefix ending at the target; otherwise the whole run
};

ReachResult reaches(const Program& p, const Config& a, const Config& b, long bound);

}  // namespace modunif
