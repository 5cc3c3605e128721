#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modunif/formula.hpp"

namespace modunif {

using Edge = std::pair<int, int>;

// Finite frame over named points. R always exists; S exists iff the frame is
// hybrid (language H2). Edges are stored by point index.
class Frame {
 public:
  Frame() = default;
  Frame(std::vector<std::string> points, std::set<Edge> r, std::optional<std::set<Edge>> s = std::nullopt);

  static Frame from_names(std::vector<std::string> points, const std::vector<std::pair<std::string, std::string>>& r,
                          const std::optional<std::vector<std::pair<std::string, std::string>>>& s = std::nullopt);

  Language language() const noexcept { return s_ ? Language::H2 : Language::L; }
  bool hybrid() const noexcept { return s_.has_value(); }
  int size() const noexcept { return static_cast<int>(points_.size()); }

  const std::vector<std::string>& points() const noexcept { return points_; }
  const std::string& name(int x) const { return points_.at(x); }
  // Throws UnknownPoint.
  int index_of(std::string_view name) const;
  std::optional<int> find(std::string_view name) const;

  const std::set<Edge>& r() const noexcept { return r_; }
  const std::optional<std::set<Edge>>& s() const noexcept { return s_; }
  // Successors of x along [] (Rel) or [h] (Hyb). Univ is not a relation here.
  const std::vector<int>& successors(Modality m, int x) const;
  bool has_edge(Modality m, int x, int y) const;

  friend bool operator==(const Frame& a, const Frame& b) {
    return a.points_ == b.points_ && a.r_ == b.r_ && a.s_ == b.s_;
  }

 private:
  std::vector<std::string> points_;
  std::map<std::string, int, std::less<>> index_;
  std::set<Edge> r_;
  std::optional<std::set<Edge>> s_;
  std::vector<std::vector<int>> r_succ_;
  std::vector<std::vector<int>> s_succ_;
};

// Names may not contain whitespace or any of , { } = #.
bool valid_point_name(std::string_view name);

struct Valuation {
  std::map<int, std::set<int>> vars;  // variable index -> points
  std::map<int, int> noms;            // nominal index -> point

  friend bool operator==(const Valuation&, const Valuation&) = default;
};

class Model {
 public:
  // Throws UnknownPoint if the valuation mentions a point outside the frame.
  Model(Frame frame, Valuation valuation);

  const Frame& frame() const noexcept { return frame_; }
  const Valuation& valuation() const noexcept { return valuation_; }

 private:
  Frame frame_;
  Valuation valuation_;
};

// Truth of f at point x. Throws UnknownPoint, UnboundSymbol, LanguageMismatch.
bool model_check(const Model& m, int x, const Formula& f);
bool model_check(const Model& m, std::string_view x, const Formula& f);
// Truth of f at every point, indexed like frame().points().
std::vector<bool> extension(const Model& m, const Formula& f);

struct CounterModel {
  Valuation valuation;
  int point = 0;
};

struct FrameValidity {
  std::optional<CounterModel> counter;  // empty iff valid
  bool valid() const noexcept { return !counter.has_value(); }
};

struct FrameValidOptions {
  // Clause count above which ResourceLimit is thrown; 0 means unlimited.
  std::size_t clause_budget = 20'000'000;
  std::uint64_t conflict_budget = 0;
};

// Decides validity through a propositional encoding. A returned counter model
// has been re-checked with model_check.
FrameValidity frame_valid(const Frame& frame, const Formula& f, const FrameValidOptions& opts = {});

struct RandomFrameOptions {
  // H2 only: use S = W x W instead of a random S.
  bool full_s = false;
};

// Deterministic in (seed, max_points, kind, transitive, options). Points are w0, w1, ...
Frame random_frame(std::uint64_t seed, int max_points, Language kind, bool transitive,
                   const RandomFrameOptions& opts = {});

template <class T>
std::set<std::pair<T, T>> transitive_closure(const std::set<std::pair<T, T>>& rel) {
  std::map<T, std::set<T>> succ;
  for (const auto& [x, y] : rel) succ[x].insert(y);
  std::set<std::pair<T, T>> out;
  for (const auto& entry : succ) {
    const T& x = entry.first;
    std::set<T> seen;
    std::vector<T> todo(entry.second.begin(), entry.second.end());
    while (!todo.empty()) {
      T y = todo.back();
      todo.pop_back();
      if (!seen.insert(y).second) continue;
      auto it = succ.find(y);
      if (it != succ.end())
        for (const T& z : it->second) todo.push_back(z);
    }
    for (const T& y : seen) out.insert({x, y});
  }
  return out;
}

template <class T>
bool is_transitive(const std::set<std::pair<T, T>>& rel) {
  return transitive_closure(rel) == rel;
}

// Frame text:
//   points: a b c
//   R: a b
//   S: a a            (any S line makes the frame hybrid)
//   kind: H2          (optional; forces a hybrid frame even with no S edges)
//   label: a <text>   (free-form annotation, kept in FrameDocument)
//   # comment
struct FrameDocument {
  Frame frame;
  std::map<std::string, std::string> labels;
};

FrameDocument parse_frame_document(std::string_view text);
Frame parse_frame(std::string_view text);
std::string to_text(const Frame& frame, const std::map<std::string, std::string>& labels = {});

// `p1 = {a, c}` and `n1 = b`, one per line.
std::string to_text(const Frame& frame, const Valuation& v);
Valuation parse_valuation(std::string_view text, const Frame& frame);

}  // namespace modunif
