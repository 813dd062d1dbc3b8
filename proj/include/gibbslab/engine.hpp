#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gibbslab/interaction.hpp"
#include "gibbslab/lattice.hpp"

namespace gibbslab {

enum class EngineKind { Enum, Strip };

std::string engine_name(EngineKind k);
EngineKind parse_engine(const std::string& text);

// Boundary condition of a finite window: free (translates crossing the window
// edge are dropped) or a frozen pattern read lazily outside the window.
class Boundary {
 public:
  static Boundary free() { return Boundary(); }
  static Boundary of(Pattern p) {
    Boundary b;
    b.pat_ = std::move(p);
    return b;
  }
  static Boundary parse(const std::string& text) {
    if (text == "free") return free();
    return of(Pattern::parse(text));
  }

  bool is_free() const { return !pat_.has_value(); }
  const Pattern& pattern() const {
    if (!pat_) throw Error("boundary is free; no pattern attached");
    return *pat_;
  }
  std::string name() const { return pat_ ? pat_->name() : "free"; }

 private:
  std::optional<Pattern> pat_;
};

struct EngineLimits {
  std::uint64_t max_enum_states = 1ull << 24;
  std::uint64_t max_strip_states = 1ull << 14;
};

// A fully specified finite-window weighted sum: Boltzmann weights of phi over
// the window (boundary handled per the rule above), optional per-site
// log-emission factors, and optional hard-fixed sites. The free sites are
// summed over.
struct LayerProblem {
  const Interaction* phi = nullptr;
  Volume window;
  Boundary boundary = Boundary::free();
  std::vector<std::int8_t> fixed;                 // window-aligned; -1 = free
  std::vector<std::vector<double>> log_emission;  // window-aligned; empty = none

  LayerProblem() = default;
  LayerProblem(const Interaction& phi_, Volume window_, Boundary boundary_);

  void fix(const Site& s, int symbol);
  void add_log_emission(const Site& s, const std::vector<double>& logw);
};

// log of the sum over all free-site assignments of
//   exp(-energy + sum of emissions).
// Deterministic: the summation tree is fixed, independent of engine internals.
double log_weight_sum(const LayerProblem& p, EngineKind kind, const EngineLimits& limits = {});

// Joint log-weights over assignments of the target sites (window indices into
// p.window; they must be free), with all other free sites summed out. Only
// the interaction component connected to the targets through free sites is
// evaluated; factors independent of the targets cancel after normalization
// and are dropped, which keeps conditionals of Markov models exactly local.
std::vector<double> target_log_weights(const LayerProblem& p, const std::vector<int>& target_idx,
                                       EngineKind kind, const EngineLimits& limits = {});

// normalize log-weights into probabilities (stable; throws if all -inf)
std::vector<double> normalize_log_weights(const std::vector<double>& logw);

}  // namespace gibbslab
