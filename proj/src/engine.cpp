#include "gibbslab/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace gibbslab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Balanced pairwise summation (binary counter). For 2^k addends the reduction
// tree is perfect, which makes the total invariant under reversing the input
// sequence; spin-flip symmetries of h=0 models then hold bit-for-bit.
class PairwiseSum {
 public:
  void add(double x) {
    std::size_t k = 0;
    while (k < slots_.size() && occupied_[k]) {
      x += slots_[k];
      occupied_[k] = false;
      ++k;
    }
    if (k == slots_.size()) {
      slots_.push_back(x);
      occupied_.push_back(true);
    } else {
      slots_[k] = x;
      occupied_[k] = true;
    }
  }
  double total() const {
    double s = 0;
    for (std::size_t k = 0; k < slots_.size(); ++k)
      if (occupied_[k]) s += slots_[k];
    return s;
  }

 private:
  std::vector<double> slots_;
  std::vector<bool> occupied_;
};

struct Translate {
  const std::vector<double>* table;
  std::vector<int> widx;            // window index per shape site, -1 outside
  std::vector<std::uint8_t> bsym;   // boundary symbol index where outside
};

struct Compiled {
  int q = 2;
  std::vector<Translate> translates;
  std::vector<int> free_idx;                                     // ascending window indices
  std::vector<std::uint8_t> state;                               // window-aligned digits
  std::vector<std::pair<int, const std::vector<double>*>> emissions;
};

void validate(const LayerProblem& p) {
  if (!p.phi) throw Error("layer problem has no interaction");
  if (p.phi->dim() != p.window.dim()) throw Error("interaction and window dimensions differ");
  if (p.fixed.size() != static_cast<std::size_t>(p.window.size()) ||
      p.log_emission.size() != static_cast<std::size_t>(p.window.size()))
    throw Error("layer problem site arrays not aligned with window");
}

Compiled compile(const LayerProblem& p) {
  Compiled c;
  const Alphabet& ab = p.phi->alphabet();
  c.q = ab.size();
  c.state.assign(static_cast<std::size_t>(p.window.size()), 0);
  for (int i = 0; i < p.window.size(); ++i) {
    std::int8_t f = p.fixed[static_cast<std::size_t>(i)];
    if (f >= 0)
      c.state[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(f);
    else
      c.free_idx.push_back(i);
    const auto& em = p.log_emission[static_cast<std::size_t>(i)];
    if (!em.empty()) {
      if (em.size() != static_cast<std::size_t>(c.q)) throw Error("emission table size mismatch");
      c.emissions.push_back({i, &em});
    }
  }
  for (const InteractionTerm& term : p.phi->terms()) {
    std::set<Site> offsets;
    for (const Site& y : p.window.sites())
      for (const Site& s : term.shape) offsets.insert(y - s);
    for (const Site& off : offsets) {
      Translate tr;
      tr.table = &term.table;
      bool spills = false;
      for (const Site& s : term.shape) {
        Site z = s + off;
        int wi = p.window.index_of(z);
        tr.widx.push_back(wi);
        if (wi < 0) {
          spills = true;
          if (!p.boundary.is_free())
            tr.bsym.push_back(static_cast<std::uint8_t>(ab.index_of(p.boundary.pattern().value(z))));
          else
            tr.bsym.push_back(0);
        } else {
          tr.bsym.push_back(0);
        }
      }
      if (spills && p.boundary.is_free()) continue;  // free boundary keeps fully interior translates only
      c.translates.push_back(std::move(tr));
    }
  }
  return c;
}

inline double state_log_weight(const Compiled& c) {
  double e = 0;
  for (const Translate& t : c.translates) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < t.widx.size(); ++k) {
      int wi = t.widx[k];
      std::uint8_t d = wi >= 0 ? c.state[static_cast<std::size_t>(wi)] : t.bsym[k];
      idx = idx * static_cast<std::size_t>(c.q) + d;
    }
    e += (*t.table)[idx];
  }
  double lw = -e;
  for (const auto& [wi, tab] : c.emissions) lw += (*tab)[c.state[static_cast<std::size_t>(wi)]];
  return lw;
}

inline void reset_free(Compiled& c) {
  for (int wi : c.free_idx) c.state[static_cast<std::size_t>(wi)] = 0;
}

// next assignment in index order (last free site least significant)
inline bool advance(Compiled& c) {
  for (int k = static_cast<int>(c.free_idx.size()) - 1; k >= 0; --k) {
    std::uint8_t& d = c.state[static_cast<std::size_t>(c.free_idx[static_cast<std::size_t>(k)])];
    if (++d < c.q) return true;
    d = 0;
  }
  return false;
}

std::uint64_t count_states(int q, std::size_t k, std::uint64_t limit, const char* what) {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (n > limit / static_cast<std::uint64_t>(q))
      throw CapacityError(std::string(what) + " needs more than " + std::to_string(limit) + " states");
    n *= static_cast<std::uint64_t>(q);
  }
  if (n > limit)
    throw CapacityError(std::string(what) + " needs " + std::to_string(n) + " states, limit " + std::to_string(limit));
  return n;
}

double enum_log_sum(Compiled& c, const EngineLimits& limits) {
  count_states(c.q, c.free_idx.size(), limits.max_enum_states, "enumeration");
  reset_free(c);
  double maxlw = kNegInf;
  do {
    double lw = state_log_weight(c);
    if (lw > maxlw) maxlw = lw;
  } while (advance(c));
  if (maxlw == kNegInf) return kNegInf;

  reset_free(c);
  PairwiseSum acc;
  do {
    acc.add(std::exp(state_log_weight(c) - maxlw));
  } while (advance(c));
  return maxlw + std::log(acc.total());
}

// ---------------------------------------------------------------------------
// strip engine: transfer-matrix sweep along axis 0, column state = joint
// assignment of the cross-section; needs a full rectangle and a
// nearest-neighbor interaction.

struct StripPlan {
  int q = 2;
  int ncols = 0;
  int h = 0;
  std::uint64_t states = 0;
  std::vector<double> powq;                   // q^(h-1-i) strides as size_t
  std::vector<std::uint64_t> stride;          // per local site
  std::vector<double> site_log;               // q per symbol: merged singleton tables
  std::vector<double> hbond;                  // q*q merged axis-0 pair energies
  bool has_hbond = false;
  struct VBond {
    int i, j;                                 // local indices within a column
    const std::vector<double>* table;
  };
  std::vector<VBond> vbonds;
  // vertical bonds leaving the column through the window edge, resolved per
  // column against the boundary pattern: (local index, axis, direction)
  struct VEdge {
    int i;
    int axis;
    int dir;                                  // +1: (site, out), -1: (out, site)
    const std::vector<double>* table;
  };
  std::vector<VEdge> vedges;
  const std::vector<double>* htable = nullptr;  // axis-0 pair table (merged below)
  std::vector<double> hmerged;
};

StripPlan make_strip_plan(const LayerProblem& p, const EngineLimits& limits) {
  if (!p.window.is_rect()) throw Error("strip engine needs a full rectangular window");
  if (!p.phi->nearest_neighbor()) throw Error("strip engine needs a nearest-neighbor interaction");
  StripPlan sp;
  const Alphabet& ab = p.phi->alphabet();
  sp.q = ab.size();
  sp.ncols = p.window.extent(0);
  sp.h = p.window.size() / sp.ncols;
  sp.states = count_states(sp.q, static_cast<std::size_t>(sp.h), limits.max_strip_states, "strip cross-section");

  sp.stride.assign(static_cast<std::size_t>(sp.h), 1);
  for (int i = sp.h - 2; i >= 0; --i)
    sp.stride[static_cast<std::size_t>(i)] = sp.stride[static_cast<std::size_t>(i + 1)] * static_cast<std::uint64_t>(sp.q);

  sp.site_log.assign(static_cast<std::size_t>(sp.q), 0.0);
  sp.hmerged.assign(static_cast<std::size_t>(sp.q * sp.q), 0.0);
  for (const InteractionTerm& t : p.phi->terms()) {
    if (t.shape.size() == 1) {
      for (int s = 0; s < sp.q; ++s) sp.site_log[static_cast<std::size_t>(s)] -= t.table[static_cast<std::size_t>(s)];
      continue;
    }
    int axis = -1;
    for (int a = 0; a < p.window.dim(); ++a)
      if (t.shape[1] == Site::unit(a)) axis = a;
    if (axis == 0) {
      sp.has_hbond = true;
      for (std::size_t k = 0; k < t.table.size(); ++k) sp.hmerged[k] += t.table[k];
      continue;
    }
    // cross-section bond: same local layout in every column
    for (int i = 0; i < sp.h; ++i) {
      Site z = p.window.site(i) + Site::unit(axis);
      int wj = p.window.index_of(z);
      if (wj >= 0 && wj < sp.h) {
        sp.vbonds.push_back({i, wj, &t.table});
      } else {
        sp.vedges.push_back({i, axis, +1, &t.table});
      }
      Site z2 = p.window.site(i) - Site::unit(axis);
      if (p.window.index_of(z2) < 0) sp.vedges.push_back({i, axis, -1, &t.table});
    }
  }
  return sp;
}

double strip_log_sum(const LayerProblem& p, const EngineLimits& limits) {
  StripPlan sp = make_strip_plan(p, limits);
  const Alphabet& ab = p.phi->alphabet();
  const std::uint64_t states = sp.states;
  const int q = sp.q, h = sp.h;

  std::vector<double> B(static_cast<std::size_t>(q * q), 1.0);
  if (sp.has_hbond)
    for (int s = 0; s < q; ++s)
      for (int t = 0; t < q; ++t)
        B[static_cast<std::size_t>(s * q + t)] = std::exp(-sp.hmerged[static_cast<std::size_t>(s * q + t)]);

  std::vector<double> v(states, 1.0);
  double logshift = 0;
  std::vector<double> col_log(static_cast<std::size_t>(h * q));
  std::vector<double> tmp(static_cast<std::size_t>(q));

  for (int j = 0; j < sp.ncols; ++j) {
    if (j > 0 && sp.has_hbond) {
      // contract each local row with the horizontal bond matrix
      for (int i = 0; i < h; ++i) {
        std::uint64_t stride = sp.stride[static_cast<std::size_t>(i)];
        std::uint64_t outer = states / (stride * static_cast<std::uint64_t>(q));
        for (std::uint64_t hi = 0; hi < outer; ++hi) {
          std::uint64_t base0 = hi * stride * static_cast<std::uint64_t>(q);
          for (std::uint64_t lo = 0; lo < stride; ++lo) {
            std::uint64_t base = base0 + lo;
            for (int s = 0; s < q; ++s) tmp[static_cast<std::size_t>(s)] = v[base + static_cast<std::uint64_t>(s) * stride];
            for (int t = 0; t < q; ++t) {
              double acc = 0;
              for (int s = 0; s < q; ++s) acc += tmp[static_cast<std::size_t>(s)] * B[static_cast<std::size_t>(s * q + t)];
              v[base + static_cast<std::uint64_t>(t) * stride] = acc;
            }
          }
        }
      }
    }

    // per-site log factors for this column
    for (int i = 0; i < h; ++i) {
      int wi = j * h + i;
      const Site& z = p.window.site(wi);
      for (int s = 0; s < q; ++s) col_log[static_cast<std::size_t>(i * q + s)] = sp.site_log[static_cast<std::size_t>(s)];
      const auto& em = p.log_emission[static_cast<std::size_t>(wi)];
      if (!em.empty())
        for (int s = 0; s < q; ++s) col_log[static_cast<std::size_t>(i * q + s)] += em[static_cast<std::size_t>(s)];
      std::int8_t f = p.fixed[static_cast<std::size_t>(wi)];
      if (f >= 0)
        for (int s = 0; s < q; ++s)
          if (s != f) col_log[static_cast<std::size_t>(i * q + s)] = kNegInf;
      if (!p.boundary.is_free()) {
        for (const StripPlan::VEdge& e : sp.vedges) {
          if (e.i != i) continue;
          Site out = e.dir > 0 ? z + Site::unit(e.axis) : z - Site::unit(e.axis);
          int bs = ab.index_of(p.boundary.pattern().value(out));
          for (int s = 0; s < q; ++s) {
            std::size_t idx = e.dir > 0 ? static_cast<std::size_t>(s * q + bs) : static_cast<std::size_t>(bs * q + s);
            col_log[static_cast<std::size_t>(i * q + s)] -= (*e.table)[idx];
          }
        }
        if (sp.has_hbond && j == 0) {
          Site out = z - Site::unit(0);
          int bs = ab.index_of(p.boundary.pattern().value(out));
          for (int s = 0; s < q; ++s)
            col_log[static_cast<std::size_t>(i * q + s)] -= sp.hmerged[static_cast<std::size_t>(bs * q + s)];
        }
        if (sp.has_hbond && j == sp.ncols - 1) {
          Site out = z + Site::unit(0);
          int bs = ab.index_of(p.boundary.pattern().value(out));
          for (int s = 0; s < q; ++s)
            col_log[static_cast<std::size_t>(i * q + s)] -= sp.hmerged[static_cast<std::size_t>(s * q + bs)];
        }
      }
    }

    // state-wise intra-column weight
    double intramax = kNegInf;
    std::vector<double> intra(states);
    for (std::uint64_t c = 0; c < states; ++c) {
      double lw = 0;
      for (int i = 0; i < h; ++i) {
        int d = static_cast<int>((c / sp.stride[static_cast<std::size_t>(i)]) % static_cast<std::uint64_t>(q));
        lw += col_log[static_cast<std::size_t>(i * q + d)];
      }
      for (const StripPlan::VBond& b : sp.vbonds) {
        int di = static_cast<int>((c / sp.stride[static_cast<std::size_t>(b.i)]) % static_cast<std::uint64_t>(q));
        int dj = static_cast<int>((c / sp.stride[static_cast<std::size_t>(b.j)]) % static_cast<std::uint64_t>(q));
        lw -= (*b.table)[static_cast<std::size_t>(di * q + dj)];
      }
      intra[c] = lw;
      if (lw > intramax) intramax = lw;
    }
    if (intramax == kNegInf) return kNegInf;
    for (std::uint64_t c = 0; c < states; ++c) v[c] *= std::exp(intra[c] - intramax);
    logshift += intramax;

    double vmax = 0;
    for (std::uint64_t c = 0; c < states; ++c) vmax = std::max(vmax, v[c]);
    if (vmax == 0) return kNegInf;
    for (std::uint64_t c = 0; c < states; ++c) v[c] /= vmax;
    logshift += std::log(vmax);
  }

  PairwiseSum acc;
  for (std::uint64_t c = 0; c < states; ++c) acc.add(v[c]);
  double total = acc.total();
  if (total == 0) return kNegInf;
  return logshift + std::log(total);
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

}  // namespace

LayerProblem::LayerProblem(const Interaction& phi_, Volume window_, Boundary boundary_)
    : phi(&phi_), window(std::move(window_)), boundary(std::move(boundary_)) {
  fixed.assign(static_cast<std::size_t>(window.size()), -1);
  log_emission.assign(static_cast<std::size_t>(window.size()), {});
}

void LayerProblem::fix(const Site& s, int symbol) {
  int i = window.index_of(s);
  if (i < 0) throw Error("fixed site " + s.str() + " not in window");
  fixed[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(phi->alphabet().index_of(symbol));
}

void LayerProblem::add_log_emission(const Site& s, const std::vector<double>& logw) {
  int i = window.index_of(s);
  if (i < 0) throw Error("emission site " + s.str() + " not in window");
  if (logw.size() != static_cast<std::size_t>(phi->alphabet().size())) throw Error("emission table size mismatch");
  auto& em = log_emission[static_cast<std::size_t>(i)];
  if (em.empty())
    em = logw;
  else
    for (std::size_t k = 0; k < em.size(); ++k) em[k] += logw[k];
}

std::string engine_name(EngineKind k) { return k == EngineKind::Enum ? "enum" : "strip"; }

EngineKind parse_engine(const std::string& text) {
  if (text == "enum") return EngineKind::Enum;
  if (text == "strip") return EngineKind::Strip;
  throw Error("unknown engine '" + text + "' (expected enum or strip)");
}

double log_weight_sum(const LayerProblem& p, EngineKind kind, const EngineLimits& limits) {
  validate(p);
  if (kind == EngineKind::Strip) return strip_log_sum(p, limits);
  Compiled c = compile(p);
  return enum_log_sum(c, limits);
}

std::vector<double> target_log_weights(const LayerProblem& p, const std::vector<int>& target_idx,
                                       EngineKind kind, const EngineLimits& limits) {
  validate(p);
  const int q = p.phi->alphabet().size();
  for (std::size_t a = 0; a < target_idx.size(); ++a) {
    int t = target_idx[a];
    if (t < 0 || t >= p.window.size()) throw Error("target index out of range");
    if (p.fixed[static_cast<std::size_t>(t)] >= 0) throw Error("target site is already conditioned");
    for (std::size_t b = a + 1; b < target_idx.size(); ++b)
      if (target_idx[b] == t) throw Error("duplicate target site");
  }
  std::uint64_t nassign = count_states(q, target_idx.size(), limits.max_enum_states, "target assignment space");

  Compiled c = compile(p);

  // connected components of free sites under the interaction graph
  UnionFind uf(p.window.size());
  for (const Translate& tr : c.translates) {
    int first = -1;
    for (int wi : tr.widx) {
      if (wi < 0 || p.fixed[static_cast<std::size_t>(wi)] >= 0) continue;
      if (first < 0)
        first = wi;
      else
        uf.unite(first, wi);
    }
  }
  std::vector<bool> in_comp(static_cast<std::size_t>(p.window.size()), false);
  for (int t : target_idx) {
    int root = uf.find(t);
    for (int wi : c.free_idx)
      if (uf.find(wi) == root) in_comp[static_cast<std::size_t>(wi)] = true;
  }
  std::vector<int> comp_free;
  for (int wi : c.free_idx)
    if (in_comp[static_cast<std::size_t>(wi)]) comp_free.push_back(wi);
  bool reduced = comp_free.size() < c.free_idx.size();

  std::vector<double> out(nassign);

  if (!reduced && kind == EngineKind::Strip) {
    // targets pinned per assignment, full window sweep
    LayerProblem sub = p;
    std::vector<std::uint8_t> assign(target_idx.size(), 0);
    for (std::uint64_t a = 0; a < nassign; ++a) {
      std::uint64_t rest = a;
      for (std::size_t k = target_idx.size(); k-- > 0;) {
        assign[k] = static_cast<std::uint8_t>(rest % static_cast<std::uint64_t>(q));
        rest /= static_cast<std::uint64_t>(q);
      }
      for (std::size_t k = 0; k < target_idx.size(); ++k)
        sub.fixed[static_cast<std::size_t>(target_idx[k])] = static_cast<std::int8_t>(assign[k]);
      out[a] = strip_log_sum(sub, limits);
    }
    return out;
  }

  // reduced enumeration: drop factors not connected to the targets
  Compiled rc;
  rc.q = c.q;
  rc.state = c.state;
  for (int wi : comp_free) {
    bool is_target = false;
    for (int t : target_idx)
      if (t == wi) is_target = true;
    if (!is_target) rc.free_idx.push_back(wi);
  }
  for (Translate& tr : c.translates) {
    bool keep = false;
    for (int wi : tr.widx)
      if (wi >= 0 && in_comp[static_cast<std::size_t>(wi)]) keep = true;
    if (keep) rc.translates.push_back(std::move(tr));
  }
  for (const auto& em : c.emissions)
    if (in_comp[static_cast<std::size_t>(em.first)]) rc.emissions.push_back(em);

  std::vector<std::uint8_t> assign(target_idx.size(), 0);
  for (std::uint64_t a = 0; a < nassign; ++a) {
    std::uint64_t rest = a;
    for (std::size_t k = target_idx.size(); k-- > 0;) {
      assign[k] = static_cast<std::uint8_t>(rest % static_cast<std::uint64_t>(q));
      rest /= static_cast<std::uint64_t>(q);
    }
    for (std::size_t k = 0; k < target_idx.size(); ++k)
      rc.state[static_cast<std::size_t>(target_idx[k])] = assign[k];
    out[a] = enum_log_sum(rc, limits);
  }
  return out;
}

std::vector<double> normalize_log_weights(const std::vector<double>& logw) {
  double m = kNegInf;
  for (double v : logw) m = std::max(m, v);
  if (m == kNegInf) throw Error("conditioning event has probability zero under the model");
  std::vector<double> p(logw.size());
  double z = 0;
  for (std::size_t i = 0; i < logw.size(); ++i) {
    p[i] = std::exp(logw[i] - m);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

}  // namespace gibbslab
