#include "gibbslab/specification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gibbslab/dynamics.hpp"

namespace gibbslab {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::uint64_t target_count(int q, std::size_t k) {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < k; ++i) n *= static_cast<std::uint64_t>(q);
  return n;
}
}  // namespace

ConditionalQuery& ConditionalQuery::condition_from(const Volume& vol, const Pattern& p,
                                                   const std::vector<Site>& except) {
  for (const Site& s : vol.sites()) {
    bool skip = false;
    for (const Site& e : except)
      if (e == s) skip = true;
    if (!skip) conditioning.push_back({s, p.value(s)});
  }
  return *this;
}

double log_partition_function(const Interaction& phi, const Volume& lambda, const Pattern& omega,
                              EngineKind engine) {
  LayerProblem p(phi, lambda, Boundary::of(omega));
  return log_weight_sum(p, engine);
}

double partition_function(const Interaction& phi, const Volume& lambda, const Pattern& omega,
                          EngineKind engine) {
  return std::exp(log_partition_function(phi, lambda, omega, engine));
}

double gamma(const Interaction& phi, const Volume& window, const ConditionalQuery& query, EngineKind engine) {
  Boundary b = query.boundary ? Boundary::of(*query.boundary) : Boundary::free();
  MeasureModel m = MeasureModel::gibbs(phi, window, b);
  ConditionalQuery q = query;
  q.boundary.reset();
  auto r = m.conditional(q, engine);
  return r->p;  // exact variants always produce a value
}

// ---------------------------------------------------------------------------
// pressure: power iteration on the (implicit) column transfer operator

namespace {

struct TransferOp {
  int q;
  int h;
  std::uint64_t states;
  std::vector<std::uint64_t> stride;
  std::vector<double> site_log;      // q
  std::vector<double> B;             // q*q horizontal bond weights
  bool has_hbond = false;
  struct VBond {
    int i, j;
    const std::vector<double>* table;
  };
  std::vector<VBond> vbonds;
  std::vector<double> intra;  // per-state cross-section weight (linear)
};

TransferOp make_transfer(const Interaction& phi, int width) {
  if (!phi.nearest_neighbor()) throw Error("transfer-matrix pressure needs a nearest-neighbor interaction");
  TransferOp op;
  op.q = phi.alphabet().size();
  op.h = width;
  op.states = 1;
  for (int i = 0; i < width; ++i) {
    op.states *= static_cast<std::uint64_t>(op.q);
    if (op.states > (1ull << 14)) throw CapacityError("strip width exceeds transfer-matrix capacity");
  }
  op.stride.assign(static_cast<std::size_t>(op.h), 1);
  for (int i = op.h - 2; i >= 0; --i)
    op.stride[static_cast<std::size_t>(i)] = op.stride[static_cast<std::size_t>(i + 1)] * static_cast<std::uint64_t>(op.q);

  op.site_log.assign(static_cast<std::size_t>(op.q), 0.0);
  std::vector<double> hmerged(static_cast<std::size_t>(op.q * op.q), 0.0);
  for (const InteractionTerm& t : phi.terms()) {
    if (t.shape.size() == 1) {
      for (int s = 0; s < op.q; ++s) op.site_log[static_cast<std::size_t>(s)] -= t.table[static_cast<std::size_t>(s)];
      continue;
    }
    int axis = -1;
    for (int a = 0; a < phi.dim(); ++a)
      if (t.shape[1] == Site::unit(a)) axis = a;
    if (axis == 0) {
      op.has_hbond = true;
      for (std::size_t k = 0; k < t.table.size(); ++k) hmerged[k] += t.table[k];
    } else {
      // open cross-section: bonds between adjacent rows only
      for (int i = 0; i + 1 < op.h; ++i) op.vbonds.push_back({i, i + 1, &t.table});
    }
  }
  op.B.assign(static_cast<std::size_t>(op.q * op.q), 1.0);
  for (int s = 0; s < op.q; ++s)
    for (int t = 0; t < op.q; ++t)
      op.B[static_cast<std::size_t>(s * op.q + t)] = std::exp(-hmerged[static_cast<std::size_t>(s * op.q + t)]);

  op.intra.assign(op.states, 1.0);
  for (std::uint64_t c = 0; c < op.states; ++c) {
    double lw = 0;
    for (int i = 0; i < op.h; ++i) {
      int d = static_cast<int>((c / op.stride[static_cast<std::size_t>(i)]) % static_cast<std::uint64_t>(op.q));
      lw += op.site_log[static_cast<std::size_t>(d)];
    }
    for (const TransferOp::VBond& b : op.vbonds) {
      int di = static_cast<int>((c / op.stride[static_cast<std::size_t>(b.i)]) % static_cast<std::uint64_t>(op.q));
      int dj = static_cast<int>((c / op.stride[static_cast<std::size_t>(b.j)]) % static_cast<std::uint64_t>(op.q));
      lw -= (*b.table)[static_cast<std::size_t>(di * op.q + dj)];
    }
    op.intra[c] = std::exp(lw);
  }
  return op;
}

void apply_transfer(const TransferOp& op, std::vector<double>& v) {
  std::vector<double> tmp(static_cast<std::size_t>(op.q));
  for (int i = 0; i < op.h; ++i) {
    std::uint64_t stride = op.stride[static_cast<std::size_t>(i)];
    std::uint64_t outer = op.states / (stride * static_cast<std::uint64_t>(op.q));
    for (std::uint64_t hi = 0; hi < outer; ++hi) {
      std::uint64_t base0 = hi * stride * static_cast<std::uint64_t>(op.q);
      for (std::uint64_t lo = 0; lo < stride; ++lo) {
        std::uint64_t base = base0 + lo;
        for (int s = 0; s < op.q; ++s) tmp[static_cast<std::size_t>(s)] = v[base + static_cast<std::uint64_t>(s) * stride];
        for (int t = 0; t < op.q; ++t) {
          double acc = 0;
          for (int s = 0; s < op.q; ++s) acc += tmp[static_cast<std::size_t>(s)] * op.B[static_cast<std::size_t>(s * op.q + t)];
          v[base + static_cast<std::uint64_t>(t) * stride] = acc;
        }
      }
    }
  }
  for (std::uint64_t c = 0; c < op.states; ++c) v[c] *= op.intra[c];
}

}  // namespace

double pressure(const Interaction& phi, const Geometry& geometry, double rel_tol) {
  int width;
  if (geometry.kind == Geometry::Kind::Line) {
    if (phi.dim() != 1) throw Error("line geometry needs a one-dimensional interaction");
    width = 1;
  } else {
    if (phi.dim() != 2) throw Error("strip geometry needs a two-dimensional interaction");
    if (geometry.width < 1) throw Error("strip width must be positive");
    width = geometry.width;
  }
  TransferOp op = make_transfer(phi, width);

  std::vector<double> v(op.states, 1.0);
  double lambda = 0, prev = -1;
  int stable = 0;
  for (long iter = 0; iter < 2000000; ++iter) {
    apply_transfer(op, v);
    double vmax = 0;
    for (double x : v) vmax = std::max(vmax, x);
    if (vmax <= 0) throw Error("transfer operator annihilated the iterate");
    for (double& x : v) x /= vmax;
    lambda = vmax;
    if (prev > 0 && std::abs(lambda - prev) <= rel_tol * lambda) {
      if (++stable >= 2) return std::log(lambda) / static_cast<double>(width);
    } else {
      stable = 0;
    }
    prev = lambda;
  }
  throw Error("power iteration did not converge to the requested tolerance");
}

// ---------------------------------------------------------------------------
// MeasureModel

MeasureModel MeasureModel::gibbs(Interaction phi, Volume window, Boundary boundary) {
  return gibbs_with_fields(std::move(phi), std::move(window), std::move(boundary), {});
}

MeasureModel MeasureModel::gibbs_with_fields(Interaction phi, Volume window, Boundary boundary,
                                             std::vector<SiteField> fields) {
  if (phi.dim() != window.dim()) throw Error("interaction and window dimensions differ");
  for (const SiteField& f : fields) {
    if (window.index_of(f.site) < 0) throw Error("field site " + f.site.str() + " not in window");
    if (f.log_weight.size() != static_cast<std::size_t>(phi.alphabet().size()))
      throw Error("field table size mismatch");
  }
  GibbsData d{std::move(phi), std::move(window), std::move(boundary), std::move(fields)};
  return MeasureModel(std::variant<GibbsData, TimeEvolvedData, TransformedData, EmpiricalData>(std::move(d)));
}

MeasureModel MeasureModel::time_evolved(Interaction phi, double t, Volume window, Boundary sigma_boundary) {
  if (t < 0) throw Error("evolution time must be nonnegative");
  if (phi.alphabet().size() != 2) throw Error("time-evolved models need a two-symbol alphabet");
  if (phi.dim() != window.dim()) throw Error("interaction and window dimensions differ");
  TimeEvolvedData d{std::move(phi), t, std::move(window), std::move(sigma_boundary)};
  return MeasureModel(std::variant<GibbsData, TimeEvolvedData, TransformedData, EmpiricalData>(std::move(d)));
}

MeasureModel MeasureModel::empirical(std::vector<Configuration> samples) {
  if (samples.empty()) throw Error("empirical model needs at least one sample");
  for (const Configuration& c : samples)
    if (!(c.volume() == samples[0].volume()) || !(c.alphabet() == samples[0].alphabet()))
      throw Error("empirical samples must share one volume and alphabet");
  EmpiricalData d{std::move(samples)};
  return MeasureModel(std::variant<GibbsData, TimeEvolvedData, TransformedData, EmpiricalData>(std::move(d)));
}

MeasureModel::Variant MeasureModel::variant() const {
  if (as_gibbs()) return Variant::Gibbs;
  if (as_time_evolved()) return Variant::TimeEvolved;
  if (as_transformed()) return Variant::Transformed;
  return Variant::Empirical;
}

const Volume& MeasureModel::window() const {
  if (auto* g = as_gibbs()) return g->window;
  if (auto* t = as_time_evolved()) return t->window;
  if (auto* tr = as_transformed()) return tr->image_window;
  return as_empirical()->samples[0].volume();
}

const Alphabet& MeasureModel::alphabet() const {
  if (auto* g = as_gibbs()) return g->phi.alphabet();
  if (auto* t = as_time_evolved()) return t->phi.alphabet();
  if (auto* tr = as_transformed()) return tr->image_alphabet;
  return as_empirical()->samples[0].alphabet();
}

namespace {

// empirical counting: (#conditioning matches, per-assignment counts)
std::pair<long, std::vector<long>> empirical_counts(const MeasureModel::EmpiricalData& d,
                                                    const std::vector<Site>& targets,
                                                    const std::vector<std::pair<Site, int>>& conditioning) {
  const Alphabet& ab = d.samples[0].alphabet();
  std::uint64_t n = target_count(ab.size(), targets.size());
  std::vector<long> counts(n, 0);
  long matches = 0;
  for (const Configuration& c : d.samples) {
    bool ok = true;
    for (const auto& [s, v] : conditioning)
      if (c.value(s) != v) {
        ok = false;
        break;
      }
    if (!ok) continue;
    ++matches;
    std::uint64_t idx = 0;
    for (const Site& s : targets)
      idx = idx * static_cast<std::uint64_t>(ab.size()) + static_cast<std::uint64_t>(ab.index_of(c.value(s)));
    ++counts[idx];
  }
  return {matches, counts};
}

std::vector<double> gibbs_target_log_weights(const MeasureModel::GibbsData& g,
                                             const std::vector<Site>& targets,
                                             const std::vector<std::pair<Site, int>>& conditioning,
                                             EngineKind engine) {
  LayerProblem p(g.phi, g.window, g.boundary);
  for (const SiteField& f : g.fields) p.add_log_emission(f.site, f.log_weight);
  for (const auto& [s, v] : conditioning) p.fix(s, v);
  std::vector<int> idx;
  for (const Site& s : targets) {
    int i = g.window.index_of(s);
    if (i < 0) throw Error("target site " + s.str() + " not in window");
    idx.push_back(i);
  }
  return target_log_weights(p, idx, engine);
}

std::vector<double> time_evolved_target_log_weights(const MeasureModel::TimeEvolvedData& te,
                                                    const std::vector<Site>& targets,
                                                    const std::vector<std::pair<Site, int>>& conditioning,
                                                    EngineKind engine) {
  const Alphabet& ab = te.phi.alphabet();
  const int q = ab.size();
  if (te.t == 0) {
    // identity kernel: the observed layer is the first layer
    MeasureModel::GibbsData g{te.phi, te.window, te.sigma_boundary, {}};
    return gibbs_target_log_weights(g, targets, conditioning, engine);
  }
  HeatKernel k = heat_kernel(te.t);
  double lps = std::log(k.p_same), lpd = std::log(k.p_diff);

  LayerProblem base(te.phi, te.window, te.sigma_boundary);
  for (const auto& [s, v] : conditioning) {
    if (te.window.index_of(s) < 0) throw Error("conditioning site " + s.str() + " not in window");
    int vi = ab.index_of(v);
    std::vector<double> em(static_cast<std::size_t>(q));
    for (int a = 0; a < q; ++a) em[static_cast<std::size_t>(a)] = (a == vi) ? lps : lpd;
    base.add_log_emission(s, em);
  }

  std::uint64_t n = target_count(q, targets.size());
  std::vector<double> out(n);
  std::vector<std::uint8_t> assign(targets.size(), 0);
  for (std::uint64_t a = 0; a < n; ++a) {
    std::uint64_t rest = a;
    for (std::size_t j = targets.size(); j-- > 0;) {
      assign[j] = static_cast<std::uint8_t>(rest % static_cast<std::uint64_t>(q));
      rest /= static_cast<std::uint64_t>(q);
    }
    LayerProblem p = base;
    for (std::size_t j = 0; j < targets.size(); ++j) {
      std::vector<double> em(static_cast<std::size_t>(q));
      for (int s = 0; s < q; ++s) em[static_cast<std::size_t>(s)] = (s == assign[j]) ? lps : lpd;
      p.add_log_emission(targets[j], em);
    }
    out[a] = log_weight_sum(p, engine);
  }
  return out;
}

}  // namespace

std::vector<double> MeasureModel::target_distribution(const std::vector<Site>& targets,
                                                      const std::vector<std::pair<Site, int>>& conditioning,
                                                      EngineKind engine) const {
  if (targets.empty()) throw Error("target set must be nonempty");
  if (auto* g = as_gibbs())
    return normalize_log_weights(gibbs_target_log_weights(*g, targets, conditioning, engine));
  if (auto* te = as_time_evolved())
    return normalize_log_weights(time_evolved_target_log_weights(*te, targets, conditioning, engine));
  if (auto* tr = as_transformed())
    return normalize_log_weights(transformed_target_log_weights(*tr, targets, conditioning, engine));

  auto [matches, counts] = empirical_counts(*as_empirical(), targets, conditioning);
  if (matches == 0) throw Error("empirical conditioning event never observed");
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    p[i] = static_cast<double>(counts[i]) / static_cast<double>(matches);
  return p;
}

std::optional<CondValue> MeasureModel::conditional(const ConditionalQuery& query, EngineKind engine) const {
  if (query.targets.empty()) throw Error("conditional query has no target");
  const Alphabet& ab = alphabet();
  std::vector<Site> sites;
  std::uint64_t idx = 0;
  for (const auto& [s, v] : query.targets) {
    sites.push_back(s);
    idx = idx * static_cast<std::uint64_t>(ab.size()) + static_cast<std::uint64_t>(ab.index_of(v));
  }

  if (auto* e = as_empirical()) {
    auto [matches, counts] = empirical_counts(*e, sites, query.conditioning);
    if (matches < query.min_count) return std::nullopt;
    double p = static_cast<double>(counts[idx]) / static_cast<double>(matches);
    double err = std::sqrt(std::max(p * (1 - p), 0.0) / static_cast<double>(matches));
    return CondValue{p, err};
  }

  const MeasureModel* self = this;
  std::optional<MeasureModel> override_model;
  if (query.boundary && as_gibbs()) {
    const GibbsData* g = as_gibbs();
    override_model = MeasureModel::gibbs_with_fields(g->phi, g->window, Boundary::of(*query.boundary), g->fields);
    self = &*override_model;
  }
  std::vector<double> dist = self->target_distribution(sites, query.conditioning, engine);
  return CondValue{dist[idx], 0.0};
}

std::vector<double> MeasureModel::marginal_table(const Volume& lambda, EngineKind engine) const {
  const Alphabet& ab = alphabet();
  const int q = ab.size();
  std::uint64_t n = target_count(q, static_cast<std::size_t>(lambda.size()));
  if (n > (1ull << 22)) throw CapacityError("marginal table too large");
  for (const Site& s : lambda.sites())
    if (window().index_of(s) < 0) throw Error("marginal site " + s.str() + " outside model window");

  if (auto* e = as_empirical()) {
    std::vector<double> table(n, 0.0);
    for (const Configuration& c : e->samples) {
      std::uint64_t idx = 0;
      for (const Site& s : lambda.sites())
        idx = idx * static_cast<std::uint64_t>(q) + static_cast<std::uint64_t>(ab.index_of(c.value(s)));
      table[idx] += 1.0;
    }
    for (double& v : table) v /= static_cast<double>(e->samples.size());
    return table;
  }

  if (auto* g = as_gibbs()) {
    // one full-window enumeration, accumulated onto the lambda cylinder
    LayerProblem p(g->phi, g->window, g->boundary);
    for (const SiteField& f : g->fields) p.add_log_emission(f.site, f.log_weight);
    std::vector<int> tidx;
    for (const Site& s : lambda.sites()) tidx.push_back(g->window.index_of(s));
    std::vector<double> logw = target_log_weights(p, tidx, engine);
    return normalize_log_weights(logw);
  }

  if (auto* te = as_time_evolved()) {
    std::vector<Site> sites = lambda.sites();
    return normalize_log_weights(time_evolved_target_log_weights(*te, sites, {}, engine));
  }

  return normalize_log_weights(transformed_marginal_log_weights(*as_transformed(), lambda, engine));
}

}  // namespace gibbslab
