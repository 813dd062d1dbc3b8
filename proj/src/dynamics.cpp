#include "gibbslab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace gibbslab {

HeatKernel heat_kernel(double t) {
  if (t < 0) throw Error("heat kernel time must be nonnegative");
  double decay = std::exp(-2.0 * t);
  return HeatKernel{t, (1.0 + decay) / 2.0, (1.0 - decay) / 2.0};
}

HeatKernel HeatKernel::compose(const HeatKernel& other) const {
  HeatKernel k;
  k.t = t + other.t;
  k.p_same = p_same * other.p_same + p_diff * other.p_diff;
  k.p_diff = p_same * other.p_diff + p_diff * other.p_same;
  return k;
}

double glauber_rate(const Interaction& psi, const Configuration& sigma, const Pattern& boundary, const Site& x) {
  return std::exp(-0.5 * flip_delta(psi, sigma, boundary, x));
}

namespace {

struct Event {
  double time;
  int id;
  bool operator>(const Event& o) const { return time > o.time || (time == o.time && id > o.id); }
};

using EventQueue = std::priority_queue<Event, std::vector<Event>, std::greater<Event>>;

}  // namespace

Configuration evolve_glauber(const Configuration& initial, const Interaction& psi, const Pattern& boundary,
                             double t, std::uint64_t seed) {
  if (t < 0) throw Error("evolution horizon must be nonnegative");
  if (initial.alphabet().size() != 2) throw Error("spin-flip dynamics needs a two-symbol alphabet");
  Configuration sigma = initial;
  if (t == 0) return sigma;
  const Volume& vol = sigma.volume();
  const double bound = std::exp(b1_norm(psi));  // dominates every flip rate

  std::vector<RngStream> streams;
  streams.reserve(static_cast<std::size_t>(vol.size()));
  EventQueue queue;
  for (int i = 0; i < vol.size(); ++i) {
    streams.emplace_back(seed, static_cast<std::uint64_t>(i));
    queue.push({streams.back().next_exponential(bound), i});
  }

  while (!queue.empty() && queue.top().time <= t) {
    Event ev = queue.top();
    queue.pop();
    RngStream& rng = streams[static_cast<std::size_t>(ev.id)];
    const Site& x = vol.site(ev.id);
    double rate = std::exp(-0.5 * flip_delta(psi, sigma, boundary, x));
    if (rng.next_double() * bound < rate)
      sigma.set_index_at(ev.id, 1 - sigma.index_at(ev.id));
    queue.push({ev.time + rng.next_exponential(bound), ev.id});
  }
  return sigma;
}

Configuration evolve_exclusion(const Configuration& initial, double t, std::uint64_t seed, bool periodic) {
  if (t < 0) throw Error("evolution horizon must be nonnegative");
  if (initial.alphabet().size() != 2) throw Error("exclusion dynamics needs a two-symbol alphabet");
  Configuration sigma = initial;
  if (t == 0) return sigma;
  const Volume& vol = sigma.volume();

  std::vector<std::pair<int, int>> bonds;
  for (int i = 0; i < vol.size(); ++i)
    for (int a = 0; a < vol.dim(); ++a) {
      int j = vol.index_of(vol.site(i) + Site::unit(a));
      if (j >= 0) bonds.push_back({i, j});
    }
  if (periodic) {
    if (vol.dim() != 1 || !vol.is_rect()) throw Error("periodic exclusion needs a 1D interval volume");
    if (vol.size() > 2) bonds.push_back({vol.size() - 1, 0});
  }
  if (bonds.empty()) return sigma;

  std::vector<RngStream> streams;
  streams.reserve(bonds.size());
  EventQueue queue;
  for (std::size_t b = 0; b < bonds.size(); ++b) {
    streams.emplace_back(seed, static_cast<std::uint64_t>(b));
    queue.push({streams.back().next_exponential(1.0), static_cast<int>(b)});
  }

  while (queue.top().time <= t) {
    Event ev = queue.top();
    queue.pop();
    auto [i, j] = bonds[static_cast<std::size_t>(ev.id)];
    int vi = sigma.index_at(i);
    sigma.set_index_at(i, sigma.index_at(j));
    sigma.set_index_at(j, vi);
    queue.push({ev.time + streams[static_cast<std::size_t>(ev.id)].next_exponential(1.0), ev.id});
  }
  return sigma;
}

Configuration evolve(const Configuration& initial, const TrajectoryConfig& cfg) {
  if (cfg.kind == TrajectoryConfig::Kind::Exclusion)
    return evolve_exclusion(initial, cfg.t, cfg.seed, cfg.periodic);
  if (cfg.psi) return evolve_glauber(initial, *cfg.psi, cfg.boundary, cfg.t, cfg.seed);
  Interaction zero(initial.alphabet(), initial.volume().dim());
  return evolve_glauber(initial, zero, cfg.boundary, cfg.t, cfg.seed);
}

void heat_bath_sweep(Configuration& sigma, const Interaction& phi, const Pattern& omega, RngStream& rng) {
  const Volume& vol = sigma.volume();
  const Alphabet& ab = sigma.alphabet();
  const int q = ab.size();
  std::vector<double> local(static_cast<std::size_t>(q));
  for (int i = 0; i < vol.size(); ++i) {
    const Site& x = vol.site(i);
    // local energies of every symbol at x; shared terms cancel
    for (int s = 0; s < q; ++s) local[static_cast<std::size_t>(s)] = 0;
    for (const InteractionTerm& term : phi.terms()) {
      for (const Site& sh : term.shape) {
        Site off = x - sh;
        for (int s = 0; s < q; ++s) {
          std::size_t idx = 0;
          for (const Site& u : term.shape) {
            Site z = u + off;
            int a;
            if (z == x) {
              a = s;
            } else {
              int zi = vol.index_of(z);
              a = zi >= 0 ? sigma.index_at(zi) : ab.index_of(omega.value(z));
            }
            idx = idx * static_cast<std::size_t>(q) + static_cast<std::size_t>(a);
          }
          local[static_cast<std::size_t>(s)] += term.table[idx];
        }
      }
    }
    double m = local[0];
    for (int s = 1; s < q; ++s) m = std::min(m, local[static_cast<std::size_t>(s)]);
    double z = 0;
    for (int s = 0; s < q; ++s) {
      local[static_cast<std::size_t>(s)] = std::exp(-(local[static_cast<std::size_t>(s)] - m));
      z += local[static_cast<std::size_t>(s)];
    }
    double u = rng.next_double() * z;
    int pick = q - 1;
    double acc = 0;
    for (int s = 0; s < q; ++s) {
      acc += local[static_cast<std::size_t>(s)];
      if (u < acc) {
        pick = s;
        break;
      }
    }
    sigma.set_index_at(i, pick);
  }
}

Configuration sample_gibbs(const Interaction& phi, const Volume& lambda, const Pattern& omega, int sweeps,
                           std::uint64_t seed) {
  if (sweeps < 0) throw Error("sweep count must be nonnegative");
  Configuration sigma = fill(lambda, omega, phi.alphabet());
  RngStream rng(seed, 0);
  for (int s = 0; s < sweeps; ++s) heat_bath_sweep(sigma, phi, omega, rng);
  return sigma;
}

}  // namespace gibbslab
