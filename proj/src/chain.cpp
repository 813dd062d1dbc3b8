#include "gibbslab/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gibbslab {

namespace {

double lse(const double* v, int q) {
  double m = v[0];
  for (int i = 1; i < q; ++i) m = std::max(m, v[i]);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  double s = 0;
  for (int i = 0; i < q; ++i) s += std::exp(v[i] - m);
  return m + std::log(s);
}

}  // namespace

bool ChainModel::capable(const MeasureModel& m) {
  const auto* g = m.as_gibbs();
  return g && g->window.dim() == 1 && g->window.is_rect() && g->phi.nearest_neighbor();
}

ChainModel ChainModel::build(const MeasureModel& m) {
  if (!capable(m)) throw Error("model is not a one-dimensional nearest-neighbor chain");
  const auto& g = *m.as_gibbs();
  ChainModel c;
  c.window_ = g.window;
  c.n_ = g.window.size();
  c.q_ = g.phi.alphabet().size();
  const int n = c.n_, q = c.q_;
  c.log_f.assign(static_cast<std::size_t>(n * q), 0.0);
  c.log_m.assign(static_cast<std::size_t>(q * q), 0.0);

  const std::vector<double>* pair_table = nullptr;
  for (const InteractionTerm& t : g.phi.terms()) {
    if (t.shape.size() == 1) {
      for (int i = 0; i < n; ++i)
        for (int s = 0; s < q; ++s) c.log_f[static_cast<std::size_t>(i * q + s)] -= t.table[static_cast<std::size_t>(s)];
    } else {
      pair_table = &t.table;
      for (int s = 0; s < q; ++s)
        for (int s2 = 0; s2 < q; ++s2)
          c.log_m[static_cast<std::size_t>(s * q + s2)] -= t.table[static_cast<std::size_t>(s * q + s2)];
    }
  }
  for (const SiteField& f : g.fields) {
    int i = g.window.index_of(f.site);
    for (int s = 0; s < q; ++s) c.log_f[static_cast<std::size_t>(i * q + s)] += f.log_weight[static_cast<std::size_t>(s)];
  }
  if (!g.boundary.is_free() && pair_table) {
    const Alphabet& ab = g.phi.alphabet();
    int left = ab.index_of(g.boundary.pattern().value(g.window.lo() - Site::unit(0)));
    int right = ab.index_of(g.boundary.pattern().value(g.window.hi() + Site::unit(0)));
    for (int s = 0; s < q; ++s) {
      c.log_f[static_cast<std::size_t>(s)] -= (*pair_table)[static_cast<std::size_t>(left * q + s)];
      c.log_f[static_cast<std::size_t>((n - 1) * q + s)] -= (*pair_table)[static_cast<std::size_t>(s * q + right)];
    }
  }

  c.fwd.assign(static_cast<std::size_t>(n * q), 0.0);
  c.bwd.assign(static_cast<std::size_t>(n * q), 0.0);
  for (int s = 0; s < q; ++s) c.fwd[static_cast<std::size_t>(s)] = c.log_f[static_cast<std::size_t>(s)];
  std::vector<double> acc(static_cast<std::size_t>(q));
  for (int i = 1; i < n; ++i)
    for (int s2 = 0; s2 < q; ++s2) {
      for (int s = 0; s < q; ++s)
        acc[static_cast<std::size_t>(s)] =
            c.fwd[static_cast<std::size_t>((i - 1) * q + s)] + c.log_m[static_cast<std::size_t>(s * q + s2)];
      c.fwd[static_cast<std::size_t>(i * q + s2)] = c.log_f[static_cast<std::size_t>(i * q + s2)] + lse(acc.data(), q);
    }
  for (int i = n - 2; i >= 0; --i)
    for (int s = 0; s < q; ++s) {
      for (int s2 = 0; s2 < q; ++s2)
        acc[static_cast<std::size_t>(s2)] = c.log_m[static_cast<std::size_t>(s * q + s2)] +
                                            c.log_f[static_cast<std::size_t>((i + 1) * q + s2)] +
                                            c.bwd[static_cast<std::size_t>((i + 1) * q + s2)];
      c.bwd[static_cast<std::size_t>(i * q + s)] = lse(acc.data(), q);
    }
  c.log_z_ = lse(&c.fwd[static_cast<std::size_t>((n - 1) * q)], q);
  return c;
}

std::vector<double> ChainModel::site_marginal(int i) const {
  std::vector<double> p(static_cast<std::size_t>(q_));
  for (int s = 0; s < q_; ++s)
    p[static_cast<std::size_t>(s)] =
        std::exp(fwd[static_cast<std::size_t>(i * q_ + s)] + bwd[static_cast<std::size_t>(i * q_ + s)] - log_z_);
  return p;
}

std::vector<double> ChainModel::edge_marginal(int i) const {
  std::vector<double> p(static_cast<std::size_t>(q_ * q_));
  for (int s = 0; s < q_; ++s)
    for (int s2 = 0; s2 < q_; ++s2)
      p[static_cast<std::size_t>(s * q_ + s2)] =
          std::exp(fwd[static_cast<std::size_t>(i * q_ + s)] + log_m[static_cast<std::size_t>(s * q_ + s2)] +
                   log_f[static_cast<std::size_t>((i + 1) * q_ + s2)] +
                   bwd[static_cast<std::size_t>((i + 1) * q_ + s2)] - log_z_);
  return p;
}

double ChainModel::expected_log_marginal(int u, int v, const std::vector<std::vector<double>>& site_p,
                                         const std::vector<std::vector<double>>& edge_p) const {
  // log mu_Lambda(sigma) = L(sigma_u) + sum F_i + sum M + R(sigma_v) - log Z
  double e = -log_z_;
  for (int s = 0; s < q_; ++s) {
    double logL = fwd[static_cast<std::size_t>(u * q_ + s)] - log_f[static_cast<std::size_t>(u * q_ + s)];
    e += site_p[0][static_cast<std::size_t>(s)] * logL;
    e += site_p[static_cast<std::size_t>(v - u)][static_cast<std::size_t>(s)] * bwd[static_cast<std::size_t>(v * q_ + s)];
  }
  for (int i = u; i <= v; ++i)
    for (int s = 0; s < q_; ++s)
      e += site_p[static_cast<std::size_t>(i - u)][static_cast<std::size_t>(s)] *
           log_f[static_cast<std::size_t>(i * q_ + s)];
  for (int i = u; i < v; ++i)
    for (int s = 0; s < q_; ++s)
      for (int s2 = 0; s2 < q_; ++s2)
        e += edge_p[static_cast<std::size_t>(i - u)][static_cast<std::size_t>(s * q_ + s2)] *
             log_m[static_cast<std::size_t>(s * q_ + s2)];
  return e;
}

double chain_relative_entropy(const MeasureModel& nu, const MeasureModel& mu, const Volume& lambda) {
  if (lambda.dim() != 1 || !lambda.is_rect()) throw Error("chain path needs an interval");
  ChainModel cn = ChainModel::build(nu);
  ChainModel cm = ChainModel::build(mu);
  if (cn.q() != cm.q()) throw Error("alphabet sizes differ");
  int un = cn.window().index_of(lambda.lo());
  int vn = cn.window().index_of(lambda.hi());
  int um = cm.window().index_of(lambda.lo());
  int vm = cm.window().index_of(lambda.hi());
  if (un < 0 || vn < 0 || um < 0 || vm < 0) throw Error("interval not contained in both windows");

  std::vector<std::vector<double>> site_p, edge_p;
  for (int i = un; i <= vn; ++i) site_p.push_back(cn.site_marginal(i));
  for (int i = un; i < vn; ++i) edge_p.push_back(cn.edge_marginal(i));

  double a = cn.expected_log_marginal(un, vn, site_p, edge_p);
  double b = cm.expected_log_marginal(um, vm, site_p, edge_p);
  return a - b;
}

}  // namespace gibbslab
