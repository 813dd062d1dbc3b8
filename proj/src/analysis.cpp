#include "gibbslab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gibbslab/chain.hpp"

namespace gibbslab {

DefectCurve defect_curve(const MeasureModel& model, const DefectOptions& opt) {
  const Volume& window = model.window();
  const Site origin;
  if (window.index_of(origin) < 0) throw Error("defect curve needs the origin inside the model window");
  int N = window.chebyshev_radius();

  std::vector<int> ns = opt.n_values;
  std::sort(ns.begin(), ns.end());
  if (!ns.empty() && ns.back() >= N)
    throw Error("inner radius " + std::to_string(ns.back()) + " leaves no boundary sites (window radius " +
                std::to_string(N) + ")");

  DefectCurve curve;
  for (int n : ns) {
    std::optional<CondValue> side[2];
    for (int b = 0; b < 2; ++b) {
      const Pattern& outer = b == 0 ? opt.boundary_pair.first : opt.boundary_pair.second;
      ConditionalQuery q;
      q.min_count = opt.min_count;
      q.target(origin, opt.target_symbol);
      for (const Site& y : window.sites()) {
        if (y == origin) continue;
        int cheb = std::max({std::abs(y[0]), std::abs(y[1]), std::abs(y[2])});
        q.condition(y, cheb <= n ? opt.eta.value(y) : outer.value(y));
      }
      side[b] = model.conditional(q, opt.engine);
    }
    DefectRow row{n, N, false, 0, 0};
    if (!side[0] || !side[1]) {
      row.missing = true;
    } else {
      row.delta = std::abs(side[0]->p - side[1]->p);
      row.err = std::hypot(side[0]->err, side[1]->err);
    }
    curve.rows.push_back(row);
  }
  return curve;
}

double relative_entropy_box(const MeasureModel& nu, const MeasureModel& mu, const Volume& lambda,
                            EngineKind engine) {
  if (!(nu.alphabet().size() == mu.alphabet().size())) throw Error("alphabet sizes differ");
  if (ChainModel::capable(nu) && ChainModel::capable(mu) && lambda.dim() == 1 && lambda.is_rect())
    return chain_relative_entropy(nu, mu, lambda);

  std::vector<double> pn = nu.marginal_table(lambda, engine);
  std::vector<double> pm = mu.marginal_table(lambda, engine);
  double h = 0;
  for (std::size_t k = 0; k < pn.size(); ++k) {
    if (pn[k] == 0) continue;
    if (pm[k] == 0) return std::numeric_limits<double>::infinity();
    h += pn[k] * std::log(pn[k] / pm[k]);
  }
  return h;
}

EntropyCurve entropy_density_curve(const MeasureModel& nu, const MeasureModel& mu, int n_max,
                                   EngineKind engine) {
  if (nu.dim() != mu.dim()) throw Error("models live on different dimensions");
  EntropyCurve curve;
  for (int n = 0; n <= n_max; ++n) {
    Volume lambda = Volume::box(n, nu.dim());
    double h = relative_entropy_box(nu, mu, lambda, engine);
    curve.rows.push_back({n, h / static_cast<double>(lambda.size())});
  }
  return curve;
}

std::vector<ConsistencyRow> consistency_check(const MeasureModel& model, const Interaction& phi,
                                              const std::vector<int>& n_values, const Pattern& omega,
                                              EngineKind engine) {
  const Site origin;
  const Volume& window = model.window();
  if (window.index_of(origin) < 0) throw Error("consistency check needs the origin inside the model window");

  std::vector<ConsistencyRow> rows;
  for (int n : n_values) {
    ConditionalQuery qm;
    qm.target(origin, omega.value(origin));
    Volume inner = Volume::box(n, window.dim());
    for (const Site& y : inner.sites()) {
      if (y == origin) continue;
      if (window.index_of(y) >= 0) qm.condition(y, omega.value(y));
    }
    double pm = model.conditional(qm, engine)->p;

    ConditionalQuery qg;
    qg.target(origin, omega.value(origin));
    qg.boundary = omega;
    for (const Site& y : inner.sites())
      if (!(y == origin)) qg.condition(y, omega.value(y));
    double pg = gamma(phi, inner, qg, engine);

    rows.push_back({n, std::abs(pm - pg)});
  }
  return rows;
}

}  // namespace gibbslab
