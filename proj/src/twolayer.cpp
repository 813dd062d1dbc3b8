#include "gibbslab/twolayer.hpp"

#include <cmath>

namespace gibbslab {

EffectiveField effective_field(double t) {
  if (t <= 0) throw Error("effective field needs t > 0 (use the exact t = 0 path instead)");
  HeatKernel k = heat_kernel(t);
  return EffectiveField{t, 0.5 * std::log(k.p_same / k.p_diff)};
}

namespace {

std::vector<SiteField> field_terms(const Alphabet& ab, double h, const Volume& window,
                                   const std::vector<std::pair<Site, int>>& eta) {
  std::vector<SiteField> fields;
  for (const auto& [x, e] : eta) {
    if (window.index_of(x) < 0) throw Error("observed site " + x.str() + " outside first-layer window");
    std::vector<double> logw(static_cast<std::size_t>(ab.size()));
    for (int s = 0; s < ab.size(); ++s) logw[static_cast<std::size_t>(s)] = h * ab.symbol(s) * e;
    fields.push_back({x, std::move(logw)});
  }
  return fields;
}

}  // namespace

MeasureModel constrained_model(const Interaction& phi, const Pattern& eta, double t, const Volume& window,
                               Boundary sigma_boundary) {
  if (phi.alphabet().size() != 2) throw Error("constrained models need a two-symbol alphabet");
  EffectiveField f = effective_field(t);
  std::vector<std::pair<Site, int>> values;
  for (const Site& x : window.sites()) values.push_back({x, eta.value(x)});
  return MeasureModel::gibbs_with_fields(phi, window, sigma_boundary,
                                         field_terms(phi.alphabet(), f.h, window, values));
}

MeasureModel constrained_model(const Interaction& phi, const Configuration& eta, double t, const Volume& window,
                               Boundary sigma_boundary) {
  if (phi.alphabet().size() != 2) throw Error("constrained models need a two-symbol alphabet");
  EffectiveField f = effective_field(t);
  std::vector<std::pair<Site, int>> values;
  for (const Site& x : eta.volume().sites())
    if (window.index_of(x) >= 0) values.push_back({x, eta.value(x)});
  return MeasureModel::gibbs_with_fields(phi, window, sigma_boundary,
                                         field_terms(phi.alphabet(), f.h, window, values));
}

double evolved_conditional(const Interaction& phi, double t,
                           const std::vector<std::pair<Site, int>>& eta_inner, int eta0, EngineKind engine,
                           const Volume& window, Boundary sigma_boundary) {
  MeasureModel model = MeasureModel::time_evolved(phi, t, window, sigma_boundary);
  ConditionalQuery q;
  q.target(Site(), eta0);
  q.conditioning = eta_inner;
  return model.conditional(q, engine)->p;
}

double evolved_conditional(const Interaction& phi, double t, const Pattern& eta, int n, int margin, int eta0,
                           EngineKind engine, Boundary sigma_boundary) {
  if (margin < 0) throw Error("window margin must be nonnegative");
  Volume window = Volume::box(n + margin, phi.dim());
  Volume inner = Volume::box(n, phi.dim());
  std::vector<std::pair<Site, int>> cond;
  for (const Site& x : inner.sites())
    if (!(x == Site())) cond.push_back({x, eta.value(x)});
  return evolved_conditional(phi, t, cond, eta0, engine, window, sigma_boundary);
}

}  // namespace gibbslab
