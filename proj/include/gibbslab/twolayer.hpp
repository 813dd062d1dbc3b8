#pragma once

#include "gibbslab/dynamics.hpp"
#include "gibbslab/specification.hpp"

namespace gibbslab {

// Site-wise coupling strength between the initial and time-t layers under
// independent rate-one flips: log p_t(s, e) = const + h_t * s * e with
// h_t = artanh(exp(-2t)). Diverges at t = 0+, so t must be positive.
struct EffectiveField {
  double t;
  double h;
};

EffectiveField effective_field(double t);

// First-layer model given an observed second layer: phi plus the site field
// h_t * eta_x at every window site where eta is specified. The additive
// constant of log p_t is dropped (it cancels in every conditional).
MeasureModel constrained_model(const Interaction& phi, const Pattern& eta, double t, const Volume& window,
                               Boundary sigma_boundary);
MeasureModel constrained_model(const Interaction& phi, const Configuration& eta, double t, const Volume& window,
                               Boundary sigma_boundary);

// Conditional of the time-evolved measure at the origin given second-layer
// values: proportional to sum_sigma exp(-H_phi(sigma)) prod p_t(sigma_x, eta_x),
// marginalized over the first layer by the chosen engine. At t = 0 the kernel
// is the identity and the value is the plain Boltzmann conditional.
double evolved_conditional(const Interaction& phi, double t,
                           const std::vector<std::pair<Site, int>>& eta_inner, int eta0, EngineKind engine,
                           const Volume& window, Boundary sigma_boundary);

// convenience: eta read from a pattern on box(n) minus the origin, first-layer
// window box(n + margin)
double evolved_conditional(const Interaction& phi, double t, const Pattern& eta, int n, int margin, int eta0,
                           EngineKind engine, Boundary sigma_boundary);

}  // namespace gibbslab
