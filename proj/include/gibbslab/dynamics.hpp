#pragma once

#include <cstdint>
#include <optional>

#include "gibbslab/interaction.hpp"
#include "gibbslab/lattice.hpp"
#include "gibbslab/rng.hpp"

namespace gibbslab {

// Single-site law of the independent rate-one spin-flip process after time t.
struct HeatKernel {
  double t;
  double p_same;
  double p_diff;

  // probability of observing `out` after time t given the spin was `in`
  double prob(int in, int out) const { return in == out ? p_same : p_diff; }
  HeatKernel compose(const HeatKernel& other) const;
};

HeatKernel heat_kernel(double t);  // rejects t < 0

// flip rate exp(-(H(sigma^x) - H(sigma)) / 2); rate 1 everywhere for psi = 0
double glauber_rate(const Interaction& psi, const Configuration& sigma, const Pattern& boundary, const Site& x);

struct TrajectoryConfig {
  enum class Kind { Glauber, Exclusion } kind = Kind::Glauber;
  std::optional<Interaction> psi;  // Glauber only; absent means zero potential
  double t = 0;
  Pattern boundary = Pattern::plus();  // spins outside the volume are frozen to this
  bool periodic = false;               // exclusion: close the volume into a ring (1D)
  std::uint64_t seed = 0;
};

// Exact continuous-time single-spin-flip dynamics on the finite volume of
// `initial`. Each site owns one Poisson clock of rate exp(b1_norm(psi)) and
// events are thinned against the true rate, so the law has no time-step bias.
// The trajectory is a pure function of (initial, psi, boundary, t, seed).
Configuration evolve_glauber(const Configuration& initial, const Interaction& psi, const Pattern& boundary,
                             double t, std::uint64_t seed);

// Nearest-neighbor exchange at rate one per unordered bond inside the volume
// (optionally closed into a ring for 1D intervals). Conserves the number of
// each symbol exactly.
Configuration evolve_exclusion(const Configuration& initial, double t, std::uint64_t seed, bool periodic = false);

Configuration evolve(const Configuration& initial, const TrajectoryConfig& cfg);

// One deterministic-scan heat-bath sweep over the volume.
void heat_bath_sweep(Configuration& sigma, const Interaction& phi, const Pattern& omega, RngStream& rng);

// Equilibrium sampler: `sweeps` heat-bath sweeps from the pattern-filled
// start. Bit-identical output for identical inputs and seed.
Configuration sample_gibbs(const Interaction& phi, const Volume& lambda, const Pattern& omega, int sweeps,
                           std::uint64_t seed);

}  // namespace gibbslab
