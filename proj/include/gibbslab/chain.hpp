#pragma once

#include <vector>

#include "gibbslab/specification.hpp"

namespace gibbslab {

// Exact factor form of a one-dimensional nearest-neighbor Gibbs model on an
// interval window: per-site log factors (single-site terms, site fields,
// boundary end bonds) and one homogeneous log bond matrix. Marginals on any
// subinterval are Markov, which makes relative-entropy sums linear in the
// interval length instead of exponential.
class ChainModel {
 public:
  static bool capable(const MeasureModel& m);
  static ChainModel build(const MeasureModel& m);

  int size() const { return n_; }
  int q() const { return q_; }
  const Volume& window() const { return window_; }
  double log_z() const { return log_z_; }

  std::vector<double> site_marginal(int i) const;              // q probabilities
  std::vector<double> edge_marginal(int i) const;              // q*q joint of (i, i+1)

  // expectation of this model's log marginal density on window indices
  // [u, v], taken against site/edge marginals supplied by another chain
  double expected_log_marginal(int u, int v, const std::vector<std::vector<double>>& site_p,
                               const std::vector<std::vector<double>>& edge_p) const;

 private:
  int n_ = 0, q_ = 2;
  Volume window_;
  std::vector<double> log_f;   // n*q
  std::vector<double> log_m;   // q*q
  std::vector<double> fwd, bwd;  // n*q
  double log_z_ = 0;
};

// H_Lambda(nu | mu) for two chain-capable models on the interval lambda
double chain_relative_entropy(const MeasureModel& nu, const MeasureModel& mu, const Volume& lambda);

}  // namespace gibbslab
