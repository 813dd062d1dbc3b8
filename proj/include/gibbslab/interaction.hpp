#pragma once

#include <string>
#include <vector>

#include "gibbslab/lattice.hpp"

namespace gibbslab {

// One translation class of local energy terms: a canonical shape (sorted,
// lexicographically smallest site at the origin) and a dense table over
// Alphabet^shape. Table index is mixed-radix with the first shape site most
// significant.
struct InteractionTerm {
  std::vector<Site> shape;
  std::vector<double> table;
};

struct ModelParams {
  double beta = 1.0;
  double h = 0.0;
};

// Finite-range translation-invariant potential. Weights are exp(-H)
// throughout: the ferromagnet carries pair term -beta*s*s', the
// antiferromagnet +beta*s*s', so beta > 0 always names the usual physics.
class Interaction {
 public:
  Interaction(Alphabet alphabet, int dim);

  static Interaction builtin(const std::string& name, ModelParams params, int dim);

  // shape must be sorted with its lexicographically smallest site at the
  // origin; a repeated shape merges by adding tables.
  void add_term(std::vector<Site> shape, std::vector<double> table);
  // single-site field term -h * s at every site
  void add_uniform_field(double h);

  const Alphabet& alphabet() const { return alphabet_; }
  int dim() const { return dim_; }
  const std::vector<InteractionTerm>& terms() const { return terms_; }

  int range() const;             // max Chebyshev diameter over shapes
  bool nearest_neighbor() const; // only {0} and {0, e_a} shapes

 private:
  Alphabet alphabet_;
  int dim_;
  std::vector<InteractionTerm> terms_;
};

double b1_norm(const Interaction& phi);
double alpha_norm(const Interaction& psi, double alpha);

// Sum of every translate of every term meeting sigma's volume, reading spins
// outside the volume from the pattern. Each translate counted exactly once.
double energy(const Interaction& phi, const Configuration& sigma, const Pattern& omega);

// Energy change from flipping the spin at x (two-symbol alphabets); only the
// translates containing x are visited.
double flip_delta(const Interaction& phi, const Configuration& sigma, const Pattern& omega, const Site& x);

}  // namespace gibbslab
