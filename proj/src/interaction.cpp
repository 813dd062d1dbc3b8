#include "gibbslab/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

namespace gibbslab {

Interaction::Interaction(Alphabet alphabet, int dim) : alphabet_(std::move(alphabet)), dim_(dim) {
  if (dim < 1 || dim > 3) throw Error("dimension must be 1, 2, or 3");
}

void Interaction::add_term(std::vector<Site> shape, std::vector<double> table) {
  if (shape.empty()) throw Error("interaction shape must be nonempty");
  if (!std::is_sorted(shape.begin(), shape.end())) throw Error("interaction shape must be sorted");
  if (!(shape.front() == Site())) throw Error("canonical shape must start at the origin");
  for (std::size_t i = 1; i < shape.size(); ++i)
    if (shape[i] == shape[i - 1]) throw Error("interaction shape has duplicate sites");
  for (const Site& s : shape)
    for (int a = dim_; a < 3; ++a)
      if (s[a] != 0) throw Error("shape site beyond dimension: " + s.str());
  std::size_t want = 1;
  for (std::size_t i = 0; i < shape.size(); ++i) want *= static_cast<std::size_t>(alphabet_.size());
  if (table.size() != want) throw Error("interaction table size does not match shape");

  for (InteractionTerm& t : terms_) {
    if (t.shape == shape) {
      for (std::size_t i = 0; i < table.size(); ++i) t.table[i] += table[i];
      return;
    }
  }
  terms_.push_back({std::move(shape), std::move(table)});
}

void Interaction::add_uniform_field(double h) {
  int q = alphabet_.size();
  std::vector<double> table(static_cast<std::size_t>(q));
  for (int a = 0; a < q; ++a) table[static_cast<std::size_t>(a)] = -h * alphabet_.symbol(a);
  add_term({Site()}, std::move(table));
}

Interaction Interaction::builtin(const std::string& name, ModelParams params, int dim) {
  Alphabet ab = Alphabet::ising();
  Interaction phi(ab, dim);
  if (name == "zero") return phi;
  if (params.beta < 0) throw Error("beta must be nonnegative; use ising_afm for antialignment");

  double pair_sign;
  if (name == "ising_ferro") {
    pair_sign = -1.0;
  } else if (name == "ising_afm") {
    pair_sign = +1.0;
  } else {
    throw Error("unknown builtin interaction '" + name + "'");
  }

  for (int a = 0; a < dim; ++a) {
    std::vector<double> table(4);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        table[static_cast<std::size_t>(i * 2 + j)] = pair_sign * params.beta * ab.symbol(i) * ab.symbol(j);
    phi.add_term({Site(), Site::unit(a)}, std::move(table));
  }
  if (params.h != 0.0) phi.add_uniform_field(params.h);
  return phi;
}

int Interaction::range() const {
  int r = 0;
  for (const InteractionTerm& t : terms_)
    for (const Site& a : t.shape)
      for (const Site& b : t.shape)
        for (int k = 0; k < 3; ++k) r = std::max(r, std::abs(a[k] - b[k]));
  return r;
}

bool Interaction::nearest_neighbor() const {
  for (const InteractionTerm& t : terms_) {
    if (t.shape.size() == 1 && t.shape[0] == Site()) continue;
    if (t.shape.size() == 2 && t.shape[0] == Site()) {
      bool unit = false;
      for (int a = 0; a < dim_; ++a)
        if (t.shape[1] == Site::unit(a)) unit = true;
      if (unit) continue;
    }
    return false;
  }
  return true;
}

static double table_sup(const InteractionTerm& t) {
  double m = 0;
  for (double v : t.table) m = std::max(m, std::abs(v));
  return m;
}

double b1_norm(const Interaction& phi) {
  // each canonical shape has |shape| translates containing the origin
  double s = 0;
  for (const InteractionTerm& t : phi.terms()) s += static_cast<double>(t.shape.size()) * table_sup(t);
  return s;
}

double alpha_norm(const Interaction& psi, double alpha) {
  if (alpha < 0) throw Error("alpha must be nonnegative");
  double s = 0;
  for (const InteractionTerm& t : psi.terms())
    s += static_cast<double>(t.shape.size()) * std::exp(alpha * static_cast<double>(t.shape.size())) * table_sup(t);
  return s;
}

static int read_spin_index(const Configuration& sigma, const Pattern& omega, const Site& z) {
  int i = sigma.volume().index_of(z);
  if (i >= 0) return sigma.index_at(i);
  return sigma.alphabet().index_of(omega.value(z));
}

double energy(const Interaction& phi, const Configuration& sigma, const Pattern& omega) {
  if (!(phi.alphabet() == sigma.alphabet())) throw Error("interaction and configuration alphabets differ");
  const Volume& vol = sigma.volume();
  int q = phi.alphabet().size();
  double e = 0;
  for (const InteractionTerm& t : phi.terms()) {
    std::set<Site> offsets;
    for (const Site& y : vol.sites())
      for (const Site& s : t.shape) offsets.insert(y - s);
    for (const Site& off : offsets) {
      std::size_t idx = 0;
      for (const Site& s : t.shape) idx = idx * static_cast<std::size_t>(q) +
                                          static_cast<std::size_t>(read_spin_index(sigma, omega, s + off));
      e += t.table[idx];
    }
  }
  return e;
}

double flip_delta(const Interaction& phi, const Configuration& sigma, const Pattern& omega, const Site& x) {
  if (phi.alphabet().size() != 2) throw Error("flip_delta is defined for two-symbol alphabets");
  int xi = sigma.volume().index_of(x);
  if (xi < 0) throw Error("flip site " + x.str() + " not in configuration volume");
  int q = 2;
  double d = 0;
  for (const InteractionTerm& t : phi.terms()) {
    for (const Site& s : t.shape) {
      Site off = x - s;
      std::size_t idx = 0, idx_flip = 0;
      for (const Site& u : t.shape) {
        Site z = u + off;
        int a = read_spin_index(sigma, omega, z);
        int af = (z == x) ? 1 - a : a;
        idx = idx * static_cast<std::size_t>(q) + static_cast<std::size_t>(a);
        idx_flip = idx_flip * static_cast<std::size_t>(q) + static_cast<std::size_t>(af);
      }
      d += t.table[idx_flip] - t.table[idx];
    }
  }
  return d;
}

}  // namespace gibbslab
