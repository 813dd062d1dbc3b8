#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "gibbslab/error.hpp"

namespace gibbslab {

inline int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline int floor_mod(int a, int b) { return a - floor_div(a, b) * b; }

// Ordered finite set of spin values; index <-> symbol is a stable bijection.
class Alphabet {
 public:
  explicit Alphabet(std::vector<int> symbols);
  static Alphabet ising();  // {-1, +1}

  int size() const { return static_cast<int>(symbols_.size()); }
  int symbol(int index) const { return symbols_.at(static_cast<std::size_t>(index)); }
  int index_of(int symbol) const;  // throws if the symbol is not present
  bool has(int symbol) const;
  const std::vector<int>& symbols() const { return symbols_; }
  bool operator==(const Alphabet& o) const { return symbols_ == o.symbols_; }

 private:
  std::vector<int> symbols_;
};

// Lattice site. Coordinates beyond the active dimension are held at zero, so
// comparisons and arithmetic are dimension-agnostic.
struct Site {
  std::array<int, 3> c{0, 0, 0};

  Site() = default;
  explicit Site(int x0) : c{x0, 0, 0} {}
  Site(int x0, int x1) : c{x0, x1, 0} {}
  Site(int x0, int x1, int x2) : c{x0, x1, x2} {}

  int operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
  int& operator[](int i) { return c[static_cast<std::size_t>(i)]; }

  static Site unit(int axis) {
    Site s;
    s[axis] = 1;
    return s;
  }

  friend Site operator+(Site a, const Site& b) {
    for (int i = 0; i < 3; ++i) a.c[static_cast<std::size_t>(i)] += b[i];
    return a;
  }
  friend Site operator-(Site a, const Site& b) {
    for (int i = 0; i < 3; ++i) a.c[static_cast<std::size_t>(i)] -= b[i];
    return a;
  }
  friend Site operator*(int k, Site a) {
    for (auto& v : a.c) v *= k;
    return a;
  }

  auto operator<=>(const Site&) const = default;

  std::string str() const;
};

// Finite set of sites in lexicographic order.
class Volume {
 public:
  Volume() = default;

  static Volume box(int n, int d);              // [-n, n]^d
  static Volume rect(Site lo, Site hi, int d);  // product of intervals
  static Volume from_sites(std::vector<Site> sites, int d);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(sites_.size()); }
  const std::vector<Site>& sites() const { return sites_; }
  const Site& site(int i) const { return sites_[static_cast<std::size_t>(i)]; }
  const Site& lo() const { return lo_; }
  const Site& hi() const { return hi_; }

  int index_of(const Site& s) const;  // -1 if absent
  bool contains(const Site& s) const { return index_of(s) >= 0; }
  bool is_rect() const;  // every site of the bounding box present
  int extent(int axis) const { return hi_[axis] - lo_[axis] + 1; }
  // largest Chebyshev distance from the origin over all sites
  int chebyshev_radius() const;

  bool operator==(const Volume& o) const { return dim_ == o.dim_ && sites_ == o.sites_; }

 private:
  int dim_ = 1;
  std::vector<Site> sites_;
  Site lo_, hi_;
  void finish();  // sort, dedupe-check, bounding box
};

// Procedural boundary/target patterns, evaluable at any site. A pattern is a
// pure function of its parameters, so arbitrarily distant sites cost nothing.
class Pattern {
 public:
  enum class Kind { Uniform, Alternating, Checkerboard2x2, Periodic, Random };

  static Pattern uniform(int symbol);
  static Pattern plus() { return uniform(+1); }
  static Pattern minus() { return uniform(-1); }
  static Pattern alternating();
  static Pattern checkerboard2x2();
  static Pattern periodic(std::array<int, 3> cell_dims, std::vector<int> values);
  static Pattern random(double p, std::uint64_t seed);

  Kind kind() const { return kind_; }
  int value(const Site& x) const;
  // pattern read on the sublattice scale*Z^d (used by decimation)
  Pattern decimated(int ell) const;

  std::string name() const;
  static Pattern parse(const std::string& text);

 private:
  Kind kind_ = Kind::Uniform;
  int symbol_ = 1;
  double p_ = 0.5;
  std::uint64_t seed_ = 0;
  int scale_ = 1;
  std::array<int, 3> cell_dims_{1, 1, 1};
  std::vector<int> cell_values_;
};

// Spin assignment on a finite volume. Values are stored as alphabet indices.
class Configuration {
 public:
  Configuration(Volume vol, Alphabet alphabet);

  const Volume& volume() const { return vol_; }
  const Alphabet& alphabet() const { return alphabet_; }

  int index_at(int i) const { return idx_[static_cast<std::size_t>(i)]; }
  void set_index_at(int i, int a) { idx_[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(a); }
  int value(const Site& s) const;
  void set(const Site& s, int symbol);

  // mixed-radix state index, first site most significant
  std::uint64_t state_index() const;

  bool operator==(const Configuration& o) const = default;

 private:
  Volume vol_;
  Alphabet alphabet_;
  std::vector<std::uint8_t> idx_;
};

Volume box(int n, int d);
int pattern_value(const Pattern& p, const Site& x);
Configuration fill(const Volume& v, const Pattern& p, const Alphabet& alphabet);
Configuration fill(const Volume& v, const Pattern& p);  // Ising alphabet

}  // namespace gibbslab
