#include "gibbslab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "gibbslab/rng.hpp"

namespace gibbslab {

Alphabet::Alphabet(std::vector<int> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.size() < 2) throw Error("alphabet needs at least two symbols");
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    for (std::size_t j = i + 1; j < symbols_.size(); ++j)
      if (symbols_[i] == symbols_[j]) throw Error("alphabet symbols must be distinct");
}

Alphabet Alphabet::ising() { return Alphabet({-1, +1}); }

int Alphabet::index_of(int symbol) const {
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    if (symbols_[i] == symbol) return static_cast<int>(i);
  throw Error("symbol " + std::to_string(symbol) + " not in alphabet");
}

bool Alphabet::has(int symbol) const {
  for (int s : symbols_)
    if (s == symbol) return true;
  return false;
}

std::string Site::str() const {
  std::ostringstream os;
  os << "(" << c[0] << "," << c[1] << "," << c[2] << ")";
  return os.str();
}

static void check_dim(int d) {
  if (d < 1 || d > 3) throw Error("dimension must be 1, 2, or 3 (got " + std::to_string(d) + ")");
}

void Volume::finish() {
  std::sort(sites_.begin(), sites_.end());
  for (std::size_t i = 1; i < sites_.size(); ++i)
    if (sites_[i] == sites_[i - 1]) throw Error("volume has duplicate site " + sites_[i].str());
  if (sites_.empty()) throw Error("volume must be nonempty");
  lo_ = hi_ = sites_[0];
  for (const Site& s : sites_)
    for (int a = 0; a < 3; ++a) {
      lo_[a] = std::min(lo_[a], s[a]);
      hi_[a] = std::max(hi_[a], s[a]);
    }
}

Volume Volume::box(int n, int d) {
  if (n < 0) throw Error("box radius must be nonnegative");
  Site lo, hi;
  for (int a = 0; a < d; ++a) {
    lo[a] = -n;
    hi[a] = n;
  }
  return rect(lo, hi, d);
}

Volume Volume::rect(Site lo, Site hi, int d) {
  check_dim(d);
  for (int a = 0; a < 3; ++a) {
    if (a >= d && (lo[a] != 0 || hi[a] != 0)) throw Error("rect coordinates beyond dimension must be zero");
    if (lo[a] > hi[a]) throw Error("rect lower corner exceeds upper corner");
  }
  Volume v;
  v.dim_ = d;
  for (int x0 = lo[0]; x0 <= hi[0]; ++x0)
    for (int x1 = lo[1]; x1 <= hi[1]; ++x1)
      for (int x2 = lo[2]; x2 <= hi[2]; ++x2) v.sites_.push_back(Site(x0, x1, x2));
  v.finish();
  return v;
}

Volume Volume::from_sites(std::vector<Site> sites, int d) {
  check_dim(d);
  for (const Site& s : sites)
    for (int a = d; a < 3; ++a)
      if (s[a] != 0) throw Error("site coordinate beyond dimension must be zero: " + s.str());
  Volume v;
  v.dim_ = d;
  v.sites_ = std::move(sites);
  v.finish();
  return v;
}

int Volume::index_of(const Site& s) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), s);
  if (it == sites_.end() || !(*it == s)) return -1;
  return static_cast<int>(it - sites_.begin());
}

bool Volume::is_rect() const {
  long long n = 1;
  for (int a = 0; a < 3; ++a) n *= hi_[a] - lo_[a] + 1;
  return n == static_cast<long long>(sites_.size());
}

int Volume::chebyshev_radius() const {
  int r = 0;
  for (const Site& s : sites_)
    for (int a = 0; a < 3; ++a) r = std::max(r, std::abs(s[a]));
  return r;
}

Pattern Pattern::uniform(int symbol) {
  Pattern p;
  p.kind_ = Kind::Uniform;
  p.symbol_ = symbol;
  return p;
}

Pattern Pattern::alternating() {
  Pattern p;
  p.kind_ = Kind::Alternating;
  return p;
}

Pattern Pattern::checkerboard2x2() {
  Pattern p;
  p.kind_ = Kind::Checkerboard2x2;
  return p;
}

Pattern Pattern::periodic(std::array<int, 3> cell_dims, std::vector<int> values) {
  Pattern p;
  p.kind_ = Kind::Periodic;
  std::size_t n = 1;
  for (int d : cell_dims) {
    if (d < 1) throw Error("periodic cell extents must be positive");
    n *= static_cast<std::size_t>(d);
  }
  if (values.size() != n) throw Error("periodic cell value count does not match extents");
  p.cell_dims_ = cell_dims;
  p.cell_values_ = std::move(values);
  return p;
}

Pattern Pattern::random(double p_plus, std::uint64_t seed) {
  if (!(p_plus >= 0.0 && p_plus <= 1.0)) throw Error("random pattern probability must lie in [0,1]");
  Pattern p;
  p.kind_ = Kind::Random;
  p.p_ = p_plus;
  p.seed_ = seed;
  return p;
}

int Pattern::value(const Site& x0) const {
  Site x = scale_ == 1 ? x0 : scale_ * x0;
  switch (kind_) {
    case Kind::Uniform:
      return symbol_;
    case Kind::Alternating: {
      int s = std::abs(x[0]) + std::abs(x[1]) + std::abs(x[2]);
      return (s % 2 == 0) ? +1 : -1;
    }
    case Kind::Checkerboard2x2: {
      int s = floor_div(x[0], 2) + floor_div(x[1], 2) + floor_div(x[2], 2);
      return (floor_mod(s, 2) == 0) ? +1 : -1;
    }
    case Kind::Periodic: {
      int i0 = floor_mod(x[0], cell_dims_[0]);
      int i1 = floor_mod(x[1], cell_dims_[1]);
      int i2 = floor_mod(x[2], cell_dims_[2]);
      std::size_t idx = static_cast<std::size_t>((i0 * cell_dims_[1] + i1) * cell_dims_[2] + i2);
      return cell_values_[idx];
    }
    case Kind::Random:
      return site_uniform(seed_, x[0], x[1], x[2]) < p_ ? +1 : -1;
  }
  throw Error("unreachable pattern kind");
}

Pattern Pattern::decimated(int ell) const {
  if (ell < 1) throw Error("decimation step must be >= 1");
  Pattern p = *this;
  p.scale_ *= ell;
  return p;
}

static std::string cell_row_string(const std::vector<int>& vals, std::size_t begin, std::size_t n) {
  bool pm = true;
  for (std::size_t i = 0; i < n; ++i)
    if (vals[begin + i] != 1 && vals[begin + i] != -1) pm = false;
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (pm) {
      out += vals[begin + i] == 1 ? '+' : '-';
    } else {
      if (i) out += ',';
      out += std::to_string(vals[begin + i]);
    }
  }
  return out;
}

std::string Pattern::name() const {
  std::string base;
  switch (kind_) {
    case Kind::Uniform:
      base = symbol_ == 1 ? "plus" : symbol_ == -1 ? "minus" : "uniform:" + std::to_string(symbol_);
      break;
    case Kind::Alternating:
      base = "alternating";
      break;
    case Kind::Checkerboard2x2:
      base = "checkerboard2x2";
      break;
    case Kind::Periodic: {
      base = "periodic:";
      std::size_t row = static_cast<std::size_t>(cell_dims_[1] * cell_dims_[2]);
      for (int i = 0; i < cell_dims_[0]; ++i) {
        if (i) base += '/';
        base += cell_row_string(cell_values_, static_cast<std::size_t>(i) * row, row);
      }
      break;
    }
    case Kind::Random: {
      std::ostringstream os;
      os << "random:" << p_ << ":" << seed_;
      base = os.str();
      break;
    }
  }
  if (scale_ != 1) return "dec" + std::to_string(scale_) + ":" + base;
  return base;
}

static std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

static std::vector<int> parse_cell_row(const std::string& row) {
  std::vector<int> vals;
  bool pm = !row.empty();
  for (char ch : row)
    if (ch != '+' && ch != '-') pm = false;
  if (pm) {
    for (char ch : row) vals.push_back(ch == '+' ? +1 : -1);
    return vals;
  }
  for (const std::string& tok : split(row, ',')) {
    if (tok.empty()) throw Error("bad periodic cell entry in '" + row + "'");
    vals.push_back(std::stoi(tok));
  }
  return vals;
}

Pattern Pattern::parse(const std::string& text) {
  if (text == "plus") return plus();
  if (text == "minus") return minus();
  if (text == "alternating") return alternating();
  if (text == "checkerboard2x2") return checkerboard2x2();
  if (text.rfind("dec", 0) == 0) {
    auto colon = text.find(':');
    if (colon != std::string::npos) {
      int ell = std::stoi(text.substr(3, colon - 3));
      return parse(text.substr(colon + 1)).decimated(ell);
    }
  }
  if (text.rfind("uniform:", 0) == 0) return uniform(std::stoi(text.substr(8)));
  if (text.rfind("periodic:", 0) == 0) {
    std::string body = text.substr(9);
    std::vector<std::vector<int>> rows;
    for (const std::string& r : split(body, '/')) rows.push_back(parse_cell_row(r));
    if (rows.empty() || rows[0].empty()) throw Error("empty periodic cell in '" + text + "'");
    for (const auto& r : rows)
      if (r.size() != rows[0].size()) throw Error("ragged periodic cell in '" + text + "'");
    std::array<int, 3> dims{static_cast<int>(rows.size()), static_cast<int>(rows[0].size()), 1};
    std::vector<int> vals;
    for (const auto& r : rows) vals.insert(vals.end(), r.begin(), r.end());
    return periodic(dims, std::move(vals));
  }
  if (text.rfind("random:", 0) == 0) {
    auto parts = split(text, ':');
    if (parts.size() != 3) throw Error("random pattern syntax is random:<p>:<seed>");
    return random(std::stod(parts[1]), std::stoull(parts[2]));
  }
  throw Error("unknown pattern '" + text + "'");
}

Configuration::Configuration(Volume vol, Alphabet alphabet)
    : vol_(std::move(vol)), alphabet_(std::move(alphabet)), idx_(static_cast<std::size_t>(vol_.size()), 0) {}

int Configuration::value(const Site& s) const {
  int i = vol_.index_of(s);
  if (i < 0) throw Error("site " + s.str() + " not in configuration volume");
  return alphabet_.symbol(idx_[static_cast<std::size_t>(i)]);
}

void Configuration::set(const Site& s, int symbol) {
  int i = vol_.index_of(s);
  if (i < 0) throw Error("site " + s.str() + " not in configuration volume");
  idx_[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(alphabet_.index_of(symbol));
}

std::uint64_t Configuration::state_index() const {
  std::uint64_t idx = 0;
  std::uint64_t q = static_cast<std::uint64_t>(alphabet_.size());
  for (std::uint8_t a : idx_) idx = idx * q + a;
  return idx;
}

Volume box(int n, int d) { return Volume::box(n, d); }

int pattern_value(const Pattern& p, const Site& x) { return p.value(x); }

Configuration fill(const Volume& v, const Pattern& p, const Alphabet& alphabet) {
  Configuration c(v, alphabet);
  for (int i = 0; i < v.size(); ++i)
    c.set_index_at(i, alphabet.index_of(p.value(v.site(i))));
  return c;
}

Configuration fill(const Volume& v, const Pattern& p) { return fill(v, p, Alphabet::ising()); }

}  // namespace gibbslab
