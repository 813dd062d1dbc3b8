#include "gibbslab/transforms.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "gibbslab/rng.hpp"

namespace gibbslab {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<std::string> split(const std::string& s, char sep) {
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
}  // namespace

Channel::Channel(Alphabet in, Alphabet out, std::vector<double> kernel)
    : in_(std::move(in)), out_(std::move(out)), kernel_(std::move(kernel)) {
  if (kernel_.size() != static_cast<std::size_t>(in_.size() * out_.size()))
    throw Error("channel kernel size does not match alphabets");
  for (int i = 0; i < in_.size(); ++i) {
    double row = 0;
    for (int o = 0; o < out_.size(); ++o) {
      double v = kernel_[static_cast<std::size_t>(i * out_.size() + o)];
      if (!(v > 0)) throw Error("channel kernel entries must be strictly positive");
      row += v;
    }
    if (std::abs(row - 1.0) > 1e-12) throw Error("channel kernel rows must sum to one");
  }
}

Channel Channel::binary_symmetric(double eps) {
  if (!(eps > 0 && eps < 1)) throw Error("binary symmetric channel needs eps in (0, 1)");
  return Channel(Alphabet::ising(), Alphabet::ising(), {1 - eps, eps, eps, 1 - eps});
}

Transform Transform::decimation(int ell) {
  if (ell < 1) throw Error("decimation step must be >= 1");
  Transform t;
  t.kind = Kind::Decimation;
  t.ell = ell;
  return t;
}

Transform Transform::projection(const Alphabet& in, const Alphabet& out, const std::vector<int>& symbol_map) {
  if (symbol_map.size() != static_cast<std::size_t>(in.size())) throw Error("projection map must be total");
  std::vector<bool> hit(static_cast<std::size_t>(out.size()), false);
  bool identity = in == out;
  for (int i = 0; i < in.size(); ++i) {
    int o = symbol_map[static_cast<std::size_t>(i)];
    if (o < 0 || o >= out.size()) throw Error("projection map hits a symbol outside the output alphabet");
    hit[static_cast<std::size_t>(o)] = true;
    if (o != i) identity = false;
  }
  for (bool h : hit)
    if (!h) throw Error("projection map must be onto");
  if (!(out.size() < in.size() || identity))
    throw Error("projection must shrink the alphabet (or be the identity)");
  Transform t;
  t.kind = Kind::Projection;
  t.projection_map = symbol_map;
  t.projection_out = out;
  return t;
}

Transform Transform::channel_kernel(Channel ch) {
  Transform t;
  t.kind = Kind::Channel;
  t.channel.push_back(std::move(ch));
  return t;
}

Transform Transform::layer(int axis, int offset) {
  if (axis < 0 || axis > 2) throw Error("layer axis out of range");
  Transform t;
  t.kind = Kind::Layer;
  t.axis = axis;
  t.offset = offset;
  return t;
}

std::string Transform::name() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Decimation:
      os << "dec:" << ell;
      break;
    case Kind::Projection: {
      os << "proj:";
      for (std::size_t i = 0; i < projection_map.size(); ++i) {
        if (i) os << ',';
        os << projection_out.symbol(projection_map[i]);
      }
      break;
    }
    case Kind::Channel:
      os << "chan:" << channel[0].prob(0, 1);
      break;
    case Kind::Layer:
      os << "layer:" << axis << ":" << offset;
      break;
  }
  return os.str();
}

Transform Transform::parse(const std::string& text, const Alphabet& in) {
  auto parts = split(text, ':');
  if (parts[0] == "dec" && parts.size() == 2) return decimation(std::stoi(parts[1]));
  if (parts[0] == "chan" && parts.size() == 2) return channel_kernel(Channel::binary_symmetric(std::stod(parts[1])));
  if (parts[0] == "layer" && parts.size() == 3) return layer(std::stoi(parts[1]), std::stoi(parts[2]));
  if (parts[0] == "proj" && parts.size() == 2) {
    // output symbol per input symbol, in alphabet order
    std::vector<int> out_syms;
    for (const std::string& tok : split(parts[1], ',')) out_syms.push_back(std::stoi(tok));
    if (out_syms.size() != static_cast<std::size_t>(in.size())) throw Error("projection table must be total");
    std::vector<int> distinct;
    for (int s : out_syms) {
      bool seen = false;
      for (int d : distinct)
        if (d == s) seen = true;
      if (!seen) distinct.push_back(s);
    }
    Alphabet out(distinct);
    std::vector<int> map;
    for (int s : out_syms) map.push_back(out.index_of(s));
    return projection(in, out, map);
  }
  throw Error("unknown transform '" + text + "'");
}

Configuration decimate(const Configuration& input, int ell) {
  if (ell < 1) throw Error("decimation step must be >= 1");
  if (ell == 1) return input;
  const Volume& vol = input.volume();
  std::vector<Site> sites;
  for (const Site& s : vol.sites()) {
    bool div = true;
    for (int a = 0; a < 3; ++a)
      if (s[a] % ell != 0) div = false;
    if (div) {
      Site n;
      for (int a = 0; a < 3; ++a) n[a] = s[a] / ell;
      sites.push_back(n);
    }
  }
  if (sites.empty()) throw Error("decimated volume is empty");
  Configuration out(Volume::from_sites(std::move(sites), vol.dim()), input.alphabet());
  for (int i = 0; i < out.volume().size(); ++i)
    out.set_index_at(i, input.index_at(vol.index_of(ell * out.volume().site(i))));
  return out;
}

Pattern decimate(const Pattern& input, int ell) { return input.decimated(ell); }

Configuration project(const Configuration& input, const Alphabet& out, const std::vector<int>& symbol_map) {
  if (symbol_map.size() != static_cast<std::size_t>(input.alphabet().size()))
    throw Error("projection map must be total");
  Configuration res(input.volume(), out);
  for (int i = 0; i < input.volume().size(); ++i)
    res.set_index_at(i, symbol_map[static_cast<std::size_t>(input.index_at(i))]);
  return res;
}

Configuration channel_apply(const Configuration& input, const Channel& kernel, std::uint64_t seed) {
  if (!(input.alphabet() == kernel.in())) throw Error("channel input alphabet mismatch");
  Configuration res(input.volume(), kernel.out());
  RngStream rng(seed, 0);
  for (int i = 0; i < input.volume().size(); ++i) {
    double u = rng.next_double();
    double acc = 0;
    int pick = kernel.out().size() - 1;
    for (int o = 0; o < kernel.out().size(); ++o) {
      acc += kernel.prob(input.index_at(i), o);
      if (u < acc) {
        pick = o;
        break;
      }
    }
    res.set_index_at(i, pick);
  }
  return res;
}

Configuration restrict_layer(const Configuration& input, int axis, int offset) {
  const Volume& vol = input.volume();
  if (vol.dim() < 2) throw Error("layer restriction needs dimension >= 2");
  if (axis < 0 || axis >= vol.dim()) throw Error("layer axis out of range");
  if (offset < vol.lo()[axis] || offset > vol.hi()[axis]) throw Error("layer offset outside the volume");
  std::vector<Site> sites;
  std::vector<int> src;
  for (int i = 0; i < vol.size(); ++i) {
    const Site& s = vol.site(i);
    if (s[axis] != offset) continue;
    Site n;
    int k = 0;
    for (int a = 0; a < vol.dim(); ++a)
      if (a != axis) n[k++] = s[a];
    sites.push_back(n);
    src.push_back(i);
  }
  if (sites.empty()) throw Error("layer slice is empty");
  Configuration out(Volume::from_sites(std::move(sites), vol.dim() - 1), input.alphabet());
  // from_sites sorts; dropping one axis of a lex-ordered slice keeps the order
  for (std::size_t k = 0; k < src.size(); ++k)
    out.set_index_at(static_cast<int>(k), input.index_at(src[k]));
  return out;
}

// ---------------------------------------------------------------------------
// image measures

namespace {

Site image_to_base(const Transform& t, int base_dim, const Site& s) {
  switch (t.kind) {
    case Transform::Kind::Decimation:
      return t.ell * s;
    case Transform::Kind::Projection:
    case Transform::Kind::Channel:
      return s;
    case Transform::Kind::Layer: {
      Site b;
      int k = 0;
      for (int a = 0; a < base_dim; ++a) b[a] = (a == t.axis) ? t.offset : s[k++];
      return b;
    }
  }
  throw Error("unreachable transform kind");
}

// emission table on the hidden symbol for an observed image value
std::vector<double> observation_emission(const Transform& t, const Alphabet& base_ab, int value) {
  std::vector<double> em(static_cast<std::size_t>(base_ab.size()), 0.0);
  if (t.kind == Transform::Kind::Projection) {
    int vi = t.projection_out.index_of(value);
    for (int a = 0; a < base_ab.size(); ++a)
      em[static_cast<std::size_t>(a)] = (t.projection_map[static_cast<std::size_t>(a)] == vi) ? 0.0 : kNegInf;
  } else {
    const Channel& ch = t.channel[0];
    int vi = ch.out().index_of(value);
    for (int a = 0; a < base_ab.size(); ++a) em[static_cast<std::size_t>(a)] = std::log(ch.prob(a, vi));
  }
  return em;
}

LayerProblem base_problem(const MeasureModel::GibbsData& g) {
  LayerProblem p(g.phi, g.window, g.boundary);
  for (const SiteField& f : g.fields) p.add_log_emission(f.site, f.log_weight);
  return p;
}

}  // namespace

std::vector<double> transformed_target_log_weights(const MeasureModel::TransformedData& data,
                                                   const std::vector<Site>& targets,
                                                   const std::vector<std::pair<Site, int>>& conditioning,
                                                   EngineKind engine) {
  const MeasureModel::GibbsData* g = data.base->as_gibbs();
  if (!g) throw Error("transformed conditionals need an exact base model");
  const Transform& t = *data.transform;
  const Alphabet& base_ab = g->phi.alphabet();
  const int base_dim = g->window.dim();

  LayerProblem p = base_problem(*g);
  bool deterministic_sites = t.kind == Transform::Kind::Decimation || t.kind == Transform::Kind::Layer;

  for (const auto& [s, v] : conditioning) {
    if (data.image_window.index_of(s) < 0) throw Error("conditioning site " + s.str() + " outside image window");
    Site b = image_to_base(t, base_dim, s);
    if (deterministic_sites)
      p.fix(b, v);
    else
      p.add_log_emission(b, observation_emission(t, base_ab, v));
  }

  if (deterministic_sites) {
    std::vector<int> idx;
    for (const Site& s : targets) {
      if (data.image_window.index_of(s) < 0) throw Error("target site " + s.str() + " outside image window");
      idx.push_back(g->window.index_of(image_to_base(t, base_dim, s)));
    }
    return target_log_weights(p, idx, engine);
  }

  const Alphabet& out_ab = data.image_alphabet;
  const int qo = out_ab.size();
  std::uint64_t n = 1;
  for (std::size_t k = 0; k < targets.size(); ++k) n *= static_cast<std::uint64_t>(qo);
  std::vector<double> out(n);
  std::vector<int> assign(targets.size(), 0);
  for (std::uint64_t a = 0; a < n; ++a) {
    std::uint64_t rest = a;
    for (std::size_t k = targets.size(); k-- > 0;) {
      assign[k] = static_cast<int>(rest % static_cast<std::uint64_t>(qo));
      rest /= static_cast<std::uint64_t>(qo);
    }
    LayerProblem sub = p;
    for (std::size_t k = 0; k < targets.size(); ++k) {
      Site b = image_to_base(t, base_dim, targets[k]);
      sub.add_log_emission(b, observation_emission(t, base_ab, out_ab.symbol(assign[k])));
    }
    out[a] = log_weight_sum(sub, engine);
  }
  return out;
}

std::vector<double> transformed_marginal_log_weights(const MeasureModel::TransformedData& data,
                                                     const Volume& lambda, EngineKind engine) {
  const MeasureModel::GibbsData* g = data.base->as_gibbs();
  if (!g) throw Error("transformed marginals need an exact base model");
  const Transform& t = *data.transform;
  const Alphabet& out_ab = data.image_alphabet;
  const int qo = out_ab.size();
  const int base_dim = g->window.dim();

  std::uint64_t n = 1;
  for (int k = 0; k < lambda.size(); ++k) n *= static_cast<std::uint64_t>(qo);
  std::vector<double> out(n);
  std::vector<int> assign(static_cast<std::size_t>(lambda.size()), 0);
  bool deterministic_sites = t.kind == Transform::Kind::Decimation || t.kind == Transform::Kind::Layer;
  for (std::uint64_t a = 0; a < n; ++a) {
    std::uint64_t rest = a;
    for (std::size_t k = static_cast<std::size_t>(lambda.size()); k-- > 0;) {
      assign[k] = static_cast<int>(rest % static_cast<std::uint64_t>(qo));
      rest /= static_cast<std::uint64_t>(qo);
    }
    LayerProblem sub = base_problem(*g);
    for (int k = 0; k < lambda.size(); ++k) {
      Site b = image_to_base(t, base_dim, lambda.site(k));
      int v = out_ab.symbol(assign[static_cast<std::size_t>(k)]);
      if (deterministic_sites)
        sub.fix(b, v);
      else
        sub.add_log_emission(b, observation_emission(t, g->phi.alphabet(), v));
    }
    out[a] = log_weight_sum(sub, engine);
  }
  return out;
}

MeasureModel MeasureModel::transformed(MeasureModel base, const Transform& transform) {
  if (!base.as_gibbs()) throw Error("image models need an exact (Gibbs) base model");
  const Volume& bw = base.window();
  const Alphabet& base_ab = base.alphabet();
  Volume image_window;
  Alphabet image_ab = base_ab;

  switch (transform.kind) {
    case Transform::Kind::Decimation: {
      std::vector<Site> sites;
      for (const Site& s : bw.sites()) {
        bool div = true;
        for (int a = 0; a < 3; ++a)
          if (s[a] % transform.ell != 0) div = false;
        if (div) {
          Site n;
          for (int a = 0; a < 3; ++a) n[a] = s[a] / transform.ell;
          sites.push_back(n);
        }
      }
      if (sites.empty()) throw Error("decimated window is empty");
      image_window = Volume::from_sites(std::move(sites), bw.dim());
      break;
    }
    case Transform::Kind::Projection:
      image_window = bw;
      image_ab = transform.projection_out;
      if (static_cast<int>(transform.projection_map.size()) != base_ab.size())
        throw Error("projection map does not match the base alphabet");
      break;
    case Transform::Kind::Channel:
      image_window = bw;
      if (!(transform.channel[0].in() == base_ab)) throw Error("channel input alphabet mismatch");
      image_ab = transform.channel[0].out();
      break;
    case Transform::Kind::Layer: {
      if (bw.dim() < 2) throw Error("layer restriction needs dimension >= 2");
      if (transform.axis >= bw.dim()) throw Error("layer axis out of range");
      std::vector<Site> sites;
      for (const Site& s : bw.sites()) {
        if (s[transform.axis] != transform.offset) continue;
        Site n;
        int k = 0;
        for (int a = 0; a < bw.dim(); ++a)
          if (a != transform.axis) n[k++] = s[a];
        sites.push_back(n);
      }
      if (sites.empty()) throw Error("layer offset outside the base window");
      image_window = Volume::from_sites(std::move(sites), bw.dim() - 1);
      break;
    }
  }

  TransformedData d{std::make_shared<const MeasureModel>(std::move(base)),
                    std::make_shared<const Transform>(transform), std::move(image_window), std::move(image_ab)};
  return MeasureModel(std::variant<GibbsData, TimeEvolvedData, TransformedData, EmpiricalData>(std::move(d)));
}

MeasureModel image_model(const MeasureModel& base, const Transform& transform) {
  return MeasureModel::transformed(base, transform);
}

}  // namespace gibbslab
