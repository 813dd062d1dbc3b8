#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gibbslab/analysis.hpp"
#include "gibbslab/dynamics.hpp"
#include "gibbslab/harness.hpp"
#include "gibbslab/parse.hpp"
#include "gibbslab/sample_io.hpp"
#include "gibbslab/twolayer.hpp"
#include "json.hpp"

namespace {

using namespace gibbslab;

Site parse_site(const std::string& text, int d) {
  std::vector<int> coords;
  std::string cur;
  for (char ch : text + ",") {
    if (ch == ',') {
      coords.push_back(std::stoi(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (static_cast<int>(coords.size()) != d) throw Error("site '" + text + "' does not match dimension");
  Site s;
  for (std::size_t i = 0; i < coords.size(); ++i) s[static_cast<int>(i)] = coords[i];
  return s;
}

// "0=+1" or "0,0=-1"
std::pair<Site, int> parse_assignment(const std::string& text, int d) {
  auto eq = text.find('=');
  if (eq == std::string::npos) throw Error("expected <site>=<symbol> in '" + text + "'");
  return {parse_site(text.substr(0, eq), d), std::stoi(text.substr(eq + 1))};
}

Volume parse_volume(const std::string& text, int* d_out) {
  // "64x64" -> rectangle anchored at 0; "101" -> 1D interval of that length
  std::vector<int> dims;
  std::string cur;
  for (char ch : text + "x") {
    if (ch == 'x') {
      dims.push_back(std::stoi(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  int d = static_cast<int>(dims.size());
  Site lo, hi;
  for (int a = 0; a < d; ++a) {
    if (dims[static_cast<std::size_t>(a)] < 1) throw Error("volume extents must be positive");
    hi[a] = dims[static_cast<std::size_t>(a)] - 1;
  }
  *d_out = d;
  return Volume::rect(lo, hi, d);
}

int run(int argc, char** argv) {
  CLI::App app{"desk-scale lattice Gibbs laboratory"};
  app.require_subcommand(1);

  // gamma
  auto* cmd_gamma = app.add_subcommand("gamma", "exact conditional kernel of a potential");
  std::string g_phi = "ising:1.0", g_boundary = "plus", g_engine = "enum";
  int g_d = 1, g_window = 1;
  std::vector<std::string> g_targets;
  cmd_gamma->add_option("--phi", g_phi, "potential (ising:<beta>[:h=<h>], afm:<beta>, zero)");
  cmd_gamma->add_option("--d", g_d, "dimension");
  cmd_gamma->add_option("--window", g_window, "window radius n, window = [-n,n]^d");
  cmd_gamma->add_option("--target", g_targets, "target assignment <site>=<symbol>, repeatable")->required();
  cmd_gamma->add_option("--boundary", g_boundary, "pattern filling the conditioning and the outside");
  cmd_gamma->add_option("--engine", g_engine, "enum or strip");

  // evolved-cond
  auto* cmd_ec = app.add_subcommand("evolved-cond", "conditional of the time-evolved measure at the origin");
  std::string ec_phi = "ising:1.0", ec_eta = "alternating", ec_engine = "enum", ec_sigma_boundary = "free";
  double ec_t = 1.0;
  int ec_d = 1, ec_window = 4, ec_margin = 0, ec_eta0 = 1, ec_strip_width = 8;
  cmd_ec->add_option("--phi", ec_phi, "initial potential");
  cmd_ec->add_option("--t", ec_t, "evolution time");
  cmd_ec->add_option("--eta", ec_eta, "observed pattern on the conditioning window");
  cmd_ec->add_option("--d", ec_d, "dimension");
  cmd_ec->add_option("--window", ec_window, "conditioning radius n");
  cmd_ec->add_option("--margin", ec_margin, "extra first-layer margin beyond the conditioning window");
  cmd_ec->add_option("--eta0", ec_eta0, "queried symbol at the origin");
  cmd_ec->add_option("--engine", ec_engine, "enum or strip");
  cmd_ec->add_option("--strip-width", ec_strip_width, "cross-section height for d=2 strip windows");
  cmd_ec->add_option("--sigma-boundary", ec_sigma_boundary, "first-layer boundary (free or a pattern)");

  // evolve
  auto* cmd_ev = app.add_subcommand("evolve", "simulate trajectories and write a sample file");
  std::string ev_phi = "ising:1.0", ev_psi = "zero", ev_boundary = "plus", ev_out = "samples.bin",
              ev_dynamics = "glauber";
  double ev_t = 1.0;
  int ev_reps = 1000, ev_sweeps = 100;
  std::uint64_t ev_seed = 0;
  std::string ev_volume = "64x64";
  bool ev_periodic = false;
  cmd_ev->add_option("--phi", ev_phi, "potential of the initial equilibrium sampler");
  cmd_ev->add_option("--psi", ev_psi, "potential driving the spin-flip dynamics");
  cmd_ev->add_option("--t", ev_t, "horizon");
  cmd_ev->add_option("--volume", ev_volume, "extents, e.g. 64x64 or 101");
  cmd_ev->add_option("--boundary", ev_boundary, "frozen boundary pattern");
  cmd_ev->add_option("--seed", ev_seed, "run seed")->required();
  cmd_ev->add_option("--reps", ev_reps, "number of trajectories");
  cmd_ev->add_option("--sweeps", ev_sweeps, "equilibration sweeps for the initial sampler");
  cmd_ev->add_option("--dynamics", ev_dynamics, "glauber or exclusion");
  cmd_ev->add_flag("--periodic", ev_periodic, "close a 1D volume into a ring (exclusion only)");
  cmd_ev->add_option("--out", ev_out, "output sample file");

  // experiment
  auto* cmd_ex = app.add_subcommand("experiment", "run a canned experiment from a config file");
  std::string ex_config, ex_out = "results";
  int ex_workers = default_worker_count();
  cmd_ex->add_option("--config", ex_config, "config file")->required();
  cmd_ex->add_option("--workers", ex_workers, "worker count (overrides GIBBSLAB_WORKERS)");
  cmd_ex->add_option("--out", ex_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  if (*cmd_gamma) {
    Interaction phi = parse_phi(g_phi, g_d);
    Pattern boundary = Pattern::parse(g_boundary);
    Volume window = Volume::box(g_window, g_d);
    ConditionalQuery q;
    q.boundary = boundary;
    std::vector<Site> target_sites;
    for (const std::string& t : g_targets) {
      auto [site, sym] = parse_assignment(t, g_d);
      q.target(site, sym);
      target_sites.push_back(site);
    }
    for (const Site& s : window.sites()) {
      bool is_target = false;
      for (const Site& t : target_sites)
        if (t == s) is_target = true;
      if (!is_target) q.condition(s, boundary.value(s));
    }
    double p = gamma(phi, window, q, parse_engine(g_engine));
    std::printf("%s\n", format_g12(p).c_str());
    return 0;
  }

  if (*cmd_ec) {
    Interaction phi = parse_phi(ec_phi, ec_d);
    Pattern eta = Pattern::parse(ec_eta);
    Boundary sb = Boundary::parse(ec_sigma_boundary);
    EngineKind engine = parse_engine(ec_engine);
    double p;
    if (ec_d == 2) {
      int n = ec_window;
      Volume window = Volume::rect(Site(-n - ec_margin, -(ec_strip_width - 1) / 2),
                                   Site(n + ec_margin, ec_strip_width / 2), 2);
      std::vector<std::pair<Site, int>> cond;
      for (const Site& s : window.sites()) {
        int cheb = std::max(std::abs(s[0]), std::abs(s[1]));
        if (!(s == Site()) && cheb <= n) cond.push_back({s, eta.value(s)});
      }
      p = evolved_conditional(phi, ec_t, cond, ec_eta0, engine, window, sb);
    } else {
      p = evolved_conditional(phi, ec_t, eta, ec_window, ec_margin, ec_eta0, engine, sb);
    }
    std::printf("%s\n", format_g12(p).c_str());
    return 0;
  }

  if (*cmd_ev) {
    int d = 0;
    Volume vol = parse_volume(ev_volume, &d);
    Interaction phi = parse_phi(ev_phi, d);
    Pattern boundary = Pattern::parse(ev_boundary);
    bool exclusion = ev_dynamics == "exclusion";
    if (!exclusion && ev_dynamics != "glauber") throw Error("unknown dynamics '" + ev_dynamics + "'");
    std::optional<Interaction> psi;
    if (!exclusion) psi = parse_phi(ev_psi, d);

    std::vector<Configuration> samples;
    samples.reserve(static_cast<std::size_t>(ev_reps));
    for (int r = 0; r < ev_reps; ++r) {
      RngStream seeder(ev_seed, static_cast<std::uint64_t>(r));
      std::uint64_t s1 = seeder.next_u64(), s2 = seeder.next_u64();
      Configuration initial = sample_gibbs(phi, vol, boundary, ev_sweeps, s1);
      if (exclusion)
        samples.push_back(evolve_exclusion(initial, ev_t, s2, ev_periodic));
      else
        samples.push_back(evolve_glauber(initial, *psi, boundary, ev_t, s2));
    }

    SampleFileHeader header;
    header.dim = static_cast<std::uint16_t>(d);
    header.lo = vol.lo();
    header.hi = vol.hi();
    header.symbols = phi.alphabet().symbols();
    header.seed = ev_seed;
    header.t = ev_t;
    header.dynamics = exclusion ? 1 : 0;
    header.reps = static_cast<std::uint32_t>(ev_reps);
    write_samples(ev_out, header, samples);
    std::printf("wrote %d samples to %s\n", ev_reps, ev_out.c_str());
    return 0;
  }

  if (*cmd_ex) {
    ExperimentSpec spec = ExperimentSpec::parse_file(ex_config);
    RunReport report = run_experiment(spec, ex_workers);
    for (const std::string& path : emit(report, ex_out)) std::printf("%s\n", path.c_str());
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", e.what()}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 1;
  }
}
