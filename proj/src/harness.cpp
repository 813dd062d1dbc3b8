#include "gibbslab/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "gibbslab/analysis.hpp"
#include "gibbslab/dynamics.hpp"
#include "gibbslab/parse.hpp"
#include "gibbslab/transforms.hpp"
#include "gibbslab/twolayer.hpp"
#include "json.hpp"

namespace gibbslab {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  std::string last = trim(cur);
  if (!last.empty() || !out.empty()) out.push_back(last);
  return out;
}

void run_jobs(int njobs, int workers, const std::function<void(int)>& job) {
  workers = std::max(1, std::min(workers, njobs));
  if (workers == 1) {
    for (int i = 0; i < njobs; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= njobs) return;
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  RngStream s(seed, mix64(a * 0x9E3779B97F4A7C15ULL + b) ^ c);
  return s.next_u64();
}

// alternating pattern translated by one lattice step (the other ground state
// of the antiferromagnet)
Pattern shifted_alternating(int d) {
  if (d == 1) return Pattern::periodic({2, 1, 1}, {-1, +1});
  if (d == 2) return Pattern::periodic({2, 2, 1}, {-1, +1, +1, -1});
  return Pattern::periodic({2, 2, 2}, {-1, +1, +1, -1, +1, -1, -1, +1});
}

Configuration restrict_to(const Configuration& c, const Volume& sub) {
  Configuration out(sub, c.alphabet());
  for (int i = 0; i < sub.size(); ++i) out.set_index_at(i, c.index_at(c.volume().index_of(sub.site(i))));
  return out;
}

Volume strip_window(int N, int height) {
  // height sites across, origin row included: y in [-(height-1)/2, height/2]
  return Volume::rect(Site(-N, -(height - 1) / 2), Site(N, height / 2), 2);
}

std::string phi_string(double beta, double h) {
  std::string s = "ising:" + format_g12(beta);
  if (h != 0) s += ":h=" + format_g12(h);
  return s;
}

const std::vector<std::string> kDefectColumns = {"experiment", "phi", "t",     "eta", "engine",
                                                 "n",          "N",   "delta", "err"};

void append_defect_rows(Table& table, const std::string& experiment, const std::string& phi, double t,
                        const std::string& eta, const std::string& engine, const DefectCurve& curve) {
  for (const DefectRow& r : curve.rows) {
    std::vector<std::string> row{experiment,        phi,
                                 format_g12(t),     eta,
                                 engine,            std::to_string(r.n),
                                 std::to_string(r.N)};
    if (r.missing) {
      row.push_back("");
      row.push_back("");
    } else {
      row.push_back(format_g12(r.delta));
      row.push_back(format_g12(r.err));
    }
    table.rows.push_back(std::move(row));
  }
}

// ---------------------------------------------------------------------------
// heating / heating_biased: defect curves of the time-evolved Ising measure

RunReport run_heating(const ExperimentSpec& spec, int workers, bool biased) {
  RunReport report;
  report.spec = spec;
  report.workers = workers;
  report.version = kVersion;

  const int d = spec.get_int("d", 2);
  const double h = spec.get_double("h", biased ? 0.1 : 0.0);
  if (biased && h <= 0) throw Error("heating_biased needs a positive field h");
  const std::vector<double> betas = spec.get_doubles("beta", {0.2, 0.6, 1.0, 1.4});
  const std::vector<double> ts = spec.get_doubles("t", {0.1, 0.25, 0.5, 1, 2, 4});
  const int N = spec.get_int("N", d == 2 ? 9 : 9);
  const int height = spec.get_int("strip_height", 8);
  const std::vector<int> ns = spec.get_ints("n", {1, 2, 3, 4, 5, 6, 7, 8});
  const Pattern eta = Pattern::parse(spec.get("eta", "alternating"));
  const Pattern b1 = Pattern::parse(spec.get("boundary1", "plus"));
  const Pattern b2 = Pattern::parse(spec.get("boundary2", "minus"));
  const Boundary sigma_boundary = Boundary::parse(spec.get("sigma_boundary", "free"));
  const EngineKind engine = parse_engine(spec.get("engine", d == 2 ? "strip" : "enum"));
  const double threshold = spec.get_double("threshold", 1e-3);
  report.engine = engine_name(engine);

  if (betas.empty() || ts.empty() || ns.empty()) throw Error("heating grid must be nonempty");
  Volume window = d == 2 ? strip_window(N, height) : Volume::box(N, d);

  // validate every cell before computing anything
  for (int n : ns)
    if (n >= window.chebyshev_radius()) throw Error("inner radius " + std::to_string(n) + " has no boundary sites");
  if (engine == EngineKind::Strip) {
    if (height > 14) throw CapacityError("strip cross-section exceeds 14 sites");
  } else if (window.size() > 24) {
    throw CapacityError("enumeration window exceeds 24 sites; use the strip engine");
  }
  for (double beta : betas) (void)parse_phi(phi_string(beta, h), d);

  struct Cell {
    double beta, t;
  };
  std::vector<Cell> cells;
  for (double beta : betas)
    for (double t : ts) cells.push_back({beta, t});
  std::vector<DefectCurve> curves(cells.size());

  run_jobs(static_cast<int>(cells.size()), workers, [&](int i) {
    const Cell& c = cells[static_cast<std::size_t>(i)];
    Interaction phi = parse_phi(phi_string(c.beta, h), d);
    MeasureModel model = MeasureModel::time_evolved(phi, c.t, window, sigma_boundary);
    DefectOptions opt;
    opt.n_values = ns;
    opt.eta = eta;
    opt.boundary_pair = {b1, b2};
    opt.engine = engine;
    curves[static_cast<std::size_t>(i)] = defect_curve(model, opt);
  });

  Table main{"main", kDefectColumns, {}};
  for (std::size_t i = 0; i < cells.size(); ++i)
    append_defect_rows(main, spec.name, phi_string(cells[i].beta, h), cells[i].t, eta.name(),
                       engine_name(engine), curves[i]);
  report.tables.push_back(std::move(main));

  // crossover summary at the largest probe radius; a finite-volume proxy only
  int n_top = *std::max_element(ns.begin(), ns.end());
  Table summary{"summary",
                {"experiment", "phi", "eta", "engine", "n", "threshold", "t_cross", "t_peak", "delta_peak",
                 "delta_first", "delta_last"},
                {}};
  for (std::size_t bi = 0; bi < betas.size(); ++bi) {
    std::string t_cross;
    double peak = -1, t_peak = 0, first = 0, last = 0;
    for (std::size_t ti = 0; ti < ts.size(); ++ti) {
      const DefectCurve& c = curves[bi * ts.size() + ti];
      double delta = 0;
      for (const DefectRow& r : c.rows)
        if (r.n == n_top && !r.missing) delta = r.delta;
      if (t_cross.empty() && delta > threshold) t_cross = format_g12(ts[ti]);
      if (delta > peak) {
        peak = delta;
        t_peak = ts[ti];
      }
      if (ti == 0) first = delta;
      if (ti + 1 == ts.size()) last = delta;
    }
    summary.rows.push_back({spec.name, phi_string(betas[bi], h), eta.name(), engine_name(engine),
                            std::to_string(n_top), format_g12(threshold), t_cross, format_g12(t_peak),
                            format_g12(peak), format_g12(first), format_g12(last)});
  }
  report.tables.push_back(std::move(summary));
  return report;
}

// ---------------------------------------------------------------------------
// decimation_1d: image conditionals against the exact coupling recursion

RunReport run_decimation_1d(const ExperimentSpec& spec, int workers) {
  RunReport report;
  report.spec = spec;
  report.workers = workers;
  report.version = kVersion;
  report.engine = "enum";

  const std::vector<double> betas = spec.get_doubles("beta", {0.5, 1.0, 1.5});
  const int m = spec.get_int("base_radius", 8);
  if (betas.empty()) throw Error("decimation grid must be nonempty");
  if (m < 4 || m % 2 != 0) throw Error("base_radius must be even and at least 4");

  std::vector<std::array<double, 3>> results(betas.size());
  run_jobs(static_cast<int>(betas.size()), workers, [&](int i) {
    double beta = betas[static_cast<std::size_t>(i)];
    Interaction phi = Interaction::builtin("ising_ferro", {beta, 0}, 1);
    MeasureModel base = MeasureModel::gibbs(phi, Volume::box(m, 1), Boundary::free());
    MeasureModel image = image_model(base, Transform::decimation(2));
    ConditionalQuery q;
    q.target(Site(), +1).condition(Site(-1), +1).condition(Site(1), +1);
    double p_image = image.conditional(q)->p;

    double beta_prime = std::atanh(std::tanh(beta) * std::tanh(beta));
    Interaction phi_prime = Interaction::builtin("ising_ferro", {beta_prime, 0}, 1);
    ConditionalQuery qg;
    qg.target(Site(), +1);
    qg.boundary = Pattern::plus();
    qg.condition(Site(-1), +1).condition(Site(1), +1);
    double p_rec = gamma(phi_prime, Volume::box(1, 1), qg);
    results[static_cast<std::size_t>(i)] = {beta_prime, p_image, p_rec};
  });

  Table main{"main",
             {"experiment", "beta", "beta_prime", "image_conditional", "recursion_conditional", "abs_diff"},
             {}};
  for (std::size_t i = 0; i < betas.size(); ++i) {
    auto [bp, pi, pr] = results[i];
    main.rows.push_back({spec.name, format_g12(betas[i]), format_g12(bp), format_g12(pi), format_g12(pr),
                         format_g12(std::abs(pi - pr))});
  }
  report.tables.push_back(std::move(main));
  return report;
}

// ---------------------------------------------------------------------------
// kawasaki_probe: empirical defect curves for exclusion dynamics started from
// the antiferromagnet, probed at the doubled checkerboard

RunReport run_kawasaki(const ExperimentSpec& spec, int workers) {
  RunReport report;
  report.spec = spec;
  report.workers = workers;
  report.version = kVersion;
  report.engine = "empirical";

  const int d = spec.get_int("d", 1);
  const std::vector<double> betas = spec.get_doubles("beta", {0.5, 1.0});
  const std::vector<double> ts = spec.get_doubles("t", {0.5, 1.0, 2.0});
  const int M = spec.get_int("volume_radius", d == 1 ? 24 : 4);
  const int N = spec.get_int("N", d == 1 ? 3 : 1);
  const std::vector<int> ns = spec.get_ints("n", d == 1 ? std::vector<int>{1, 2} : std::vector<int>{0});
  const int reps = spec.get_int("reps", 100000);
  const int sweeps = spec.get_int("sweeps", 48);
  const int min_count = spec.get_int("min_count", 100);
  if (betas.empty() || ts.empty() || ns.empty() || reps < 1) throw Error("kawasaki grid must be nonempty");
  if (N > M) throw Error("observation window exceeds the simulation volume");

  const Pattern eta = Pattern::checkerboard2x2();
  const Pattern b1 = Pattern::alternating();
  const Pattern b2 = shifted_alternating(d);
  Volume vol = Volume::box(M, d);
  Volume obs = Volume::box(N, d);

  struct Cell {
    double beta, t;
  };
  std::vector<Cell> cells;
  for (double beta : betas)
    for (double t : ts) cells.push_back({beta, t});
  std::vector<DefectCurve> curves(cells.size());

  run_jobs(static_cast<int>(cells.size()), workers, [&](int i) {
    const Cell& c = cells[static_cast<std::size_t>(i)];
    Interaction phi = Interaction::builtin("ising_afm", {c.beta, 0}, d);
    std::vector<Configuration> observed;
    observed.reserve(static_cast<std::size_t>(reps));
    for (int r = 0; r < reps; ++r) {
      Configuration initial = sample_gibbs(phi, vol, b1, sweeps,
                                           derived_seed(spec.seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(r), 0));
      Configuration final = evolve_exclusion(initial, c.t,
                                             derived_seed(spec.seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(r), 1));
      observed.push_back(restrict_to(final, obs));
    }
    MeasureModel model = MeasureModel::empirical(std::move(observed));
    DefectOptions opt;
    opt.n_values = ns;
    opt.eta = eta;
    opt.boundary_pair = {b1, b2};
    opt.min_count = min_count;
    curves[static_cast<std::size_t>(i)] = defect_curve(model, opt);
  });

  Table main{"main", kDefectColumns, {}};
  for (std::size_t i = 0; i < cells.size(); ++i)
    append_defect_rows(main, spec.name, "afm:" + format_g12(cells[i].beta), cells[i].t, eta.name(),
                       "empirical", curves[i]);
  report.tables.push_back(std::move(main));
  return report;
}

// ---------------------------------------------------------------------------
// entropy_vp: relative-entropy-density curves, including the vanishing case

RunReport run_entropy_vp(const ExperimentSpec& spec, int workers) {
  RunReport report;
  report.spec = spec;
  report.workers = workers;
  report.version = kVersion;
  report.engine = "chain";

  const double beta = spec.get_double("beta", 0.7);
  const int n_max = spec.get_int("n_max", 40);
  const int margin = spec.get_int("margin", 4);
  if (n_max < 0) throw Error("n_max must be nonnegative");

  Volume window = Volume::box(n_max + margin, 1);
  Interaction ising = Interaction::builtin("ising_ferro", {beta, 0}, 1);
  Interaction zero = Interaction::builtin("zero", {}, 1);
  MeasureModel mu = MeasureModel::gibbs(ising, window, Boundary::free());
  MeasureModel nu = MeasureModel::gibbs(zero, window, Boundary::free());

  struct Suite {
    std::string nu_name, mu_name;
    const MeasureModel *nu, *mu;
  };
  std::string ising_name = "ising:" + format_g12(beta);
  std::vector<Suite> suites = {{"product", ising_name, &nu, &mu},
                               {ising_name, ising_name, &mu, &mu},
                               {"product", "product", &nu, &nu}};
  std::vector<EntropyCurve> curves(suites.size());
  run_jobs(static_cast<int>(suites.size()), workers, [&](int i) {
    curves[static_cast<std::size_t>(i)] =
        entropy_density_curve(*suites[static_cast<std::size_t>(i)].nu, *suites[static_cast<std::size_t>(i)].mu, n_max);
  });

  Table main{"main", {"nu", "mu", "n", "h_per_site"}, {}};
  for (std::size_t i = 0; i < suites.size(); ++i)
    for (const EntropyRow& r : curves[i].rows)
      main.rows.push_back({suites[i].nu_name, suites[i].mu_name, std::to_string(r.n), format_g12(r.h_per_site)});
  report.tables.push_back(std::move(main));
  return report;
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentSpec ExperimentSpec::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_text(ss.str(), path);
}

ExperimentSpec ExperimentSpec::parse_text(const std::string& text, const std::string& origin) {
  ExperimentSpec spec;
  bool seed_set = false;
  std::string section;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string where = origin + ":" + std::to_string(lineno);
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(where + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw Error(where + ": empty key");
    if (section == "experiment") {
      if (key == "name") {
        spec.name = value;
      } else if (key == "seed") {
        spec.seed = std::stoull(value);
        seed_set = true;
      } else {
        throw Error(where + ": unknown [experiment] key '" + key + "'");
      }
    } else if (section == "params" || section.empty()) {
      spec.params[key] = value;
    } else {
      spec.params[section + "." + key] = value;
    }
  }
  if (spec.name.empty()) throw Error(origin + ": missing experiment name");
  if (!seed_set) throw Error(origin + ": seed is mandatory");
  return spec;
}

std::string ExperimentSpec::get(const std::string& key, const std::string& fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

double ExperimentSpec::get_double(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : std::stod(it->second);
}

int ExperimentSpec::get_int(const std::string& key, int fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : std::stoi(it->second);
}

std::vector<double> ExperimentSpec::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  std::vector<double> out;
  for (const std::string& tok : split_list(it->second))
    if (!tok.empty()) out.push_back(std::stod(tok));
  return out;
}

std::vector<int> ExperimentSpec::get_ints(const std::string& key, const std::vector<int>& fallback) const {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  std::vector<int> out;
  for (const std::string& tok : split_list(it->second)) {
    if (tok.empty()) continue;
    auto colon = tok.find(':');
    if (colon != std::string::npos) {
      int lo = std::stoi(tok.substr(0, colon));
      int hi = std::stoi(tok.substr(colon + 1));
      if (hi < lo) throw Error("bad range '" + tok + "'");
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(std::stoi(tok));
    }
  }
  return out;
}

RunReport run_experiment(const ExperimentSpec& spec, int workers) {
  if (workers < 1) throw Error("worker count must be positive");
  auto start = std::chrono::steady_clock::now();
  RunReport report;
  if (spec.name == "heating")
    report = run_heating(spec, workers, false);
  else if (spec.name == "heating_biased")
    report = run_heating(spec, workers, true);
  else if (spec.name == "decimation_1d")
    report = run_decimation_1d(spec, workers);
  else if (spec.name == "kawasaki_probe")
    report = run_kawasaki(spec, workers);
  else if (spec.name == "entropy_vp")
    report = run_entropy_vp(spec, workers);
  else
    throw Error("unknown experiment '" + spec.name +
                "' (expected heating, heating_biased, decimation_1d, kawasaki_probe, entropy_vp)");
  auto end = std::chrono::steady_clock::now();
  report.wall_ms = std::chrono::duration<double, std::milli>(end - start).count();
  return report;
}

namespace {

void write_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open '" + tmp + "' for writing");
    os << content;
    if (!os) throw Error("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string csv_text(const Table& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) os << ',';
    os << t.columns[i];
  }
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << row[i];
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace

std::vector<std::string> emit(const RunReport& report, const std::string& out_dir, bool csv, bool json) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;

  if (csv) {
    for (const Table& t : report.tables) {
      std::string fname = t.name == "main" ? report.spec.name + ".csv" : report.spec.name + "_" + t.name + ".csv";
      std::string path = (std::filesystem::path(out_dir) / fname).string();
      write_atomic(path, csv_text(t));
      written.push_back(path);
    }
  }

  if (json) {
    nlohmann::json j;
    j["metadata"] = {{"experiment", report.spec.name}, {"seed", report.spec.seed},
                     {"engine", report.engine},        {"workers", report.workers},
                     {"wall_ms", report.wall_ms},      {"version", report.version}};
    j["spec"] = nlohmann::json::object();
    for (const auto& [k, v] : report.spec.params) j["spec"][k] = v;
    j["tables"] = nlohmann::json::object();
    for (const Table& t : report.tables) {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& row : t.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < t.columns.size(); ++i) obj[t.columns[i]] = row[i];
        rows.push_back(obj);
      }
      j["tables"][t.name] = rows;
    }
    std::string path = (std::filesystem::path(out_dir) / (report.spec.name + ".json")).string();
    write_atomic(path, j.dump(2) + "\n");
    written.push_back(path);
  }
  return written;
}

int default_worker_count() {
  const char* env = std::getenv("GIBBSLAB_WORKERS");
  if (!env) return 1;
  int n = std::atoi(env);
  return n >= 1 ? n : 1;
}

}  // namespace gibbslab
