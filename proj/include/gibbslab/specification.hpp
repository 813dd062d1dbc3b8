#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "gibbslab/engine.hpp"
#include "gibbslab/interaction.hpp"
#include "gibbslab/lattice.hpp"

namespace gibbslab {

struct Transform;  // transforms.hpp

// Site-dependent single-site log-weight (used by constrained first-layer
// models, where the observed second layer acts as a site-wise field).
struct SiteField {
  Site site;
  std::vector<double> log_weight;  // one entry per alphabet symbol
};

struct CondValue {
  double p = 0;
  double err = 0;  // Monte Carlo error; 0 for exact engines
};

// A conditional-probability request. Targets are the queried sites with their
// queried symbols; conditioning pins other sites; any remaining window sites
// are marginalized. The optional pattern supplies the outer boundary for
// specification kernels built directly from a potential.
struct ConditionalQuery {
  std::vector<std::pair<Site, int>> targets;
  std::vector<std::pair<Site, int>> conditioning;
  std::optional<Pattern> boundary;
  int min_count = 1;  // empirical models: matches below this are undefined

  ConditionalQuery& target(const Site& s, int symbol) {
    targets.push_back({s, symbol});
    return *this;
  }
  ConditionalQuery& condition(const Site& s, int symbol) {
    conditioning.push_back({s, symbol});
    return *this;
  }
  // pin every site of `vol` except `except` to pattern values
  ConditionalQuery& condition_from(const Volume& vol, const Pattern& p, const std::vector<Site>& except);
};

struct Geometry {
  enum class Kind { Line, Strip } kind;
  int width = 1;
  static Geometry line() { return {Kind::Line, 1}; }
  static Geometry strip(int width) { return {Kind::Strip, width}; }
};

double log_partition_function(const Interaction& phi, const Volume& lambda, const Pattern& omega,
                              EngineKind engine = EngineKind::Enum);
double partition_function(const Interaction& phi, const Volume& lambda, const Pattern& omega,
                          EngineKind engine = EngineKind::Enum);

// Boltzmann conditional kernel of phi on `window`: targets and conditioning
// from the query, everything else (inside from conditioning, outside from the
// query boundary pattern, or free) pinned. Exact up to floating point.
double gamma(const Interaction& phi, const Volume& window, const ConditionalQuery& query,
             EngineKind engine = EngineKind::Enum);

// Per-site log of the leading transfer-matrix eigenvalue (power iteration).
double pressure(const Interaction& phi, const Geometry& geometry, double rel_tol = 1e-12);

// Finite-window measure with exactly computable conditionals and marginals.
class MeasureModel {
 public:
  enum class Variant { Gibbs, TimeEvolved, Transformed, Empirical };

  struct GibbsData {
    Interaction phi;
    Volume window;
    Boundary boundary;
    std::vector<SiteField> fields;
  };
  struct TimeEvolvedData {
    Interaction phi;
    double t;
    Volume window;
    Boundary sigma_boundary;
  };
  struct TransformedData {
    std::shared_ptr<const MeasureModel> base;
    std::shared_ptr<const Transform> transform;
    Volume image_window;
    Alphabet image_alphabet;
  };
  struct EmpiricalData {
    std::vector<Configuration> samples;
  };

  static MeasureModel gibbs(Interaction phi, Volume window, Boundary boundary);
  static MeasureModel gibbs_with_fields(Interaction phi, Volume window, Boundary boundary,
                                        std::vector<SiteField> fields);
  static MeasureModel time_evolved(Interaction phi, double t, Volume window, Boundary sigma_boundary);
  static MeasureModel transformed(MeasureModel base, const Transform& transform);
  static MeasureModel empirical(std::vector<Configuration> samples);

  Variant variant() const;
  const Volume& window() const;
  const Alphabet& alphabet() const;
  int dim() const { return window().dim(); }

  const GibbsData* as_gibbs() const { return std::get_if<GibbsData>(&data_); }
  const TimeEvolvedData* as_time_evolved() const { return std::get_if<TimeEvolvedData>(&data_); }
  const TransformedData* as_transformed() const { return std::get_if<TransformedData>(&data_); }
  const EmpiricalData* as_empirical() const { return std::get_if<EmpiricalData>(&data_); }

  // joint distribution over assignments of the target sites given the
  // conditioning (mixed-radix order, first target most significant)
  std::vector<double> target_distribution(const std::vector<Site>& targets,
                                          const std::vector<std::pair<Site, int>>& conditioning,
                                          EngineKind engine = EngineKind::Enum) const;

  // probability of the queried assignment; nullopt when an empirical
  // conditioning count falls below query.min_count
  std::optional<CondValue> conditional(const ConditionalQuery& query,
                                       EngineKind engine = EngineKind::Enum) const;

  // exact (or empirical) marginal law on lambda, q^|lambda| entries
  std::vector<double> marginal_table(const Volume& lambda, EngineKind engine = EngineKind::Enum) const;

 private:
  explicit MeasureModel(std::variant<GibbsData, TimeEvolvedData, TransformedData, EmpiricalData> data)
      : data_(std::move(data)) {}
  std::variant<GibbsData, TimeEvolvedData, TransformedData, EmpiricalData> data_;
};

// preimage-sum evaluation of transformed models; implemented alongside the
// transforms, declared here so the model dispatcher can reach it
std::vector<double> transformed_target_log_weights(const MeasureModel::TransformedData& data,
                                                   const std::vector<Site>& targets,
                                                   const std::vector<std::pair<Site, int>>& conditioning,
                                                   EngineKind engine);
std::vector<double> transformed_marginal_log_weights(const MeasureModel::TransformedData& data,
                                                     const Volume& lambda, EngineKind engine);

}  // namespace gibbslab
