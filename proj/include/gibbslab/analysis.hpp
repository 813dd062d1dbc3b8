#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "gibbslab/specification.hpp"

namespace gibbslab {

// Quasilocality probe at a candidate configuration: the change in the
// conditional at the origin when the values beyond radius n swing between two
// boundary patterns. Reported as a curve over n, never as a verdict — finite
// windows cannot witness a genuine discontinuity.
struct DefectRow {
  int n;
  int N;
  bool missing = false;  // empirical conditioning count below threshold
  double delta = 0;
  double err = 0;  // Monte Carlo error; 0 for exact models
};

struct DefectCurve {
  std::vector<DefectRow> rows;
};

struct DefectOptions {
  std::vector<int> n_values;
  Pattern eta = Pattern::alternating();
  std::pair<Pattern, Pattern> boundary_pair = {Pattern::plus(), Pattern::minus()};
  EngineKind engine = EngineKind::Enum;
  int target_symbol = +1;
  int min_count = 100;  // empirical models only
};

DefectCurve defect_curve(const MeasureModel& model, const DefectOptions& opt);

// H_Lambda(nu | mu) = sum nu log(nu / mu), with 0 log 0 = 0; +infinity when
// mu vanishes somewhere nu does not.
double relative_entropy_box(const MeasureModel& nu, const MeasureModel& mu, const Volume& lambda,
                            EngineKind engine = EngineKind::Enum);

struct EntropyRow {
  int n;
  double h_per_site;
};

struct EntropyCurve {
  std::vector<EntropyRow> rows;
};

EntropyCurve entropy_density_curve(const MeasureModel& nu, const MeasureModel& mu, int n_max,
                                   EngineKind engine = EngineKind::Enum);

// Distance between the model's origin conditional given omega on box(n) and
// the Boltzmann kernel of phi with omega as the outer boundary.
struct ConsistencyRow {
  int n;
  double d;
};

std::vector<ConsistencyRow> consistency_check(const MeasureModel& model, const Interaction& phi,
                                              const std::vector<int>& n_values, const Pattern& omega,
                                              EngineKind engine = EngineKind::Enum);

}  // namespace gibbslab
