#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "esdv/ingest.hpp"

namespace esdv::sensitivity {

enum class Distribution { uniform, triangular };

std::string_view to_string(Distribution d);
Distribution distribution_from_string(std::string_view s);

struct SensitivityConfig {
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  /// Triangular uses the parameter's point value as the mode.
  Distribution distribution = Distribution::uniform;
  /// Relative step for the central-difference elasticities.
  double delta = 1e-3;
  /// Worker count. Never changes the report.
  unsigned threads = 1;
};

struct Statistics {
  double mean = 0.0;
  double sd = 0.0;
  double p5 = 0.0;
  double p95 = 0.0;

  bool operator==(const Statistics &) const = default;
};

struct SensitivityReport {
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  Distribution distribution = Distribution::uniform;
  double delta = 0.0;
  /// Elasticity of net value per parameter; empty when undefined (zero
  /// point value, or the perturbation leaves a kernel's domain).
  std::map<std::string, std::optional<double>> elasticities;
  Statistics es_total;
  Statistics eds_total;
  Statistics net;
  std::size_t rejected_draws = 0;

  bool operator==(const SensitivityReport &) const = default;
};

/// Central-difference elasticity of net value with respect to one
/// parameter: (V(p(1+d)) - V(p(1-d))) / (2 d V(p)).
///
/// Throws StructuralError for an unknown id, UndefinedElasticityError when
/// the point value is zero and ArithmeticError when net value is zero.
double oat_elasticity(const ingest::ValuationModel &model,
                      const ingest::ParameterSet &params, std::string_view id,
                      double delta = 1e-3);

/// Seeded Monte-Carlo propagation over every parameter with an uncertainty
/// interval; the rest stay fixed. Draw j of parameter i depends only on
/// (seed, i, j, attempt), so the report is independent of thread count.
///
/// A draw that violates a kernel precondition is resampled. More than
/// 100 * samples rejections in total raise ConfigurationError.
SensitivityReport monte_carlo(const ingest::ValuationModel &model,
                              const ingest::ParameterSet &params,
                              const SensitivityConfig &config);

/// Counter-based uniform variate in [0, 1).
double uniform_variate(std::uint64_t seed, std::uint64_t parameter,
                       std::uint64_t draw, std::uint64_t attempt);

/// Maps a unit variate onto [low, high].
double sample_interval(double u, double low, double mode, double high,
                       Distribution d);

/// Mean, sample standard deviation and nearest-rank 5th/95th percentiles.
Statistics summarize(std::span<const double> values);

} // namespace esdv::sensitivity
