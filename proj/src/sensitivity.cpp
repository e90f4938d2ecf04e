#include "esdv/sensitivity.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace esdv::sensitivity {

namespace {

std::uint64_t mix(std::uint64_t z) {
  // splitmix64 finalizer
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double net_value(const ingest::ValuationModel &model,
                 const ingest::ParameterSet &params) {
  auto results = ingest::evaluate(model, params);
  return kernels::build_ledger(results).net.magnitude();
}

struct DrawResult {
  double es = 0.0;
  double eds = 0.0;
  double net = 0.0;
  std::size_t rejections = 0;
};

} // namespace

std::string_view to_string(Distribution d) {
  return d == Distribution::uniform ? "uniform" : "triangular";
}

Distribution distribution_from_string(std::string_view s) {
  if (s == "uniform")
    return Distribution::uniform;
  if (s == "triangular")
    return Distribution::triangular;
  throw std::invalid_argument("unknown distribution '" + std::string(s) + "'");
}

double uniform_variate(std::uint64_t seed, std::uint64_t parameter,
                       std::uint64_t draw, std::uint64_t attempt) {
  std::uint64_t x = mix(seed);
  x = mix(x ^ parameter);
  x = mix(x ^ draw);
  x = mix(x ^ attempt);
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

double sample_interval(double u, double low, double mode, double high,
                       Distribution d) {
  if (high == low)
    return low;
  if (d == Distribution::uniform)
    return low + u * (high - low);
  double span = high - low;
  double fc = (mode - low) / span;
  double x = u < fc ? low + std::sqrt(u * span * (mode - low))
                    : high - std::sqrt((1.0 - u) * span * (high - mode));
  return std::clamp(x, low, high);
}

Statistics summarize(std::span<const double> values) {
  Statistics s;
  if (values.empty())
    return s;
  const double n = static_cast<double>(values.size());
  // Shifting by the first sample keeps a constant sample exactly constant.
  const double origin = values.front();
  double shifted = 0.0;
  for (double v : values)
    shifted += v - origin;
  s.mean = origin + shifted / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values)
      ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (n - 1.0));
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  auto nearest_rank = [&](std::size_t percent) {
    std::size_t rank = (percent * sorted.size() + 99) / 100;
    return sorted[std::max<std::size_t>(rank, 1) - 1];
  };
  s.p5 = nearest_rank(5);
  s.p95 = nearest_rank(95);
  return s;
}

double oat_elasticity(const ingest::ValuationModel &model,
                      const ingest::ParameterSet &params, std::string_view id,
                      double delta) {
  if (!(delta > 0.0))
    throw ConfigurationError("elasticity step must be positive");
  const units::Parameter *p = params.find(id);
  if (!p)
    throw StructuralError("unknown parameter '" + std::string(id) + "'");
  const double point = p->quantity().magnitude();
  if (point == 0.0)
    throw UndefinedElasticityError("parameter '" + std::string(id) +
                                   "' has point value 0");
  const double base = net_value(model, params);
  if (base == 0.0)
    throw ArithmeticError("net value is zero; elasticity undefined");

  auto perturbed = [&](double factor) {
    ingest::ParameterSet copy = params;
    copy.parameters.at(std::string(id)) = p->with_magnitude(point * factor);
    return net_value(model, copy);
  };
  double up = perturbed(1.0 + delta);
  double down = perturbed(1.0 - delta);
  return (up - down) / (2.0 * delta * base);
}

SensitivityReport monte_carlo(const ingest::ValuationModel &model,
                              const ingest::ParameterSet &params,
                              const SensitivityConfig &config) {
  if (config.samples == 0)
    throw StructuralError("sample count must be at least 1");
  if (!(config.delta > 0.0))
    throw ConfigurationError("elasticity step must be positive");

  struct Sampled {
    std::uint64_t index;
    std::string id;
    units::Parameter param;
  };
  std::vector<Sampled> sampled;
  std::uint64_t index = 0;
  for (const auto &[id, p] : params.parameters) {
    if (p.uncertainty())
      sampled.push_back({index, id, p});
    ++index;
  }
  if (sampled.empty())
    throw ConfigurationError("no parameter carries an uncertainty interval");

  // Fails fast on binding problems rather than rejecting every draw.
  {
    auto check = ingest::bind(model, params);
    if (!check.ok())
      throw StructuralError(check.errors.front().message());
  }

  const std::size_t n = config.samples;
  const std::size_t cap = 100 * n;
  std::vector<DrawResult> draws(n);
  std::atomic<std::size_t> total_rejections{0};
  std::atomic<bool> aborted{false};

  auto run_draw = [&](std::size_t j) {
    DrawResult r;
    for (std::uint64_t attempt = 0;; ++attempt) {
      if (aborted.load(std::memory_order_relaxed))
        return;
      ingest::ParameterSet draw = params;
      for (const auto &s : sampled) {
        const auto &iv = *s.param.uncertainty();
        double u = uniform_variate(config.seed, s.index, j, attempt);
        double v = sample_interval(u, iv.low, s.param.quantity().magnitude(),
                                   iv.high, config.distribution);
        draw.parameters.at(s.id) = s.param.with_magnitude(v);
      }
      try {
        auto ledger = kernels::build_ledger(ingest::evaluate(model, draw));
        r.es = ledger.es_total.magnitude();
        r.eds = ledger.eds_total.magnitude();
        r.net = ledger.net.magnitude();
        draws[j] = r;
        return;
      } catch (const EvaluationError &) {
        ++r.rejections;
        draws[j].rejections = r.rejections;
        if (total_rejections.fetch_add(1) + 1 > cap) {
          aborted = true;
          return;
        }
      }
    }
  };

  unsigned threads = std::max(1u, config.threads);
  if (threads == 1) {
    for (std::size_t j = 0; j < n && !aborted; ++j)
      run_draw(j);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t j = t; j < n; j += threads)
          run_draw(j);
      });
    for (auto &th : pool)
      th.join();
  }
  if (aborted)
    throw ConfigurationError(
        "more than " + std::to_string(cap) +
        " draws violated kernel preconditions; check the uncertainty "
        "intervals");

  SensitivityReport report;
  report.seed = config.seed;
  report.samples = n;
  report.distribution = config.distribution;
  report.delta = config.delta;

  std::vector<double> es(n), eds(n), net(n);
  for (std::size_t j = 0; j < n; ++j) {
    es[j] = draws[j].es;
    eds[j] = draws[j].eds;
    net[j] = draws[j].net;
    report.rejected_draws += draws[j].rejections;
  }
  report.es_total = summarize(es);
  report.eds_total = summarize(eds);
  report.net = summarize(net);

  for (const auto &[id, p] : params.parameters) {
    (void)p;
    try {
      report.elasticities[id] = oat_elasticity(model, params, id, config.delta);
    } catch (const Error &) {
      report.elasticities[id] = std::nullopt;
    }
  }
  return report;
}

} // namespace esdv::sensitivity
