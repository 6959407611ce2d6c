#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "rcdamage/error.hpp"
#include "rcdamage/fusion.hpp"

namespace rcdamage {

enum class CostDistribution { lognormal, normal };

inline std::string_view to_string(CostDistribution d) {
  return d == CostDistribution::lognormal ? "lognormal" : "normal";
}

/// Consequence data of one damage state: unit cost with no economies of scale
/// (at or below q_min) and with full economies of scale (at or above q_max).
struct ConsequenceRecord {
  DamageState ds = DamageState::DS0;
  double cost_at_min_qty = 0.0;
  double cost_at_max_qty = 0.0;
  double dispersion = 0.0;
  CostDistribution distribution = CostDistribution::lognormal;
};

struct FragilityEntry {
  std::string component_id;
  double q_min = 0.0;
  double q_max = 0.0;
  std::vector<ConsequenceRecord> records;
  std::string note; // provenance remarks, e.g. placeholder quantity thresholds

  const ConsequenceRecord *find(DamageState ds) const {
    for (const auto &r : records)
      if (r.ds == ds)
        return &r;
    return nullptr;
  }
};

using FragilityDatabase = std::map<std::string, FragilityEntry>;

inline void validate(const FragilityEntry &e, const std::string &where) {
  if (e.component_id.empty())
    throw data_error(where + ": component_id is empty");
  if (!std::isfinite(e.q_min) || !std::isfinite(e.q_max) || !(e.q_min < e.q_max))
    throw data_error(where + ": q_min must be < q_max");
  if (!(e.q_min >= 0.0))
    throw data_error(where + ": q_min must be >= 0");
  std::array<bool, num_damage_states> seen{};
  for (std::size_t i = 0; i < e.records.size(); ++i) {
    const auto &r = e.records[i];
    const std::string at = where + ".damage_states[" + std::to_string(i) + "]";
    if (seen[index_of(r.ds)])
      throw data_error(at + ": duplicate record for " + std::string(to_string(r.ds)));
    seen[index_of(r.ds)] = true;
    if (!std::isfinite(r.cost_at_min_qty) || !std::isfinite(r.cost_at_max_qty) ||
        !(r.cost_at_max_qty >= 0.0))
      throw data_error(at + ": costs must be finite and >= 0");
    if (!(r.cost_at_min_qty >= r.cost_at_max_qty))
      throw data_error(at + ": cost_at_min_qty must be >= cost_at_max_qty (economies of scale)");
    if (!std::isfinite(r.dispersion) || !(r.dispersion >= 0.0))
      throw data_error(at + ": dispersion must be finite and >= 0");
    if (r.ds == DamageState::DS0 &&
        (r.cost_at_min_qty != 0.0 || r.cost_at_max_qty != 0.0 || r.dispersion != 0.0))
      throw data_error(at + ": DS0 record must have zero costs and zero dispersion");
  }
}

/// Central unit cost from the consequence function: flat at the extremes,
/// linear in between.
inline double unit_cost(const FragilityEntry &entry, DamageState ds, double quantity) {
  const ConsequenceRecord *r = entry.find(ds);
  if (r == nullptr)
    throw data_error("fragility '" + entry.component_id + "' has no record for " +
                     std::string(to_string(ds)));
  if (!(quantity > 0.0))
    throw input_error("unit_cost: quantity must be > 0");
  if (quantity <= entry.q_min)
    return r->cost_at_min_qty;
  if (quantity >= entry.q_max)
    return r->cost_at_max_qty;
  const double f = (quantity - entry.q_min) / (entry.q_max - entry.q_min);
  return r->cost_at_min_qty + f * (r->cost_at_max_qty - r->cost_at_min_qty);
}

/// Draws one unit cost around `central`.
///
/// Lognormal: central is the median theta and the draw is theta * exp(beta * Z).
/// With `central_is_mean` theta becomes central / exp(beta^2 / 2) instead.
/// Normal: mean central, standard deviation beta * central, negative draws are
/// redrawn. A zero dispersion returns central without consuming randomness.
template <class Rng>
double sample_cost(double central, double dispersion, CostDistribution dist, Rng &rng,
                   bool central_is_mean = false) {
  if (!(dispersion >= 0.0) || !std::isfinite(dispersion))
    throw input_error("sample_cost: dispersion must be finite and >= 0");
  if (!(central >= 0.0))
    throw input_error("sample_cost: central value must be >= 0");
  if (dispersion == 0.0 || central == 0.0)
    return central;
  std::normal_distribution<double> z(0.0, 1.0);
  if (dist == CostDistribution::lognormal) {
    const double theta =
        central_is_mean ? central / std::exp(0.5 * dispersion * dispersion) : central;
    return theta * std::exp(dispersion * z(rng));
  }
  const double sd = dispersion * central;
  for (;;) {
    const double v = central + sd * z(rng);
    if (v >= 0.0)
      return v;
  }
}

/// Independent generator for realization `r`: the stream depends only on
/// (seed, r), so any partition of realizations over threads gives the same
/// draws.
inline std::mt19937_64 realization_stream(std::uint64_t seed, std::uint64_t r) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(r >> 32),
                    0x5eedc057u};
  return std::mt19937_64(seq);
}

struct PerformanceGroup {
  std::string fragility_id;
  double quantity = 1.0; // repair quantity driving the consequence function
  std::vector<DamageState> component_states;
};

struct SimulationOptions {
  std::size_t realizations = 10000;
  std::uint64_t seed = 0;
  bool costs_are_means = false;
  std::optional<double> replacement_cost; // set when the building collapsed
  unsigned threads = 1;                   // 0 means hardware concurrency
};

struct LossCurve {
  std::vector<double> realizations; // ascending
  std::optional<double> fitted_median;
  std::optional<double> fitted_dispersion;
  std::uint64_t seed = 0;
  bool collapsed = false;
};

/// Lognormal fit by moments of the log-realizations; undefined when any
/// realization is non-positive.
inline void fit_lognormal(LossCurve &curve) {
  curve.fitted_median.reset();
  curve.fitted_dispersion.reset();
  const auto &x = curve.realizations;
  if (x.empty() || x.front() <= 0.0)
    return;
  double mean = 0.0;
  for (double v : x)
    mean += std::log(v);
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) {
    const double d = std::log(v) - mean;
    ss += d * d;
  }
  const double var = x.size() > 1 ? ss / static_cast<double>(x.size() - 1) : 0.0;
  curve.fitted_median = std::exp(mean);
  curve.fitted_dispersion = std::sqrt(var);
}

/// Monte Carlo total repair cost: each realization sums one sampled unit cost
/// per component over every performance group.
inline LossCurve simulate_total(const std::vector<PerformanceGroup> &groups,
                                const FragilityDatabase &db, const SimulationOptions &opt) {
  if (opt.realizations < 1)
    throw input_error("simulate: realizations must be >= 1");
  LossCurve curve;
  curve.seed = opt.seed;

  if (opt.replacement_cost) {
    if (!(*opt.replacement_cost >= 0.0))
      throw input_error("simulate: replacement cost must be >= 0");
    curve.collapsed = true;
    curve.realizations.assign(opt.realizations, *opt.replacement_cost);
    fit_lognormal(curve);
    return curve;
  }

  struct Draw {
    double central;
    double dispersion;
    CostDistribution dist;
  };
  std::vector<Draw> draws;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto it = db.find(groups[g].fragility_id);
    if (it == db.end())
      throw data_error("simulate: fragility id '" + groups[g].fragility_id +
                       "' (group " + std::to_string(g) + ") not found in database");
    for (DamageState ds : groups[g].component_states) {
      const double central = unit_cost(it->second, ds, groups[g].quantity);
      const ConsequenceRecord *rec = it->second.find(ds);
      draws.push_back({central, rec->dispersion, rec->distribution});
    }
  }

  curve.realizations.resize(opt.realizations);
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      auto rng = realization_stream(opt.seed, r);
      double total = 0.0;
      for (const Draw &d : draws)
        total += sample_cost(d.central, d.dispersion, d.dist, rng, opt.costs_are_means);
      curve.realizations[r] = total;
    }
  };

  unsigned threads = opt.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                      : opt.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, opt.realizations));
  if (threads <= 1) {
    run_range(0, opt.realizations);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (opt.realizations + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk;
      const std::size_t e = std::min(opt.realizations, b + chunk);
      if (b < e)
        pool.emplace_back(run_range, b, e);
    }
  }

  std::sort(curve.realizations.begin(), curve.realizations.end());
  fit_lognormal(curve);
  return curve;
}

/// Empirical quantile, linear interpolation between order statistics at
/// position p * (n - 1).
inline double quantile(const LossCurve &curve, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw input_error("quantile: p must lie in (0,1)");
  const auto &x = curve.realizations;
  if (x.empty())
    throw input_error("quantile: loss curve is empty");
  const double h = p * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

inline double mean_cost(const LossCurve &curve) {
  if (curve.realizations.empty())
    throw input_error("mean: loss curve is empty");
  double s = 0.0;
  for (double v : curve.realizations)
    s += v;
  return s / static_cast<double>(curve.realizations.size());
}

inline std::size_t count_state(const std::vector<PerformanceGroup> &groups, DamageState ds) {
  std::size_t n = 0;
  for (const auto &g : groups)
    n += static_cast<std::size_t>(std::count(g.component_states.begin(), g.component_states.end(), ds));
  return n;
}

} // namespace rcdamage
