// Copyright 2026 The evflex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "evflex/model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include <fmt/core.h>

#include "evflex/errors.h"

namespace evflex {

double ChargingProfile::Total() const {
  double total = 0.0;
  for (double v : kw_) total += v;
  return total;
}

double ChargingProfile::Norm() const {
  double sq = 0.0;
  for (double v : kw_) sq += v * v;
  return std::sqrt(sq);
}

ChargingProfile& ChargingProfile::operator+=(const ChargingProfile& other) {
  return AddScaled(1.0, other);
}

ChargingProfile& ChargingProfile::AddScaled(double weight,
                                            const ChargingProfile& other) {
  if (other.size() != size()) {
    throw InvalidInputError(fmt::format(
        "profile length mismatch: {} vs {}", size(), other.size()));
  }
  for (std::size_t t = 0; t < kw_.size(); ++t) kw_[t] += weight * other.kw_[t];
  return *this;
}

ChargingProfile operator+(ChargingProfile lhs, const ChargingProfile& rhs) {
  lhs += rhs;
  return lhs;
}

ChargingProfile operator-(const ChargingProfile& lhs,
                          const ChargingProfile& rhs) {
  ChargingProfile out = lhs;
  out.AddScaled(-1.0, rhs);
  return out;
}

std::vector<std::string> Scenario::EvIdsOf(const std::string& feeder_id) const {
  std::vector<std::string> ids;
  for (const auto& [id, ev] : evs) {
    if (ev.feeder_id == feeder_id) ids.push_back(id);
  }
  return ids;
}

std::vector<Violation> ValidateHorizon(const TimeHorizon& horizon) {
  std::vector<Violation> out;
  if (horizon.periods < 1) out.push_back({"horizon", "T >= 1"});
  if (!(horizon.delta > 0.0) || !std::isfinite(horizon.delta)) {
    out.push_back({"horizon", "delta > 0"});
  }
  return out;
}

std::vector<Violation> ValidateEv(const EvSpec& ev, const TimeHorizon& horizon) {
  std::vector<Violation> out;
  const std::string entity = "ev " + ev.id;
  bool window_ok = true;
  if (ev.arrival < 1) {
    out.push_back({entity, "arrival >= 1"});
    window_ok = false;
  }
  if (ev.arrival >= ev.departure) {
    out.push_back({entity, "arrival < departure"});
    window_ok = false;
  }
  if (ev.departure > horizon.periods) {
    out.push_back({entity, "departure <= T"});
    window_ok = false;
  }
  if (!(ev.max_rate > 0.0) || !std::isfinite(ev.max_rate)) {
    out.push_back({entity, "max_rate > 0"});
    window_ok = false;
  }
  if (!std::isfinite(ev.energy_min) || !std::isfinite(ev.energy_max)) {
    out.push_back({entity, "energies finite"});
    return out;
  }
  if (ev.energy_min < 0.0) out.push_back({entity, "energy_min >= 0"});
  if (ev.energy_min > ev.energy_max) {
    out.push_back({entity, "energy_min <= energy_max"});
  }
  if (window_ok) {
    const double cap = ev.MaxDeliverable(horizon.delta);
    if (ev.energy_min > cap) {
      out.push_back({entity, "energy_min exceeds max_rate*|C|*delta"});
    }
    if (ev.energy_max > cap) {
      out.push_back({entity, "energy_max exceeds max_rate*|C|*delta"});
    }
  }
  return out;
}

namespace {

void ValidateSeries(const std::vector<double>& values, std::size_t periods,
                    const std::string& entity, const std::string& name,
                    std::vector<Violation>& out) {
  if (values.size() != periods) {
    out.push_back({entity, name + " has length T"});
    return;
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      out.push_back({entity, name + " finite"});
      return;
    }
  }
}

}  // namespace

std::vector<Violation> ValidateScenario(const Scenario& scenario) {
  std::vector<Violation> out = ValidateHorizon(scenario.horizon);
  const std::size_t periods = scenario.horizon.periods;
  ValidateSeries(scenario.prices, periods, "prices", "prices", out);

  for (const auto& [key, feeder] : scenario.feeders) {
    const std::string entity = "feeder " + key;
    if (key != feeder.id) out.push_back({entity, "key matches id"});
    if (!(feeder.flow_min <= feeder.flow_max)) {
      out.push_back({entity, "flow_min <= flow_max"});
    }
    ValidateSeries(feeder.nominal_load, periods, entity, "nominal_load", out);
    if (feeder.parent && !scenario.feeders.contains(*feeder.parent)) {
      out.push_back({entity, "parent resolves"});
    }
  }

  // Walk parent links; a walk longer than the feeder count is a cycle.
  for (const auto& [key, feeder] : scenario.feeders) {
    std::set<std::string> seen{key};
    const FeederSpec* cursor = &feeder;
    while (cursor->parent) {
      auto it = scenario.feeders.find(*cursor->parent);
      if (it == scenario.feeders.end()) break;
      if (!seen.insert(it->first).second) {
        out.push_back({"feeder " + key, "feeder graph is a forest"});
        break;
      }
      cursor = &it->second;
    }
  }

  for (const auto& [key, ev] : scenario.evs) {
    if (key != ev.id) out.push_back({"ev " + key, "key matches id"});
    if (!scenario.feeders.contains(ev.feeder_id)) {
      out.push_back({"ev " + key, "feeder_id resolves"});
    }
    auto ev_violations = ValidateEv(ev, scenario.horizon);
    out.insert(out.end(), ev_violations.begin(), ev_violations.end());
  }
  return out;
}

SocTrajectory SocFromProfile(const ChargingProfile& profile,
                             const TimeHorizon& horizon) {
  if (profile.size() != horizon.periods) {
    throw InvalidInputError(fmt::format("profile has {} periods, horizon {}",
                                        profile.size(), horizon.periods));
  }
  SocTrajectory soc;
  soc.kwh.resize(horizon.periods + 1, 0.0);
  for (std::size_t t = 0; t < horizon.periods; ++t) {
    soc.kwh[t + 1] = soc.kwh[t] + profile[t] * horizon.delta;
  }
  return soc;
}

double DeviceViolation(const ChargingProfile& profile, const EvSpec& ev,
                       double delta) {
  double worst = 0.0;
  double energy = 0.0;
  for (std::size_t t = 0; t < profile.size(); ++t) {
    const double u = profile[t];
    if (!std::isfinite(u)) return std::numeric_limits<double>::infinity();
    const bool connected = t >= ev.first_index() && t <= ev.last_index();
    if (connected) {
      worst = std::max({worst, -u, u - ev.max_rate});
    } else {
      worst = std::max(worst, std::abs(u));
    }
    energy += u * delta;
  }
  if (profile.size() <= ev.last_index()) {
    return std::numeric_limits<double>::infinity();
  }
  worst = std::max({worst, ev.energy_min - energy, energy - ev.energy_max});
  return worst;
}

bool IsDeviceFeasible(const ChargingProfile& profile, const EvSpec& ev,
                      double delta, double tolerance) {
  return DeviceViolation(profile, ev, delta) <= tolerance;
}

std::vector<EvSpec> SamplePopulation(std::uint64_t seed, std::size_t count,
                                     const TimeHorizon& horizon,
                                     const SamplerConfig& config,
                                     const std::string& feeder_id) {
  const std::size_t periods = horizon.periods;
  if (config.rate_choices.empty()) {
    throw InvalidInputError("sampler needs at least one rate choice");
  }
  for (double rate : config.rate_choices) {
    if (!(rate > 0.0)) throw InvalidInputError("sampler rates must be > 0");
  }
  if (!(config.energy_min_low >= 0.0 &&
        config.energy_min_low <= config.energy_min_high &&
        config.energy_min_high <= 1.0 && config.energy_band >= 0.0)) {
    throw InvalidInputError("sampler energy fractions must satisfy "
                            "0 <= low <= high <= 1 and band >= 0");
  }
  if (!(horizon.delta > 0.0)) throw InvalidInputError("delta must be > 0");

  const double t = static_cast<double>(periods);
  const std::size_t arrival_hi = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(config.arrival_fraction * t)));
  const std::size_t departure_lo = std::max<std::size_t>(
      arrival_hi + 1,
      static_cast<std::size_t>(std::ceil(config.departure_fraction * t)));
  if (config.arrival_fraction <= 0.0 || config.departure_fraction > 1.0 ||
      departure_lo > periods) {
    throw InvalidInputError(fmt::format(
        "arrival window [1, {}] leaves no departure slot in [{}, {}]",
        arrival_hi, departure_lo, periods));
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> arrival_dist(1, arrival_hi);
  std::uniform_int_distribution<std::size_t> departure_dist(departure_lo,
                                                            periods);
  std::uniform_int_distribution<std::size_t> rate_dist(
      0, config.rate_choices.size() - 1);
  std::uniform_real_distribution<double> fraction_dist(config.energy_min_low,
                                                       config.energy_min_high);

  std::vector<EvSpec> evs;
  evs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    EvSpec ev;
    ev.id = fmt::format("{}-ev{:02d}", feeder_id, i + 1);
    ev.feeder_id = feeder_id;
    ev.arrival = arrival_dist(rng);
    ev.departure = departure_dist(rng);
    ev.max_rate = config.rate_choices[rate_dist(rng)];
    const double cap = ev.MaxDeliverable(horizon.delta);
    ev.energy_min = fraction_dist(rng) * cap;
    ev.energy_max = std::min(ev.energy_min + config.energy_band * cap, cap);
    evs.push_back(std::move(ev));
  }
  return evs;
}

}  // namespace evflex
