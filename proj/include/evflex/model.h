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

#ifndef EVFLEX_MODEL_H_
#define EVFLEX_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace evflex {

// Absolute tolerance (kW / kWh) used by every device-level feasibility check.
inline constexpr double kFeasibilityTolerance = 1e-9;

struct TimeHorizon {
  std::size_t periods = 0;  // number of settlement periods
  double delta = 1.0;       // period duration in hours
};

// Operational envelope of one charging-only EV. Arrival and departure are
// 1-based period numbers; the EV may charge in every period of the inclusive
// window [arrival, departure].
struct EvSpec {
  std::string id;
  std::string feeder_id;
  std::size_t arrival = 1;
  std::size_t departure = 1;
  double max_rate = 0.0;    // kW
  double energy_min = 0.0;  // kWh
  double energy_max = 0.0;  // kWh

  std::size_t first_index() const { return arrival - 1; }
  std::size_t last_index() const { return departure - 1; }
  std::size_t window_length() const { return departure - arrival + 1; }
  // m * |C| * delta: the most energy the EV can absorb.
  double MaxDeliverable(double delta) const {
    return max_rate * static_cast<double>(window_length()) * delta;
  }
};

// Per-period power in kW. Not required to be non-negative.
class ChargingProfile {
 public:
  ChargingProfile() = default;
  explicit ChargingProfile(std::vector<double> kw) : kw_(std::move(kw)) {}
  static ChargingProfile Zero(std::size_t periods) {
    return ChargingProfile(std::vector<double>(periods, 0.0));
  }

  std::size_t size() const { return kw_.size(); }
  double operator[](std::size_t t) const { return kw_[t]; }
  double& operator[](std::size_t t) { return kw_[t]; }
  const std::vector<double>& values() const { return kw_; }
  std::vector<double>::const_iterator begin() const { return kw_.begin(); }
  std::vector<double>::const_iterator end() const { return kw_.end(); }

  double Total() const;
  double Norm() const;  // Euclidean
  ChargingProfile& operator+=(const ChargingProfile& other);
  ChargingProfile& AddScaled(double weight, const ChargingProfile& other);

  friend bool operator==(const ChargingProfile&, const ChargingProfile&) =
      default;

 private:
  std::vector<double> kw_;
};

ChargingProfile operator+(ChargingProfile lhs, const ChargingProfile& rhs);
ChargingProfile operator-(const ChargingProfile& lhs,
                          const ChargingProfile& rhs);

// State of charge in kWh at period boundaries 0..T.
struct SocTrajectory {
  std::vector<double> kwh;
};

struct FeederSpec {
  std::string id;
  double flow_min = 0.0;  // kW
  double flow_max = 0.0;  // kW
  std::vector<double> nominal_load;  // kW, length T
  std::optional<std::string> parent;
};

struct Scenario {
  TimeHorizon horizon;
  std::map<std::string, FeederSpec> feeders;
  std::map<std::string, EvSpec> evs;
  std::vector<double> prices;  // currency per kWh, length T

  std::vector<std::string> EvIdsOf(const std::string& feeder_id) const;
};

struct Violation {
  std::string entity;
  std::string rule;

  friend bool operator==(const Violation&, const Violation&) = default;
};

std::vector<Violation> ValidateHorizon(const TimeHorizon& horizon);
std::vector<Violation> ValidateEv(const EvSpec& ev, const TimeHorizon& horizon);
std::vector<Violation> ValidateScenario(const Scenario& scenario);

// Integrates x(t+1) = x(t) + u(t) * delta from x(0) = 0.
SocTrajectory SocFromProfile(const ChargingProfile& profile,
                             const TimeHorizon& horizon);

// Largest violation (kW or kWh, >= 0) of the EV's power window, rate and
// energy constraints. Zero means feasible.
double DeviceViolation(const ChargingProfile& profile, const EvSpec& ev,
                       double delta);
bool IsDeviceFeasible(const ChargingProfile& profile, const EvSpec& ev,
                      double delta, double tolerance = kFeasibilityTolerance);

struct SamplerConfig {
  double arrival_fraction = 1.0 / 3.0;    // arrival uniform on [1, f*T]
  double departure_fraction = 2.0 / 3.0;  // departure uniform on [f*T, T]
  std::vector<double> rate_choices = {3.6, 7.2, 11.0};
  double energy_min_low = 0.3;
  double energy_min_high = 0.9;
  double energy_band = 0.1;
};

// Draws n EVs for one feeder. Deterministic in (seed, arguments); every EV
// returned passes ValidateEv. Ids are "<feeder_id>-evNN".
std::vector<EvSpec> SamplePopulation(std::uint64_t seed, std::size_t count,
                                     const TimeHorizon& horizon,
                                     const SamplerConfig& config = {},
                                     const std::string& feeder_id = "F1");

}  // namespace evflex

#endif  // EVFLEX_MODEL_H_
