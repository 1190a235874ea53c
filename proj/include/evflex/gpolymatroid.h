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

#ifndef EVFLEX_GPOLYMATROID_H_
#define EVFLEX_GPOLYMATROID_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "evflex/model.h"
#include "evflex/set_function.h"
#include "evflex/sfm.h"

namespace evflex {

enum class GPolymatroidKind { kDevice, kSum, kBoxIntersected };

// Q(p, b) = { x : p(A) <= x(A) <= b(A) for all A } in per-period energy
// x(t) = u(t) * delta. Profiles handed in or out are in kW; the conversion
// by delta happens at this boundary.
class GPolymatroid {
 public:
  GPolymatroid(TimeHorizon horizon, SetFunction lower, SetFunction upper,
               GPolymatroidKind kind = GPolymatroidKind::kSum,
               std::size_t box_depth = 0);

  const TimeHorizon& horizon() const { return horizon_; }
  std::size_t periods() const { return horizon_.periods; }
  const SetFunction& lower() const { return lower_; }
  const SetFunction& upper() const { return upper_; }
  GPolymatroidKind kind() const { return kind_; }
  // Number of nested box intersections behind this object.
  std::size_t box_depth() const { return box_depth_; }

 private:
  TimeHorizon horizon_;
  SetFunction lower_;
  SetFunction upper_;
  GPolymatroidKind kind_;
  std::size_t box_depth_;
};

// Per-period limits (kW) on the flexible load through a feeder.
struct PowerBox {
  std::vector<double> lower;
  std::vector<double> upper;

  bool Contains(const ChargingProfile& u, double tolerance) const;
  // Largest violation in kW, zero when inside.
  double Violation(const ChargingProfile& u) const;
};

// A greedy vertex recipe: the first `split` periods of `order` take upper
// (b) prefix marginals, the rest take lower-complement (p) marginals.
struct OrderedSplit {
  std::vector<std::size_t> order;  // permutation of 0..T-1
  std::size_t split = 0;

  friend bool operator==(const OrderedSplit&, const OrderedSplit&) = default;
};

bool IsValidSplit(const OrderedSplit& split, std::size_t periods);

GPolymatroid FromDevice(const EvSpec& ev, const TimeHorizon& horizon);
GPolymatroid ZeroGPolymatroid(const TimeHorizon& horizon);

// (sum p_i, sum b_i). An empty list gives the zero g-polymatroid.
GPolymatroid MinkowskiSum(const TimeHorizon& horizon,
                          std::span<const GPolymatroid> parts);

struct GPolyOptions {
  SfmOptions sfm;
  // Evaluate the T chain sets of the greedy on separate threads.
  bool parallel = false;
  // After the greedy, confirm the result lies in Q (two SFM solves).
  bool verify_membership = false;
};

// Exact membership with absolute slack `tolerance` in kWh, via
// min_A b(A) - x(A) and min_A x(A) - p(A).
bool Contains(const GPolymatroid& g, const ChargingProfile& u,
              double tolerance = 1e-9, const GPolyOptions& options = {});

struct LinearOptimum {
  ChargingProfile profile;
  double objective = 0.0;  // sum_t c(t) u(t) delta
  OrderedSplit split;
  // Number of calls to p or b (the normalized empty set is not evaluated).
  std::size_t chain_evaluations = 0;
};

// Minimizes c . u over Q(p, b) with the g-polymatroid greedy: periods sorted
// by ascending cost (ties by index); negative-cost periods take b-prefix
// marginals, the rest take p-complement marginals.
LinearOptimum OptimizeLinear(const GPolymatroid& g, std::span<const double> cost,
                             const GPolyOptions& options = {});

// The vertex generated by an explicit order and split.
ChargingProfile VertexByOrder(const GPolymatroid& g, const OrderedSplit& split,
                              const GPolyOptions& options = {});

// Nonemptiness of Q(p, b) n B(lower, upper): lower <= upper and
// min_A b(A) - lower(A) >= 0 and min_A upper(A) - p(A) >= 0.
bool CheckIntersectionFeasible(const GPolymatroid& g, const PowerBox& box,
                               const GPolyOptions& options = {},
                               double tolerance = 1e-9);

// Q(p', b') = Q(p, b) n B(lower, upper) with
//   p'(A) = max_X p(X) - upper(X \ A) + lower(A \ X)
//   b'(A) = min_X b(X) - lower(X \ A) + upper(A \ X)
// Every evaluation solves one SFM instance and is memoized for the lifetime
// of the returned object. Throws InfeasibleError when the intersection is
// empty.
GPolymatroid IntersectBox(const GPolymatroid& g, const PowerBox& box,
                          const GPolyOptions& options = {},
                          const std::string& name = "box");

// Flexible-load limits under the total-flow convention: the flow u0 + u must
// stay inside [flow_min, flow_max], so lower = max(0, flow_min - u0) and
// upper = flow_max - u0. Logs a warning when upper < 0 somewhere.
PowerBox DeriveBox(const FeederSpec& feeder);

bool HasNegativeUpper(const PowerBox& box);

// Exhaustive cross-inequality b(X) - p(Y) >= b(X \ Y) - p(Y \ X) for all X, Y.
// Small horizons only (4^T pairs).
bool CheckCompliance(const GPolymatroid& g, double tolerance = 1e-9);

}  // namespace evflex

#endif  // EVFLEX_GPOLYMATROID_H_
