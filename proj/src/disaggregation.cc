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

#include "evflex/disaggregation.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <fmt/core.h>
#include <spdlog/spdlog.h>

#include "evflex/errors.h"
#include "evflex/min_norm_point.h"

namespace evflex {

ChargingProfile VertexDecomposition::Reconstruct() const {
  ChargingProfile out = ChargingProfile::Zero(target.size());
  for (const auto& e : entries) out.AddScaled(e.weight, e.vertex);
  return out;
}

namespace {

using Atom = MinNormAtom<OrderedSplit>;

Eigen::VectorXd ToEigen(const ChargingProfile& u) {
  return Eigen::Map<const Eigen::VectorXd>(u.values().data(),
                                           static_cast<Eigen::Index>(u.size()));
}

ChargingProfile FromEigen(const Eigen::VectorXd& v) {
  return ChargingProfile(std::vector<double>(v.data(), v.data() + v.size()));
}

class VertexOracle {
 public:
  VertexOracle(const GPolymatroid& g, const GPolyOptions& options)
      : g_(g), options_(options) {}

  Atom operator()(const Eigen::VectorXd& direction) const {
    const LinearOptimum opt = OptimizeLinear(
        g_, std::span<const double>(direction.data(),
                                    static_cast<std::size_t>(direction.size())),
        options_);
    return Atom{ToEigen(opt.profile), opt.split};
  }

  Atom FromSplit(const OrderedSplit& split) const {
    return Atom{ToEigen(VertexByOrder(g_, split, options_)), split};
  }

 private:
  const GPolymatroid& g_;
  GPolyOptions options_;
};

// Reports a target outside the set when the oracle separates it, otherwise
// a convergence failure.
[[noreturn]] void FailDecomposition(const VertexOracle& oracle,
                                    const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& target,
                                    std::size_t iterations, double tolerance) {
  const Eigen::VectorXd residual = x - target;
  const Atom probe = oracle(residual);
  const double norm = residual.norm();
  const double lower_bound =
      norm > 0.0 ? residual.dot(probe.point - target) / norm : 0.0;
  if (lower_bound > tolerance) {
    throw MembershipError(fmt::format(
        "profile lies outside the flexibility set (distance >= {:.3e} kW)",
        lower_bound));
  }
  throw ConvergenceError(fmt::format(
      "vertex decomposition stopped after {} iterations at residual {:.3e} "
      "(tolerance {:.3e})",
      iterations, norm, tolerance));
}

struct RawDecomposition {
  std::vector<Atom> atoms;
  std::vector<double> weights;
  std::size_t iterations = 0;
};

RawDecomposition RunMinNorm(const VertexOracle& oracle,
                            const Eigen::VectorXd& target, double tolerance,
                            std::size_t max_iterations,
                            std::vector<Atom> seeds) {
  MinNormOptions mn;
  mn.distance_tolerance = tolerance;
  mn.max_major_iterations = max_iterations;
  mn.gap_tolerance = 1e-15;
  auto outcome = FindMinNormPoint<OrderedSplit>(
      target, oracle, [](const Eigen::VectorXd&, const Atom&) { return false; },
      mn, std::move(seeds));
  if (outcome.stop != MinNormStop::kTargetReached) {
    spdlog::debug("min-norm point stopped ({}) with {} atoms, distance {:.3e}",
                  static_cast<int>(outcome.stop), outcome.atoms.size(),
                  outcome.distance);
    FailDecomposition(oracle, outcome.point, target, outcome.major_iterations,
                      tolerance);
  }
  return {std::move(outcome.atoms), std::move(outcome.weights),
          outcome.major_iterations};
}

RawDecomposition RunAwayStep(const VertexOracle& oracle,
                             const Eigen::VectorXd& target, double tolerance,
                             std::size_t max_iterations,
                             std::vector<Atom> seeds) {
  RawDecomposition raw;
  raw.atoms.push_back(seeds.empty() ? oracle(Eigen::VectorXd(-target))
                                    : std::move(seeds.front()));
  raw.weights.push_back(1.0);
  Eigen::VectorXd x = raw.atoms.front().point;

  auto find_atom = [&](const Eigen::VectorXd& p) -> std::size_t {
    for (std::size_t i = 0; i < raw.atoms.size(); ++i) {
      if ((raw.atoms[i].point - p).lpNorm<Eigen::Infinity>() <=
          1e-13 * (1.0 + p.lpNorm<Eigen::Infinity>())) {
        return i;
      }
    }
    return raw.atoms.size();
  };

  for (; raw.iterations < max_iterations; ++raw.iterations) {
    const Eigen::VectorXd grad = x - target;
    if (grad.norm() <= tolerance) return raw;
    Atom toward = oracle(grad);
    const double fw_gap = grad.dot(x - toward.point);
    // A target inside the set keeps fw_gap >= |grad|^2, far above this.
    if (fw_gap <= 1e-14 * grad.norm() * (x - toward.point).norm()) break;

    std::size_t away = 0;
    for (std::size_t i = 1; i < raw.atoms.size(); ++i) {
      if (grad.dot(raw.atoms[i].point) > grad.dot(raw.atoms[away].point)) {
        away = i;
      }
    }
    const double away_gap = grad.dot(raw.atoms[away].point - x);
    const bool use_fw = fw_gap >= away_gap || raw.weights[away] >= 1.0;

    Eigen::VectorXd direction;
    double step_max = 1.0;
    if (use_fw) {
      direction = toward.point - x;
    } else {
      direction = x - raw.atoms[away].point;
      step_max = raw.weights[away] / (1.0 - raw.weights[away]);
    }
    const double curvature = direction.squaredNorm();
    if (curvature == 0.0) break;
    const double step =
        std::clamp(-grad.dot(direction) / curvature, 0.0, step_max);

    if (use_fw) {
      for (double& w : raw.weights) w *= 1.0 - step;
      const std::size_t at = find_atom(toward.point);
      if (at == raw.atoms.size()) {
        raw.atoms.push_back(std::move(toward));
        raw.weights.push_back(step);
      } else {
        raw.weights[at] += step;
      }
    } else {
      for (double& w : raw.weights) w *= 1.0 + step;
      raw.weights[away] -= step;
      if (step == step_max) raw.weights[away] = 0.0;
    }
    // Drop vanished atoms.
    std::size_t keep = 0;
    for (std::size_t i = 0; i < raw.atoms.size(); ++i) {
      if (raw.weights[i] > 1e-15) {
        raw.atoms[keep] = std::move(raw.atoms[i]);
        raw.weights[keep] = raw.weights[i];
        ++keep;
      }
    }
    raw.atoms.resize(keep);
    raw.weights.resize(keep);
    x = Eigen::VectorXd::Zero(target.size());
    for (std::size_t i = 0; i < keep; ++i) x += raw.weights[i] * raw.atoms[i].point;
  }
  if ((x - target).norm() <= tolerance) return raw;
  FailDecomposition(oracle, x, target, raw.iterations, tolerance);
}

}  // namespace

VertexDecomposition Decompose(const GPolymatroid& g,
                              const ChargingProfile& target,
                              const DecomposeOptions& options,
                              std::span<const OrderedSplit> seeds) {
  const std::size_t n = g.periods();
  if (target.size() != n) {
    throw InvalidInputError(fmt::format(
        "target has {} periods, set has {}", target.size(), n));
  }
  const double tolerance = options.tolerance * (1.0 + target.Norm());
  const std::size_t max_iterations =
      options.max_iterations > 0 ? options.max_iterations : 500 * std::max<std::size_t>(n, 1);

  const VertexOracle oracle(g, options.gpoly);
  std::vector<Atom> seed_atoms;
  for (const auto& split : seeds) seed_atoms.push_back(oracle.FromSplit(split));
  const Eigen::VectorXd z = ToEigen(target);

  RawDecomposition raw =
      options.method == DecompositionMethod::kMinNormPoint
          ? RunMinNorm(oracle, z, tolerance, max_iterations, std::move(seed_atoms))
          : RunAwayStep(oracle, z, tolerance, max_iterations,
                        std::move(seed_atoms));

  VertexDecomposition out;
  out.target = target;
  out.iterations = raw.iterations;
  for (std::size_t i = 0; i < raw.atoms.size(); ++i) {
    out.entries.push_back(VertexEntry{raw.weights[i], std::move(raw.atoms[i].tag),
                                      FromEigen(raw.atoms[i].point)});
  }
  out.residual_norm = (out.Reconstruct() - target).Norm();

  CaratheodoryResult reduced = ReduceCaratheodory(std::move(out));
  if (!reduced.reduced) {
    spdlog::warn("Caratheodory reduction hit a singular system; keeping {} "
                 "vertices",
                 reduced.decomposition.entries.size());
  }
  return std::move(reduced.decomposition);
}

CaratheodoryResult ReduceCaratheodory(VertexDecomposition decomposition) {
  const VertexDecomposition original = decomposition;
  auto& entries = decomposition.entries;
  auto drop_zeros = [&] {
    std::erase_if(entries, [](const VertexEntry& e) { return e.weight <= 0.0; });
    double total = 0.0;
    for (const auto& e : entries) total += e.weight;
    if (total > 0.0) {
      for (auto& e : entries) e.weight /= total;
    }
  };
  drop_zeros();

  const std::size_t n = decomposition.target.size();
  while (entries.size() > n + 1) {
    const Eigen::Index k = static_cast<Eigen::Index>(entries.size());
    Eigen::MatrixXd lifted(static_cast<Eigen::Index>(n) + 1, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      const auto& v = entries[static_cast<std::size_t>(i)].vertex;
      for (std::size_t t = 0; t < n; ++t) {
        lifted(static_cast<Eigen::Index>(t), i) = v[t];
      }
      lifted(static_cast<Eigen::Index>(n), i) = 1.0;
    }
    // More columns than rows, so the last right singular vector is a
    // dependency.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(lifted, Eigen::ComputeFullV);
    Eigen::VectorXd mu = svd.matrixV().col(k - 1);
    const double scale = 1.0 + lifted.lpNorm<Eigen::Infinity>();
    if ((lifted * mu).lpNorm<Eigen::Infinity>() > 1e-9 * scale) {
      return {original, false};
    }
    if (mu.maxCoeff() <= 0.0) mu = -mu;
    double theta = std::numeric_limits<double>::infinity();
    Eigen::Index blocking = -1;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (mu(i) > 1e-12) {
        const double ratio = entries[static_cast<std::size_t>(i)].weight / mu(i);
        if (ratio < theta) {
          theta = ratio;
          blocking = i;
        }
      }
    }
    if (blocking < 0) return {original, false};
    for (Eigen::Index i = 0; i < k; ++i) {
      auto& w = entries[static_cast<std::size_t>(i)].weight;
      w = std::max(0.0, w - theta * mu(i));
    }
    entries[static_cast<std::size_t>(blocking)].weight = 0.0;
    drop_zeros();
  }

  decomposition.residual_norm =
      (decomposition.Reconstruct() - decomposition.target).Norm();
  const double slack =
      1e-9 * (1.0 + decomposition.target.Norm());
  if (decomposition.residual_norm > original.residual_norm + slack) {
    return {original, false};
  }
  return {std::move(decomposition), true};
}

std::vector<ChargingProfile> SplitVertex(std::span<const GPolymatroid> summands,
                                         const OrderedSplit& split,
                                         const GPolyOptions& options) {
  std::vector<ChargingProfile> parts;
  parts.reserve(summands.size());
  for (const auto& g : summands) parts.push_back(VertexByOrder(g, split, options));
  return parts;
}

namespace {

// Decomposes `target` over the sum of `summands` and returns one profile per
// summand. Returns zeros (after checking the target) when there are none.
std::vector<ChargingProfile> SplitAcross(std::span<const GPolymatroid> summands,
                                         const TimeHorizon& horizon,
                                         const ChargingProfile& target,
                                         const DecomposeOptions& options,
                                         std::span<const OrderedSplit> seeds,
                                         std::size_t* vertex_count) {
  if (summands.empty()) {
    if (target.Norm() > options.tolerance) {
      throw MembershipError("nonzero profile assigned to an empty population");
    }
    return {};
  }
  if (summands.size() == 1) {
    // The sum is the summand itself; membership is still certified.
    (void)Decompose(summands.front(), target, options, seeds);
    if (vertex_count) *vertex_count = std::max<std::size_t>(*vertex_count, 1);
    return {target};
  }
  const GPolymatroid sum = MinkowskiSum(horizon, summands);
  const VertexDecomposition d = Decompose(sum, target, options, seeds);
  if (vertex_count) {
    *vertex_count = std::max(*vertex_count, d.entries.size());
  }
  std::vector<ChargingProfile> parts(summands.size(),
                                     ChargingProfile::Zero(horizon.periods));
  for (const auto& entry : d.entries) {
    const auto vertices = SplitVertex(summands, entry.split, options.gpoly);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      parts[i].AddScaled(entry.weight, vertices[i]);
    }
  }
  return parts;
}

void Finish(DisaggregationResult& result, std::span<const EvSpec> evs,
            const TimeHorizon& horizon, const ChargingProfile& target) {
  result.achieved_aggregate = ChargingProfile::Zero(horizon.periods);
  for (const auto& [id, profile] : result.per_device) {
    result.achieved_aggregate += profile;
  }
  result.residual_norm = (result.achieved_aggregate - target).Norm();
  for (const auto& ev : evs) {
    result.max_device_violation =
        std::max(result.max_device_violation,
                 DeviceViolation(result.per_device.at(ev.id), ev, horizon.delta));
  }
}

void CollectEvs(const FeederNode& node, std::vector<EvSpec>& out) {
  out.insert(out.end(), node.evs().begin(), node.evs().end());
  for (const auto& c : node.children()) CollectEvs(c, out);
}

void DisaggregateNode(const FeederNode& node, const ChargingProfile& target,
                      const DecomposeOptions& options,
                      DisaggregationResult& result) {
  const PowerBox box = DeriveBox(node.spec());
  const double violation = box.Violation(target);
  result.max_box_violation = std::max(result.max_box_violation, violation);
  const double tolerance = options.tolerance * (1.0 + target.Norm());
  if (violation > tolerance) {
    throw MembershipError(fmt::format(
        "feeder {}: target violates the feeder limits by {:.3e} kW",
        node.spec().id, violation));
  }
  result.per_feeder[node.spec().id] = target;

  const std::vector<GPolymatroid> summands = NodeSummands(node, options.gpoly);
  std::vector<ChargingProfile> parts =
      SplitAcross(summands, node.horizon(), target, options, {},
                  &result.max_vertex_count);
  if (summands.empty()) return;
  std::size_t i = 0;
  for (const auto& ev : node.evs()) result.per_device[ev.id] = parts[i++];
  for (const auto& child : node.children()) {
    DisaggregateNode(child, parts[i++], options, result);
  }
}

}  // namespace

DisaggregationResult Disaggregate(std::span<const EvSpec> population,
                                  const TimeHorizon& horizon,
                                  const ChargingProfile& target,
                                  const DecomposeOptions& options) {
  if (target.size() != horizon.periods) {
    throw InvalidInputError("target length must equal T");
  }
  std::vector<GPolymatroid> summands;
  for (const auto& ev : population) summands.push_back(FromDevice(ev, horizon));
  DisaggregationResult result;
  std::vector<ChargingProfile> parts = SplitAcross(
      summands, horizon, target, options, {}, &result.max_vertex_count);
  for (std::size_t i = 0; i < population.size(); ++i) {
    result.per_device[population[i].id] = std::move(parts[i]);
  }
  Finish(result, population, horizon, target);
  return result;
}

DisaggregationResult DisaggregateTree(std::span<const FeederNode> roots,
                                      const TimeHorizon& horizon,
                                      const ChargingProfile& target,
                                      const DecomposeOptions& options,
                                      std::span<const OrderedSplit> seeds) {
  if (target.size() != horizon.periods) {
    throw InvalidInputError("target length must equal T");
  }
  DisaggregationResult result;
  std::vector<ChargingProfile> feeder_targets;
  if (roots.size() == 1) {
    feeder_targets.push_back(target);
  } else {
    std::vector<GPolymatroid> summands;
    for (const auto& root : roots) {
      summands.push_back(AggregateNode(root, options.gpoly));
    }
    feeder_targets = SplitAcross(summands, horizon, target, options, seeds,
                                 &result.max_vertex_count);
  }
  for (std::size_t j = 0; j < roots.size(); ++j) {
    DisaggregateNode(roots[j], feeder_targets[j], options, result);
  }
  std::vector<EvSpec> evs;
  for (const auto& root : roots) CollectEvs(root, evs);
  Finish(result, evs, horizon, target);
  return result;
}

}  // namespace evflex
