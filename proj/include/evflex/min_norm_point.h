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

#ifndef EVFLEX_MIN_NORM_POINT_H_
#define EVFLEX_MIN_NORM_POINT_H_

// Wolfe's minimum-norm-point method over the convex hull of the atoms returned
// by a linear minimization oracle. Used both for submodular minimization
// (atoms are greedy vertices of a base polytope, target 0) and for writing a
// profile as a convex combination of g-polymatroid vertices (target = the
// profile). The active atoms stay affinely independent, so at most dim+1 of
// them carry weight at any time.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace evflex {

struct MinNormOptions {
  // Optimality: <x - z, x - q> <= gap_tolerance * max_a ||a - z||^2.
  double gap_tolerance = 1e-12;
  // Early exit once ||x - z|| falls to this value.
  double distance_tolerance = 0.0;
  std::size_t max_major_iterations = 1000;
  // Barycentric weights at or below this are treated as zero.
  double weight_floor = 1e-14;
};

enum class MinNormStop {
  kOptimal,
  kTargetReached,
  kStopRequested,
  kStalled,
  kIterationLimit,
};

template <class Tag>
struct MinNormAtom {
  Eigen::VectorXd point;
  Tag tag;
};

template <class Tag>
struct MinNormResult {
  std::vector<MinNormAtom<Tag>> atoms;
  std::vector<double> weights;
  Eigen::VectorXd point;
  double distance = 0.0;
  std::size_t major_iterations = 0;
  std::size_t minor_iterations = 0;
  MinNormStop stop = MinNormStop::kIterationLimit;
};

namespace detail {

// Coefficients alpha (summing to one) of the point of aff(atoms) nearest to
// target. Solved as a least-squares problem in the edge directions
// atoms[i] - atoms[0], with one step of iterative refinement.
template <class Tag>
Eigen::VectorXd AffineMinimizer(const std::vector<MinNormAtom<Tag>>& atoms,
                                const Eigen::VectorXd& target) {
  const Eigen::Index k = static_cast<Eigen::Index>(atoms.size());
  Eigen::VectorXd alpha(k);
  if (k == 1) {
    alpha(0) = 1.0;
    return alpha;
  }
  const Eigen::VectorXd& base = atoms[0].point;
  Eigen::MatrixXd edges(base.size(), k - 1);
  for (Eigen::Index i = 1; i < k; ++i) {
    edges.col(i - 1) = atoms[static_cast<std::size_t>(i)].point - base;
  }
  const Eigen::VectorXd rhs = target - base;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(edges);
  Eigen::VectorXd beta = qr.solve(rhs);
  beta += qr.solve(rhs - edges * beta);
  alpha(0) = 1.0 - beta.sum();
  alpha.tail(k - 1) = beta;
  return alpha;
}

}  // namespace detail

// Minimizes ||x - target|| over the convex hull of the oracle's atoms.
//   oracle(direction) -> MinNormAtom<Tag> minimizing <direction, atom>.
//   monitor(x, atom) -> true to stop after an oracle call (for example when
//     a caller-side certificate is already tight).
// `seeds` are inserted before the first oracle call; when empty the first
// atom is oracle(-target).
template <class Tag, class Oracle, class Monitor>
MinNormResult<Tag> FindMinNormPoint(const Eigen::VectorXd& target,
                                    Oracle&& oracle, Monitor&& monitor,
                                    const MinNormOptions& options,
                                    std::vector<MinNormAtom<Tag>> seeds = {}) {
  MinNormResult<Tag> result;
  auto& atoms = result.atoms;
  auto& weights = result.weights;
  Eigen::VectorXd& x = result.point;

  auto recompute_point = [&] {
    x = Eigen::VectorXd::Zero(target.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      x += weights[i] * atoms[i].point;
    }
  };

  // Adds an atom and runs the minor cycle. Returns false when the new atom
  // gets no weight, meaning the current point cannot be improved with it.
  auto insert_and_project = [&](MinNormAtom<Tag> atom) -> bool {
    atoms.push_back(std::move(atom));
    weights.push_back(0.0);
    std::size_t fresh = atoms.size() - 1;
    bool fresh_alive = true;
    for (std::size_t minor = 0; minor <= atoms.size() + 1; ++minor) {
      ++result.minor_iterations;
      const Eigen::VectorXd alpha = detail::AffineMinimizer(atoms, target);
      if (alpha.minCoeff() > options.weight_floor) {
        for (std::size_t i = 0; i < atoms.size(); ++i) {
          weights[i] = alpha(static_cast<Eigen::Index>(i));
        }
        break;
      }
      // Move from the current weights toward alpha until a weight hits zero.
      double theta = 1.0;
      std::size_t blocking = atoms.size();
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        const double a = alpha(static_cast<Eigen::Index>(i));
        if (a <= options.weight_floor) {
          const double drop = weights[i] - a;
          const double ratio = drop > 0.0 ? weights[i] / drop : 0.0;
          if (ratio < theta || blocking == atoms.size()) {
            theta = std::min(theta, ratio);
            blocking = i;
          }
        }
      }
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        weights[i] = theta * alpha(static_cast<Eigen::Index>(i)) +
                     (1.0 - theta) * weights[i];
      }
      weights[blocking] = 0.0;
      // A tiny step leaves the fresh atom with a tiny weight; it is only
      // removed when it blocks, otherwise the step would be lost.
      std::size_t keep = 0;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        const bool drop = i == blocking ||
                          weights[i] <= (i == fresh ? 0.0 : options.weight_floor);
        if (!drop) {
          if (keep != i) {
            atoms[keep] = std::move(atoms[i]);
            weights[keep] = weights[i];
          }
          if (i == fresh) fresh = keep;
          ++keep;
        } else if (i == fresh) {
          fresh_alive = false;
          fresh = atoms.size();
        }
      }
      atoms.resize(keep);
      weights.resize(keep);
      double total = 0.0;
      for (double w : weights) total += w;
      for (double& w : weights) w /= total;
      if (!fresh_alive && minor == 0) break;
    }
    recompute_point();
    return fresh_alive;
  };

  if (seeds.empty()) seeds.push_back(oracle(Eigen::VectorXd(-target)));
  atoms.push_back(std::move(seeds.front()));
  weights.push_back(1.0);
  recompute_point();
  for (std::size_t i = 1; i < seeds.size(); ++i) {
    insert_and_project(std::move(seeds[i]));
  }

  while (true) {
    const Eigen::VectorXd residual = x - target;
    result.distance = residual.norm();
    if (result.distance <= options.distance_tolerance) {
      result.stop = MinNormStop::kTargetReached;
      break;
    }
    if (result.major_iterations >= options.max_major_iterations) {
      result.stop = MinNormStop::kIterationLimit;
      break;
    }
    MinNormAtom<Tag> candidate = oracle(residual);
    ++result.major_iterations;
    if (monitor(static_cast<const Eigen::VectorXd&>(x),
                static_cast<const MinNormAtom<Tag>&>(candidate))) {
      result.stop = MinNormStop::kStopRequested;
      break;
    }
    double scale = (candidate.point - target).squaredNorm();
    for (const auto& a : atoms) {
      scale = std::max(scale, (a.point - target).squaredNorm());
    }
    const double gap = residual.dot(x - candidate.point);
    if (gap <= options.gap_tolerance * scale) {
      result.stop = MinNormStop::kOptimal;
      break;
    }
    bool duplicate = false;
    for (const auto& a : atoms) {
      if ((a.point - candidate.point).template lpNorm<Eigen::Infinity>() <=
          1e-13 * (1.0 + a.point.template lpNorm<Eigen::Infinity>())) {
        duplicate = true;
        break;
      }
    }
    if (duplicate || !insert_and_project(std::move(candidate))) {
      result.stop = MinNormStop::kStalled;
      break;
    }
  }
  result.distance = (x - target).norm();
  return result;
}

}  // namespace evflex

#endif  // EVFLEX_MIN_NORM_POINT_H_
