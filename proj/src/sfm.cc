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

#include "evflex/sfm.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "evflex/errors.h"
#include "evflex/min_norm_point.h"

namespace evflex {

std::string_view ToString(SfmMethod method) {
  return method == SfmMethod::kExhaustive ? "exhaustive" : "min_norm_point";
}

SfmResult MinimizeExhaustive(const SetFunction& f, const SfmOptions& options) {
  const std::size_t n = f.horizon();
  const std::size_t limit =
      std::min(options.exhaustive_threshold, kMaxExhaustiveHorizon);
  if (n > limit) {
    throw InvalidInputError(fmt::format(
        "exhaustive minimization limited to T <= {}, got {}", limit, n));
  }
  const std::uint64_t count = std::uint64_t{1} << n;
  SfmResult result;
  result.method = SfmMethod::kExhaustive;
  std::uint64_t best_bits = 0;
  double best = f(SubsetMask(n));
  for (std::uint64_t bits = 1; bits < count; ++bits) {
    const double value = f(SubsetMask::FromBits(n, bits));
    if (value < best) {
      best = value;
      best_bits = bits;
    }
  }
  result.minimizer = SubsetMask::FromBits(n, best_bits);
  result.value = best;
  result.iterations = static_cast<std::size_t>(count);
  return result;
}

namespace {

// Greedy vertex of the base polytope of `f` (normalized to f(empty) = 0)
// minimizing <direction, q>. Also reports the best prefix set seen.
class BaseGreedy {
 public:
  BaseGreedy(const SetFunction& f, double offset) : f_(f), offset_(offset) {}

  MinNormAtom<int> operator()(const Eigen::VectorXd& direction) {
    const std::size_t n = f_.horizon();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return direction(static_cast<Eigen::Index>(a)) <
                              direction(static_cast<Eigen::Index>(b));
                     });
    MinNormAtom<int> atom{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)),
                          0};
    SubsetMask prefix(n);
    double previous = 0.0;
    for (std::size_t t : order) {
      prefix.Insert(t);
      const double value = f_(prefix) - offset_;
      atom.point(static_cast<Eigen::Index>(t)) = value - previous;
      previous = value;
      if (value < best_value_) {
        best_value_ = value;
        best_set_ = prefix;
      }
    }
    return atom;
  }

  double best_value() const { return best_value_; }
  const SubsetMask& best_set() const { return best_set_; }

  // Considers an externally built candidate.
  void Offer(const SubsetMask& set) {
    const double value = f_(set) - offset_;
    if (value < best_value_ ||
        (value == best_value_ && set < best_set_)) {
      best_value_ = value;
      best_set_ = set;
    }
  }

  double Eval(const SubsetMask& set) const { return f_(set) - offset_; }

 private:
  const SetFunction& f_;
  double offset_;
  double best_value_ = 0.0;  // the empty set
  SubsetMask best_set_{f_.horizon()};
};

double NegativePart(const Eigen::VectorXd& x) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) total += std::min(0.0, x(i));
  return total;
}

// Single-element additions and removals until no strict improvement.
void PolishLocally(BaseGreedy& greedy, std::size_t n) {
  SubsetMask current = greedy.best_set();
  double value = greedy.best_value();
  for (std::size_t pass = 0; pass < 2 * n + 2; ++pass) {
    bool improved = false;
    for (std::size_t t = 0; t < n; ++t) {
      SubsetMask trial = current;
      if (trial.Contains(t)) {
        trial.Erase(t);
      } else {
        trial.Insert(t);
      }
      const double v = greedy.Eval(trial);
      if (v < value - 1e-13 * (1.0 + std::abs(value))) {
        current = trial;
        value = v;
        improved = true;
      }
    }
    if (!improved) break;
  }
  greedy.Offer(current);
}

}  // namespace

SfmResult MinimizeMinNorm(const SetFunction& f, const SfmOptions& options) {
  const std::size_t n = f.horizon();
  const double offset = f(SubsetMask(n));
  SfmResult result;
  result.method = SfmMethod::kMinNormPoint;
  if (n == 0) {
    result.minimizer = SubsetMask(0);
    result.value = offset;
    result.certificate = std::vector<double>{};
    return result;
  }

  BaseGreedy greedy(f, offset);
  auto gap_of = [&](const Eigen::VectorXd& x) {
    return greedy.best_value() - NegativePart(x);
  };
  auto tight = [&](double gap) {
    return gap <= options.tolerance * (1.0 + std::abs(greedy.best_value()));
  };

  MinNormOptions mn;
  mn.gap_tolerance = 1e-15;
  mn.max_major_iterations =
      options.max_iterations > 0 ? options.max_iterations : 10 * n * n;
  auto outcome = FindMinNormPoint<int>(
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)), greedy,
      [&](const Eigen::VectorXd& x, const MinNormAtom<int>&) {
        return tight(gap_of(x));
      },
      mn);

  const Eigen::VectorXd& x = outcome.point;
  const double scale = 1.0 + x.lpNorm<Eigen::Infinity>();
  SubsetMask strict(n);
  SubsetMask loose(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double v = x(static_cast<Eigen::Index>(t));
    if (v < -1e-9 * scale) strict.Insert(t);
    if (v <= 1e-9 * scale) loose.Insert(t);
  }
  greedy.Offer(strict);
  greedy.Offer(loose);
  PolishLocally(greedy, n);

  const double gap = gap_of(x);
  if (!tight(gap)) {
    throw ConvergenceError(fmt::format(
        "min-norm point SFM stopped after {} major cycles with gap {:.3e} "
        "(T = {})",
        outcome.major_iterations, gap, n));
  }
  result.minimizer = greedy.best_set();
  result.value = f(result.minimizer);
  result.iterations = outcome.major_iterations;
  result.certificate = std::vector<double>(x.data(), x.data() + x.size());
  return result;
}

SfmResult Minimize(const SetFunction& f, const SfmOptions& options) {
  if (f.horizon() <= std::min(options.exhaustive_threshold,
                              kMaxExhaustiveHorizon)) {
    return MinimizeExhaustive(f, options);
  }
  return MinimizeMinNorm(f, options);
}

SfmResult MaximizeSupermodular(const SetFunction& g,
                               const SfmOptions& options) {
  SfmResult result = Minimize(Negate(g), options);
  result.value = g(result.minimizer);
  return result;
}

}  // namespace evflex
