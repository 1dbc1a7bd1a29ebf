#include "sagplace/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "sagplace/errors.hpp"

namespace sagplace {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

SolveResult finish(const SetFunctionOracle& oracle, Subset members, std::size_t evaluations,
                   Clock::time_point started, std::uint64_t seed) {
  SolveResult r;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (members[i]) r.open.push_back(oracle.element(i));
  }
  std::sort(r.open.begin(), r.open.end());
  r.value = oracle.evaluate(members);
  r.members = std::move(members);
  r.evaluations = evaluations;
  r.seed = seed;
  r.wall_time_ms = elapsed_ms(started);
  return r;
}

// Index of the best singleton; lowest index on ties.
std::size_t best_singleton(const IncrementalEvaluator& empty, std::size_t n, double* value,
                           std::size_t* evaluations) {
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double g = empty.add_gain(i);
    ++*evaluations;
    if (g > best_value) {
      best_value = g;
      best = i;
    }
  }
  *value = best_value;
  return best;
}

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(c);
}

bool strictly_better(double candidate, double incumbent) {
  if (!std::isfinite(incumbent)) return candidate > incumbent;
  const double tol = 1e-12 * std::max(1.0, std::abs(incumbent));
  return candidate > incumbent + tol;
}

bool tied(double a, double b) { return !strictly_better(a, b) && !strictly_better(b, a); }

struct Enumerator {
  std::optional<std::size_t> budget;
  std::size_t n = 0;
  std::size_t visited = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  Subset best;
  std::size_t best_count = 0;

  void visit(const IncrementalEvaluator& state, std::size_t next) {
    for (std::size_t i = next; i < n; ++i) {
      auto child = state.clone();
      child->add(i);
      ++visited;
      const double v = child->value();
      if (strictly_better(v, best_value) ||
          (tied(v, best_value) && child->count() < best_count)) {
        best_value = v;
        best = child->members();
        best_count = child->count();
      }
      if (!budget || child->count() < *budget) visit(*child, i + 1);
    }
  }
};

}  // namespace

SolveResult double_greedy(const SetFunctionOracle& oracle, std::uint64_t seed) {
  const auto started = Clock::now();
  const std::size_t n = oracle.ground_size();
  if (n == 0) throw InvalidInput("ground set is empty");
  auto lower = oracle.start(false);
  auto upper = oracle.start(true);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::size_t evaluations = 0;

  for (std::size_t i = 0; i < n; ++i) {
    const double gain_add = std::max(lower->add_gain(i), 0.0);
    const double gain_drop = std::max(upper->remove_gain(i), 0.0);
    evaluations += 2;
    const double total = gain_add + gain_drop;
    const double p_add = total > 0.0 ? gain_add / total : 1.0;
    const double u = coin(rng);
    if (p_add >= 1.0 || u < p_add) {
      lower->add(i);
    } else {
      upper->remove(i);
    }
  }

  Subset chosen = lower->members();
  if (lower->count() == 0) {
    double v = 0.0;
    auto empty = oracle.start(false);
    chosen[best_singleton(*empty, n, &v, &evaluations)] = true;
  }
  return finish(oracle, std::move(chosen), evaluations, started, seed);
}

SolveResult double_greedy_restarts(const SetFunctionOracle& oracle, std::uint64_t seed,
                                   std::size_t restarts) {
  if (restarts == 0) throw InvalidInput("restarts must be at least 1");
  const auto started = Clock::now();
  SolveResult best;
  std::size_t evaluations = 0;
  for (std::size_t r = 0; r < restarts; ++r) {
    SolveResult run = double_greedy(oracle, derive_seed(seed, r));
    evaluations += run.evaluations;
    if (r == 0 || strictly_better(run.value, best.value)) best = std::move(run);
  }
  best.evaluations = evaluations;
  best.wall_time_ms = elapsed_ms(started);
  return best;
}

std::size_t threshold_levels(std::size_t n, double epsilon) {
  const double floor_ratio = epsilon / static_cast<double>(n);
  std::size_t levels = 0;
  for (double w = 1.0; w >= floor_ratio; w *= (1.0 - epsilon)) ++levels;
  return levels;
}

SolveResult threshold_greedy(const SetFunctionOracle& oracle, std::size_t budget, double epsilon) {
  const auto started = Clock::now();
  const std::size_t n = oracle.ground_size();
  if (n == 0) throw InvalidInput("ground set is empty");
  if (budget == 0 || budget > n) {
    throw InvalidInput(fmt::format("cardinality budget must be in 1..{}, got {}", n, budget));
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw InvalidInput(fmt::format("epsilon must be in (0,1), got {}", epsilon));
  }

  auto state = oracle.start(false);
  std::size_t evaluations = 0;
  std::vector<double> bound(n);  // last observed gain; an upper bound by submodularity
  for (std::size_t i = 0; i < n; ++i) bound[i] = state->add_gain(i);
  evaluations += n;
  const std::size_t first =
      static_cast<std::size_t>(std::max_element(bound.begin(), bound.end()) - bound.begin());
  const double top = bound[first];
  if (!(top > 0.0)) {
    // All singletons worthless: a monotone submodular f with f({}) = 0 is then
    // identically zero, so any feasible set is optimal.
    return finish(oracle, make_subset(n, {first}), evaluations, started, 0);
  }

  // Elements whose bound is already below w cannot pass, so they are not queried.
  const std::size_t levels = threshold_levels(n, epsilon);
  double factor = 1.0;
  for (std::size_t level = 0; level < levels && state->count() < budget; ++level) {
    const double w = top * factor;
    for (std::size_t j = 0; j < n && state->count() < budget; ++j) {
      if (state->members()[j] || bound[j] < w) continue;
      if (state->count() > 0) {
        bound[j] = state->add_gain(j);
        ++evaluations;
      }
      if (bound[j] >= w) state->add(j);
    }
    factor *= (1.0 - epsilon);
  }
  return finish(oracle, state->members(), evaluations, started, 0);
}

double enumeration_size(std::size_t n, std::optional<std::size_t> budget) {
  const std::size_t top = budget ? std::min(*budget, n) : n;
  double total = 0.0;
  for (std::size_t k = 1; k <= top; ++k) total += binomial(n, k);
  return total;
}

bool enumeration_allowed(std::size_t n, std::optional<std::size_t> budget) {
  const bool full_sweep = !budget || *budget * 2 > n;
  if (full_sweep && n > kMaxUnbudgetedGround) return false;
  return !budget || binomial(n, *budget) <= kMaxBudgetedSubsets;
}

SolveResult exact_enumerate(const SetFunctionOracle& oracle, std::optional<std::size_t> budget) {
  const auto started = Clock::now();
  const std::size_t n = oracle.ground_size();
  if (n == 0) throw InvalidInput("ground set is empty");
  if (budget && *budget == 0) throw InvalidInput("cardinality budget must be at least 1");

  const double subsets = enumeration_size(n, budget);
  const bool full_sweep = !budget || *budget * 2 > n;
  if (full_sweep && n > kMaxUnbudgetedGround) {
    throw InstanceTooLarge(
        fmt::format("exhaustive search over {} elements visits {:.3g} subsets (limit: {} "
                    "elements without a small budget)",
                    n, subsets, kMaxUnbudgetedGround),
        subsets);
  }
  if (budget && binomial(n, *budget) > kMaxBudgetedSubsets) {
    throw InstanceTooLarge(fmt::format("C({}, {}) = {:.3g} exceeds the {:.0e} subset limit", n,
                                       *budget, binomial(n, *budget), kMaxBudgetedSubsets),
                           subsets);
  }

  Enumerator e;
  e.budget = budget;
  e.n = n;
  auto root = oracle.start(false);
  e.visit(*root, 0);
  return finish(oracle, std::move(e.best), e.visited, started, 0);
}

}  // namespace sagplace
