#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "sagplace/topology.hpp"

namespace sagplace {

/// Membership mask over a ground set of size n.
using Subset = std::vector<bool>;

Subset make_subset(std::size_t n, const std::vector<std::size_t>& members);
std::vector<std::size_t> members_of(const Subset& s);

/// Incremental view of a set function positioned at some set S.
///
/// Gains are exact differences of the underlying function:
/// add_gain(i) = f(S + i) - f(S) for i not in S, remove_gain(i) = f(S - i) - f(S)
/// for i in S. Copies are independent.
class IncrementalEvaluator {
 public:
  virtual ~IncrementalEvaluator() = default;

  virtual double value() const = 0;
  virtual double add_gain(std::size_t i) const = 0;
  virtual double remove_gain(std::size_t i) const = 0;
  virtual void add(std::size_t i) = 0;
  virtual void remove(std::size_t i) = 0;
  virtual std::unique_ptr<IncrementalEvaluator> clone() const = 0;

  const Subset& members() const noexcept { return members_; }
  std::size_t count() const noexcept { return count_; }

 protected:
  explicit IncrementalEvaluator(Subset members);
  void mark(std::size_t i, bool in);

 private:
  Subset members_;
  std::size_t count_ = 0;
};

/// Set function over ground-set indices 0..n-1, each mapped to a node id.
///
/// `evaluate` is the reference definition; `start` returns an incremental
/// evaluator that must agree with it. The default evaluator re-evaluates from
/// scratch, so every subclass gets a correct (if slow) incremental path.
class SetFunctionOracle {
 public:
  virtual ~SetFunctionOracle() = default;

  virtual std::size_t ground_size() const = 0;
  virtual double evaluate(const Subset& s) const = 0;
  /// Node id behind ground index i.
  virtual NodeId element(std::size_t i) const { return static_cast<NodeId>(i); }

  /// Evaluator positioned at the empty set, or at the full ground set.
  virtual std::unique_ptr<IncrementalEvaluator> start(bool full) const;
};

/// Wraps a callable; elements are the identity mapping unless ids are given.
class LambdaOracle final : public SetFunctionOracle {
 public:
  using Fn = std::function<double(const Subset&)>;

  LambdaOracle(std::size_t n, Fn fn, std::vector<NodeId> ids = {});

  std::size_t ground_size() const override { return n_; }
  double evaluate(const Subset& s) const override { return fn_(s); }
  NodeId element(std::size_t i) const override {
    return ids_.empty() ? static_cast<NodeId>(i) : ids_[i];
  }

 private:
  std::size_t n_;
  Fn fn_;
  std::vector<NodeId> ids_;
};

}  // namespace sagplace
