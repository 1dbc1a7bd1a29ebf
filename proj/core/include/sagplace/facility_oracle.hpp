#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "sagplace/objectives.hpp"
#include "sagplace/set_function.hpp"

namespace sagplace {

/// Facility-location set function in maximization form:
///
///   f(S) = offset + sum_{i in S} unit[i] + coef * sum_v max_{i in S} score(i, v)
///          + sum_{i != j in S} pair(i, j),        f({}) = 0.
///
/// Every objective the solvers touch is an instance of this shape. The
/// incremental evaluator keeps, per node, a cursor into that node's
/// facilities sorted best-first, so a pass of adds or removes costs
/// O(n * |V|) overall.
class FacilityLocationFunction final : public SetFunctionOracle {
 public:
  struct Terms {
    std::vector<NodeId> elements;  // ground index -> node id
    Matrix score;                  // ground index x node
    std::vector<double> unit;      // per-element modular term
    double offset = 0.0;
    double coef = 1.0;
    std::optional<Matrix> pair;    // symmetric, ground x ground
  };

  explicit FacilityLocationFunction(Terms terms);

  std::size_t ground_size() const override { return terms_->elements.size(); }
  double evaluate(const Subset& s) const override;
  NodeId element(std::size_t i) const override { return terms_->elements[i]; }
  std::unique_ptr<IncrementalEvaluator> start(bool full) const override;

  const Terms& terms() const noexcept { return *terms_; }

  struct Preferences;

 private:
  std::shared_ptr<const Terms> terms_;
  std::shared_ptr<const Preferences> prefs_;
};

/// U_g over the gateway candidates; f({}) = 0.
FacilityLocationFunction gateway_utility_oracle(const PathTables& tables);

/// gateway_cost_complement over the gateway candidates; f({}) = 0.
FacilityLocationFunction gateway_complement_oracle(const PathTables& tables,
                                                   const ObjectiveConfig& cfg);

/// U_c over the controller candidates; f({}) = 0.
FacilityLocationFunction controller_utility_oracle(const PathTables& tables);

/// controller_cost_complement for a fixed gateway policy; f({}) = 0.
FacilityLocationFunction controller_complement_oracle(const GatewayPolicy& gw,
                                                      const PathTables& tables,
                                                      const ObjectiveConfig& cfg);

}  // namespace sagplace
