#include "sagplace/facility_oracle.hpp"

#include <algorithm>
#include <numeric>

namespace sagplace {

struct FacilityLocationFunction::Preferences {
  std::size_t n = 0;                 // ground size
  std::vector<std::uint32_t> order;  // order[v * n + r] = r-th best element for node v
  std::vector<std::uint32_t> rank;   // rank[v * n + i] = position of element i in order of v
  std::vector<double> singleton_sum; // sum_v score(i, v)
};

namespace {

using Terms = FacilityLocationFunction::Terms;
using Preferences = FacilityLocationFunction::Preferences;

class FacilityEvaluator final : public IncrementalEvaluator {
 public:
  FacilityEvaluator(std::shared_ptr<const Terms> terms, std::shared_ptr<const Preferences> prefs,
                    bool full)
      : IncrementalEvaluator(Subset(terms->elements.size(), full)),
        t_(std::move(terms)),
        p_(std::move(prefs)),
        cursor_(t_->score.cols(), full ? 0 : static_cast<std::uint32_t>(p_->n)) {
    if (full) {
      for (std::size_t i = 0; i < p_->n; ++i) unit_sum_ += t_->unit[i];
      if (t_->pair) {
        for (std::size_t i = 0; i < p_->n; ++i) {
          for (std::size_t j = 0; j < p_->n; ++j) pair_sum_ += i == j ? 0.0 : (*t_->pair)(i, j);
        }
      }
      best_sum_ = recompute_best();
    }
  }

  double value() const override {
    if (count() == 0) return 0.0;
    return t_->offset + unit_sum_ + t_->coef * best_sum_ + pair_sum_;
  }

  double add_gain(std::size_t i) const override {
    if (count() == 0) {
      return t_->offset + t_->unit[i] + t_->coef * p_->singleton_sum[i];
    }
    double delta = 0.0;
    for (std::size_t v = 0; v < cursor_.size(); ++v) {
      delta += std::max(0.0, t_->score(i, v) - best_score(v));
    }
    return t_->unit[i] + t_->coef * delta + 2.0 * pair_with(i);
  }

  double remove_gain(std::size_t i) const override {
    if (count() == 1) return -value();
    double delta = 0.0;
    for (std::size_t v = 0; v < cursor_.size(); ++v) {
      if (best_element(v) != i) continue;
      delta += t_->score(next_member(v, cursor_[v] + 1), v) - t_->score(i, v);
    }
    return -t_->unit[i] + t_->coef * delta - 2.0 * pair_with(i);
  }

  void add(std::size_t i) override {
    if (members()[i]) return;
    pair_sum_ += 2.0 * pair_with(i);
    unit_sum_ += t_->unit[i];
    mark(i, true);
    for (std::size_t v = 0; v < cursor_.size(); ++v) {
      cursor_[v] = std::min(cursor_[v], p_->rank[v * p_->n + i]);
    }
    best_sum_ = recompute_best();
  }

  void remove(std::size_t i) override {
    if (!members()[i]) return;
    mark(i, false);
    unit_sum_ -= t_->unit[i];
    pair_sum_ -= 2.0 * pair_with(i);
    if (count() == 0) {
      std::fill(cursor_.begin(), cursor_.end(), static_cast<std::uint32_t>(p_->n));
      unit_sum_ = pair_sum_ = best_sum_ = 0.0;
      return;
    }
    for (std::size_t v = 0; v < cursor_.size(); ++v) {
      if (best_element(v) == i) cursor_[v] = next_member_rank(v, cursor_[v] + 1);
    }
    best_sum_ = recompute_best();
  }

  std::unique_ptr<IncrementalEvaluator> clone() const override {
    return std::make_unique<FacilityEvaluator>(*this);
  }

 private:
  std::size_t best_element(std::size_t v) const { return p_->order[v * p_->n + cursor_[v]]; }
  double best_score(std::size_t v) const { return t_->score(best_element(v), v); }

  std::uint32_t next_member_rank(std::size_t v, std::uint32_t from) const {
    const auto* row = &p_->order[v * p_->n];
    while (from < p_->n && !members()[row[from]]) ++from;
    return from;
  }
  std::size_t next_member(std::size_t v, std::uint32_t from) const {
    return p_->order[v * p_->n + next_member_rank(v, from)];
  }

  // sum_{j in S, j != i} pair(i, j)
  double pair_with(std::size_t i) const {
    if (!t_->pair) return 0.0;
    double sum = 0.0;
    for (std::size_t j = 0; j < p_->n; ++j) {
      if (j != i && members()[j]) sum += (*t_->pair)(i, j);
    }
    return sum;
  }

  double recompute_best() const {
    double sum = 0.0;
    for (std::size_t v = 0; v < cursor_.size(); ++v) sum += best_score(v);
    return sum;
  }

  std::shared_ptr<const Terms> t_;
  std::shared_ptr<const Preferences> p_;
  std::vector<std::uint32_t> cursor_;
  double unit_sum_ = 0.0;
  double pair_sum_ = 0.0;
  double best_sum_ = 0.0;
};

Matrix gather_rows(const Matrix& full, const std::vector<NodeId>& rows, double sign) {
  Matrix out(rows.size(), full.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < full.cols(); ++c) out(r, c) = sign * full(rows[r], c);
  }
  return out;
}

}  // namespace

FacilityLocationFunction::FacilityLocationFunction(Terms terms) {
  const std::size_t n = terms.elements.size();
  const std::size_t nodes = terms.score.cols();
  if (terms.score.rows() != n) throw InvalidInput("score matrix rows must match the ground set");
  if (terms.unit.empty()) terms.unit.assign(n, 0.0);
  if (terms.unit.size() != n) throw InvalidInput("unit terms must match the ground set");
  if (terms.pair && (terms.pair->rows() != n || terms.pair->cols() != n)) {
    throw InvalidInput("pair matrix must be ground x ground");
  }

  auto prefs = std::make_shared<Preferences>();
  prefs->n = n;
  prefs->order.resize(n * nodes);
  prefs->rank.resize(n * nodes);
  prefs->singleton_sum.assign(n, 0.0);
  std::vector<std::uint32_t> idx(n);
  for (std::size_t v = 0; v < nodes; ++v) {
    std::iota(idx.begin(), idx.end(), 0u);
    std::stable_sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
      return terms.score(a, v) > terms.score(b, v);
    });
    for (std::size_t r = 0; r < n; ++r) {
      prefs->order[v * n + r] = idx[r];
      prefs->rank[v * n + idx[r]] = static_cast<std::uint32_t>(r);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t v = 0; v < nodes; ++v) prefs->singleton_sum[i] += terms.score(i, v);
  }
  terms_ = std::make_shared<const Terms>(std::move(terms));
  prefs_ = std::move(prefs);
}

double FacilityLocationFunction::evaluate(const Subset& s) const {
  const Terms& t = *terms_;
  const std::size_t n = t.elements.size();
  std::vector<std::size_t> in;
  for (std::size_t i = 0; i < n; ++i) {
    if (s[i]) in.push_back(i);
  }
  if (in.empty()) return 0.0;
  double unit = 0.0;
  for (std::size_t i : in) unit += t.unit[i];
  double best_sum = 0.0;
  for (std::size_t v = 0; v < t.score.cols(); ++v) {
    double best = t.score(in[0], v);
    for (std::size_t i : in) best = std::max(best, t.score(i, v));
    best_sum += best;
  }
  double pairs = 0.0;
  if (t.pair) {
    for (std::size_t i : in) {
      for (std::size_t j : in) pairs += i == j ? 0.0 : (*t.pair)(i, j);
    }
  }
  return t.offset + unit + t.coef * best_sum + pairs;
}

std::unique_ptr<IncrementalEvaluator> FacilityLocationFunction::start(bool full) const {
  return std::make_unique<FacilityEvaluator>(terms_, prefs_, full);
}

FacilityLocationFunction gateway_utility_oracle(const PathTables& tables) {
  Terms t;
  t.elements = tables.gateways;
  t.score = tables.r_sat;
  return FacilityLocationFunction(std::move(t));
}

FacilityLocationFunction gateway_complement_oracle(const PathTables& tables,
                                                   const ObjectiveConfig& cfg) {
  Terms t;
  t.elements = tables.gateways;
  t.score = gather_rows(tables.d, tables.gateways, -1.0);
  t.coef = cfg.alpha;
  t.unit.assign(tables.gateways.size(), -1.0);
  t.offset = gateway_cost_bound(tables, cfg);
  return FacilityLocationFunction(std::move(t));
}

FacilityLocationFunction controller_utility_oracle(const PathTables& tables) {
  Terms t;
  t.elements = tables.controllers;
  t.score = tables.r_ctl;
  return FacilityLocationFunction(std::move(t));
}

FacilityLocationFunction controller_complement_oracle(const GatewayPolicy& gw,
                                                      const PathTables& tables,
                                                      const ObjectiveConfig& cfg) {
  const auto& ks = tables.controllers;
  const double nodes = static_cast<double>(tables.nodes());
  Terms t;
  t.elements = ks;
  t.score = gather_rows(tables.d, ks, -1.0);
  t.coef = 1.0;
  t.unit.resize(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    t.unit[i] = -cfg.beta * (cfg.l_con * nodes + tables.latency(gw.assign.at(ks[i]), ks[i]));
  }
  // l_con * |V| * (|S| - 1): the per-element share lives in unit, the -1 here.
  t.offset = controller_cost_bound(gw, tables, cfg) + cfg.beta * cfg.l_con * nodes;
  Matrix pair(ks.size(), ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    for (std::size_t j = 0; j < ks.size(); ++j) pair(i, j) = -cfg.beta * tables.latency(ks[i], ks[j]);
  }
  t.pair = std::move(pair);
  return FacilityLocationFunction(std::move(t));
}

}  // namespace sagplace
