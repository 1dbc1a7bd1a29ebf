#include "sagplace/set_function.hpp"

#include <utility>

namespace sagplace {

namespace {

// Falls back to full re-evaluation for every query.
class NaiveEvaluator final : public IncrementalEvaluator {
 public:
  NaiveEvaluator(const SetFunctionOracle& f, Subset start)
      : IncrementalEvaluator(start), f_(&f), scratch_(std::move(start)) {
    value_ = f_->evaluate(scratch_);
  }

  double value() const override { return value_; }

  double add_gain(std::size_t i) const override { return flipped(i, true) - value_; }
  double remove_gain(std::size_t i) const override { return flipped(i, false) - value_; }

  void add(std::size_t i) override {
    mark(i, true);
    scratch_[i] = true;
    value_ = f_->evaluate(scratch_);
  }
  void remove(std::size_t i) override {
    mark(i, false);
    scratch_[i] = false;
    value_ = f_->evaluate(scratch_);
  }

  std::unique_ptr<IncrementalEvaluator> clone() const override {
    return std::make_unique<NaiveEvaluator>(*this);
  }

 private:
  double flipped(std::size_t i, bool in) const {
    scratch_[i] = in;
    const double v = f_->evaluate(scratch_);
    scratch_[i] = !in;
    return v;
  }

  const SetFunctionOracle* f_;
  mutable Subset scratch_;
  double value_ = 0.0;
};

}  // namespace

Subset make_subset(std::size_t n, const std::vector<std::size_t>& members) {
  Subset s(n, false);
  for (std::size_t i : members) s.at(i) = true;
  return s;
}

std::vector<std::size_t> members_of(const Subset& s) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i]) out.push_back(i);
  }
  return out;
}

IncrementalEvaluator::IncrementalEvaluator(Subset members) : members_(std::move(members)) {
  for (bool b : members_) count_ += b ? 1 : 0;
}

void IncrementalEvaluator::mark(std::size_t i, bool in) {
  if (members_[i] == in) return;
  members_[i] = in;
  if (in) {
    ++count_;
  } else {
    --count_;
  }
}

std::unique_ptr<IncrementalEvaluator> SetFunctionOracle::start(bool full) const {
  return std::make_unique<NaiveEvaluator>(*this, Subset(ground_size(), full));
}

LambdaOracle::LambdaOracle(std::size_t n, Fn fn, std::vector<NodeId> ids)
    : n_(n), fn_(std::move(fn)), ids_(std::move(ids)) {}

}  // namespace sagplace
