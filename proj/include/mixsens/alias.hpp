#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mixsens/rng.hpp"

namespace mixsens {

/// Walker/Vose alias table: O(n) build, O(1) draw.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights);

  std::size_t size() const { return prob_.size(); }
  double total() const { return total_; }

  std::uint32_t sample(Rng& rng) const {
    const auto i = static_cast<std::uint32_t>(rng.below(prob_.size()));
    return rng.uniform() < prob_[i] ? i : alias_[i];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
  double total_ = 0.0;
};

}  // namespace mixsens
