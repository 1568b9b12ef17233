#include "marketsim/mechanisms.hpp"

#include <cassert>
#include <numeric>

namespace marketsim {

AllocationVector proportional_share_allocate(const BidVector& weights) {
  AllocationVector alloc;
  alloc.shares.assign(weights.size(), 0.0);
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (total <= 0.0) return alloc;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    alloc.shares[i] = weights[i] > 0.0 ? weights[i] / total : 0.0;
  }
  return alloc;
}

AllocationVector market_allocate(const BidVector& bids) {
  // Same proportional rule, applied to spending rates.
  return proportional_share_allocate(bids);
}

void charge_and_income(std::vector<UserState>& users, const BidVector& bids, double dt) {
  assert(bids.size() == users.size());
  for (std::size_t i = 0; i < users.size(); ++i) {
    UserState& u = users[i];
    const double earned = u.income_rate * dt;
    const double charged = bids[i] * dt;
    u.balance += earned - charged;
    u.cumulative_income += earned;
    u.cumulative_spend += charged;
    // A clamped bid of balance/dt can overshoot the balance by an ulp.
    if (u.balance < 0.0) {
      assert(u.balance > -1e-9);
      u.balance = 0.0;
    }
  }
}

FixedPriceResult fixed_price_allocate(double price, const BidVector& willingness,
                                      double capacity, std::optional<int> holder) {
  const auto meets_price = [&](std::size_t i) {
    return willingness[i] > 0.0 && willingness[i] >= price;
  };
  FixedPriceResult result;
  if (holder && *holder >= 0 && static_cast<std::size_t>(*holder) < willingness.size() &&
      meets_price(static_cast<std::size_t>(*holder))) {
    result.winner = holder;
  } else {
    for (std::size_t i = 0; i < willingness.size(); ++i) {
      if (meets_price(i)) {
        result.winner = static_cast<int>(i);
        break;
      }
    }
  }
  if (result.winner) result.charge_rate = price * capacity;
  return result;
}

std::vector<double> redistribute(const std::vector<double>& balances, double tax) {
  if (balances.empty()) return {};
  const double mean =
      std::accumulate(balances.begin(), balances.end(), 0.0) / static_cast<double>(balances.size());
  std::vector<double> out(balances.size());
  for (std::size_t i = 0; i < balances.size(); ++i) {
    out[i] = balances[i] + tax * (mean - balances[i]);
  }
  return out;
}

}  // namespace marketsim
