#pragma once

#include <optional>
#include <vector>

#include "marketsim/core.hpp"

namespace marketsim {

/// Per-user declared quantity for one timestep: a weight under proportional
/// share, a spending rate in credits/second under the market, or a
/// willingness-to-pay per resource-unit under fixed pricing. Entries are >= 0
/// and 0 for users with nothing to run.
using BidVector = std::vector<double>;

/// share_i = w_i / sum(w). All shares are 0 when every weight is 0 (the
/// server idles rather than splitting uniformly on zero demand).
AllocationVector proportional_share_allocate(const BidVector& weights);

/// Market allocation: share proportional to the user's own spending rate,
/// b_i / sum(b). Bids must already be clamped to balance/dt by the caller.
AllocationVector market_allocate(const BidVector& bids);

/// Applies one step of the credit economy: balance += income*dt - bid*dt.
/// Bids are charged as given; callers clamp them so balances stay >= 0.
void charge_and_income(std::vector<UserState>& users, const BidVector& bids, double dt);

struct FixedPriceResult {
  std::optional<int> winner;
  double charge_rate = 0.0;  // credits per second while allocated
};

/// Sells the whole server at a posted price. A posted price cannot rank
/// buyers by how much they value the resource, so the sale is first-come
/// first-served: the current holder keeps the server while still meeting the
/// price, and a vacancy goes to the lowest-index user meeting it. A zero
/// willingness never buys. No taker leaves the server idle. The winner is
/// charged price*capacity credits per second.
FixedPriceResult fixed_price_allocate(double price, const BidVector& willingness,
                                      double capacity,
                                      std::optional<int> holder = std::nullopt);

/// Moves every balance toward the mean by the tax fraction:
/// b'_i = b_i + tax*(mean - b_i). Zero-sum by construction.
std::vector<double> redistribute(const std::vector<double>& balances, double tax);

}  // namespace marketsim
