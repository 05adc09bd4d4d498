#pragma once

#include "ammlab/pool.hpp"

namespace ammlab::pool {

// Two-LP, one-trader example on an ETH/USDT pool: 1% fee, 60-tick spacing,
// price at tick 73140. LP A spreads 20000 USDT over [73080, 73320), LP B puts
// 20000 USDT into [73200, 73320) above the price; trader C buys 10 ETH.
struct Walkthrough {
    int spacing = 60;
    double fee_fraction = 0.01;
    double price = 0.0;
    double l_a = 0.0;
    double l_b = 0.0;
    TokenAmounts deposit_a;
    TokenAmounts deposit_b;
    SwapReceipt trade;
    // per-stage figures pulled from trade.steps
    double stage1_token = 0.0;
    double stage1_numeraire = 0.0;
    double stage1_fee = 0.0;
    double stage2_token = 0.0;
    double stage2_numeraire = 0.0;
    double stage2_fee = 0.0;
    double stage2_fee_a = 0.0;
    double stage2_fee_b = 0.0;
    double end_price = 0.0;
    double average_price = 0.0;
};

inline constexpr int kWalkthroughTick = 73140;
inline constexpr double kWalkthroughCapital = 20000.0;
inline constexpr double kWalkthroughBuy = 10.0;

Walkthrough run_walkthrough();

}  // namespace ammlab::pool
