#include "ammlab/walkthrough.hpp"

namespace ammlab::pool {

Walkthrough run_walkthrough() {
    Walkthrough w;
    w.price = tick_price(kWalkthroughTick);
    PoolState pool(TickGrid(w.spacing), w.fee_fraction, w.price);
    const int lo_a = kWalkthroughTick - w.spacing;
    const int hi = kWalkthroughTick + 3 * w.spacing;
    const int lo_b = kWalkthroughTick + w.spacing;
    const std::size_t ia = pool.add_capital("A", lo_a, hi, kWalkthroughCapital, w.price);
    const std::size_t ib = pool.add_capital("B", lo_b, hi, kWalkthroughCapital, w.price);
    w.l_a = pool.positions()[ia].liquidity;
    w.l_b = pool.positions()[ib].liquidity;
    w.deposit_a = deposit_amounts(w.l_a, tick_price(lo_a), tick_price(hi), w.price);
    w.deposit_b = deposit_amounts(w.l_b, tick_price(lo_b), tick_price(hi), w.price);

    w.trade = pool.buy_token(kWalkthroughBuy);
    if (!w.trade.steps.empty()) {
        const auto& s1 = w.trade.steps.front();
        w.stage1_token = s1.token;
        w.stage1_numeraire = s1.numeraire;
        w.stage1_fee = s1.fee;
    }
    if (w.trade.steps.size() > 1) {
        const auto& s2 = w.trade.steps[1];
        w.stage2_token = s2.token;
        w.stage2_numeraire = s2.numeraire;
        w.stage2_fee = s2.fee;
        w.stage2_fee_a = s2.fee * w.l_a / s2.liquidity;
        w.stage2_fee_b = s2.fee * w.l_b / s2.liquidity;
    }
    w.end_price = w.trade.end_price;
    w.average_price = w.trade.amount_in / w.trade.amount_out;
    return w;
}

}  // namespace ammlab::pool
