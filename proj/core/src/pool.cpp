#include "ammlab/pool.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ammlab::pool {

namespace {

const double kLogBase = std::log(kTickBase);

void require_finite(double v, const char* field) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(field) + " must be finite");
    }
}

}  // namespace

double tick_price(int tick) {
    if (tick < -kMaxTick || tick > kMaxTick) {
        throw std::out_of_range("tick " + std::to_string(tick) + " outside the representable range");
    }
    return std::pow(kTickBase, tick);
}

double tick_sqrt_price(int tick) {
    return std::sqrt(tick_price(tick));
}

int tick_at_or_below(double price) {
    if (!(price > 0.0) || !std::isfinite(price)) {
        throw std::invalid_argument("price must be positive and finite");
    }
    auto t = static_cast<long long>(std::floor(std::log(price) / kLogBase));
    t = std::clamp<long long>(t, -kMaxTick, kMaxTick);
    // log rounding can be off by one either way
    while (t < kMaxTick && tick_price(static_cast<int>(t + 1)) <= price) ++t;
    while (t > -kMaxTick && tick_price(static_cast<int>(t)) > price) --t;
    return static_cast<int>(t);
}

TickGrid::TickGrid(int spacing_ticks) : spacing_(spacing_ticks) {
    if (spacing_ticks <= 0) {
        throw std::invalid_argument("tick_spacing must be a positive integer");
    }
}

double TickGrid::price_of(int index) const {
    const long long t = static_cast<long long>(spacing_) * index;
    if (t < -kMaxTick || t > kMaxTick) {
        throw std::out_of_range("grid index " + std::to_string(index) + " outside the tick range");
    }
    return tick_price(static_cast<int>(t));
}

int TickGrid::index_of(double price) const {
    const int t = tick_at_or_below(price);
    // floor division toward -inf
    int i = t / spacing_;
    if (t % spacing_ != 0 && t < 0) --i;
    return i;
}

int spacing_for_fee_bps(int fee_bps) {
    switch (fee_bps) {
        case 1: return 1;
        case 5: return 10;
        case 30: return 60;
        case 100: return 200;
        default:
            throw std::invalid_argument("fee_bps " + std::to_string(fee_bps) +
                                        " has no default tick spacing (expected 1, 5, 30 or 100)");
    }
}

TokenAmounts deposit_amounts(double liquidity, double p_lo, double p_hi, double price) {
    if (!(p_lo > 0.0) || !(p_lo < p_hi)) {
        throw std::invalid_argument("malformed position: need 0 < p_lo < p_hi");
    }
    if (!(liquidity >= 0.0)) {
        throw std::invalid_argument("liquidity must be nonnegative");
    }
    if (!(price > 0.0)) {
        throw std::invalid_argument("price must be positive");
    }
    const double s_lo = std::sqrt(p_lo);
    const double s_hi = std::sqrt(p_hi);
    if (price <= p_lo) {
        return {liquidity * (1.0 / s_lo - 1.0 / s_hi), 0.0};
    }
    if (price <= p_hi) {
        const double s = std::sqrt(price);
        return {liquidity * (1.0 / s - 1.0 / s_hi), liquidity * (s - s_lo)};
    }
    return {0.0, liquidity * (s_hi - s_lo)};
}

double liquidity_for_capital(double capital, double p_lo, double p_hi, double price, double value) {
    if (capital < 0.0) {
        throw std::invalid_argument("capital must be nonnegative");
    }
    const TokenAmounts unit = deposit_amounts(1.0, p_lo, p_hi, price);
    const double per_l = value * unit.token + unit.numeraire;
    if (!(per_l > 0.0)) {
        throw std::invalid_argument("position has zero value per unit of liquidity");
    }
    return capital / per_l;
}

double price_after_buy_within_tick(double p_min, double liquidity, double x) {
    if (!(p_min > 0.0) || !(liquidity > 0.0)) {
        throw std::invalid_argument("price_after_buy_within_tick: need p_min > 0 and L > 0");
    }
    if (x < 0.0) {
        throw std::invalid_argument("price_after_buy_within_tick: x must be nonnegative");
    }
    const double d = liquidity - std::sqrt(p_min) * x;
    if (!(d > 0.0)) {
        throw std::domain_error("tick depth exhausted: x >= L / sqrt(p_min), the trade crosses the tick");
    }
    return p_min * liquidity * liquidity / (d * d);
}

// ==== PoolState ====

PoolState::PoolState(TickGrid grid, double fee_fraction, double price)
    : grid_(grid), fee_(fee_fraction) {
    if (!(fee_fraction >= 0.0 && fee_fraction < 1.0)) {
        throw std::invalid_argument("fee_fraction must lie in [0, 1)");
    }
    if (!(price > 0.0) || !std::isfinite(price)) {
        throw std::invalid_argument("current_price must be positive and finite");
    }
    if (price < tick_price(-kMaxTick) || price > tick_price(kMaxTick)) {
        throw std::out_of_range("current_price outside the tick grid's representable range");
    }
    tick_ = tick_at_or_below(price);
    sqrt_price_ = price == tick_price(tick_) ? tick_sqrt_price(tick_) : std::sqrt(price);
}

PoolState PoolState::for_fee_tier(int fee_bps, double price, std::optional<int> spacing_override) {
    if (fee_bps < 0 || fee_bps >= 10000) {
        throw std::invalid_argument("fee_bps must lie in [0, 10000)");
    }
    const int spacing = spacing_override ? *spacing_override : spacing_for_fee_bps(fee_bps);
    return PoolState(TickGrid(spacing), fee_bps / 1e4, price);
}

std::size_t PoolState::add_position(Position p) {
    if (p.lower_tick >= p.upper_tick) {
        throw std::invalid_argument("position " + p.owner + ": lower_tick must be below upper_tick");
    }
    if (!grid_.on_grid(p.lower_tick) || !grid_.on_grid(p.upper_tick)) {
        throw std::invalid_argument("position " + p.owner + ": ticks must be multiples of tick_spacing " +
                                    std::to_string(grid_.spacing()));
    }
    if (p.lower_tick < -kMaxTick || p.upper_tick > kMaxTick) {
        throw std::out_of_range("position " + p.owner + ": ticks outside the representable range");
    }
    require_finite(p.liquidity, "liquidity");
    if (p.liquidity < 0.0) {
        throw std::invalid_argument("position " + p.owner + ": liquidity must be nonnegative");
    }
    if (p.liquidity > 0.0) {
        auto& lo = ticks_[p.lower_tick];
        lo.net += p.liquidity;
        ++lo.refs;
        auto& hi = ticks_[p.upper_tick];
        hi.net -= p.liquidity;
        ++hi.refs;
    }
    positions_.push_back(std::move(p));
    return positions_.size() - 1;
}

std::size_t PoolState::add_capital(const std::string& owner, int lower_tick, int upper_tick,
                                   double capital, double value) {
    const double l = liquidity_for_capital(capital, tick_price(lower_tick), tick_price(upper_tick),
                                           current_price(), value);
    return add_position(Position{owner, lower_tick, upper_tick, l, 0.0, 0.0});
}

void PoolState::remove_liquidity(std::size_t index, double liquidity) {
    if (index >= positions_.size()) {
        throw std::out_of_range("remove_liquidity: no such position");
    }
    Position& p = positions_[index];
    if (liquidity < 0.0 || liquidity > p.liquidity * (1.0 + 1e-12)) {
        throw std::invalid_argument("remove_liquidity: amount exceeds position liquidity");
    }
    if (p.liquidity == 0.0) return;
    const double take = std::min(liquidity, p.liquidity);
    const bool closes = take >= p.liquidity;
    auto drop = [&](int tick, double signed_l) {
        auto it = ticks_.find(tick);
        it->second.net -= signed_l;
        if (closes && --it->second.refs == 0) ticks_.erase(it);
    };
    drop(p.lower_tick, take);
    drop(p.upper_tick, -take);
    p.liquidity = closes ? 0.0 : p.liquidity - take;
}

double PoolState::liquidity_in_interval(int tick) const {
    // summed from positions rather than the net map, to avoid cancellation
    double l = 0.0;
    for (const auto& p : positions_) {
        if (p.lower_tick <= tick && tick < p.upper_tick) l += p.liquidity;
    }
    return l;
}

double PoolState::active_liquidity() const {
    return liquidity_in_interval(tick_);
}

std::map<int, double> PoolState::liquidity_net() const {
    std::map<int, double> out;
    for (const auto& [t, info] : ticks_) out[t] = info.net;
    return out;
}

int PoolState::sell_interval() const {
    // on a boundary the interval consumed by a sell is the one below
    return sqrt_price_ == tick_sqrt_price(tick_) ? tick_ - 1 : tick_;
}

double PoolState::token_depth_above() const {
    double sp = sqrt_price_;
    int k = tick_;
    double depth = 0.0;
    for (auto it = ticks_.upper_bound(k); it != ticks_.end(); ++it) {
        const double sp_next = tick_sqrt_price(it->first);
        depth += liquidity_in_interval(k) * (1.0 / sp - 1.0 / sp_next);
        sp = sp_next;
        k = it->first;
    }
    return depth;
}

double PoolState::numeraire_depth_below() const {
    double sp = sqrt_price_;
    int k = sell_interval();
    double depth = 0.0;
    auto it = ticks_.upper_bound(k);
    while (it != ticks_.begin()) {
        --it;
        const double sp_lo = tick_sqrt_price(it->first);
        depth += liquidity_in_interval(k) * (sp - sp_lo);
        sp = sp_lo;
        k = it->first - 1;
    }
    return depth;
}

TokenAmounts PoolState::reserves() const {
    TokenAmounts total;
    const double p = current_price();
    for (const auto& pos : positions_) {
        const auto a = deposit_amounts(pos.liquidity, tick_price(pos.lower_tick), tick_price(pos.upper_tick), p);
        total.token += a.token;
        total.numeraire += a.numeraire;
    }
    return total;
}

TokenAmounts PoolState::virtual_reserves() const {
    const double l = active_liquidity();
    return {l / sqrt_price_, l * sqrt_price_};
}

void PoolState::accrue(int interval_tick, double fee, SwapSide side, SwapReceipt& r) {
    if (fee <= 0.0) return;
    const double l_tot = liquidity_in_interval(interval_tick);
    if (!(l_tot > 0.0)) return;
    for (auto& p : positions_) {
        if (p.lower_tick <= interval_tick && interval_tick < p.upper_tick && p.liquidity > 0.0) {
            const double share = fee * (p.liquidity / l_tot);
            if (side == SwapSide::BuyToken) {
                p.fees_owed_numeraire += share;
            } else {
                p.fees_owed_token += share;
            }
            r.per_provider_fees[p.owner] += share;
        }
    }
}

SwapReceipt PoolState::buy_token(double qty, bool allow_partial) {
    require_finite(qty, "token_qty");
    if (qty < 0.0) {
        throw std::invalid_argument("token_qty must be nonnegative");
    }
    SwapReceipt r;
    r.side = SwapSide::BuyToken;
    r.requested = qty;
    r.start_price = current_price();
    if (!allow_partial) {
        const double depth = token_depth_above();
        if (qty > depth * (1.0 + 1e-12)) {
            throw InsufficientDepth("insufficient depth: requested " + std::to_string(qty) +
                                    " tokens, pool holds " + std::to_string(depth) + " above the current price",
                                    depth);
        }
    }
    double remaining = qty;
    while (remaining > 0.0) {
        auto it = ticks_.upper_bound(tick_);
        if (it == ticks_.end()) break;
        const int t_next = it->first;
        const double sp_next = tick_sqrt_price(t_next);
        const double l = liquidity_in_interval(tick_);
        SwapStep s;
        s.interval_tick = tick_;
        s.liquidity = l;
        s.start_price = current_price();
        bool crossed = true;
        if (l > 0.0) {
            const double depth = l * (1.0 / sqrt_price_ - 1.0 / sp_next);
            if (remaining < depth) {
                const double sp_new = 1.0 / (1.0 / sqrt_price_ - remaining / l);
                if (sp_new < sp_next) {
                    s.token = remaining;
                    s.numeraire = l * (sp_new - sqrt_price_);
                    sqrt_price_ = sp_new;
                    tick_ = std::clamp(tick_at_or_below(sp_new * sp_new), tick_, t_next - 1);
                    remaining = 0.0;
                    crossed = false;
                }
            }
            if (crossed) {
                s.token = std::min(depth, remaining);
                s.numeraire = l * (sp_next - sqrt_price_);
                remaining -= s.token;
                // residue below rounding of the depth counts as filled
                if (remaining <= 1e-12 * qty) remaining = 0.0;
            }
        }
        const int interval = s.interval_tick;
        if (crossed) {
            sqrt_price_ = sp_next;
            tick_ = t_next;
            ++r.ticks_crossed;
        }
        s.fee = fee_ * s.numeraire;
        s.end_price = current_price();
        if (s.token > 0.0) {
            accrue(interval, s.fee, SwapSide::BuyToken, r);
            r.amount_in += s.numeraire;
            r.amount_out += s.token;
            r.steps.push_back(s);
        }
    }
    r.filled = r.amount_out;
    r.partial = remaining > 0.0;
    r.fee_paid = fee_ * r.amount_in;
    r.end_price = current_price();
    return r;
}

SwapReceipt PoolState::sell_token(double qty, bool allow_partial) {
    require_finite(qty, "token_qty");
    if (qty < 0.0) {
        throw std::invalid_argument("token_qty must be nonnegative");
    }
    SwapReceipt r;
    r.side = SwapSide::SellToken;
    r.requested = qty;
    r.start_price = current_price();
    if (!allow_partial) {
        // token capacity until the lowest initialized tick
        double cap = 0.0;
        double sp = sqrt_price_;
        int k = sell_interval();
        auto it = ticks_.upper_bound(k);
        while (it != ticks_.begin()) {
            --it;
            const double sp_lo = tick_sqrt_price(it->first);
            cap += liquidity_in_interval(k) * (1.0 / sp_lo - 1.0 / sp);
            sp = sp_lo;
            k = it->first - 1;
        }
        if (qty > cap * (1.0 + 1e-12)) {
            throw InsufficientDepth("insufficient depth: selling " + std::to_string(qty) +
                                    " tokens exceeds the " + std::to_string(cap) + " the pool can absorb",
                                    cap);
        }
    }
    double remaining = qty;
    while (remaining > 0.0) {
        const int k = sell_interval();
        auto it = ticks_.upper_bound(k);
        if (it == ticks_.begin()) break;
        --it;
        const int t_lo = it->first;
        const double sp_lo = tick_sqrt_price(t_lo);
        const double l = liquidity_in_interval(k);
        SwapStep s;
        s.interval_tick = k;
        s.liquidity = l;
        s.start_price = current_price();
        bool crossed = true;
        if (l > 0.0) {
            const double cap = l * (1.0 / sp_lo - 1.0 / sqrt_price_);
            if (remaining < cap) {
                const double sp_new = 1.0 / (1.0 / sqrt_price_ + remaining / l);
                if (sp_new > sp_lo) {
                    s.token = remaining;
                    s.numeraire = l * (sqrt_price_ - sp_new);
                    sqrt_price_ = sp_new;
                    tick_ = std::clamp(tick_at_or_below(sp_new * sp_new), t_lo, k);
                    remaining = 0.0;
                    crossed = false;
                }
            }
            if (crossed) {
                s.token = std::min(cap, remaining);
                s.numeraire = l * (sqrt_price_ - sp_lo);
                remaining -= s.token;
                if (remaining <= 1e-12 * qty) remaining = 0.0;
            }
        }
        if (crossed) {
            sqrt_price_ = sp_lo;
            tick_ = t_lo;
            ++r.ticks_crossed;
        }
        s.fee = fee_ * s.token;
        s.end_price = current_price();
        if (s.token > 0.0) {
            accrue(k, s.fee, SwapSide::SellToken, r);
            r.amount_in += s.token;
            r.amount_out += s.numeraire;
            r.steps.push_back(s);
        }
    }
    r.filled = r.amount_in;
    r.partial = remaining > 0.0;
    r.fee_paid = fee_ * r.amount_in;
    r.end_price = current_price();
    return r;
}

SwapOutcome swap_buy_token(const PoolState& pool, double qty, bool allow_partial) {
    PoolState next = pool;
    SwapReceipt r = next.buy_token(qty, allow_partial);
    return {std::move(next), std::move(r)};
}

SwapOutcome swap_sell_token(const PoolState& pool, double qty, bool allow_partial) {
    PoolState next = pool;
    SwapReceipt r = next.sell_token(qty, allow_partial);
    return {std::move(next), std::move(r)};
}

double buy_cost(const PoolState& pool, double qty) {
    return swap_buy_token(pool, qty).receipt.total_cost();
}

}  // namespace ammlab::pool
