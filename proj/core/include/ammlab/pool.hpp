#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ammlab::pool {

inline constexpr double kTickBase = 1.0001;
inline constexpr int kMaxTick = 887272;

// 1.0001^tick for a raw (basis-point) tick.
double tick_price(int tick);
double tick_sqrt_price(int tick);
// Largest raw tick t with tick_price(t) <= price.
int tick_at_or_below(double price);

class TickGrid {
public:
    explicit TickGrid(int spacing_ticks);

    int spacing() const { return spacing_; }
    double price_of(int index) const;
    // Largest grid index whose price is <= price.
    int index_of(double price) const;
    int tick_of(int index) const { return spacing_ * index; }
    bool on_grid(int tick) const { return tick % spacing_ == 0; }

private:
    int spacing_;
};

// Fee tier in basis points -> tick spacing (1->1, 5->10, 30->60, 100->200).
int spacing_for_fee_bps(int fee_bps);

struct TokenAmounts {
    double token = 0.0;
    double numeraire = 0.0;
};

// Real reserves held by liquidity L on [p_lo, p_hi] at price p.
TokenAmounts deposit_amounts(double liquidity, double p_lo, double p_hi, double price);

// L such that value * x(L) + y(L) = capital.
double liquidity_for_capital(double capital, double p_lo, double p_hi, double price, double value);

// Price after buying x tokens inside one tick starting at p_min with liquidity L.
// Throws std::domain_error once x reaches the tick's depth L / sqrt(p_min).
double price_after_buy_within_tick(double p_min, double liquidity, double x);

struct Position {
    std::string owner;
    int lower_tick = 0;
    int upper_tick = 0;
    double liquidity = 0.0;
    double fees_owed_token = 0.0;
    double fees_owed_numeraire = 0.0;
};

enum class SwapSide { BuyToken, SellToken };

struct SwapStep {
    int interval_tick = 0;      // lower raw tick of the interval traded in
    double liquidity = 0.0;
    double token = 0.0;         // token moved (out for buys, in for sells)
    double numeraire = 0.0;     // numeraire moved, before fee
    double fee = 0.0;
    double start_price = 0.0;
    double end_price = 0.0;
};

struct SwapReceipt {
    SwapSide side = SwapSide::BuyToken;
    // Buys: amount_in is numeraire (before fee), amount_out is token.
    // Sells: amount_in is token (before fee), amount_out is numeraire.
    double amount_in = 0.0;
    double amount_out = 0.0;
    double fee_paid = 0.0;      // fee_fraction * amount_in, in the input asset
    int ticks_crossed = 0;      // initialized ticks crossed
    double start_price = 0.0;
    double end_price = 0.0;
    double requested = 0.0;
    double filled = 0.0;        // token quantity actually traded
    bool partial = false;
    std::map<std::string, double> per_provider_fees;
    std::vector<SwapStep> steps;

    double total_cost() const { return amount_in + fee_paid; }
};

class InsufficientDepth : public std::runtime_error {
public:
    InsufficientDepth(const std::string& what, double available)
        : std::runtime_error(what), available_(available) {}
    double available() const { return available_; }
private:
    double available_;
};

// Plain value type. Swaps are pure functions returning a new state (see
// swap_buy_token below); the mutating members exist for callers that own
// the state exclusively.
class PoolState {
public:
    PoolState(TickGrid grid, double fee_fraction, double price);
    static PoolState for_fee_tier(int fee_bps, double price, std::optional<int> spacing_override = {});

    const TickGrid& grid() const { return grid_; }
    double fee_fraction() const { return fee_; }
    double current_price() const { return sqrt_price_ * sqrt_price_; }
    double sqrt_price() const { return sqrt_price_; }
    int current_tick() const { return tick_; }

    // Returns the index of the stored position.
    std::size_t add_position(Position p);
    // Adds liquidity sized so the deposit is worth `capital` at `value`.
    std::size_t add_capital(const std::string& owner, int lower_tick, int upper_tick,
                            double capital, double value);
    void remove_liquidity(std::size_t index, double liquidity);
    const std::vector<Position>& positions() const { return positions_; }

    // Aggregate L on the interval containing the current price (half-open, so a
    // price sitting on a boundary belongs to the interval above).
    double active_liquidity() const;
    double liquidity_in_interval(int tick) const;
    // Per initialized tick: liquidity added when crossing upward.
    std::map<int, double> liquidity_net() const;
    std::size_t initialized_tick_count() const { return ticks_.size(); }

    double token_depth_above() const;
    double numeraire_depth_below() const;
    TokenAmounts reserves() const;
    // (L / sqrt p, L sqrt p) for the active interval.
    TokenAmounts virtual_reserves() const;

    SwapReceipt buy_token(double qty, bool allow_partial = false);
    SwapReceipt sell_token(double qty, bool allow_partial = false);

private:
    int sell_interval() const;
    void accrue(int interval_tick, double fee, SwapSide side, SwapReceipt& r);

    TickGrid grid_;
    double fee_;
    double sqrt_price_;
    int tick_;
    struct TickInfo {
        double net = 0.0;
        int refs = 0;  // positions with nonzero liquidity bounded here
    };
    std::map<int, TickInfo> ticks_;
    std::vector<Position> positions_;
};

struct SwapOutcome {
    PoolState state;
    SwapReceipt receipt;
};

SwapOutcome swap_buy_token(const PoolState& pool, double qty, bool allow_partial = false);
SwapOutcome swap_sell_token(const PoolState& pool, double qty, bool allow_partial = false);

// Numeraire paid including fee to buy qty tokens; the pool is left untouched.
double buy_cost(const PoolState& pool, double qty);

}  // namespace ammlab::pool
