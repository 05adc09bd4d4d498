#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ammlab/event_csv.hpp"

namespace ammlab::analytics {

inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kLagSeconds = 3600.0;
inline constexpr double kLagStaleness = 900.0;
inline constexpr double kWinsorLow = 0.005;
inline constexpr double kWinsorHigh = 0.995;
inline constexpr double kSymmetricAlpha = 1.05;
inline constexpr int kGasLowest = 1000;

long long day_of(double timestamp);
// Pools sharing everything before the last '/' trade the same pair.
std::string pair_of(const std::string& pool_id);

// Sorted by (block, position) with remaining fields as tie-breakers, so any
// permutation of the input yields the same order.
std::vector<MarketEvent> sorted_events(std::vector<MarketEvent> events);
// Drops burns that withdraw nothing.
std::vector<MarketEvent> drop_empty_burns(std::vector<MarketEvent> events);

// Execution price -amount1/amount0 of a swap.
double swap_price(const MarketEvent& e);
// Price after the event: the exported column when present, else the swap price.
std::optional<double> observed_price(const MarketEvent& e);

// ==== LVR ====

// d * dx * (p_swap - p') with d = +1 for a buy (dx < 0).
double lvr_swap(const MarketEvent& e, double benchmark);

// Clamps to the [lo, hi] sample percentiles. Empty input is a no-op.
void winsorize(std::vector<double>& xs, double lo = kWinsorLow, double hi = kWinsorHigh);

// Basis points of tvl_end. Absent when tvl_end <= 0.
std::optional<double> lvr_daily(std::vector<double> per_swap, double tvl_end);

enum class LvrBenchmark { Instant, Lagged };

struct LvrRow {
    std::string pool_id;
    long long day = 0;
    std::optional<double> lvr_bps;
    double lvr_sum = 0.0;       // after winsorizing
    double tvl_end = 0.0;
    int swaps = 0;
    int excluded = 0;           // swaps with no benchmark price
};

std::vector<LvrRow> lvr_table(const std::vector<MarketEvent>& events, LvrBenchmark b);

// ==== impermanent loss ====

double impermanent_loss(double L, double p_lo, double p_hi, double p0, double p1);
double symmetric_impermanent_loss(double p0, double p1, double alpha = kSymmetricAlpha);

// ==== daily measures ====

std::optional<double> liquidity_yield_daily(double volume, double tvl_prev, double fee_bps);
double range_volatility(double high, double low);
// Mean of the n lowest mint/burn gas bids. Absent when there are none.
std::optional<double> gas_benchmark(std::span<const MarketEvent> day_events, int n_lowest = kGasLowest);

// ==== JIT and liquidity cycles ====

struct JitTriple {
    std::size_t mint = 0;   // indices into the sorted event list
    std::size_t swap = 0;
    std::size_t burn = 0;
};

// Expects sorted events.
std::vector<JitTriple> jit_detect(const std::vector<MarketEvent>& events);

enum class GapKind { MintToBurn, BurnToMint };

struct CycleGap {
    std::string wallet;
    std::string pool_id;
    GapKind kind = GapKind::MintToBurn;
    double hours = 0.0;
    long long day = 0;          // day of the second leg
    bool out_of_range = false;  // of the second leg, against the pool price at that time
};

// Expects sorted events; empty burns are skipped.
std::vector<CycleGap> liquidity_cycles(const std::vector<MarketEvent>& events);
bool out_of_range(int tick_lower, int tick_upper, double price);

std::string to_string(GapKind k);

// ==== panel ====

struct PanelRow {
    std::string pool_id;
    long long day = 0;
    double tvl_end = 0.0;
    double volume = 0.0;           // numeraire
    int trade_count = 0;
    std::optional<double> median_trade;
    std::optional<double> median_mint;  // JIT mints excluded
    int lp_wallets = 0;
    std::optional<double> liquidity_share;
    std::optional<double> volume_share;
    std::optional<double> lvr_1h;
    std::optional<double> lvr_instant;
    std::optional<double> il_5pct;
    std::optional<double> liq_yield;
    std::optional<double> volatility;
    std::optional<double> gas_benchmark;
    bool negative_balance = false;  // running balances went below zero
};

std::vector<PanelRow> build_panel(std::vector<MarketEvent> events, int gas_lowest = kGasLowest);

std::string panel_to_csv(const std::vector<PanelRow>& rows);
std::string lvr_to_csv(const std::vector<LvrRow>& instant, const std::vector<LvrRow>& lagged);
std::string jit_to_csv(const std::vector<MarketEvent>& sorted, const std::vector<JitTriple>& t);
std::string cycles_to_csv(const std::vector<CycleGap>& gaps);
std::string il_to_csv(const std::vector<PanelRow>& rows);

}  // namespace ammlab::analytics
