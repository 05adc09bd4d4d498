#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ammlab/cycle_model.hpp"
#include "ammlab/range_model.hpp"

namespace ammlab::sim {

enum class SimModel { Cycle, Range };
enum class SmallFlow { Continuous, Discrete };

struct SimConfig {
    SimModel model = SimModel::Cycle;
    cycle::CycleModelParams cycle;
    range::RangeModelParams range = range::RangeModelParams::defaults();
    // Cycle mode: number of cycles of the low pool per replication (high pool
    // when the low pool is empty). Range mode: number of shock events.
    long long horizon = 100000;
    std::uint64_t seed = 1;
    // 0 = event-driven. A positive dt rounds cycle-ending times up to the grid.
    double dt = 0.0;
    int replications = 1;
    int threads = 1;
    SmallFlow small_flow = SmallFlow::Continuous;
    double trade_unit = 1.0;       // small-trade size in Discrete mode
    long long lp_sample = 100000;  // LPs drawn per replication for the liquidity share
    bool record_cycles = false;

    void validate() const;
};

struct Estimate {
    double mean = 0.0;
    double se = 0.0;
    long long n = 0;
};

struct PoolStats {
    bool active = false;           // pool holds liquidity in equilibrium
    Estimate cycle_duration;       // Cycle mode only
    double volume = 0.0;           // tokens traded
    Estimate volume_share;
    Estimate liquidity_share;      // from the sampled LP population
    Estimate trade_size;
    double trades = 0.0;           // fractional in Continuous mode
    long long rebalances = 0;      // refills (Cycle) or depleting news events (Range)
    double rebalance_rate = 0.0;   // per unit time (Cycle) or per event (Range)
    double fee_revenue = 0.0;
    double gas_paid = 0.0;
    double adverse_selection = 0.0;  // Range mode, numeraire lost to arbitrage
    // Range mode per-unit-of-liquidity estimates, comparable to the closed forms.
    Estimate yield_per_unit;
    Estimate adverse_per_unit;
    Estimate depletion_prob;
};

struct ReplicationSummary {
    int index = 0;
    std::uint64_t stream_seed = 0;
    double elapsed = 0.0;
    double cycle_duration_low = 0.0;
    double volume_share_low = 0.0;
    double liquidity_share_low = 0.0;
    double trade_size_low = 0.0;
    double trade_size_high = 0.0;
};

struct CycleRecord {
    int replication = 0;
    long long cycle_id = 0;
    char pool = 'L';
    double duration = 0.0;
    double volume = 0.0;
    double trades = 0.0;
};

struct SimReport {
    SimModel model = SimModel::Cycle;
    std::uint64_t seed = 0;
    long long horizon = 0;
    int replications = 0;
    std::string regime;
    double analytic_w_low = 0.0;
    double analytic_d_low = 0.0;
    double analytic_d_high = 0.0;
    PoolStats low;
    PoolStats high;
    double elapsed = 0.0;          // simulated time summed over replications
    long long blocks = 0;          // epochs between large trades (Cycle) or events (Range)
    double tokens_sold_by_lps = 0.0;
    double tokens_bought_by_traders = 0.0;
    double unfilled_demand = 0.0;  // Cycle mode, large-trader demand beyond supply
    Estimate gft_per_event;        // Range mode, v * delta * tau summed over pools
    double analytic_gft = 0.0;
    // Per-block differences used by the significance gates.
    Estimate volume_diff;          // volume L - volume H
    Estimate rebalance_diff;       // rebalances L - rebalances H
    std::vector<ReplicationSummary> per_replication;
    std::vector<CycleRecord> cycles;
};

SimReport simulate(const SimConfig& config);

std::string report_to_json(const SimReport& report, int indent = 2);
std::string cycles_to_csv(const SimReport& report);
std::string to_string(SimModel m);

// ==== prediction checks ====

enum class CheckStatus { Pass, Fail, NotApplicable, InsufficientSamples };

struct PredictionCheck {
    std::string name;
    CheckStatus status = CheckStatus::NotApplicable;
    double lhs = 0.0;
    double rhs = 0.0;
    double se = 0.0;
    double z = 0.0;
    std::string detail;
};

inline constexpr double kSignificanceGate = 4.0;
inline constexpr long long kMinSamples = 30;

// Uses the equilibrium stored in the report (solved from the same params).
std::vector<PredictionCheck> prediction_checks(const SimReport& report);
std::vector<PredictionCheck> prediction_checks(const SimReport& report,
                                               const cycle::CycleEquilibrium& eq);
std::vector<PredictionCheck> prediction_checks(const SimReport& report,
                                               const range::RangeEquilibrium& eq);

std::string to_string(CheckStatus s);

}  // namespace ammlab::sim
