#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ammlab::cycle {

struct CycleModelParams {
    double Q = 3.0;             // endowment upper bound, density (Q/(Q-1)) q^-2 on [1, Q]
    double theta_rate = 0.66;   // small-trader flow rate
    double lambda_rate = 0.5;   // large-trader Poisson rate
    double Theta_big = 2.0;     // large-trader demand, must exceed total supply
    double ell = 0.75;
    double h = 1.0;
    double Gamma = 1.0;
    double Delta_gft = 1.0;     // per-unit gains from trade (g)

    static CycleModelParams defaults() { return {}; }

    void validate() const;
    std::vector<std::string> assumption_violations() const;
    double exponent() const;    // E = (lambda/theta) Q/(Q-1)
};

// Aggregate supply S = (Q/(Q-1)) log Q and the upper-tail supply from a.
double total_supply(double Q);
double supply_between(double a, double b, double Q);
double endowment_pdf(double q, double Q);

struct PoolSizes {
    double low = 0.0;
    double high = 0.0;
};

PoolSizes pool_sizes(double q_t, double q_lo, double Q);

struct Durations {
    double low = 0.0;
    double high = 0.0;
};

Durations cycle_durations(double L_low, const CycleModelParams& p);

double f1(double q_t, const CycleModelParams& p);
// +inf (or -inf if Gamma == 0 leaves a negative numerator) where f1 <= 0.
double f2(double q_t, const CycleModelParams& p);
// Root of f1 on [1, Q) if it exists.
std::optional<double> f1_root(const CycleModelParams& p);

// Expected profit per unit time for an LP of size q on each pool.
double profit_rate_low(double q, double q_t, const CycleModelParams& p);
double profit_rate_high(double q, const CycleModelParams& p);

// q_lo = max(Gamma/h, 1) clamped to Q.
double participation_floor(const CycleModelParams& p);

enum class CycleRegime { AllLow, AllHigh, Fragmented };

struct CycleEquilibrium {
    CycleRegime regime = CycleRegime::Fragmented;
    double q_t = 0.0;
    double q_lo = 1.0;
    double L_low = 0.0;
    double L_high = 0.0;
    double w_low = 0.0;
    double d_low = 0.0;
    double d_high = 0.0;
    bool boundary_tie = false;                        // a corner inequality held with equality
    std::optional<CycleRegime> alternative_regime;    // set alongside boundary_tie
};

CycleEquilibrium solve_cycle_equilibrium(const CycleModelParams& p);
// Bisection for the root of f2 from an explicit bracket (used to check uniqueness).
double f2_root_in(double lo, double hi, const CycleModelParams& p);

double market_share_low_cycle(const CycleEquilibrium& eq);

std::string to_string(CycleRegime r);

// ==== implementation shortfall ====

struct FeePool {
    double fee = 0.0;
    double liquidity = 0.0;
};

double implementation_shortfall(std::span<const FeePool> menu, const CycleModelParams& p);
double single_pool_is(double f, const CycleModelParams& p);
// IS of the menu {h, ell} using the solved two-pool equilibrium.
double menu_is(double h, double ell, const CycleModelParams& p);

struct LambertCheck {
    std::string branch;        // "W0 reciprocal", "W0 inverse", "W-1"
    bool defined = false;
    double f_star = 0.0;
    double rel_error = 0.0;
    bool matches = false;
};

struct OptimalFee {
    double f_star = 0.0;           // bounded 1-D minimization
    double is_min = 0.0;
    double dis_df = 0.0;           // central difference at f_star
    bool interior = false;         // Gamma/f_star inside (1, Q)
    std::vector<LambertCheck> lambert;
    std::string matching_branch;   // empty when none matches
};

OptimalFee optimal_single_fee(const CycleModelParams& p);

}  // namespace ammlab::cycle
