#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ammlab/random.hpp"

namespace ammlab::range {

struct RangeModelParams {
    double v = 1.0;             // token value in numeraire
    double eta = 0.1;           // news probability
    double lambda_endow = 1.0;  // exponential endowment scale
    double ell = 1.0;           // low pool fee
    double h = 2.0;             // high pool fee
    double r = 0.001;           // band half-width: [v/(1+r)^2, v(1+r)^2]
    double Delta = 0.0;         // sqrt(1+delta) has support up to Delta
    double Gamma = 1.0;         // gas per rebalance

    // Figure defaults: r=0.001, h=2, l=1, lambda=1, eta=0.1, Delta=1.1(1+r)sqrt(1+h).
    static RangeModelParams defaults();

    // Hard constraints; throws std::invalid_argument naming the field.
    void validate() const;
    // Soft assumptions (Delta large enough, both pools viable). Empty when all hold.
    std::vector<std::string> assumption_violations() const;
};

// ==== shock process ====

// Density of delta with sqrt(1+delta) uniform on [0, Delta]: 1/(2 Delta sqrt(1+delta))
// on (-1, Delta^2 - 1]. Only delta >= 0 ever trades.
double shock_pdf(double delta, double Delta);
double shock_sample(Rng& rng, double Delta);
double shock_mean(double Delta);  // E[delta] = Delta^2/3 - 1

// ==== trader side ====

double tau_star(double delta, double fee, double pool_tokens, double r);
// Numeraire (before fee) paid for tau tokens from a pool of T tokens.
double numeraire_for_purchase(double tau, double pool_tokens, double v, double r);
double trader_profit(double tau, double delta, double fee, double pool_tokens, double v, double r);
double depletion_threshold(double fee, double r);  // (1+f)(1+r)^2 - 1

// ==== LP side, per unit of liquidity ====

double liquidity_yield(double f, const RangeModelParams& p);
double liquidity_yield_derivative(double f, const RangeModelParams& p);
double yield_threshold(const RangeModelParams& p);  // f-bar, argmax of liquidity_yield
double adverse_selection(double f, const RangeModelParams& p);
double rebalance_cost(double f, const RangeModelParams& p);
// E[delta * tau*/T]; strictly decreasing in f.
double per_unit_gains(double f, const RangeModelParams& p);
double per_unit_gains_derivative(double f, const RangeModelParams& p);
// Probability a news shock depletes the band.
double depletion_probability(double f, const RangeModelParams& p);

enum class PoolSide { Low, High };

double pool_fee(PoolSide side, const RangeModelParams& p);
double lp_profit(double q, PoolSide side, const RangeModelParams& p);
// Slope of pi_L - pi_H in q.
double profit_difference_slope(const RangeModelParams& p);
double profit_difference(double q, const RangeModelParams& p);

struct ParticipationThresholds {
    double q_lo_low = 0.0;
    double q_lo_high = 0.0;
    bool low_viable = true;   // per-unit margin positive
    bool high_viable = true;
};
ParticipationThresholds participation_thresholds(const RangeModelParams& p);

// eta above which every LP prefers the high-fee pool.
double fragmentation_eta_threshold(const RangeModelParams& p);
// min_k L_k / (L_k + A_k)
double viability_eta_bound(const RangeModelParams& p);

// ==== endowments (exponential, scale lambda) ====

double endowment_mass_above(double q, double lambda);   // P(q_i > q)
double endowment_supply_above(double q, double lambda); // E[q_i 1{q_i > q}]

// ==== equilibrium ====

enum class RangeRegime { AllHigh, Fragmented, Infeasible };
enum class FeeSide { BelowThreshold, AtThreshold, AboveThreshold };

struct RangeEquilibrium {
    RangeRegime regime = RangeRegime::Infeasible;
    std::optional<double> q_t;
    double q_lo_h = 0.0;
    double q_lo_l = 0.0;
    double w_low = 0.0;
    double pool_supply_low = 0.0;
    double pool_supply_high = 0.0;
    FeeSide ell_side = FeeSide::BelowThreshold;
    FeeSide h_side = FeeSide::BelowThreshold;
    std::vector<std::string> violations;  // filled when Infeasible
};

RangeEquilibrium solve_equilibrium(const RangeModelParams& p);
// Root of pi_L - pi_H on q by bracketed bisection.
double marginal_lp_by_bisection(const RangeModelParams& p);
double market_share_low(const RangeEquilibrium& eq, const RangeModelParams& p);

std::string to_string(RangeRegime r);
std::string to_string(FeeSide s);

// ==== gains from trade ====

struct PoolSupply {
    double fee = 0.0;
    double tokens = 0.0;
};

double gains_from_trade(std::span<const PoolSupply> pools, const RangeModelParams& p);

struct GftComparison {
    double single = 0.0;
    double menu = 0.0;
    double difference = 0.0;   // menu - single
    double low_supply = 0.0;
};

// Single pool at fee f versus the menu {h = f, ell}. The other fields of p
// (eta, Gamma, ...) are shared. Requires 0 <= ell <= f.
GftComparison gft_compare(double f, double ell, const RangeModelParams& p);

}  // namespace ammlab::range
