#include "ammlab/range_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ammlab/numeric.hpp"

namespace ammlab::range {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// sqrt(1+f), the shock root at which trading starts on a pool with fee f.
double root_fee(double f) { return std::sqrt(1.0 + f); }

}  // namespace

RangeModelParams RangeModelParams::defaults() {
    RangeModelParams p;
    p.Delta = 1.1 * (1.0 + p.r) * std::sqrt(1.0 + p.h);
    return p;
}

void RangeModelParams::validate() const {
    auto finite = [](double x) { return std::isfinite(x); };
    require(finite(v) && v > 0.0, "v: token value must be positive");
    require(finite(eta) && eta > 0.0 && eta < 1.0, "eta: news intensity must lie in (0, 1)");
    require(finite(lambda_endow) && lambda_endow > 0.0, "lambda_endow: endowment scale must be positive");
    require(finite(ell) && ell >= 0.0, "ell: low fee must be nonnegative");
    require(finite(h) && h > ell, "h: high fee must exceed ell");
    require(finite(r) && r >= 0.0, "r: band half-width must be nonnegative");
    require(finite(Delta) && Delta > 1.0, "Delta: shock scale must exceed 1");
    require(finite(Gamma) && Gamma >= 0.0, "Gamma: gas cost must be nonnegative");
}

std::vector<std::string> RangeModelParams::assumption_violations() const {
    std::vector<std::string> out;
    if (!(Delta > (1.0 + r) * root_fee(h))) {
        out.push_back("Delta: must exceed (1+r)sqrt(1+h) so the high pool can deplete");
    }
    for (const auto side : {PoolSide::Low, PoolSide::High}) {
        const double f = side == PoolSide::Low ? ell : h;
        const double l = liquidity_yield(f, *this);
        const double a = adverse_selection(f, *this);
        if (l + a > 0.0 && eta > l / (l + a)) {
            out.push_back(std::string("eta: exceeds L/(L+A) for the ") +
                          (side == PoolSide::Low ? "low" : "high") + " fee pool, which is not viable");
        }
    }
    return out;
}

// ==== shock process ====

double shock_pdf(double delta, double Delta) {
    require(Delta > 1.0, "Delta: shock scale must exceed 1");
    if (!(delta > -1.0) || delta > Delta * Delta - 1.0) return 0.0;
    return 1.0 / (2.0 * Delta * std::sqrt(1.0 + delta));
}

double shock_sample(Rng& rng, double Delta) {
    require(Delta > 1.0, "Delta: shock scale must exceed 1");
    const double u = Delta * rng.uniform01();
    return u * u - 1.0;
}

double shock_mean(double Delta) {
    return Delta * Delta / 3.0 - 1.0;
}

// ==== trader side ====

double depletion_threshold(double fee, double r) {
    return (1.0 + fee) * (1.0 + r) * (1.0 + r) - 1.0;
}

double tau_star(double delta, double fee, double pool_tokens, double r) {
    require(pool_tokens >= 0.0, "pool_tokens must be nonnegative");
    require(r >= 0.0, "r must be nonnegative");
    if (!(delta > fee)) return 0.0;
    if (r == 0.0) return pool_tokens;  // all-or-nothing limit
    const double frac = (1.0 + r) / r * (1.0 - std::sqrt((1.0 + fee) / (1.0 + delta)));
    return pool_tokens * std::min(1.0, frac);
}

double numeraire_for_purchase(double tau, double pool_tokens, double v, double r) {
    if (tau <= 0.0 || pool_tokens <= 0.0) return 0.0;
    return tau * pool_tokens * v * (1.0 + r) / (tau + (1.0 + r) * (pool_tokens - tau));
}

double trader_profit(double tau, double delta, double fee, double pool_tokens, double v, double r) {
    return tau * v * (1.0 + delta) - (1.0 + fee) * numeraire_for_purchase(tau, pool_tokens, v, r);
}

// ==== LP side ====

double liquidity_yield(double f, const RangeModelParams& p) {
    require(f >= 0.0, "fee must be nonnegative");
    const double s = root_fee(f);
    const double D = p.Delta;
    const double r = p.r;
    if (s >= D) return 0.0;
    if (D >= s * (1.0 + r)) {
        return p.v * f * (r + 1.0) * (2.0 * D - r * s - 2.0 * s) / D;
    }
    // band never depletes: only the partial-fill branch contributes
    const double b = D;
    return 2.0 * f * p.v * (1.0 + r) / (r * D) * ((b * b - s * s) / (2.0 * s) - (b - s));
}

double liquidity_yield_derivative(double f, const RangeModelParams& p) {
    const double s = root_fee(f);
    const double r = p.r;
    const double D = p.Delta;
    // d/df of v f (1+r)(2D - (r+2)s)/D
    return p.v * (r + 1.0) * (4.0 * D * s - (r + 2.0) * (2.0 + 3.0 * f)) / (2.0 * D * s);
}

double yield_threshold(const RangeModelParams& p) {
    const double c = (p.r + 2.0) * (p.r + 2.0);
    const double D2 = p.Delta * p.Delta;
    return (-6.0 * c + 8.0 * D2 + 4.0 * std::sqrt(4.0 * D2 * D2 + 3.0 * D2 * c)) / (9.0 * c);
}

double adverse_selection(double f, const RangeModelParams& p) {
    require(f >= 0.0, "fee must be nonnegative");
    const double s = root_fee(f);
    const double D = p.Delta;
    const double r = p.r;
    if (s >= D) return 0.0;
    if (D >= s * (1.0 + r)) {
        const double a = (D - s * (1.0 + r)) * (D * D + D * s * (1.0 + r) + (f + 1.0) * (r - 2.0) * (r + 1.0)) +
                         std::pow(f + 1.0, 1.5) * r * r * (r + 1.0);
        return p.v * a / (3.0 * D);
    }
    const double b = D;
    return p.v / D * ((1.0 + r) / r * std::pow(b - s, 3) / 3.0);
}

double rebalance_cost(double f, const RangeModelParams& p) {
    return p.Gamma * depletion_probability(f, p);
}

double depletion_probability(double f, const RangeModelParams& p) {
    const double edge = root_fee(f) * (1.0 + p.r);
    return edge >= p.Delta ? 0.0 : 1.0 - edge / p.Delta;
}

double per_unit_gains(double f, const RangeModelParams& p) {
    require(f >= 0.0, "fee must be nonnegative");
    const double s = root_fee(f);
    const double D = p.Delta;
    const double r = p.r;
    if (s >= D) return 0.0;
    if (r == 0.0) {
        return ((D * D * D - s * s * s) / 3.0 - (D - s)) / D;
    }
    if (D >= s * (1.0 + r)) {
        return (6.0 * s * (1.0 + r) * std::log1p(r) +
                r * (2.0 * (D * D * D - 3.0 * D) - s * (1.0 + f) * (r + 1.0) * (r + 2.0))) /
               (6.0 * D * r);
    }
    // antiderivative of (u^2-1)(1-s/u): u^3/3 - s u^2/2 - u + s log u
    auto F = [s](double u) { return u * u * u / 3.0 - s * u * u / 2.0 - u + s * std::log(u); };
    return (1.0 + r) / r * (F(D) - F(s)) / D;
}

double per_unit_gains_derivative(double f, const RangeModelParams& p) {
    const double s = root_fee(f);
    const double r = p.r;
    if (r == 0.0) return -f / (2.0 * p.Delta * s);
    return -(r + 1.0) * ((f + 1.0) * r * (r + 2.0) - 2.0 * std::log1p(r)) / (4.0 * p.Delta * s * r);
}

double pool_fee(PoolSide side, const RangeModelParams& p) {
    return side == PoolSide::Low ? p.ell : p.h;
}

namespace {

double margin(double f, const RangeModelParams& p) {
    return (1.0 - p.eta) * liquidity_yield(f, p) - p.eta * adverse_selection(f, p);
}

}  // namespace

double lp_profit(double q, PoolSide side, const RangeModelParams& p) {
    const double f = pool_fee(side, p);
    return q * margin(f, p) - p.eta * rebalance_cost(f, p);
}

double profit_difference_slope(const RangeModelParams& p) {
    return (1.0 - p.eta) * (liquidity_yield(p.ell, p) - liquidity_yield(p.h, p)) +
           p.eta * (adverse_selection(p.h, p) - adverse_selection(p.ell, p));
}

double profit_difference(double q, const RangeModelParams& p) {
    return lp_profit(q, PoolSide::Low, p) - lp_profit(q, PoolSide::High, p);
}

ParticipationThresholds participation_thresholds(const RangeModelParams& p) {
    ParticipationThresholds t;
    const double ml = margin(p.ell, p);
    const double mh = margin(p.h, p);
    t.low_viable = ml > 0.0;
    t.high_viable = mh > 0.0;
    t.q_lo_low = t.low_viable ? p.eta * rebalance_cost(p.ell, p) / ml : kInf;
    t.q_lo_high = t.high_viable ? p.eta * rebalance_cost(p.h, p) / mh : kInf;
    return t;
}

double fragmentation_eta_threshold(const RangeModelParams& p) {
    const double dl = liquidity_yield(p.ell, p) - liquidity_yield(p.h, p);
    const double da = adverse_selection(p.ell, p) - adverse_selection(p.h, p);
    return dl / (dl + da);
}

double viability_eta_bound(const RangeModelParams& p) {
    double bound = 1.0;
    for (double f : {p.ell, p.h}) {
        const double l = liquidity_yield(f, p);
        const double a = adverse_selection(f, p);
        if (l + a > 0.0) bound = std::min(bound, l / (l + a));
    }
    return bound;
}

double endowment_mass_above(double q, double lambda) {
    if (q <= 0.0) return 1.0;
    return std::exp(-q / lambda);
}

double endowment_supply_above(double q, double lambda) {
    if (std::isinf(q)) return 0.0;
    if (q <= 0.0) return lambda;
    return std::exp(-q / lambda) * (q + lambda);
}

// ==== equilibrium ====

namespace {

FeeSide side_of(double f, double fbar) {
    if (std::abs(f - fbar) <= 1e-12 * std::max(1.0, fbar)) return FeeSide::AtThreshold;
    return f < fbar ? FeeSide::BelowThreshold : FeeSide::AboveThreshold;
}

}  // namespace

RangeEquilibrium solve_equilibrium(const RangeModelParams& p) {
    p.validate();
    RangeEquilibrium eq;
    const double fbar = yield_threshold(p);
    eq.ell_side = side_of(p.ell, fbar);
    eq.h_side = side_of(p.h, fbar);
    eq.violations = p.assumption_violations();
    if (!eq.violations.empty()) {
        eq.regime = RangeRegime::Infeasible;
        return eq;
    }
    const auto th = participation_thresholds(p);
    eq.q_lo_h = th.q_lo_high;
    eq.q_lo_l = th.q_lo_low;
    const double lam = p.lambda_endow;
    const double slope = profit_difference_slope(p);
    if (!(slope > 0.0)) {
        eq.regime = RangeRegime::AllHigh;
        eq.w_low = 0.0;
        eq.pool_supply_low = 0.0;
        eq.pool_supply_high = endowment_supply_above(eq.q_lo_h, lam);
        return eq;
    }
    // Gamma eta (1+r)(sqrt(1+h) - sqrt(1+l)) / Delta under the Delta assumption
    double qt = p.eta * (rebalance_cost(p.ell, p) - rebalance_cost(p.h, p)) / slope;
    qt = std::max(qt, eq.q_lo_h);
    eq.regime = RangeRegime::Fragmented;
    eq.q_t = qt;
    eq.pool_supply_low = endowment_supply_above(qt, lam);
    eq.pool_supply_high = endowment_supply_above(eq.q_lo_h, lam) - eq.pool_supply_low;
    eq.w_low = market_share_low(eq, p);
    return eq;
}

double marginal_lp_by_bisection(const RangeModelParams& p) {
    p.validate();
    if (!(profit_difference_slope(p) > 0.0)) {
        throw std::logic_error("pi_L - pi_H never turns positive: every LP prefers the high pool");
    }
    const auto th = participation_thresholds(p);
    double lo = std::isfinite(th.q_lo_high) ? th.q_lo_high : 0.0;
    double hi = lo + p.lambda_endow;
    auto diff = [&p](double q) { return profit_difference(q, p); };
    if (diff(lo) >= 0.0) return lo;
    numeric::expand_bracket_up(diff, lo, hi, 1e300);
    return numeric::bisect(diff, lo, hi, 1e-12, 1e-16).root;
}

double market_share_low(const RangeEquilibrium& eq, const RangeModelParams& p) {
    if (eq.regime != RangeRegime::Fragmented || !eq.q_t) return 0.0;
    const double lam = p.lambda_endow;
    return std::exp(-(*eq.q_t - eq.q_lo_h) / lam) * (*eq.q_t + lam) / (eq.q_lo_h + lam);
}

std::string to_string(RangeRegime r) {
    switch (r) {
        case RangeRegime::AllHigh: return "AllHigh";
        case RangeRegime::Fragmented: return "Fragmented";
        case RangeRegime::Infeasible: return "Infeasible";
    }
    return "?";
}

std::string to_string(FeeSide s) {
    switch (s) {
        case FeeSide::BelowThreshold: return "below";
        case FeeSide::AtThreshold: return "at";
        case FeeSide::AboveThreshold: return "above";
    }
    return "?";
}

// ==== gains from trade ====

double gains_from_trade(std::span<const PoolSupply> pools, const RangeModelParams& p) {
    double total = 0.0;
    for (const auto& k : pools) {
        total += k.tokens * per_unit_gains(k.fee, p);
    }
    return p.v * total;
}

GftComparison gft_compare(double f, double ell, const RangeModelParams& p) {
    require(ell >= 0.0 && ell <= f, "ell: menu low fee must lie in [0, f]");
    RangeModelParams single = p;
    single.h = f;
    const double m = margin(f, single);
    const double qlo = m > 0.0 ? p.eta * rebalance_cost(f, single) / m : kInf;
    const double t_single = endowment_supply_above(qlo, p.lambda_endow);
    GftComparison out;
    const PoolSupply one{f, t_single};
    out.single = gains_from_trade(std::span(&one, 1), single);
    if (ell == f) {
        out.menu = out.single;
        out.difference = 0.0;
        return out;
    }
    RangeModelParams menu = single;
    menu.ell = ell;
    const RangeEquilibrium eq = solve_equilibrium(menu);
    if (eq.regime == RangeRegime::Infeasible) {
        std::string why = "gft_compare: menu is infeasible";
        for (const auto& v : eq.violations) why += "; " + v;
        throw std::runtime_error(why);
    }
    const PoolSupply pools[2] = {{ell, eq.pool_supply_low}, {f, eq.pool_supply_high}};
    out.menu = gains_from_trade(pools, menu);
    out.low_supply = eq.pool_supply_low;
    // factored form: the high-pool participation cutoff is the same in both markets
    out.difference = p.v * eq.pool_supply_low * (per_unit_gains(ell, menu) - per_unit_gains(f, menu));
    return out;
}

}  // namespace ammlab::range
