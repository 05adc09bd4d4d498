// One PASS/FAIL line per acceptance criterion. Tolerances and runtime budgets
// are fixed here; exit status is nonzero if any line fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ammlab/analytics.hpp"
#include "ammlab/cycle_model.hpp"
#include "ammlab/market_sim.hpp"
#include "ammlab/pool.hpp"
#include "ammlab/random.hpp"
#include "ammlab/range_model.hpp"
#include "ammlab/router.hpp"
#include "ammlab/walkthrough.hpp"
#include "event_corpus.hpp"
#include "integrals.hpp"
#include "param_draws.hpp"
#include "routing_setup.hpp"

using namespace ammlab;

namespace {

// ==== pinned tolerances ====

constexpr double kLiquidityRel = 1e-3;
constexpr double kUsdtRel = 1e-3;
constexpr double kStageRel = 5e-3;
constexpr double kEndLo = 1509.65;
constexpr double kEndHi = 1518.73;
constexpr double kFeeSplitRel = 1e-3;

constexpr double kBisectionTol = 1e-9;
constexpr double kQuadratureTol = 1e-8;
constexpr double kGftSlack = 1e-12;

constexpr double kF2Tol = 1e-10;
constexpr double kShortfallTol = 1e-12;
constexpr double kStationaryTol = 1e-6;

constexpr double kSeGate = 4.0;

constexpr double kContinuityTol = 1e-9;
constexpr double kVolatilityTol = 1e-12;

constexpr double kGridStep = 1e-3;
constexpr double kSmallTradeShare = 0.9;

struct Outcome {
    bool ok = true;
    std::string detail;
};

class Notes {
public:
    void check(bool cond, const std::string& what) {
        if (!cond) {
            ok_ = false;
            if (!fail_.empty()) fail_ += "; ";
            fail_ += what;
        }
    }
    void note(const std::string& s) {
        if (!info_.empty()) info_ += "; ";
        info_ += s;
    }
    Outcome done() const { return {ok_, ok_ ? info_ : fail_}; }

private:
    bool ok_ = true;
    std::string fail_;
    std::string info_;
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// ==== 1. walkthrough ====

Outcome walkthrough() {
    Notes n;
    const auto w = pool::run_walkthrough();
    n.check(rel(w.l_a, 43188.6) <= kLiquidityRel, "L_A " + fmt("%.4f", w.l_a));
    n.check(rel(w.l_b, 86589.4) <= kLiquidityRel, "L_B " + fmt("%.4f", w.l_b));
    n.check(rel(w.deposit_a.numeraire, 5013.38) <= kUsdtRel, "USDT leg " + fmt("%.4f", w.deposit_a.numeraire));
    n.check(rel(w.stage1_numeraire, 5026.19) <= kStageRel, "dy1 " + fmt("%.4f", w.stage1_numeraire));
    n.check(rel(w.stage2_numeraire, 10089.12) <= kStageRel, "dy2 " + fmt("%.4f", w.stage2_numeraire));
    n.check(w.end_price > kEndLo && w.end_price < kEndHi, "end price " + fmt("%.4f", w.end_price));
    const double split = w.stage2_fee_a / w.stage2_fee_b;
    n.check(rel(split, w.l_a / w.l_b) <= kFeeSplitRel, "fee split " + fmt("%.6f", split));
    n.note("L_A=" + fmt("%.2f", w.l_a) + " L_B=" + fmt("%.2f", w.l_b) + " end=" + fmt("%.4f", w.end_price));
    return n.done();
}

// ==== 2. range model ====

Outcome range_model() {
    using namespace range;
    Notes n;
    Rng rng(2024);
    double worst_q = 0.0;
    double worst_int = 0.0;
    for (int i = 0; i < 50; ++i) {
        const auto p = draws::range_point(rng);
        const auto eq = solve_equilibrium(p);
        const double b = marginal_lp_by_bisection(p);
        worst_q = std::max(worst_q, std::abs(*eq.q_t - b) / std::max(1.0, b));
        for (double f : {p.ell, p.h}) {
            worst_int = std::max(worst_int, std::abs(liquidity_yield(f, p) - oracle::yield_integral(f, p)));
            worst_int = std::max(worst_int, std::abs(adverse_selection(f, p) - oracle::adverse_integral(f, p)));
        }
    }
    n.check(worst_q <= kBisectionTol, "q_t vs bisection " + fmt("%.3g", worst_q));
    n.check(worst_int <= kQuadratureTol, "L/A vs quadrature " + fmt("%.3g", worst_int));

    auto p = RangeModelParams::defaults();
    double prev_w = 2.0;
    bool decreasing = true;
    double worst_gft = INFINITY;
    for (int k = 0; k < 100; ++k) {
        p.Gamma = 0.05 + 0.05 * k;
        const auto eq = solve_equilibrium(p);
        decreasing = decreasing && eq.regime == RangeRegime::Fragmented && eq.w_low < prev_w;
        prev_w = eq.w_low;
        worst_gft = std::min(worst_gft, gft_compare(p.h, 0.5 * p.h, p).difference);
    }
    n.check(decreasing, "w not strictly decreasing in Gamma");
    n.check(worst_gft >= -kGftSlack, "GFT menu - single " + fmt("%.3g", worst_gft));
    n.note("q_t err " + fmt("%.1e", worst_q) + ", quadrature err " + fmt("%.1e", worst_int) +
           ", min GFT gap " + fmt("%.3g", worst_gft));
    return n.done();
}

// ==== 3. cycle model ====

Outcome cycle_model() {
    using namespace cycle;
    Notes n;
    Rng rng(1);
    int negative = 0;
    int points = 0;
    for (int t = 0; t < 20; ++t) {
        const auto p = draws::cycle_point(rng);
        double lo = std::max(1.0, p.Gamma / p.h);
        if (auto r = f1_root(p)) lo = std::max(lo, *r);
        for (int k = 0; k < 50; ++k) {
            const double q = lo + (p.Q - lo) * rng.uniform(0.01, 0.99);
            const double h = 1e-6 * q;
            negative += (f2(q + h, p) - f2(q - h, p)) / (2.0 * h) < 0.0;
            ++points;
        }
    }
    n.check(points == 1000 && negative == points, "f2' < 0 at " + std::to_string(negative) + "/" +
                                                      std::to_string(points));

    const auto p = CycleModelParams::defaults();
    const auto eq = solve_cycle_equilibrium(p);
    n.check(std::abs(f2(eq.q_t, p)) < kF2Tol, "|f2(q_t)| " + fmt("%.3g", std::abs(f2(eq.q_t, p))));
    auto gap = [&](double q) { return profit_rate_low(q, eq.q_t, p) - profit_rate_high(q, p); };
    n.check(gap(eq.q_t * 0.99) < 0.0 && gap(eq.q_t * 1.01) > 0.0, "pi_l - pi_h does not flip at q_t");

    const double base = eq.q_t;
    auto bumped = [&](double CycleModelParams::*field) {
        auto q = p;
        q.*field *= 1.0 + 1e-5;
        return solve_cycle_equilibrium(q).q_t;
    };
    const bool signs = bumped(&CycleModelParams::Gamma) > base && bumped(&CycleModelParams::h) > base &&
                       bumped(&CycleModelParams::lambda_rate) > base &&
                       bumped(&CycleModelParams::ell) < base && bumped(&CycleModelParams::theta_rate) < base;
    n.check(signs, "comparative statics signs");

    const double diff = menu_is(p.h, p.ell, p) - single_pool_is(p.h, p);
    n.check(std::abs(diff - (p.ell - p.h) * eq.L_low) <= kShortfallTol && diff <= 0.0,
            "IS(menu) - IS(single) " + fmt("%.6g", diff));

    const auto o = optimal_single_fee(p);
    n.check(std::abs(o.dis_df) < kStationaryTol, "dIS/df at f* " + fmt("%.3g", o.dis_df));
    std::string lambert;
    for (const auto& c : o.lambert) {
        lambert += " " + c.branch + (c.defined ? (c.matches ? " match" : " mismatch") : " undefined");
    }
    n.check(!o.matching_branch.empty(), "no Lambert reading matches");
    n.note("q_t=" + fmt("%.10f", eq.q_t) + " f*=" + fmt("%.10f", o.f_star) + ", Lambert:" + lambert);
    return n.done();
}

// ==== 4. simulator ====

Outcome simulator() {
    using namespace sim;
    Notes n;
    SimConfig c;
    c.model = SimModel::Cycle;
    c.horizon = 100000;
    const auto r = simulate(c);
    const auto& d = r.low.cycle_duration;
    const double z = (d.mean - r.analytic_d_low) / d.se;
    n.check(std::abs(z) <= kSeGate, "d_low z=" + fmt("%.2f", z));
    const auto& vs = r.low.volume_share;
    const auto& ls = r.low.liquidity_share;
    const double z_share = (vs.mean - ls.mean) / std::hypot(vs.se, ls.se);
    n.check(z_share > kSeGate, "volume share vs liquidity share z=" + fmt("%.2f", z_share));
    const auto& th = r.high.trade_size;
    const auto& tl = r.low.trade_size;
    const double z_size = (th.mean - tl.mean) / std::hypot(th.se, tl.se);
    n.check(z_size > kSeGate, "trade size H vs L z=" + fmt("%.2f", z_size));
    n.check(report_to_json(simulate(c)) == report_to_json(r), "same seed gave a different report");
    n.note("d_low " + fmt("%.5f", d.mean) + " vs " + fmt("%.5f", r.analytic_d_low) + " (z=" + fmt("%.2f", z) +
           "), share " + fmt("%.4f", vs.mean) + " > " + fmt("%.4f", ls.mean) + ", size " + fmt("%.4f", th.mean) +
           " > " + fmt("%.4f", tl.mean));
    return n.done();
}

// ==== 5. analytics ====

Outcome analytics_checks() {
    using namespace analytics;
    Notes n;
    const auto c = corpus::jit_corpus(7, 10000, 100, 100);
    const auto ev = sorted_events(c.events);
    std::set<std::pair<long long, int>> found;
    for (const auto& t : jit_detect(ev)) found.insert({ev[t.mint].block, ev[t.mint].position});
    std::size_t tp = 0;
    for (const auto& k : found) tp += c.planted.count(k);
    n.check(found == c.planted, "JIT found " + std::to_string(found.size()) + ", true positives " + std::to_string(tp));

    double jump = 0.0;
    for (double edge : {95.0, 120.0}) {
        const double at = impermanent_loss(1000.0, 95.0, 120.0, 100.0, edge);
        for (double m : {1.0 - 1e-13, 1.0 + 1e-13}) {
            jump = std::max(jump, std::abs(impermanent_loss(1000.0, 95.0, 120.0, 100.0, edge * m) - at));
        }
    }
    n.check(jump <= kContinuityTol, "IL jump " + fmt("%.3g", jump));
    n.check(impermanent_loss(1000.0, 95.0, 120.0, 100.0, 100.0) == 0.0, "IL nonzero at p1 = p0");

    MarketEvent buy, sell;
    buy.amount0 = -1.0;
    buy.amount1 = 100.0;
    sell.amount0 = 2.0;
    sell.amount1 = -190.0;
    n.check(lvr_swap(buy, 101.0) == 1.0 && lvr_swap(sell, 100.0) == 10.0, "LVR hand cases");

    const double vol = range_volatility(2.0, 1.0);
    n.check(std::abs(vol - std::sqrt(std::log(2.0)) / 2.0) <= kVolatilityTol, "volatility " + fmt("%.15g", vol));

    // running balances: mint adds, burn removes, swaps add their signed legs
    std::vector<MarketEvent> book;
    Rng rng(43);
    double b0 = 0.0, b1 = 0.0, price = 100.0;
    for (int i = 0; i < 2000; ++i) {
        MarketEvent e;
        e.block = 100 + i;
        e.tx_hash = "0x" + std::to_string(i);
        e.timestamp = 40.0 * i;
        e.pool_id = "ETH-USDC/30";
        e.fee_bps = 30;
        e.wallet = "lp";
        e.tick_lower = 75000;
        e.tick_upper = 76200;
        const double u = rng.uniform01();
        if (u < 0.2 || b0 < 5.0) {
            e.kind = EventKind::Mint;
            e.amount0 = rng.uniform(1, 5);
            e.amount1 = rng.uniform(100, 500);
            b0 += e.amount0;
            b1 += e.amount1;
        } else if (u < 0.3) {
            e.kind = EventKind::Burn;
            e.amount0 = 0.2 * b0;
            e.amount1 = 0.2 * b1;
            b0 -= e.amount0;
            b1 -= e.amount1;
        } else {
            e.kind = EventKind::Swap;
            const double q = rng.uniform(0.01, 0.5);
            price *= std::exp(rng.uniform(-0.01, 0.01));
            const bool is_buy = rng.bernoulli(0.5);
            e.amount0 = is_buy ? -q : q;
            e.amount1 = (is_buy ? 1 : -1) * q * price;
            b0 += e.amount0;
            b1 += e.amount1;
        }
        e.price_after = price;
        book.push_back(e);
    }
    std::map<long long, double> want;
    double r0 = 0.0, r1 = 0.0;
    for (const auto& e : book) {
        const double s = e.kind == EventKind::Burn ? -1.0 : 1.0;
        r0 += e.kind == EventKind::Swap ? e.amount0 : s * std::abs(e.amount0);
        r1 += e.kind == EventKind::Swap ? e.amount1 : s * std::abs(e.amount1);
        want[day_of(e.timestamp)] = r0 * *e.price_after + r1;
    }
    bool conserved = true;
    for (const auto& row : build_panel(book)) conserved = conserved && row.tvl_end == want.at(row.day);
    n.check(conserved, "panel TVL differs from running balances");
    n.note("JIT " + std::to_string(tp) + "/100 with " + std::to_string(c.decoys) + " decoys over " +
           std::to_string(c.events.size()) + " events");
    return n.done();
}

// ==== 6. router ====

Outcome router_checks() {
    using namespace router;
    Notes n;
    const std::pair<int, int> fees[] = {{5, 30}, {1, 5}, {5, 100}, {30, 100}};
    const double sizes[] = {0.5, 20.0, 150.0, 600.0, 2000.0};
    double worst = 0.0;
    int configs = 0;
    for (const auto& [fl, fh] : fees) {
        const auto pr = routing::figure_pair(fl, fh);
        const double dl = pr.low.token_depth_above();
        const double dh = pr.high.token_depth_above();
        for (double q : sizes) {
            const auto r = route(q, pr.low, pr.high);
            double best_s = 0.0;
            double best_c = INFINITY;
            for (int i = 0; i <= 1000; ++i) {
                const double s = i / 1000.0;
                if (s * q > dl || (1.0 - s) * q > dh) continue;
                const double cost = split_cost(s, q, pr.low, pr.high);
                if (cost < best_c) {
                    best_c = cost;
                    best_s = s;
                }
            }
            worst = std::max(worst, std::abs(r.split_low - best_s));
            n.check(r.cost_total <= best_c * (1.0 + 1e-12), "optimizer above grid at q=" + fmt("%g", q));
            ++configs;
        }
    }
    n.check(configs == 20 && worst <= kGridStep + 1e-12, "split off grid optimum by " + fmt("%.3g", worst));

    const auto pr = routing::figure_pair();
    std::vector<double> grid;
    for (int i = 0; i < 20; ++i) grid.push_back(std::pow(10.0, -1.0 + 4.0 * i / 19.0));
    const auto rows = route_sizes(grid, pr.low, pr.high);
    bool monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        monotone = monotone && (1.0 - rows[i].split_low) >= (1.0 - rows[i - 1].split_low) - 1e-9;
    }
    n.check(monotone, "split_high decreases somewhere on the size grid");
    n.check(rows.front().split_low > kSmallTradeShare, "smallest trade sends " + fmt("%.3f", rows.front().split_low));
    n.note("max split gap " + fmt("%.1e", worst) + ", split_low " + fmt("%.3f", rows.front().split_low) + " at " +
           fmt("%g", grid.front()) + " to " + fmt("%.3f", rows.back().split_low) + " at " + fmt("%g", grid.back()));
    return n.done();
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> all = {
        {1, "walkthrough", 1.0, walkthrough},
        {2, "range model", 10.0, range_model},
        {3, "cycle model", 10.0, cycle_model},
        {4, "simulator", 30.0, simulator},
        {5, "analytics", 5.0, analytics_checks},
        {6, "router", 10.0, router_checks},
    };
    int failed = 0;
    for (const auto& c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget_s) {
            o.ok = false;
            o.detail += (o.detail.empty() ? "" : "; ") + fmt("over budget %.0f s", c.budget_s);
        }
        failed += !o.ok;
        std::printf("%s %d %s (%.3f s / %.0f s): %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, secs, c.budget_s,
                    o.detail.c_str());
    }
    return failed == 0 ? 0 : 1;
}
