#include "ammlab/market_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "ammlab/numeric.hpp"
#include "ammlab/random.hpp"

namespace ammlab::sim {

using numeric::CompensatedSum;
using numeric::RatioStats;
using numeric::RunningStats;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Everything one replication produces. Merged in replication order.
struct Accum {
    RunningStats d_low, d_high;
    RatioStats share_low;            // blocks: (V_L, V_L + V_H)
    RatioStats size_low, size_high;  // blocks: (volume, trades)
    RatioStats liq_low;              // LPs: (q 1{low}, q 1{participates})
    RunningStats vol_diff, reb_diff;
    RunningStats yield_low, yield_high, as_low, as_high, dep_low, dep_high;
    RunningStats gft;
    CompensatedSum vol_low, vol_high, trades_low, trades_high;
    CompensatedSum fees_low, fees_high, gas_low, gas_high, loss_low, loss_high;
    CompensatedSum sold, bought, unfilled, elapsed;
    long long reb_low = 0;
    long long reb_high = 0;
    long long blocks = 0;
    std::vector<CycleRecord> cycles;

    void merge(const Accum& o) {
        d_low.merge(o.d_low);
        d_high.merge(o.d_high);
        share_low.merge(o.share_low);
        size_low.merge(o.size_low);
        size_high.merge(o.size_high);
        liq_low.merge(o.liq_low);
        vol_diff.merge(o.vol_diff);
        reb_diff.merge(o.reb_diff);
        yield_low.merge(o.yield_low);
        yield_high.merge(o.yield_high);
        as_low.merge(o.as_low);
        as_high.merge(o.as_high);
        dep_low.merge(o.dep_low);
        dep_high.merge(o.dep_high);
        gft.merge(o.gft);
        for (auto [a, b] : {std::pair{&vol_low, &o.vol_low}, {&vol_high, &o.vol_high},
                            {&trades_low, &o.trades_low}, {&trades_high, &o.trades_high},
                            {&fees_low, &o.fees_low}, {&fees_high, &o.fees_high},
                            {&gas_low, &o.gas_low}, {&gas_high, &o.gas_high},
                            {&loss_low, &o.loss_low}, {&loss_high, &o.loss_high},
                            {&sold, &o.sold}, {&bought, &o.bought},
                            {&unfilled, &o.unfilled}, {&elapsed, &o.elapsed}}) {
            a->merge(*b);
        }
        reb_low += o.reb_low;
        reb_high += o.reb_high;
        blocks += o.blocks;
        cycles.insert(cycles.end(), o.cycles.begin(), o.cycles.end());
    }
};

Estimate from_stats(const RunningStats& s) {
    return {s.mean(), s.std_error(), s.count()};
}

Estimate from_ratio(const RatioStats& s) {
    return {s.ratio(), s.std_error(), s.count()};
}

// ==== cycle mode ====

struct CycleSetup {
    cycle::CycleEquilibrium eq;
    double Ll = 0.0;
    double Lh = 0.0;
};

void sample_cycle_lps(Rng& rng, long long n, const cycle::CycleModelParams& p,
                      const cycle::CycleEquilibrium& eq, RatioStats& out) {
    const double inv = (p.Q - 1.0) / p.Q;
    for (long long i = 0; i < n; ++i) {
        // inverse CDF of (Q/(Q-1)) q^-2 on [1, Q]
        const double q = 1.0 / (1.0 - rng.uniform01() * inv);
        const bool part = q >= eq.q_lo;
        const bool low = part && q > eq.q_t;
        out.add(low ? q : 0.0, part ? q : 0.0);
    }
}

Accum run_cycle(const SimConfig& c, const CycleSetup& s, int index) {
    const auto& p = c.cycle;
    Accum a;
    Rng rng(stream_seed(c.seed, static_cast<std::uint64_t>(index)));
    const double Ll = s.Ll;
    const double Lh = s.Lh;
    const double theta = p.theta_rate;
    const double unit = c.trade_unit;
    const bool discrete = c.small_flow == SmallFlow::Discrete;
    auto quantize = [&](double t) {
        return c.dt > 0.0 ? std::ceil(t / c.dt - 1e-12) * c.dt : t;
    };
    auto record = [&](char pool, long long id, double dur, double vol, double trades) {
        if (c.record_cycles) a.cycles.push_back({index, id, pool, dur, vol, trades});
    };

    double t = 0.0;
    double low_start = 0.0;
    double remaining = Ll;
    double next_small = discrete ? rng.exponential(theta / unit) : 0.0;
    long long primary = 0;
    long long low_id = 0;
    long long high_id = 0;
    CompensatedSum cur_small;  // small-flow volume in the current low cycle (discrete)
    double cur_trades = 0.0;

    while (primary < c.horizon) {
        const double T = quantize(t + rng.exponential(p.lambda_rate));
        double vl = 0.0;
        double nl = 0.0;
        long long cycles_low = 0;

        if (Ll > 0.0) {
            if (!discrete) {
                while (true) {
                    const double drain = quantize(low_start + Ll / theta);
                    if (!(drain < T)) break;
                    a.d_low.add(drain - low_start);
                    record('L', low_id++, drain - low_start, Ll, Ll / unit);
                    a.sold += Ll;
                    a.bought += Ll;
                    vl += Ll;
                    nl += Ll / unit;
                    ++cycles_low;
                    low_start = drain;
                }
                remaining = Ll - std::min(Ll, theta * (T - low_start));
                cur_small = {};
                cur_small += Ll - remaining;
                cur_trades = (Ll - remaining) / unit;
            } else {
                while (next_small < T) {
                    const double take = std::min(unit, remaining);
                    remaining -= take;
                    cur_small += take;
                    cur_trades += 1.0;
                    if (!(remaining > 1e-12 * Ll)) {
                        const double end = next_small;
                        const double vol = cur_small.value() + remaining;
                        a.d_low.add(end - low_start);
                        record('L', low_id++, end - low_start, vol, cur_trades);
                        a.sold += vol;
                        a.bought += vol;
                        vl += vol;
                        nl += cur_trades;
                        ++cycles_low;
                        low_start = end;
                        remaining = Ll;
                        cur_small = {};
                        cur_trades = 0.0;
                    }
                    next_small += rng.exponential(theta / unit);
                }
            }
        }

        // large trader: sequentially depletes the low pool, then the high pool
        const double fill_low = std::min(remaining, p.Theta_big);
        const double fill_high = std::min(Lh, p.Theta_big - fill_low);
        if (Ll > 0.0) {
            const double vol = cur_small.value() + fill_low;
            const double trades = cur_trades + (fill_low > 0.0 ? 1.0 : 0.0);
            a.d_low.add(T - low_start);
            record('L', low_id++, T - low_start, vol, trades);
            a.sold += vol;
            vl += vol;
            nl += trades;
            ++cycles_low;
        }
        a.bought += cur_small.value() + fill_low + fill_high;
        double vh = 0.0;
        double nh = 0.0;
        if (Lh > 0.0) {
            a.d_high.add(T - t);
            record('H', high_id++, T - t, fill_high, 1.0);
            a.sold += fill_high;
            vh = fill_high;
            nh = 1.0;
        }
        a.unfilled += p.Theta_big - fill_low - fill_high;

        a.vol_low += vl;
        a.vol_high += vh;
        a.trades_low += nl;
        a.trades_high += nh;
        if (vl + vh > 0.0) a.share_low.add(vl, vl + vh);
        if (nl > 0.0) a.size_low.add(vl, nl);
        if (nh > 0.0) a.size_high.add(vh, nh);
        a.vol_diff.add(vl - vh);
        a.reb_diff.add(static_cast<double>(cycles_low) - nh);
        a.reb_low += cycles_low;
        a.reb_high += Lh > 0.0 ? 1 : 0;
        ++a.blocks;

        primary += Ll > 0.0 ? cycles_low : 1;
        t = T;
        low_start = T;
        remaining = Ll;
        cur_small = {};
        cur_trades = 0.0;
    }
    a.elapsed += t;

    Rng lp_rng(stream_seed(stream_seed(c.seed, static_cast<std::uint64_t>(index)), 1));
    sample_cycle_lps(lp_rng, c.lp_sample, p, s.eq, a.liq_low);
    return a;
}

// ==== range mode ====

struct RangeSetup {
    range::RangeEquilibrium eq;
    double T[2] = {0.0, 0.0};     // token supply per pool (low, high)
    double mass[2] = {0.0, 0.0};  // LP measure per pool
    double fee[2] = {0.0, 0.0};
    double q_t = std::numeric_limits<double>::infinity();
};

Accum run_range(const SimConfig& c, const RangeSetup& s, int index) {
    const auto& p = c.range;
    Accum a;
    Rng rng(stream_seed(c.seed, static_cast<std::uint64_t>(index)));
    RunningStats* yield[2] = {&a.yield_low, &a.yield_high};
    RunningStats* as[2] = {&a.as_low, &a.as_high};
    RunningStats* dep[2] = {&a.dep_low, &a.dep_high};
    CompensatedSum* vol[2] = {&a.vol_low, &a.vol_high};
    CompensatedSum* trades[2] = {&a.trades_low, &a.trades_high};
    CompensatedSum* fees[2] = {&a.fees_low, &a.fees_high};
    CompensatedSum* gas[2] = {&a.gas_low, &a.gas_high};
    CompensatedSum* loss[2] = {&a.loss_low, &a.loss_high};
    RatioStats* size[2] = {&a.size_low, &a.size_high};
    long long* reb[2] = {&a.reb_low, &a.reb_high};

    for (long long i = 0; i < c.horizon; ++i) {
        const bool news = rng.bernoulli(p.eta);
        const double delta = range::shock_sample(rng, p.Delta);
        double v[2] = {0.0, 0.0};
        double d[2] = {0.0, 0.0};
        double gains = 0.0;
        for (int k = 0; k < 2; ++k) {
            const double Tk = s.T[k];
            if (!(Tk > 0.0)) continue;
            const double f = s.fee[k];
            const double tau = range::tau_star(delta, f, Tk, p.r);
            const double n = range::numeraire_for_purchase(tau, Tk, p.v, p.r);
            if (tau > 0.0) {
                *vol[k] += tau;
                *trades[k] += 1.0;
                a.sold += tau;
                a.bought += tau;
            }
            size[k]->add(tau, tau > 0.0 ? 1.0 : 0.0);
            v[k] = tau;
            if (news) {
                // arbitrage at the new common value; the LP keeps the fee
                const double lost = tau > 0.0 ? p.v * (1.0 + delta) * tau - (1.0 + f) * n : 0.0;
                *fees[k] += f * n;
                *loss[k] += lost;
                as[k]->add(lost / Tk);
                const bool depleted = delta > range::depletion_threshold(f, p.r);
                dep[k]->add(depleted ? 1.0 : 0.0);
                if (depleted) {
                    ++*reb[k];
                    *gas[k] += p.Gamma * s.mass[k];
                    d[k] = 1.0;
                }
            } else {
                // private value: the trade reverses, so the fee is earned twice
                *fees[k] += 2.0 * f * n;
                yield[k]->add(2.0 * f * n / Tk);
                gains += p.v * delta * tau;
            }
        }
        if (!news) a.gft.add(gains);
        if (v[0] + v[1] > 0.0) a.share_low.add(v[0], v[0] + v[1]);
        a.vol_diff.add(v[0] - v[1]);
        if (news) a.reb_diff.add(d[0] - d[1]);
        ++a.blocks;
    }
    a.elapsed += static_cast<double>(c.horizon);

    Rng lp_rng(stream_seed(stream_seed(c.seed, static_cast<std::uint64_t>(index)), 1));
    for (long long i = 0; i < c.lp_sample; ++i) {
        const double q = -p.lambda_endow * std::log1p(-lp_rng.uniform01());
        const bool part = q >= s.eq.q_lo_h;
        const bool low = part && q >= s.q_t;
        a.liq_low.add(low ? q : 0.0, part ? q : 0.0);
    }
    return a;
}

template <class Fn>
std::vector<Accum> run_replications(const SimConfig& c, Fn&& one) {
    const int n = c.replications;
    std::vector<Accum> out(static_cast<std::size_t>(n));
    const int threads = std::max(1, std::min(c.threads, n));
    if (threads == 1) {
        for (int k = 0; k < n; ++k) out[k] = one(k);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int k = w; k < n; k += threads) out[k] = one(k);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

void fill_share(PoolStats& low, PoolStats& high, const RatioStats& share, const RatioStats& liq) {
    low.volume_share = from_ratio(share);
    high.volume_share = {1.0 - low.volume_share.mean, low.volume_share.se, low.volume_share.n};
    low.liquidity_share = from_ratio(liq);
    high.liquidity_share = {1.0 - low.liquidity_share.mean, low.liquidity_share.se,
                            low.liquidity_share.n};
}

ReplicationSummary summarize(const Accum& a, int index, std::uint64_t seed) {
    ReplicationSummary r;
    r.index = index;
    r.stream_seed = stream_seed(seed, static_cast<std::uint64_t>(index));
    r.elapsed = a.elapsed.value();
    r.cycle_duration_low = a.d_low.mean();
    r.volume_share_low = a.share_low.ratio();
    r.liquidity_share_low = a.liq_low.ratio();
    r.trade_size_low = a.size_low.ratio();
    r.trade_size_high = a.size_high.ratio();
    return r;
}

void fill_common(SimReport& rep, const Accum& a) {
    rep.low.volume = a.vol_low.value();
    rep.high.volume = a.vol_high.value();
    rep.low.trades = a.trades_low.value();
    rep.high.trades = a.trades_high.value();
    rep.low.trade_size = from_ratio(a.size_low);
    rep.high.trade_size = from_ratio(a.size_high);
    rep.low.rebalances = a.reb_low;
    rep.high.rebalances = a.reb_high;
    rep.low.fee_revenue = a.fees_low.value();
    rep.high.fee_revenue = a.fees_high.value();
    rep.low.gas_paid = a.gas_low.value();
    rep.high.gas_paid = a.gas_high.value();
    rep.elapsed = a.elapsed.value();
    rep.blocks = a.blocks;
    rep.tokens_sold_by_lps = a.sold.value();
    rep.tokens_bought_by_traders = a.bought.value();
    rep.volume_diff = from_stats(a.vol_diff);
    rep.rebalance_diff = from_stats(a.reb_diff);
    fill_share(rep.low, rep.high, a.share_low, a.liq_low);
    rep.cycles = a.cycles;
}

}  // namespace

void SimConfig::validate() const {
    require(horizon > 0, "horizon: must be positive");
    require(replications >= 1, "replications: must be at least 1");
    require(threads >= 1, "threads: must be at least 1");
    require(std::isfinite(dt) && dt >= 0.0, "dt: must be nonnegative (0 = event-driven)");
    require(std::isfinite(trade_unit) && trade_unit > 0.0, "trade_unit: must be positive");
    require(lp_sample >= 0, "lp_sample: must be nonnegative");
    if (model == SimModel::Cycle) {
        cycle.validate();
    } else {
        range.validate();
    }
}

SimReport simulate(const SimConfig& c) {
    c.validate();
    SimReport rep;
    rep.model = c.model;
    rep.seed = c.seed;
    rep.horizon = c.horizon;
    rep.replications = c.replications;

    std::vector<Accum> parts;
    if (c.model == SimModel::Cycle) {
        CycleSetup s;
        s.eq = cycle::solve_cycle_equilibrium(c.cycle);
        s.Ll = s.eq.L_low;
        s.Lh = s.eq.L_high;
        if (!(c.cycle.Theta_big >= s.Ll + s.Lh)) {
            throw std::invalid_argument(
                "Theta_big: large-trader demand must cover both pools for cycles to restart");
        }
        rep.regime = cycle::to_string(s.eq.regime);
        rep.analytic_w_low = s.eq.w_low;
        rep.analytic_d_low = s.eq.d_low;
        rep.analytic_d_high = s.eq.d_high;
        rep.low.active = s.Ll > 0.0;
        rep.high.active = s.Lh > 0.0;
        parts = run_replications(c, [&](int k) { return run_cycle(c, s, k); });
    } else {
        RangeSetup s;
        s.eq = range::solve_equilibrium(c.range);
        if (s.eq.regime == range::RangeRegime::Infeasible) {
            std::string why = "range model assumptions violated";
            for (const auto& v : s.eq.violations) why += "; " + v;
            throw std::domain_error(why);
        }
        const double lam = c.range.lambda_endow;
        s.T[0] = s.eq.pool_supply_low;
        s.T[1] = s.eq.pool_supply_high;
        s.fee[0] = c.range.ell;
        s.fee[1] = c.range.h;
        if (s.eq.q_t) s.q_t = *s.eq.q_t;
        const double m_all = range::endowment_mass_above(s.eq.q_lo_h, lam);
        s.mass[0] = s.eq.q_t ? range::endowment_mass_above(*s.eq.q_t, lam) : 0.0;
        s.mass[1] = m_all - s.mass[0];
        rep.regime = range::to_string(s.eq.regime);
        rep.analytic_w_low = s.eq.w_low;
        rep.low.active = s.T[0] > 0.0;
        rep.high.active = s.T[1] > 0.0;
        const range::PoolSupply pools[2] = {{s.fee[0], s.T[0]}, {s.fee[1], s.T[1]}};
        rep.analytic_gft = range::gains_from_trade(pools, c.range);
        parts = run_replications(c, [&](int k) { return run_range(c, s, k); });
    }

    Accum all;
    for (int k = 0; k < c.replications; ++k) {
        rep.per_replication.push_back(summarize(parts[k], k, c.seed));
        all.merge(parts[k]);
    }
    fill_common(rep, all);
    if (c.model == SimModel::Cycle) {
        rep.low.cycle_duration = from_stats(all.d_low);
        rep.high.cycle_duration = from_stats(all.d_high);
        rep.unfilled_demand = all.unfilled.value();
        const double T = rep.elapsed;
        rep.low.rebalance_rate = T > 0.0 ? static_cast<double>(all.reb_low) / T : 0.0;
        rep.high.rebalance_rate = T > 0.0 ? static_cast<double>(all.reb_high) / T : 0.0;
    } else {
        rep.low.cycle_duration = {kNaN, kNaN, 0};
        rep.high.cycle_duration = {kNaN, kNaN, 0};
        rep.low.adverse_selection = all.loss_low.value();
        rep.high.adverse_selection = all.loss_high.value();
        rep.low.yield_per_unit = from_stats(all.yield_low);
        rep.high.yield_per_unit = from_stats(all.yield_high);
        rep.low.adverse_per_unit = from_stats(all.as_low);
        rep.high.adverse_per_unit = from_stats(all.as_high);
        rep.low.depletion_prob = from_stats(all.dep_low);
        rep.high.depletion_prob = from_stats(all.dep_high);
        const double n = static_cast<double>(all.blocks);
        rep.low.rebalance_rate = static_cast<double>(all.reb_low) / n;
        rep.high.rebalance_rate = static_cast<double>(all.reb_high) / n;
        rep.gft_per_event = from_stats(all.gft);
    }
    return rep;
}

std::string to_string(SimModel m) {
    return m == SimModel::Cycle ? "cycle" : "range";
}

namespace {

nlohmann::json num(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

nlohmann::json est(const Estimate& e) {
    return {{"mean", num(e.mean)}, {"se", num(e.se)}, {"n", e.n}};
}

nlohmann::json pool_json(const PoolStats& s, SimModel m) {
    nlohmann::json j = {
        {"active", s.active},
        {"volume", num(s.volume)},
        {"volume_share", est(s.volume_share)},
        {"liquidity_share", est(s.liquidity_share)},
        {"trade_size", est(s.trade_size)},
        {"trades", num(s.trades)},
        {"rebalances", s.rebalances},
        {"rebalance_rate", num(s.rebalance_rate)},
        {"fee_revenue", num(s.fee_revenue)},
        {"gas_paid", num(s.gas_paid)},
    };
    if (m == SimModel::Cycle) {
        j["cycle_duration"] = est(s.cycle_duration);
    } else {
        j["adverse_selection"] = num(s.adverse_selection);
        j["yield_per_unit"] = est(s.yield_per_unit);
        j["adverse_per_unit"] = est(s.adverse_per_unit);
        j["depletion_prob"] = est(s.depletion_prob);
    }
    return j;
}

}  // namespace

std::string report_to_json(const SimReport& r, int indent) {
    nlohmann::json j;
    j["model"] = to_string(r.model);
    j["seed"] = r.seed;
    j["horizon"] = r.horizon;
    j["replications"] = r.replications;
    j["regime"] = r.regime;
    j["analytic"] = {{"w_low", num(r.analytic_w_low)}};
    if (r.model == SimModel::Cycle) {
        j["analytic"]["d_low"] = num(r.analytic_d_low);
        j["analytic"]["d_high"] = num(r.analytic_d_high);
        j["unfilled_demand"] = num(r.unfilled_demand);
    } else {
        j["analytic"]["gft_per_private_event"] = num(r.analytic_gft);
        j["gft_per_private_event"] = est(r.gft_per_event);
    }
    j["pools"] = {{"low", pool_json(r.low, r.model)}, {"high", pool_json(r.high, r.model)}};
    j["elapsed"] = num(r.elapsed);
    j["blocks"] = r.blocks;
    j["tokens_sold_by_lps"] = num(r.tokens_sold_by_lps);
    j["tokens_bought_by_traders"] = num(r.tokens_bought_by_traders);
    j["volume_diff"] = est(r.volume_diff);
    j["rebalance_diff"] = est(r.rebalance_diff);
    auto reps = nlohmann::json::array();
    for (const auto& s : r.per_replication) {
        reps.push_back({{"index", s.index},
                        {"stream_seed", s.stream_seed},
                        {"elapsed", num(s.elapsed)},
                        {"cycle_duration_low", num(s.cycle_duration_low)},
                        {"volume_share_low", num(s.volume_share_low)},
                        {"liquidity_share_low", num(s.liquidity_share_low)},
                        {"trade_size_low", num(s.trade_size_low)},
                        {"trade_size_high", num(s.trade_size_high)}});
    }
    j["per_replication"] = reps;
    auto checks = nlohmann::json::array();
    for (const auto& c : prediction_checks(r)) {
        checks.push_back({{"name", c.name},
                          {"status", to_string(c.status)},
                          {"lhs", num(c.lhs)},
                          {"rhs", num(c.rhs)},
                          {"se", num(c.se)},
                          {"z", num(c.z)},
                          {"detail", c.detail}});
    }
    j["prediction_checks"] = checks;
    return j.dump(indent);
}

std::string cycles_to_csv(const SimReport& r) {
    std::ostringstream os;
    os << "replication,cycle_id,pool,duration,volume,trades\n";
    for (const auto& c : r.cycles) {
        os << c.replication << ',' << c.cycle_id << ',' << c.pool << ','
           << numeric::format_sig(c.duration) << ',' << numeric::format_sig(c.volume) << ','
           << numeric::format_sig(c.trades) << '\n';
    }
    return os.str();
}

// ==== prediction checks ====

namespace {

PredictionCheck gate(std::string name, double lhs, double rhs, double se, long long n) {
    PredictionCheck c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.se = se;
    if (n < kMinSamples || !std::isfinite(lhs) || !std::isfinite(rhs)) {
        c.status = CheckStatus::InsufficientSamples;
        c.detail = "fewer than " + std::to_string(kMinSamples) + " samples";
        return c;
    }
    const double gap = lhs - rhs;
    if (!(se > 0.0) || !std::isfinite(se)) {
        // no sampling noise: the comparison is exact
        c.z = gap > 0.0 ? std::numeric_limits<double>::infinity()
                        : (gap < 0.0 ? -std::numeric_limits<double>::infinity() : 0.0);
    } else {
        c.z = gap / se;
    }
    c.status = c.z > kSignificanceGate ? CheckStatus::Pass : CheckStatus::Fail;
    return c;
}

PredictionCheck not_applicable(std::string name, std::string why) {
    PredictionCheck c;
    c.name = std::move(name);
    c.status = CheckStatus::NotApplicable;
    c.lhs = c.rhs = c.se = c.z = kNaN;
    c.detail = std::move(why);
    return c;
}

}  // namespace

std::vector<PredictionCheck> prediction_checks(const SimReport& r) {
    std::vector<PredictionCheck> out;
    const bool both = r.low.active && r.high.active;
    std::string why;
    if (!r.low.active) why = "low-fee pool is empty in equilibrium";
    if (!r.high.active) why = "high-fee pool is empty in equilibrium";
    auto push = [&](const char* name, auto&& make) {
        out.push_back(both ? make() : not_applicable(name, why));
    };

    push("mean trade size H > L", [&] {
        const auto& a = r.high.trade_size;
        const auto& b = r.low.trade_size;
        return gate("mean trade size H > L", a.mean, b.mean, std::hypot(a.se, b.se),
                    std::min(a.n, b.n));
    });
    push("volume share L > liquidity share L", [&] {
        const auto& a = r.low.volume_share;
        const auto& b = r.low.liquidity_share;
        return gate("volume share L > liquidity share L", a.mean, b.mean, std::hypot(a.se, b.se),
                    std::min(a.n, b.n));
    });
    push("volume L > volume H", [&] {
        const auto& d = r.volume_diff;
        auto c = gate("volume L > volume H", d.mean, 0.0, d.se, d.n);
        c.detail = "per-block mean difference";
        return c;
    });
    push("rebalancing frequency L > H", [&] {
        const auto& d = r.rebalance_diff;
        auto c = gate("rebalancing frequency L > H", d.mean, 0.0, d.se, d.n);
        c.detail = r.model == SimModel::Cycle ? "refills per large-trade epoch"
                                              : "depleting news events per news event";
        return c;
    });
    return out;
}

namespace {

void require_same(double a, double b) {
    if (!(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)))) {
        throw std::invalid_argument("prediction_checks: report and equilibrium come from different params");
    }
}

}  // namespace

std::vector<PredictionCheck> prediction_checks(const SimReport& r, const cycle::CycleEquilibrium& eq) {
    require(r.model == SimModel::Cycle, "prediction_checks: report is not a cycle simulation");
    require_same(r.analytic_w_low, eq.w_low);
    return prediction_checks(r);
}

std::vector<PredictionCheck> prediction_checks(const SimReport& r, const range::RangeEquilibrium& eq) {
    require(r.model == SimModel::Range, "prediction_checks: report is not a range simulation");
    require_same(r.analytic_w_low, eq.w_low);
    return prediction_checks(r);
}

std::string to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::NotApplicable: return "not applicable";
        case CheckStatus::InsufficientSamples: return "insufficient samples";
    }
    return "?";
}

}  // namespace ammlab::sim
