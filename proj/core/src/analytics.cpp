#include "ammlab/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "ammlab/numeric.hpp"
#include "ammlab/pool.hpp"

namespace ammlab::analytics {

long long day_of(double timestamp) {
    return static_cast<long long>(std::floor(timestamp / kSecondsPerDay));
}

std::string pair_of(const std::string& pool_id) {
    const auto cut = pool_id.rfind('/');
    return cut == std::string::npos ? pool_id : pool_id.substr(0, cut);
}

std::vector<MarketEvent> sorted_events(std::vector<MarketEvent> events) {
    auto key = [](const MarketEvent& e) {
        return std::tie(e.block, e.position, e.pool_id, e.tx_hash, e.kind, e.wallet, e.amount0,
                        e.amount1, e.timestamp);
    };
    std::stable_sort(events.begin(), events.end(),
                     [&](const MarketEvent& a, const MarketEvent& b) { return key(a) < key(b); });
    return events;
}

std::vector<MarketEvent> drop_empty_burns(std::vector<MarketEvent> events) {
    std::erase_if(events, [](const MarketEvent& e) {
        return e.kind == EventKind::Burn && e.amount0 == 0.0 && e.amount1 == 0.0;
    });
    return events;
}

double swap_price(const MarketEvent& e) {
    if (e.amount0 == 0.0) throw std::invalid_argument("swap has zero token leg");
    return -e.amount1 / e.amount0;
}

std::optional<double> observed_price(const MarketEvent& e) {
    if (e.price_after) return e.price_after;
    if (e.kind == EventKind::Swap && e.amount0 != 0.0) return swap_price(e);
    return std::nullopt;
}

// ==== LVR ====

double lvr_swap(const MarketEvent& e, double benchmark) {
    if (e.kind != EventKind::Swap) throw std::invalid_argument("lvr_swap: event is not a swap");
    const double dx = e.amount0;
    if (dx == 0.0) throw std::invalid_argument("lvr_swap: zero token leg");
    const double d = dx < 0.0 ? 1.0 : -1.0;
    return d * dx * (swap_price(e) - benchmark);
}

void winsorize(std::vector<double>& xs, double lo, double hi) {
    if (xs.empty()) return;
    std::vector<double> s = xs;
    std::sort(s.begin(), s.end());
    const double a = numeric::percentile_sorted(s, lo);
    const double b = numeric::percentile_sorted(s, hi);
    for (double& x : xs) x = std::clamp(x, a, b);
}

std::optional<double> lvr_daily(std::vector<double> per_swap, double tvl_end) {
    if (!(tvl_end > 0.0)) return std::nullopt;
    winsorize(per_swap);
    numeric::CompensatedSum s;
    for (double x : per_swap) s += x;
    return 1e4 * s.value() / tvl_end;
}

namespace {

struct Obs {
    double ts = 0.0;
    double price = 0.0;
    double tvl = 0.0;  // pool value right after the observation
};

struct PoolDay {
    std::string pool_id;
    long long day = 0;
    std::vector<std::size_t> idx;
    double tvl_end = 0.0;
    std::optional<double> price_end;
    bool negative = false;
};

// Per-pool running state over a sorted event list.
struct Sweep {
    std::vector<PoolDay> days;                    // in (pool, day) order
    std::map<std::string, std::vector<Obs>> obs;  // per pool, time order
    std::vector<std::optional<double>> price_before;  // pool price seen just before event i
};

Sweep sweep(const std::vector<MarketEvent>& ev) {
    struct State {
        double b0 = 0.0;
        double b1 = 0.0;
        double scale = 0.0;
        std::optional<double> price;
        bool negative = false;
    };
    std::map<std::string, State> st;
    std::map<std::pair<std::string, long long>, PoolDay> days;
    Sweep out;
    out.price_before.resize(ev.size());
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const auto& e = ev[i];
        auto& s = st[e.pool_id];
        out.price_before[i] = s.price;
        switch (e.kind) {
            case EventKind::Swap:
                s.b0 += e.amount0;
                s.b1 += e.amount1;
                break;
            case EventKind::Mint:
                s.b0 += std::abs(e.amount0);
                s.b1 += std::abs(e.amount1);
                break;
            case EventKind::Burn:
                s.b0 -= std::abs(e.amount0);
                s.b1 -= std::abs(e.amount1);
                break;
        }
        s.scale = std::max({s.scale, std::abs(e.amount0), std::abs(e.amount1)});
        const double tol = 1e-9 * s.scale;
        if (s.b0 < -tol || s.b1 < -tol) s.negative = true;
        if (auto p = observed_price(e)) {
            s.price = p;
            out.obs[e.pool_id].push_back({e.timestamp, *p, s.b0 * *p + s.b1});
        }
        auto& d = days[{e.pool_id, day_of(e.timestamp)}];
        d.pool_id = e.pool_id;
        d.day = day_of(e.timestamp);
        d.idx.push_back(i);
        d.price_end = s.price;
        d.tvl_end = s.price ? s.b0 * *s.price + s.b1 : s.b1;
        d.negative = d.negative || s.negative;
    }
    for (auto& [k, d] : days) out.days.push_back(std::move(d));
    return out;
}

std::optional<double> lagged_benchmark(const Sweep& sw, const std::vector<std::string>& pools, double t) {
    numeric::CompensatedSum wp, w, plain;
    int n = 0;
    for (const auto& pool : pools) {
        const auto it = sw.obs.find(pool);
        if (it == sw.obs.end()) continue;
        const auto& o = it->second;
        const auto first = std::lower_bound(o.begin(), o.end(), t + kLagSeconds,
                                            [](const Obs& a, double x) { return a.ts < x; });
        if (first == o.end() || first->ts > t + kLagSeconds + kLagStaleness) continue;
        ++n;
        plain += first->price;
        if (first->tvl > 0.0) {
            wp += first->tvl * first->price;
            w += first->tvl;
        }
    }
    if (n == 0) return std::nullopt;
    if (w.value() > 0.0) return wp.value() / w.value();
    return plain.value() / n;
}

std::map<std::string, std::vector<std::string>> pools_by_pair(const std::vector<MarketEvent>& ev) {
    std::map<std::string, std::set<std::string>> m;
    for (const auto& e : ev) m[pair_of(e.pool_id)].insert(e.pool_id);
    std::map<std::string, std::vector<std::string>> out;
    for (auto& [k, v] : m) out[k] = {v.begin(), v.end()};
    return out;
}

LvrRow lvr_row(const std::vector<MarketEvent>& ev, const Sweep& sw, const PoolDay& d,
               const std::vector<std::string>& pair_pools, LvrBenchmark b) {
    LvrRow row;
    row.pool_id = d.pool_id;
    row.day = d.day;
    row.tvl_end = d.tvl_end;
    std::vector<double> xs;
    for (std::size_t i : d.idx) {
        const auto& e = ev[i];
        if (e.kind != EventKind::Swap) continue;
        ++row.swaps;
        std::optional<double> p = b == LvrBenchmark::Instant ? e.price_after
                                                             : lagged_benchmark(sw, pair_pools, e.timestamp);
        if (!p) {
            ++row.excluded;
            continue;
        }
        xs.push_back(lvr_swap(e, *p));
    }
    winsorize(xs);
    numeric::CompensatedSum s;
    for (double x : xs) s += x;
    row.lvr_sum = s.value();
    if (row.tvl_end > 0.0) row.lvr_bps = 1e4 * row.lvr_sum / row.tvl_end;
    return row;
}

std::optional<double> median(std::vector<double> xs) {
    if (xs.empty()) return std::nullopt;
    std::sort(xs.begin(), xs.end());
    return numeric::percentile_sorted(xs, 0.5);
}

// Last observed price at or before t.
std::optional<double> price_at(const std::vector<Obs>& o, double t) {
    const auto it = std::upper_bound(o.begin(), o.end(), t,
                                     [](double x, const Obs& a) { return x < a.ts; });
    if (it == o.begin()) return std::nullopt;
    return std::prev(it)->price;
}

}  // namespace

std::vector<LvrRow> lvr_table(const std::vector<MarketEvent>& events, LvrBenchmark b) {
    const auto ev = sorted_events(drop_empty_burns(events));
    const auto sw = sweep(ev);
    const auto pairs = pools_by_pair(ev);
    std::vector<LvrRow> out;
    for (const auto& d : sw.days) {
        out.push_back(lvr_row(ev, sw, d, pairs.at(pair_of(d.pool_id)), b));
    }
    return out;
}

// ==== impermanent loss ====

double impermanent_loss(double L, double p_lo, double p_hi, double p0, double p1) {
    if (!(p0 > 0.0) || !(p1 > 0.0)) throw std::invalid_argument("impermanent_loss: prices must be positive");
    const auto held = pool::deposit_amounts(L, p_lo, p_hi, p0);
    const auto now = pool::deposit_amounts(L, p_lo, p_hi, p1);
    const double v_hold = p1 * held.token + held.numeraire;
    const double v_pos = p1 * now.token + now.numeraire;
    if (!(v_hold > 0.0)) return 0.0;
    return (v_hold - v_pos) / v_hold;
}

double symmetric_impermanent_loss(double p0, double p1, double alpha) {
    if (!(alpha > 1.0)) throw std::invalid_argument("symmetric_impermanent_loss: alpha must exceed 1");
    return impermanent_loss(1.0, p0 / alpha, p0 * alpha, p0, p1);
}

// ==== daily measures ====

std::optional<double> liquidity_yield_daily(double volume, double tvl_prev, double fee_bps) {
    if (!(tvl_prev > 0.0)) return std::nullopt;
    return fee_bps * volume / tvl_prev;
}

double range_volatility(double high, double low) {
    if (!(low > 0.0)) throw std::invalid_argument("range_volatility: low must be positive");
    if (!(high >= low)) throw std::invalid_argument("range_volatility: high must not be below low");
    return std::log(high / low) / (2.0 * std::sqrt(std::log(2.0)));
}

std::optional<double> gas_benchmark(std::span<const MarketEvent> day_events, int n_lowest) {
    if (n_lowest < 1) throw std::invalid_argument("gas_benchmark: n_lowest must be positive");
    std::vector<double> bids;
    for (const auto& e : day_events) {
        if (e.kind != EventKind::Swap) bids.push_back(e.gas_bid);
    }
    if (bids.empty()) return std::nullopt;
    const auto n = std::min<std::size_t>(bids.size(), static_cast<std::size_t>(n_lowest));
    std::partial_sort(bids.begin(), bids.begin() + static_cast<std::ptrdiff_t>(n), bids.end());
    numeric::CompensatedSum s;
    for (std::size_t i = 0; i < n; ++i) s += bids[i];
    return s.value() / static_cast<double>(n);
}

// ==== JIT and liquidity cycles ====

std::vector<JitTriple> jit_detect(const std::vector<MarketEvent>& ev) {
    std::map<std::pair<long long, int>, std::size_t> at;
    for (std::size_t i = 0; i < ev.size(); ++i) at.try_emplace({ev[i].block, ev[i].position}, i);
    std::vector<JitTriple> out;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const auto& m = ev[i];
        if (m.kind != EventKind::Mint) continue;
        const auto s = at.find({m.block, m.position + 1});
        const auto b = at.find({m.block, m.position + 2});
        if (s == at.end() || b == at.end()) continue;
        const auto& sw = ev[s->second];
        const auto& bu = ev[b->second];
        if (sw.kind == EventKind::Swap && sw.pool_id == m.pool_id && bu.kind == EventKind::Burn &&
            bu.pool_id == m.pool_id && bu.wallet == m.wallet) {
            out.push_back({i, s->second, b->second});
        }
    }
    return out;
}

bool out_of_range(int tick_lower, int tick_upper, double price) {
    return !(pool::tick_price(tick_lower) < price && price < pool::tick_price(tick_upper));
}

std::vector<CycleGap> liquidity_cycles(const std::vector<MarketEvent>& events) {
    const auto ev = drop_empty_burns(events);
    std::map<std::string, std::optional<double>> price;
    std::map<std::pair<std::string, std::string>, std::pair<std::vector<double>, std::vector<double>>> open;
    std::vector<CycleGap> out;
    for (const auto& e : ev) {
        if (e.kind == EventKind::Swap) {
            price[e.pool_id] = observed_price(e);
            continue;
        }
        const auto p = price[e.pool_id];
        auto& [mints, burns] = open[{e.wallet, e.pool_id}];
        const bool is_mint = e.kind == EventKind::Mint;
        auto& pending = is_mint ? burns : mints;
        for (double t0 : pending) {
            CycleGap g;
            g.wallet = e.wallet;
            g.pool_id = e.pool_id;
            g.kind = is_mint ? GapKind::BurnToMint : GapKind::MintToBurn;
            g.hours = (e.timestamp - t0) / 3600.0;
            g.day = day_of(e.timestamp);
            g.out_of_range = p && out_of_range(*e.tick_lower, *e.tick_upper, *p);
            out.push_back(std::move(g));
        }
        pending.clear();
        (is_mint ? mints : burns).push_back(e.timestamp);
        if (e.price_after) price[e.pool_id] = e.price_after;
    }
    return out;
}

std::string to_string(GapKind k) {
    return k == GapKind::MintToBurn ? "mint_to_burn" : "burn_to_mint";
}

// ==== panel ====

std::vector<PanelRow> build_panel(std::vector<MarketEvent> events, int gas_lowest) {
    const auto ev = sorted_events(drop_empty_burns(std::move(events)));
    const auto sw = sweep(ev);
    const auto pairs = pools_by_pair(ev);
    const auto jit = jit_detect(ev);
    std::vector<bool> is_jit_mint(ev.size(), false);
    for (const auto& t : jit) is_jit_mint[t.mint] = true;

    std::map<long long, std::vector<MarketEvent>> by_day;
    for (const auto& e : ev) {
        if (e.kind != EventKind::Swap) by_day[day_of(e.timestamp)].push_back(e);
    }
    std::map<long long, std::optional<double>> gas;
    for (const auto& [day, list] : by_day) gas[day] = gas_benchmark(list, gas_lowest);

    std::vector<PanelRow> rows;
    std::map<std::string, double> tvl_prev;
    for (const auto& d : sw.days) {
        PanelRow r;
        r.pool_id = d.pool_id;
        r.day = d.day;
        r.tvl_end = d.tvl_end;
        r.negative_balance = d.negative;
        std::vector<double> trades, mints, prices;
        std::set<std::string> wallets;
        int fee_bps = 0;
        for (std::size_t i : d.idx) {
            const auto& e = ev[i];
            fee_bps = e.fee_bps;
            if (auto p = observed_price(e)) prices.push_back(*p);
            if (e.kind == EventKind::Swap) {
                ++r.trade_count;
                r.volume += std::abs(e.amount1);
                trades.push_back(std::abs(e.amount1));
            } else {
                wallets.insert(e.wallet);
                if (e.kind == EventKind::Mint && !is_jit_mint[i]) {
                    const auto p = e.price_after ? e.price_after : sw.price_before[i];
                    if (p) mints.push_back(std::abs(e.amount0) * *p + std::abs(e.amount1));
                }
            }
        }
        r.median_trade = median(trades);
        r.median_mint = median(mints);
        r.lp_wallets = static_cast<int>(wallets.size());
        const auto& pp = pairs.at(pair_of(d.pool_id));
        r.lvr_instant = lvr_row(ev, sw, d, pp, LvrBenchmark::Instant).lvr_bps;
        r.lvr_1h = lvr_row(ev, sw, d, pp, LvrBenchmark::Lagged).lvr_bps;
        if (const auto it = tvl_prev.find(d.pool_id); it != tvl_prev.end()) {
            r.liq_yield = liquidity_yield_daily(r.volume, it->second, fee_bps);
        }
        tvl_prev[d.pool_id] = d.tvl_end;
        if (!prices.empty()) {
            const auto [lo, hi] = std::minmax_element(prices.begin(), prices.end());
            if (*lo > 0.0) r.volatility = range_volatility(*hi, *lo);
        }
        // hourly symmetric-position IL, averaged over the day's hours with a known price
        if (const auto it = sw.obs.find(d.pool_id); it != sw.obs.end()) {
            numeric::RunningStats il;
            const double start = static_cast<double>(d.day) * kSecondsPerDay;
            for (int h = 0; h < 24; ++h) {
                const auto p0 = price_at(it->second, start + 3600.0 * h);
                const auto p1 = price_at(it->second, start + 3600.0 * (h + 1));
                if (p0 && p1) il.add(symmetric_impermanent_loss(*p0, *p1));
            }
            if (il.count() > 0) r.il_5pct = 1e4 * il.mean();
        }
        r.gas_benchmark = gas.count(d.day) ? gas[d.day] : std::nullopt;
        rows.push_back(std::move(r));
    }

    // shares within same-pair pool groups
    std::map<std::pair<std::string, long long>, std::pair<double, double>> totals;
    for (const auto& r : rows) {
        auto& t = totals[{pair_of(r.pool_id), r.day}];
        t.first += std::max(0.0, r.tvl_end);
        t.second += r.volume;
    }
    for (auto& r : rows) {
        const auto& t = totals[{pair_of(r.pool_id), r.day}];
        if (t.first > 0.0) r.liquidity_share = std::max(0.0, r.tvl_end) / t.first;
        if (t.second > 0.0) r.volume_share = r.volume / t.second;
    }
    return rows;
}

namespace {

std::string opt(const std::optional<double>& x) {
    return x ? numeric::format_sig(*x) : std::string();
}

}  // namespace

std::string panel_to_csv(const std::vector<PanelRow>& rows) {
    std::ostringstream os;
    os << "pool_id,day,tvl_end,volume,trade_count,median_trade,median_mint,lp_wallets,"
          "liquidity_share,volume_share,lvr_1h,lvr_instant,il_5pct,liq_yield,volatility,"
          "gas_benchmark,negative_balance\n";
    using numeric::format_sig;
    for (const auto& r : rows) {
        os << r.pool_id << ',' << r.day << ',' << format_sig(r.tvl_end) << ',' << format_sig(r.volume)
           << ',' << r.trade_count << ',' << opt(r.median_trade) << ',' << opt(r.median_mint) << ','
           << r.lp_wallets << ',' << opt(r.liquidity_share) << ',' << opt(r.volume_share) << ','
           << opt(r.lvr_1h) << ',' << opt(r.lvr_instant) << ',' << opt(r.il_5pct) << ','
           << opt(r.liq_yield) << ',' << opt(r.volatility) << ',' << opt(r.gas_benchmark) << ','
           << (r.negative_balance ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string lvr_to_csv(const std::vector<LvrRow>& instant, const std::vector<LvrRow>& lagged) {
    if (instant.size() != lagged.size()) throw std::invalid_argument("lvr_to_csv: row count mismatch");
    std::ostringstream os;
    os << "pool_id,day,swaps,tvl_end,lvr_instant,lvr_1h,excluded_instant,excluded_1h\n";
    for (std::size_t i = 0; i < instant.size(); ++i) {
        const auto& a = instant[i];
        const auto& b = lagged[i];
        os << a.pool_id << ',' << a.day << ',' << a.swaps << ',' << numeric::format_sig(a.tvl_end) << ','
           << opt(a.lvr_bps) << ',' << opt(b.lvr_bps) << ',' << a.excluded << ',' << b.excluded << '\n';
    }
    return os.str();
}

std::string jit_to_csv(const std::vector<MarketEvent>& ev, const std::vector<JitTriple>& t) {
    std::ostringstream os;
    os << "block,pool_id,wallet,mint_tx,swap_tx,burn_tx\n";
    for (const auto& j : t) {
        const auto& m = ev[j.mint];
        os << m.block << ',' << m.pool_id << ',' << m.wallet << ',' << m.tx_hash << ','
           << ev[j.swap].tx_hash << ',' << ev[j.burn].tx_hash << '\n';
    }
    return os.str();
}

std::string cycles_to_csv(const std::vector<CycleGap>& gaps) {
    std::ostringstream os;
    os << "wallet,pool_id,kind,hours,day,out_of_range\n";
    for (const auto& g : gaps) {
        os << g.wallet << ',' << g.pool_id << ',' << to_string(g.kind) << ','
           << numeric::format_sig(g.hours) << ',' << g.day << ',' << (g.out_of_range ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string il_to_csv(const std::vector<PanelRow>& rows) {
    std::ostringstream os;
    os << "pool_id,day,il_5pct\n";
    for (const auto& r : rows) os << r.pool_id << ',' << r.day << ',' << opt(r.il_5pct) << '\n';
    return os.str();
}

}  // namespace ammlab::analytics
