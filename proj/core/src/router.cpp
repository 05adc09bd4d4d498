#include "ammlab/router.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ammlab/numeric.hpp"

namespace ammlab::router {

namespace {

struct Leg {
    double low = 0.0;
    double high = 0.0;
};

Leg leg_costs(double s, double q, const pool::PoolState& low, const pool::PoolState& high) {
    const double ql = s * q;
    const double qh = q - ql;
    return {ql > 0.0 ? pool::buy_cost(low, ql) : 0.0, qh > 0.0 ? pool::buy_cost(high, qh) : 0.0};
}

double gas_for(double s, double q, const RouteOptions& opt) {
    if (opt.gas_per_pool == 0.0) return 0.0;
    return opt.gas_per_pool * ((s * q > 0.0 ? 1.0 : 0.0) + (q - s * q > 0.0 ? 1.0 : 0.0));
}

}  // namespace

double split_cost(double s, double q, const pool::PoolState& low, const pool::PoolState& high,
                  const RouteOptions& opt) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("split must lie in [0, 1]");
    const auto c = leg_costs(s, q, low, high);
    return c.low + c.high + gas_for(s, q, opt);
}

RouteResult route(double q, const pool::PoolState& low, const pool::PoolState& high,
                  const RouteOptions& opt) {
    if (!(q >= 0.0) || !std::isfinite(q)) throw std::invalid_argument("trade_size must be nonnegative");
    RouteResult out;
    out.trade_size = q;
    if (q == 0.0) return out;

    const double dl = low.token_depth_above();
    const double dh = high.token_depth_above();
    if (!(dl + dh >= q)) {
        throw pool::InsufficientDepth("route: combined depth " + numeric::format_sig(dl + dh) +
                                          " is below the trade size " + numeric::format_sig(q),
                                      dl + dh);
    }
    // s is feasible when each leg fits in its pool
    const double a = std::clamp((q - dh) / q, 0.0, 1.0);
    const double b = std::clamp(dl / q, 0.0, 1.0);
    auto cost = [&](double s) { return split_cost(s, q, low, high, opt); };

    double best = a;
    double best_cost = cost(a);
    if (b > a) {
        const auto m = numeric::golden_section_min(cost, a, b, opt.split_tol);
        for (double s : {m.x, b}) {
            const double c = cost(s);
            if (c < best_cost) {
                best_cost = c;
                best = s;
            }
        }
    }
    // Leg costs carry a few 1e-10 of relative rounding from sqrt-price differences, so a
    // search that stops just inside a corner is snapped onto it.
    for (double edge : {a, b}) {
        if (best != edge && std::abs(best - edge) <= 10.0 * opt.split_tol &&
            cost(edge) <= best_cost + 1e-9 * std::abs(best_cost)) {
            best = edge;
            best_cost = cost(edge);
        }
    }
    const auto c = leg_costs(best, q, low, high);
    out.split_low = best;
    out.cost_low = c.low;
    out.cost_high = c.high;
    out.gas = gas_for(best, q, opt);
    out.cost_total = c.low + c.high + out.gas;
    out.filled = q;
    return out;
}

std::vector<RouteResult> route_sizes(std::span<const double> sizes, const pool::PoolState& low,
                                     const pool::PoolState& high, const RouteOptions& opt) {
    std::vector<RouteResult> out;
    out.reserve(sizes.size());
    for (double q : sizes) out.push_back(route(q, low, high, opt));
    return out;
}

std::string routes_to_csv(const std::vector<RouteResult>& rows) {
    std::ostringstream os;
    os << "size,split_low,cost_total\n";
    for (const auto& r : rows) {
        os << numeric::format_sig(r.trade_size) << ',' << numeric::format_sig(r.split_low) << ','
           << numeric::format_sig(r.cost_total) << '\n';
    }
    return os.str();
}

}  // namespace ammlab::router
