#pragma once

#include <span>
#include <string>
#include <vector>

#include "ammlab/pool.hpp"

namespace ammlab::router {

struct RouteOptions {
    double split_tol = 1e-7;
    // Fixed cost charged once per pool that receives part of the order.
    // Zero by default: impact and liquidity fees only.
    double gas_per_pool = 0.0;
};

struct RouteResult {
    double trade_size = 0.0;
    double split_low = 1.0;
    double cost_low = 0.0;
    double cost_high = 0.0;
    double cost_total = 0.0;
    double gas = 0.0;          // included in cost_total
    double filled = 0.0;
};

// Cheapest split of a token purchase across two pools. Each pool's cost is
// evaluated on a copy through the swap engine.
RouteResult route(double trade_size, const pool::PoolState& low, const pool::PoolState& high,
                  const RouteOptions& opt = {});
// Cost of one given split; s must be feasible.
double split_cost(double s, double trade_size, const pool::PoolState& low,
                  const pool::PoolState& high, const RouteOptions& opt = {});

std::vector<RouteResult> route_sizes(std::span<const double> sizes, const pool::PoolState& low,
                                     const pool::PoolState& high, const RouteOptions& opt = {});
std::string routes_to_csv(const std::vector<RouteResult>& rows);

}  // namespace ammlab::router
