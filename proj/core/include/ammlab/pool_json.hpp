#pragma once

#include <string>

#include "ammlab/pool.hpp"

namespace ammlab::pool {

// {fee_bps, tick_spacing, current_price, positions:[{owner, lower_tick, upper_tick, liquidity}]}
std::string pool_to_json(const PoolState& pool, int indent = 2);

// Positions may give `liquidity` directly, or `capital` (numeraire) plus an
// optional `value` (defaults to current_price) to size L on load.
PoolState pool_from_json(const std::string& text);
PoolState pool_from_json_file(const std::string& path);

}  // namespace ammlab::pool
