#include "ammlab/pool_json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ammlab::pool {

using nlohmann::json;

namespace {

template <class T>
T required(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) {
        throw std::invalid_argument(where + ": missing field '" + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw std::invalid_argument(where + ": field '" + key + "' has the wrong type");
    }
}

}  // namespace

std::string pool_to_json(const PoolState& pool, int indent) {
    json j;
    const double bps = pool.fee_fraction() * 1e4;
    j["fee_bps"] = std::lround(bps);
    if (std::abs(bps - std::round(bps)) > 1e-9) {
        j["fee_fraction"] = pool.fee_fraction();
    }
    j["tick_spacing"] = pool.grid().spacing();
    j["current_price"] = pool.current_price();
    json ps = json::array();
    for (const auto& p : pool.positions()) {
        ps.push_back({{"owner", p.owner},
                      {"lower_tick", p.lower_tick},
                      {"upper_tick", p.upper_tick},
                      {"liquidity", p.liquidity}});
    }
    j["positions"] = ps;
    return j.dump(indent);
}

PoolState pool_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("pool snapshot: invalid JSON: ") + e.what());
    }
    const std::string where = "pool snapshot";
    const int fee_bps = required<int>(j, "fee_bps", where);
    const double price = required<double>(j, "current_price", where);
    if (fee_bps < 0 || fee_bps >= 10000) {
        throw std::invalid_argument(where + ": fee_bps must lie in [0, 10000)");
    }
    double fee = fee_bps / 1e4;
    if (j.contains("fee_fraction")) fee = required<double>(j, "fee_fraction", where);
    int spacing = 0;
    if (j.contains("tick_spacing")) {
        spacing = required<int>(j, "tick_spacing", where);
    } else {
        spacing = spacing_for_fee_bps(fee_bps);
    }
    PoolState pool(TickGrid(spacing), fee, price);
    if (j.contains("positions")) {
        if (!j["positions"].is_array()) {
            throw std::invalid_argument(where + ": field 'positions' must be an array");
        }
        std::size_t n = 0;
        for (const auto& pj : j["positions"]) {
            const std::string pw = where + ": positions[" + std::to_string(n++) + "]";
            Position p;
            p.owner = pj.value("owner", std::string("lp") + std::to_string(n - 1));
            p.lower_tick = required<int>(pj, "lower_tick", pw);
            p.upper_tick = required<int>(pj, "upper_tick", pw);
            if (pj.contains("liquidity")) {
                p.liquidity = required<double>(pj, "liquidity", pw);
                pool.add_position(p);
            } else if (pj.contains("capital")) {
                const double capital = required<double>(pj, "capital", pw);
                const double value = pj.contains("value") ? required<double>(pj, "value", pw) : price;
                pool.add_capital(p.owner, p.lower_tick, p.upper_tick, capital, value);
            } else {
                throw std::invalid_argument(pw + ": needs 'liquidity' or 'capital'");
            }
        }
    }
    return pool;
}

PoolState pool_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("pool snapshot: cannot open '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return pool_from_json(ss.str());
}

}  // namespace ammlab::pool
