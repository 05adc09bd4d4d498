#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ammlab::analytics {

enum class EventKind { Swap, Mint, Burn };

// One swap/mint/burn log record. Swap amounts are signed deltas of the pool's
// balances (token leg amount0, numeraire leg amount1). Mint and burn amounts
// are read as magnitudes: mints add them to the pool, burns remove them.
struct MarketEvent {
    long long block = 0;
    int position = 0;
    std::string tx_hash;
    double timestamp = 0.0;  // seconds since the epoch, UTC
    std::string pool_id;
    int fee_bps = 0;
    EventKind kind = EventKind::Swap;
    std::string wallet;
    double amount0 = 0.0;
    double amount1 = 0.0;
    std::optional<int> tick_lower;
    std::optional<int> tick_upper;
    double gas_bid = 0.0;
    // Pool price after the event, when the export carries it.
    std::optional<double> price_after;
};

// Throws std::invalid_argument describing the first broken invariant.
void validate_event(const MarketEvent& e);

EventKind parse_kind(const std::string& s);
std::string to_string(EventKind k);

// Header: block,position,tx_hash,timestamp,pool_id,fee_bps,kind,wallet,amount0,
// amount1,tick_lower,tick_upper,gas_bid with an optional trailing price_after.
// Errors name the line and the field.
std::vector<MarketEvent> parse_events_csv(std::istream& in, const std::string& source = "events");
std::vector<MarketEvent> read_events_csv(const std::string& path);
void write_events_csv(std::ostream& out, const std::vector<MarketEvent>& events);

}  // namespace ammlab::analytics
