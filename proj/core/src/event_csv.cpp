#include "ammlab/event_csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "ammlab/numeric.hpp"

namespace ammlab::analytics {

namespace {

const char* const kColumns[] = {"block",  "position", "tx_hash", "timestamp", "pool_id",
                                "fee_bps", "kind",    "wallet",  "amount0",   "amount1",
                                "tick_lower", "tick_upper", "gas_bid"};
constexpr std::size_t kRequired = sizeof(kColumns) / sizeof(kColumns[0]);

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && s[i] == ' ') ++i;
    return s.substr(i);
}

template <class T>
T parse_int(const std::string& s, const std::string& where) {
    T v{};
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw std::invalid_argument(where + ": expected an integer, got '" + s + "'");
    }
    return v;
}

double parse_real(const std::string& s, const std::string& where) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size() || !std::isfinite(v)) {
        throw std::invalid_argument(where + ": expected a finite number, got '" + s + "'");
    }
    return v;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

}  // namespace

EventKind parse_kind(const std::string& s) {
    if (s == "swap" || s == "Swap") return EventKind::Swap;
    if (s == "mint" || s == "Mint") return EventKind::Mint;
    if (s == "burn" || s == "Burn") return EventKind::Burn;
    throw std::invalid_argument("unknown event kind '" + s + "'");
}

std::string to_string(EventKind k) {
    switch (k) {
        case EventKind::Swap: return "swap";
        case EventKind::Mint: return "mint";
        case EventKind::Burn: return "burn";
    }
    return "?";
}

void validate_event(const MarketEvent& e) {
    if (e.kind == EventKind::Swap) {
        if (!(e.amount0 * e.amount1 < 0.0)) {
            throw std::invalid_argument("swap needs one leg in and one leg out (amount0*amount1 < 0)");
        }
    } else {
        if (!e.tick_lower || !e.tick_upper) {
            throw std::invalid_argument(to_string(e.kind) + " needs tick_lower and tick_upper");
        }
        if (!(*e.tick_lower < *e.tick_upper)) {
            throw std::invalid_argument(to_string(e.kind) + ": tick_lower must be below tick_upper");
        }
    }
    if (!(e.gas_bid >= 0.0)) throw std::invalid_argument("gas_bid must be nonnegative");
    if (e.price_after && !(*e.price_after > 0.0)) {
        throw std::invalid_argument("price_after must be positive");
    }
}

std::vector<MarketEvent> parse_events_csv(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument(source + ": empty input, header expected");
    }
    const auto header = split(trim(line));
    if (header.size() < kRequired) {
        throw std::invalid_argument(source + ":1: header has " + std::to_string(header.size()) +
                                    " columns, expected at least " + std::to_string(kRequired));
    }
    for (std::size_t i = 0; i < kRequired; ++i) {
        if (trim(header[i]) != kColumns[i]) {
            throw std::invalid_argument(source + ":1: column " + std::to_string(i + 1) + " is '" +
                                        header[i] + "', expected '" + kColumns[i] + "'");
        }
    }
    const bool has_price = header.size() > kRequired && trim(header[kRequired]) == "price_after";

    std::vector<MarketEvent> out;
    long long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        const auto f = split(line);
        const std::string at = source + ":" + std::to_string(lineno);
        if (f.size() < kRequired) {
            throw std::invalid_argument(at + ": expected " + std::to_string(kRequired) +
                                        " fields, got " + std::to_string(f.size()));
        }
        auto where = [&](std::size_t i) { return at + ": field '" + kColumns[i] + "'"; };
        MarketEvent e;
        e.block = parse_int<long long>(f[0], where(0));
        e.position = parse_int<int>(f[1], where(1));
        e.tx_hash = f[2];
        e.timestamp = parse_real(f[3], where(3));
        e.pool_id = f[4];
        e.fee_bps = parse_int<int>(f[5], where(5));
        try {
            e.kind = parse_kind(f[6]);
        } catch (const std::invalid_argument& ex) {
            throw std::invalid_argument(where(6) + ": " + ex.what());
        }
        e.wallet = f[7];
        e.amount0 = parse_real(f[8], where(8));
        e.amount1 = parse_real(f[9], where(9));
        if (!f[10].empty()) e.tick_lower = parse_int<int>(f[10], where(10));
        if (!f[11].empty()) e.tick_upper = parse_int<int>(f[11], where(11));
        e.gas_bid = f[12].empty() ? 0.0 : parse_real(f[12], where(12));
        if (has_price && f.size() > kRequired && !f[kRequired].empty()) {
            e.price_after = parse_real(f[kRequired], at + ": field 'price_after'");
        }
        try {
            validate_event(e);
        } catch (const std::invalid_argument& ex) {
            throw std::invalid_argument(at + ": " + ex.what());
        }
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<MarketEvent> read_events_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open events file '" + path + "'");
    return parse_events_csv(in, path);
}

void write_events_csv(std::ostream& out, const std::vector<MarketEvent>& events) {
    for (std::size_t i = 0; i < kRequired; ++i) out << (i ? "," : "") << kColumns[i];
    out << ",price_after\n";
    using numeric::format_sig;
    for (const auto& e : events) {
        out << e.block << ',' << e.position << ',' << csv_field(e.tx_hash) << ','
            << format_sig(e.timestamp, 15) << ',' << csv_field(e.pool_id) << ',' << e.fee_bps << ','
            << to_string(e.kind) << ',' << csv_field(e.wallet) << ',' << format_sig(e.amount0) << ','
            << format_sig(e.amount1) << ',';
        if (e.tick_lower) out << *e.tick_lower;
        out << ',';
        if (e.tick_upper) out << *e.tick_upper;
        out << ',' << format_sig(e.gas_bid) << ',';
        if (e.price_after) out << format_sig(*e.price_after);
        out << '\n';
    }
}

}  // namespace ammlab::analytics
