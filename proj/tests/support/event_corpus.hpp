#pragma once

// Synthetic swap/mint/burn corpus with planted JIT triples and near misses.

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ammlab/event_csv.hpp"
#include "ammlab/random.hpp"

namespace corpus {

using ammlab::analytics::EventKind;
using ammlab::analytics::MarketEvent;

struct Corpus {
    std::vector<MarketEvent> events;               // shuffled
    std::set<std::pair<long long, int>> planted;   // (block, mint position)
    int decoys = 0;
};

inline Corpus jit_corpus(std::uint64_t seed, int target_events = 10000, int planted = 100,
                         int decoys = 100) {
    ammlab::Rng rng(seed);
    Corpus c;
    long long serial = 0;
    const std::string pools[2] = {"ETH-USDC/5", "ETH-USDC/30"};
    auto make = [&](EventKind k, const std::string& pool, const std::string& wallet) {
        MarketEvent e;
        e.kind = k;
        e.pool_id = pool;
        e.fee_bps = pool.back() == '5' ? 5 : 30;
        e.wallet = wallet;
        e.tx_hash = "0x" + std::to_string(serial++);
        e.gas_bid = rng.uniform(10.0, 50.0);
        if (k == EventKind::Swap) {
            const double qty = rng.uniform(0.1, 5.0);
            const bool buy = rng.bernoulli(0.5);
            e.amount0 = buy ? -qty : qty;
            e.amount1 = (buy ? 1.0 : -1.0) * qty * 2000.0;
        } else {
            e.amount0 = rng.uniform(0.5, 5.0);
            e.amount1 = rng.uniform(1000.0, 9000.0);
            e.tick_lower = 75000;
            e.tick_upper = 76200;
        }
        return e;
    };
    // filler mints and burns get unique wallets so they never form a triple
    auto filler = [&] {
        const double u = rng.uniform01();
        const auto& pool = pools[rng.bernoulli(0.5) ? 1 : 0];
        if (u < 0.7) return make(EventKind::Swap, pool, "trader" + std::to_string(serial));
        return make(u < 0.85 ? EventKind::Mint : EventKind::Burn, pool, "lp" + std::to_string(serial));
    };

    std::vector<std::vector<MarketEvent>> blocks;
    std::vector<int> special;  // 0 filler block, 1 planted, 2 decoy
    for (int i = 0; i < planted; ++i) special.push_back(1);
    for (int i = 0; i < decoys; ++i) special.push_back(2);
    int kind_counter = 0;
    int made = 0;
    std::size_t next_special = 0;
    std::vector<int> order = special;
    // interleave special blocks with filler blocks
    while (made < target_events || next_special < order.size()) {
        std::vector<MarketEvent> b;
        const int pre = static_cast<int>(rng.uniform(0.0, 4.0));
        for (int i = 0; i < pre; ++i) b.push_back(filler());
        if (next_special < order.size() && rng.bernoulli(0.5)) {
            const int which = order[next_special++];
            const auto& pool = pools[next_special % 2];
            const auto& other = pools[(next_special + 1) % 2];
            const std::string w = (which == 1 ? "jit" : "decoy") + std::to_string(next_special);
            if (which == 1) {
                b.push_back(make(EventKind::Mint, pool, w));
                b.push_back(make(EventKind::Swap, pool, "victim" + std::to_string(serial)));
                b.push_back(make(EventKind::Burn, pool, w));
            } else {
                switch (kind_counter++ % 4) {
                    case 0:  // burn one position too late
                        b.push_back(make(EventKind::Mint, pool, w));
                        b.push_back(make(EventKind::Swap, pool, "victim" + std::to_string(serial)));
                        b.push_back(make(EventKind::Swap, pool, "victim" + std::to_string(serial)));
                        b.push_back(make(EventKind::Burn, pool, w));
                        break;
                    case 1:  // burn by a different wallet
                        b.push_back(make(EventKind::Mint, pool, w));
                        b.push_back(make(EventKind::Swap, pool, "victim" + std::to_string(serial)));
                        b.push_back(make(EventKind::Burn, pool, w + "x"));
                        break;
                    case 2:  // swap on the other pool
                        b.push_back(make(EventKind::Mint, pool, w));
                        b.push_back(make(EventKind::Swap, other, "victim" + std::to_string(serial)));
                        b.push_back(make(EventKind::Burn, pool, w));
                        break;
                    default:  // burn on the other pool
                        b.push_back(make(EventKind::Mint, pool, w));
                        b.push_back(make(EventKind::Swap, pool, "victim" + std::to_string(serial)));
                        b.push_back(make(EventKind::Burn, other, w));
                        break;
                }
                ++c.decoys;
            }
        }
        const int post = static_cast<int>(rng.uniform(0.0, 4.0));
        for (int i = 0; i < post; ++i) b.push_back(filler());
        if (b.empty()) continue;
        made += static_cast<int>(b.size());
        blocks.push_back(std::move(b));
    }

    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
        const long long block = 1000 + static_cast<long long>(bi);
        auto& b = blocks[bi];
        for (std::size_t k = 0; k < b.size(); ++k) {
            auto& e = b[k];
            e.block = block;
            e.position = static_cast<int>(k);
            e.timestamp = 1.7e9 + 12.0 * static_cast<double>(bi);
            if (e.kind == EventKind::Mint && e.wallet.rfind("jit", 0) == 0) {
                c.planted.insert({block, e.position});
            }
            c.events.push_back(e);
        }
    }
    // shuffle so the detector has to sort
    for (std::size_t i = c.events.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.next_u64() % i);
        std::swap(c.events[i - 1], c.events[j]);
    }
    return c;
}

}  // namespace corpus
