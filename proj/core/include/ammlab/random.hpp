#pragma once

#include <cstdint>
#include <random>

namespace ammlab {

// splitmix64 step; used to derive independent stream seeds from a master seed.
std::uint64_t splitmix64(std::uint64_t& state);

// Seed for stream `index` of master seed `seed`. Streams do not depend on
// how many other streams exist, so replication k is the same under any
// thread count.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

// Thin wrapper over mt19937_64 with distribution transforms written out by
// hand: std:: distributions are implementation-defined, these are not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }
    double uniform01();                       // [0, 1)
    double uniform(double a, double b);       // [a, b)
    double exponential(double rate);          // mean 1/rate
    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 eng_;
};

}  // namespace ammlab
