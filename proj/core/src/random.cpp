#include "ammlab/random.hpp"

#include <cmath>
#include <stdexcept>

namespace ammlab {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (index * 0xD1B54A32D192ED03ULL);
    splitmix64(s);
    return splitmix64(s);
}

double Rng::uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) {
    return a + (b - a) * uniform01();
}

double Rng::exponential(double rate) {
    if (!(rate > 0.0)) {
        throw std::invalid_argument("Rng::exponential: rate must be positive");
    }
    return -std::log1p(-uniform01()) / rate;
}

}  // namespace ammlab
