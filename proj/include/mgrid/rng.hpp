#pragma once

#include <cstdint>

namespace mgrid {

// Counter-based substreams: the stream for a draw site is fully determined by
// (seed, k, day, interval, tag), so sampling results do not depend on
// evaluation order or thread count. Within a substream, draws advance a
// splitmix64 state sequentially.
class RngStream {
  public:
    RngStream() = default;
    explicit RngStream(std::uint64_t state) : state_(state) {}

    static RngStream at(std::uint64_t seed, std::uint64_t year, std::uint64_t day,
                        std::uint64_t interval, std::uint64_t tag) {
        std::uint64_t key = seed;
        key = mix(key ^ (0x9e3779b97f4a7c15ULL * (year + 1)));
        key = mix(key ^ (0xbf58476d1ce4e5b9ULL * (day + 1)));
        key = mix(key ^ (0x94d049bb133111ebULL * (interval + 1)));
        key = mix(key ^ (0xd6e8feb86659fd93ULL * (tag + 1)));
        return RngStream(key);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_unit() { return (next_u64() >> 11) * 0x1.0p-53; }

    // +1 or -1 with equal probability.
    double next_sign() { return (next_u64() & 1) ? 1.0 : -1.0; }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_ = 0;
};

// Draw-site tags for the scenario pipeline.
enum class DrawTag : std::uint64_t {
    daily_temperature = 1,
    hourly_temperature = 2,
    irradiance = 3,
    wind = 4,
    population = 5,
    daily_demand = 6,
    hourly_demand = 7,
};

}  // namespace mgrid
