#pragma once

#include <cstdint>

namespace wmdp {

// xoshiro256** seeded through splitmix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    std::uint64_t next();
    int uniform(int lo, int hi);  // inclusive
    bool coin() { return next() >> 63; }

private:
    std::uint64_t s_[4];
};

}  // namespace wmdp
