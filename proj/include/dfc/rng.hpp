#pragma once

#include <cstdint>
#include <random>

namespace dfc {

// Seeded generator with hand-rolled uniform mapping so that streams are
// identical across standard-library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        // rejection sampling keeps the draw unbiased
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = gen_();
        } while (v >= limit);
        return v % n;
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace dfc
