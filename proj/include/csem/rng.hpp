#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace csem {

/// Deterministic random stream. All randomized code in the library draws
/// from one Rng instance in a documented order, so a fixed seed reproduces
/// bit-identical results. Bounded draws avoid std::uniform_int_distribution,
/// whose draw sequence is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Unbiased integer in [0, bound), bound >= 1. Lemire's multiply-shift
    /// rejection method; consumes a variable but seed-determined number of
    /// engine outputs.
    std::uint32_t below(std::uint32_t bound) {
        std::uint64_t x = next();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t threshold = (0 - static_cast<std::uint64_t>(bound)) % bound;
            while (lo < threshold) {
                x = next();
                m = static_cast<__uint128_t>(x) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint32_t>(m >> 64);
    }

    /// Fisher-Yates shuffle driven by below(); one draw per element from the
    /// back of the range down to index 1.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::uint32_t j = below(static_cast<std::uint32_t>(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace csem
