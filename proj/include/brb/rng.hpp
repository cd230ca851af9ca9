#pragma once

#include <cstdint>
#include <random>

namespace brb
{
    /// Seeded generator with a portable bounded draw. mt19937_64's output sequence is fixed by
    /// the standard; the distributions in <random> are not, so they are avoided.
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed) : engine_(seed) {}

        /// Uniform in [0, bound). bound must be > 0.
        std::uint64_t below(std::uint64_t bound)
        {
            const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
            std::uint64_t x = engine_();
            while (x >= limit)
            {
                x = engine_();
            }
            return x % bound;
        }

        bool coin() { return below(2) == 1; }

    private:
        std::mt19937_64 engine_;
    };
} // namespace brb
