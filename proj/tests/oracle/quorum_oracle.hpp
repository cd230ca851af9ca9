#pragma once

// Brute-force quorum oracle. Enumerates process subsets as bitmasks and checks the two
// intersection facts the delivery threshold must provide. Shares no code with the library.

#include <bit>
#include <cstdint>
#include <vector>

namespace oracle
{
    inline std::vector<std::uint32_t> subsets_of_size(unsigned n, unsigned k)
    {
        std::vector<std::uint32_t> out;
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask)
        {
            if (static_cast<unsigned>(std::popcount(mask)) == k)
                out.push_back(mask);
        }
        return out;
    }

    struct QuorumFacts
    {
        /// Every pair of quorums shares at least t+1 processes.
        bool pairwise_overlap = true;
        /// Every quorum keeps at least t+1 processes outside every t-element Byzantine set.
        bool correct_majority = true;
        std::uint64_t checked_pairs = 0;
    };

    inline QuorumFacts check_quorums(unsigned n, unsigned t, unsigned quorum_size)
    {
        QuorumFacts facts;
        if (quorum_size > n)
            return facts;
        const auto quorums = subsets_of_size(n, quorum_size);
        const auto byzantine_sets = subsets_of_size(n, t);
        for (std::size_t i = 0; i < quorums.size() && facts.pairwise_overlap; ++i)
        {
            for (std::size_t j = i; j < quorums.size(); ++j)
            {
                ++facts.checked_pairs;
                if (static_cast<unsigned>(std::popcount(quorums[i] & quorums[j])) < t + 1)
                {
                    facts.pairwise_overlap = false;
                    break;
                }
            }
        }
        for (std::uint32_t q : quorums)
        {
            for (std::uint32_t b : byzantine_sets)
            {
                if (static_cast<unsigned>(std::popcount(q & ~b)) < t + 1)
                {
                    facts.correct_majority = false;
                    return facts;
                }
            }
        }
        return facts;
    }

    /// Smallest quorum size for which both facts hold, found by enumeration (n+1 if none).
    inline unsigned minimal_safe_quorum(unsigned n, unsigned t)
    {
        for (unsigned q = 1; q <= n; ++q)
        {
            const auto f = check_quorums(n, t, q);
            if (f.pairwise_overlap && f.correct_majority)
                return q;
        }
        return n + 1;
    }

    /// "Strictly more than (n+t)/2" decided on integers without division: 2q > n+t.
    inline bool exceeds_half_n_plus_t(unsigned q, unsigned n, unsigned t)
    {
        return 2 * q > n + t;
    }
} // namespace oracle
