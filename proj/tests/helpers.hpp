#pragma once

// Shared fixtures and independent oracles. Everything here recomputes
// results from first principles (plain loops, exhaustive enumeration) so the
// checks stay independent of the library's own code paths.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "csem/extract.hpp"
#include "csem/matrix.hpp"
#include "csem/rng.hpp"

namespace testutil {

/// The worked 4x4 matrix used across the suites:
///   [[2,0,1,0],
///    [2,0,1,0],
///    [0,3,0,5],
///    [2,0,0,5]]
/// with one extractable term: columns (0,2), weights (2,1), rows {0,1}.
inline csem::DenseMatrix worked_matrix() {
    return csem::DenseMatrix::from_rows({
        {2, 0, 1, 0},
        {2, 0, 1, 0},
        {0, 3, 0, 5},
        {2, 0, 0, 5},
    });
}

inline csem::CseTerm worked_term() {
    csem::CseTerm t;
    t.col_i = 0;
    t.col_j = 2;
    t.w_i = 2;
    t.w_j = 1;
    t.occ_rows = {0, 1};
    return t;
}

inline csem::DenseMatrix worked_remainder() {
    return csem::DenseMatrix::from_rows({
        {0, 0, 0, 0},
        {0, 0, 0, 0},
        {0, 3, 0, 5},
        {2, 0, 0, 5},
    });
}

/// Plain nested-loop reference product (no zero skipping, no op counting).
inline std::vector<std::int64_t> reference_multiply(const csem::DenseMatrix& m,
                                                    const std::vector<csem::Weight>& v) {
    std::vector<std::int64_t> y(m.rows(), 0);
    for (std::uint32_t r = 0; r < m.rows(); ++r) {
        for (std::uint32_t c = 0; c < m.cols(); ++c) {
            y[r] += static_cast<std::int64_t>(m.at(r, c)) * v[c];
        }
    }
    return y;
}

/// Quadratic pair-gain oracle: every eligible row that repeats an earlier
/// row's value pair saves one addition.
inline std::uint64_t brute_pair_gain(const csem::DenseMatrix& m, std::uint32_t i,
                                     std::uint32_t j) {
    const std::uint32_t lo = std::min(i, j);
    const std::uint32_t hi = std::max(i, j);
    std::vector<std::pair<csem::Weight, csem::Weight>> seen;
    std::uint64_t gain = 0;
    for (std::uint32_t r = 0; r < m.rows(); ++r) {
        const csem::Weight a = m.at(r, lo);
        const csem::Weight b = m.at(r, hi);
        if (a == 0 || b == 0) {
            continue;
        }
        bool repeated = false;
        for (const auto& prev : seen) {
            if (prev.first == a && prev.second == b) {
                repeated = true;
                break;
            }
        }
        if (repeated) {
            ++gain;
        } else {
            seen.emplace_back(a, b);
        }
    }
    return gain;
}

namespace detail {

inline void enumerate_matchings(std::vector<std::uint32_t>& remaining, bool may_drop_one,
                                std::uint64_t gain_so_far, const csem::DenseMatrix& m,
                                std::uint64_t& best) {
    if (remaining.size() < 2) {
        best = std::max(best, gain_so_far);
        return;
    }
    const std::uint32_t x = remaining.front();
    std::vector<std::uint32_t> rest(remaining.begin() + 1, remaining.end());
    for (std::size_t k = 0; k < rest.size(); ++k) {
        std::vector<std::uint32_t> next = rest;
        const std::uint32_t y = next[k];
        next.erase(next.begin() + k);
        enumerate_matchings(next, may_drop_one, gain_so_far + brute_pair_gain(m, x, y), m, best);
    }
    if (may_drop_one) {
        enumerate_matchings(rest, false, gain_so_far, m, best);
    }
}

} // namespace detail

/// Exhaustive search over every pairing of the columns (one column may sit
/// out when the count is odd); returns the best achievable one-pass gain.
inline std::uint64_t best_pairing_gain_exhaustive(const csem::DenseMatrix& m) {
    std::vector<std::uint32_t> cols(m.cols());
    for (std::uint32_t c = 0; c < m.cols(); ++c) {
        cols[c] = c;
    }
    std::uint64_t best = 0;
    detail::enumerate_matchings(cols, m.cols() % 2 == 1, 0, m, best);
    return best;
}

/// Random small matrix with entries drawn from {-max_abs..max_abs} at the
/// given density; values repeat often enough for terms to exist.
inline csem::DenseMatrix random_small_matrix(csem::Rng& rng, std::uint32_t rows,
                                             std::uint32_t cols, std::uint32_t density_pct,
                                             std::uint32_t max_abs) {
    std::vector<csem::Weight> entries(static_cast<std::size_t>(rows) * cols, 0);
    for (auto& e : entries) {
        if (rng.below(100) < density_pct) {
            const auto mag = static_cast<csem::Weight>(1 + rng.below(max_abs));
            e = rng.below(2) == 0 ? mag : -mag;
        }
    }
    return csem::DenseMatrix(rows, cols, std::move(entries));
}

inline std::vector<csem::Weight> random_vector(csem::Rng& rng, std::uint32_t n,
                                               std::uint32_t max_abs) {
    std::vector<csem::Weight> v(n);
    for (auto& e : v) {
        const auto mag = static_cast<csem::Weight>(rng.below(max_abs + 1));
        e = rng.below(2) == 0 ? mag : -mag;
    }
    return v;
}

} // namespace testutil
