#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "csem/matrix.hpp"
#include "csem/rng.hpp"

namespace csem {

/// Disjoint partition of column indices into pairs plus leftovers.
struct Pairing {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    std::vector<std::uint32_t> unpaired;
};

/// One extracted two-term common subexpression: the value pair
/// (w_i at col_i, w_j at col_j) recurring on every row in occ_rows.
/// Canonical form: col_i < col_j and occ_rows strictly increasing.
struct CseTerm {
    std::uint32_t col_i = 0;
    std::uint32_t col_j = 0;
    Weight w_i = 0;
    Weight w_j = 0;
    std::vector<std::uint32_t> occ_rows;

    std::uint32_t occurrences() const { return static_cast<std::uint32_t>(occ_rows.size()); }
    /// Additions saved by reusing this term: z - 1.
    std::uint64_t gain() const { return occ_rows.size() - 1; }

    bool operator==(const CseTerm&) const = default;
};

struct CseSet {
    std::vector<CseTerm> terms;
    std::uint64_t total_gain = 0;

    bool operator==(const CseSet&) const = default;
};

/// Recomputes total_gain from the terms.
CseSet make_cse_set(std::vector<CseTerm> terms);

struct ExtractConfig {
    std::uint32_t iterations = 1;
    std::uint32_t attempts = 0;
    std::uint64_t seed = 0;
    /// Stop as soon as an iteration finds zero gain.
    bool early_stop = false;
};

/// Gain and terms contributed by a single column pair.
struct PairEval {
    std::uint64_t gain = 0;
    std::vector<CseTerm> terms;
};

struct SwapResult {
    Pairing pairing;
    std::uint64_t gain = 0;
    bool accepted = false;
};

/// Emitted once per swap attempt; `gain` is the accepted pairing gain after
/// the attempt was applied or rolled back.
struct TraceEvent {
    std::uint32_t iteration = 0;
    std::uint32_t attempt = 0;
    std::uint64_t gain = 0;
    bool accepted = false;
};
using TraceFn = std::function<void(const TraceEvent&)>;

struct ExtractResult {
    CseSet commons;
    DenseMatrix remainder;
};

/// Shuffles the columns and pairs them off consecutively: floor(n/2) pairs,
/// one unpaired leftover when n is odd. Throws DegenerateInputError for
/// n_cols < 2.
Pairing pair_columns_random(std::uint32_t n_cols, Rng& rng);

/// Groups the rows where both columns are nonzero by their ordered value
/// pair; every group occurring at least twice becomes a term and
/// contributes z - 1 to the gain. Terms are returned in canonical order.
PairEval pair_gain(const DenseMatrix& m, std::uint32_t i, std::uint32_t j);

/// Sum of pair_gain over all pairs of `p`; the CseSet collects every term.
std::pair<std::uint64_t, CseSet> pairing_gain(const DenseMatrix& m, const Pairing& p);

/// One improvement move: picks two distinct pairs and one member of each,
/// exchanges them and re-evaluates only the two touched pairs. The exchange
/// is kept iff the new total gain is >= current_gain (plateau moves are
/// accepted); otherwise the original pairing is returned. Fewer than two
/// pairs: no-op with accepted=false.
/// Draw order: pair index a, pair index b (distinct), member of a, member of b.
SwapResult attempt_swap(const DenseMatrix& m, Pairing p, std::uint64_t current_gain, Rng& rng);

/// Zeroes every cell claimed by the set. A term referencing a cell that no
/// longer holds its weight raises ConsistencyError.
DenseMatrix eliminate_commons(DenseMatrix m, const CseSet& commons);

/// Full randomized search: per iteration, a fresh random pairing, `attempts`
/// swap moves, then the surviving terms are eliminated from the working
/// matrix and accumulated. Deterministic for a fixed seed. The optional
/// trace observer fires once per attempt.
ExtractResult extract(const DenseMatrix& m, const ExtractConfig& cfg, const TraceFn& trace = {});

} // namespace csem
