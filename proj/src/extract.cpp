#include "csem/extract.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <utility>

namespace csem {

namespace {

std::uint64_t pack_value_pair(Weight a, Weight b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}

/// Gain of one column pair without materializing terms. Every occurrence of
/// a value pair beyond its first adds one to the gain, which equals
/// sum(z - 1) over groups with z >= 2.
std::uint64_t pair_gain_count(const DenseMatrix& m, std::uint32_t i, std::uint32_t j,
                              std::unordered_map<std::uint64_t, std::uint32_t>& scratch) {
    const std::uint32_t lo = std::min(i, j);
    const std::uint32_t hi = std::max(i, j);
    scratch.clear();
    std::uint64_t gain = 0;
    for (std::uint32_t r = 0; r < m.rows(); ++r) {
        const Weight a = m.at(r, lo);
        const Weight b = m.at(r, hi);
        if (a != 0 && b != 0) {
            if (++scratch[pack_value_pair(a, b)] >= 2) {
                ++gain;
            }
        }
    }
    return gain;
}

struct SwapPick {
    std::uint32_t pair_a = 0;
    std::uint32_t pair_b = 0;
    std::uint32_t member_a = 0;
    std::uint32_t member_b = 0;
};

/// Fixed draw order shared by attempt_swap and extract: pair a, pair b
/// (distinct, via a shifted draw), then one member bit per pair.
SwapPick draw_swap_pick(std::uint32_t n_pairs, Rng& rng) {
    SwapPick pick;
    pick.pair_a = rng.below(n_pairs);
    pick.pair_b = rng.below(n_pairs - 1);
    if (pick.pair_b >= pick.pair_a) {
        ++pick.pair_b;
    }
    pick.member_a = rng.below(2);
    pick.member_b = rng.below(2);
    return pick;
}

std::uint32_t& pair_member(std::pair<std::uint32_t, std::uint32_t>& p, std::uint32_t member) {
    return member == 0 ? p.first : p.second;
}

} // namespace

CseSet make_cse_set(std::vector<CseTerm> terms) {
    CseSet set;
    set.terms = std::move(terms);
    set.total_gain = 0;
    for (const auto& t : set.terms) {
        set.total_gain += t.gain();
    }
    return set;
}

Pairing pair_columns_random(std::uint32_t n_cols, Rng& rng) {
    if (n_cols < 2) {
        throw DegenerateInputError("pair_columns_random: need at least two columns");
    }
    std::vector<std::uint32_t> cols(n_cols);
    std::iota(cols.begin(), cols.end(), 0u);
    rng.shuffle(cols);

    Pairing p;
    p.pairs.reserve(n_cols / 2);
    for (std::uint32_t k = 0; k + 1 < n_cols; k += 2) {
        p.pairs.emplace_back(cols[k], cols[k + 1]);
    }
    if (n_cols % 2 == 1) {
        p.unpaired.push_back(cols[n_cols - 1]);
    }
    return p;
}

PairEval pair_gain(const DenseMatrix& m, std::uint32_t i, std::uint32_t j) {
    if (i == j) {
        throw DegenerateInputError("pair_gain: columns must differ");
    }
    if (i >= m.cols() || j >= m.cols()) {
        throw DimensionError("pair_gain: column index out of range");
    }
    const std::uint32_t lo = std::min(i, j);
    const std::uint32_t hi = std::max(i, j);

    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> groups;
    for (std::uint32_t r = 0; r < m.rows(); ++r) {
        const Weight a = m.at(r, lo);
        const Weight b = m.at(r, hi);
        if (a != 0 && b != 0) {
            groups[pack_value_pair(a, b)].push_back(r);
        }
    }

    PairEval out;
    for (auto& [key, rows] : groups) {
        if (rows.size() < 2) {
            continue;
        }
        CseTerm term;
        term.col_i = lo;
        term.col_j = hi;
        term.w_i = static_cast<Weight>(key >> 32);
        term.w_j = static_cast<Weight>(key & 0xffffffffu);
        term.occ_rows = std::move(rows);  // already ascending from the row scan
        out.gain += term.gain();
        out.terms.push_back(std::move(term));
    }
    std::sort(out.terms.begin(), out.terms.end(), [](const CseTerm& a, const CseTerm& b) {
        return std::tie(a.w_i, a.w_j) < std::tie(b.w_i, b.w_j);
    });
    return out;
}

std::pair<std::uint64_t, CseSet> pairing_gain(const DenseMatrix& m, const Pairing& p) {
    std::vector<CseTerm> terms;
    for (const auto& [i, j] : p.pairs) {
        PairEval ev = pair_gain(m, i, j);
        terms.insert(terms.end(), std::make_move_iterator(ev.terms.begin()),
                     std::make_move_iterator(ev.terms.end()));
    }
    CseSet set = make_cse_set(std::move(terms));
    return {set.total_gain, std::move(set)};
}

SwapResult attempt_swap(const DenseMatrix& m, Pairing p, std::uint64_t current_gain, Rng& rng) {
    if (p.pairs.size() < 2) {
        return {std::move(p), current_gain, false};
    }
    const SwapPick pick = draw_swap_pick(static_cast<std::uint32_t>(p.pairs.size()), rng);

    std::unordered_map<std::uint64_t, std::uint32_t> scratch;
    auto& pa = p.pairs[pick.pair_a];
    auto& pb = p.pairs[pick.pair_b];
    const std::uint64_t old_local = pair_gain_count(m, pa.first, pa.second, scratch) +
                                    pair_gain_count(m, pb.first, pb.second, scratch);

    std::swap(pair_member(pa, pick.member_a), pair_member(pb, pick.member_b));
    const std::uint64_t new_local = pair_gain_count(m, pa.first, pa.second, scratch) +
                                    pair_gain_count(m, pb.first, pb.second, scratch);

    const std::uint64_t new_gain = current_gain - old_local + new_local;
    if (new_gain >= current_gain) {
        return {std::move(p), new_gain, true};
    }
    std::swap(pair_member(pa, pick.member_a), pair_member(pb, pick.member_b));
    return {std::move(p), current_gain, false};
}

DenseMatrix eliminate_commons(DenseMatrix m, const CseSet& commons) {
    for (const auto& t : commons.terms) {
        if (t.w_i == 0 || t.w_j == 0 || t.occ_rows.size() < 2) {
            throw ConsistencyError("eliminate_commons: malformed term");
        }
        if (t.col_i >= m.cols() || t.col_j >= m.cols() || t.col_i == t.col_j) {
            throw ConsistencyError("eliminate_commons: term columns out of range");
        }
        for (const std::uint32_t r : t.occ_rows) {
            if (r >= m.rows()) {
                throw ConsistencyError("eliminate_commons: occurrence row out of range");
            }
            if (m.at(r, t.col_i) != t.w_i || m.at(r, t.col_j) != t.w_j) {
                throw ConsistencyError(
                    "eliminate_commons: term references an already-zero or changed cell");
            }
            m.set(r, t.col_i, 0);
            m.set(r, t.col_j, 0);
        }
    }
    return m;
}

ExtractResult extract(const DenseMatrix& m, const ExtractConfig& cfg, const TraceFn& trace) {
    if (cfg.iterations < 1) {
        throw DegenerateInputError("extract: iterations must be >= 1");
    }
    DenseMatrix work = m;
    std::vector<CseTerm> all_terms;
    std::uint64_t total_gain = 0;
    Rng rng(cfg.seed);
    std::unordered_map<std::uint64_t, std::uint32_t> scratch;

    for (std::uint32_t it = 0; it < cfg.iterations; ++it) {
        if (m.cols() < 2) {
            break;
        }
        Pairing pairing = pair_columns_random(m.cols(), rng);
        const auto n_pairs = static_cast<std::uint32_t>(pairing.pairs.size());

        std::vector<std::uint64_t> gains(n_pairs);
        std::uint64_t iter_gain = 0;
        for (std::uint32_t k = 0; k < n_pairs; ++k) {
            gains[k] = pair_gain_count(work, pairing.pairs[k].first, pairing.pairs[k].second,
                                       scratch);
            iter_gain += gains[k];
        }

        for (std::uint32_t at = 0; at < cfg.attempts; ++at) {
            bool accepted = false;
            if (n_pairs >= 2) {
                const SwapPick pick = draw_swap_pick(n_pairs, rng);
                auto& pa = pairing.pairs[pick.pair_a];
                auto& pb = pairing.pairs[pick.pair_b];
                std::swap(pair_member(pa, pick.member_a), pair_member(pb, pick.member_b));

                const std::uint64_t ga = pair_gain_count(work, pa.first, pa.second, scratch);
                const std::uint64_t gb = pair_gain_count(work, pb.first, pb.second, scratch);
                const std::uint64_t candidate =
                    iter_gain - gains[pick.pair_a] - gains[pick.pair_b] + ga + gb;
                if (candidate >= iter_gain) {
                    iter_gain = candidate;
                    gains[pick.pair_a] = ga;
                    gains[pick.pair_b] = gb;
                    accepted = true;
                } else {
                    std::swap(pair_member(pa, pick.member_a), pair_member(pb, pick.member_b));
                }
            }
            if (trace) {
                trace(TraceEvent{it, at, iter_gain, accepted});
            }
        }

        if (iter_gain == 0) {
            if (cfg.early_stop) {
                break;
            }
            continue;
        }

        std::vector<CseTerm> commons_terms;
        for (const auto& [i, j] : pairing.pairs) {
            PairEval ev = pair_gain(work, i, j);
            commons_terms.insert(commons_terms.end(),
                                 std::make_move_iterator(ev.terms.begin()),
                                 std::make_move_iterator(ev.terms.end()));
        }
        CseSet commons = make_cse_set(std::move(commons_terms));
        work = eliminate_commons(std::move(work), commons);
        total_gain += commons.total_gain;
        all_terms.insert(all_terms.end(), std::make_move_iterator(commons.terms.begin()),
                         std::make_move_iterator(commons.terms.end()));
    }

    return {CseSet{std::move(all_terms), total_gain}, std::move(work)};
}

} // namespace csem
