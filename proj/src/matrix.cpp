#include "csem/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

#include "csem/rng.hpp"

namespace csem {

DenseMatrix::DenseMatrix(std::uint32_t rows, std::uint32_t cols)
    : rows_(rows), cols_(cols), entries_(static_cast<std::size_t>(rows) * cols, 0) {
    if (rows == 0 || cols == 0) {
        throw DegenerateInputError("DenseMatrix: rows and cols must be >= 1");
    }
}

DenseMatrix::DenseMatrix(std::uint32_t rows, std::uint32_t cols, std::vector<Weight> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows == 0 || cols == 0) {
        throw DegenerateInputError("DenseMatrix: rows and cols must be >= 1");
    }
    if (entries_.size() != static_cast<std::size_t>(rows) * cols) {
        throw DimensionError("DenseMatrix: entry count does not match rows*cols");
    }
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<Weight>>& rows) {
    if (rows.empty() || rows.front().empty()) {
        throw DegenerateInputError("DenseMatrix::from_rows: need at least one row and column");
    }
    const std::size_t cols = rows.front().size();
    std::vector<Weight> flat;
    flat.reserve(rows.size() * cols);
    for (const auto& row : rows) {
        if (row.size() != cols) {
            throw DimensionError("DenseMatrix::from_rows: ragged rows");
        }
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return DenseMatrix(static_cast<std::uint32_t>(rows.size()), static_cast<std::uint32_t>(cols),
                       std::move(flat));
}

std::uint64_t DenseMatrix::nonzero_count() const {
    return static_cast<std::uint64_t>(
        std::count_if(entries_.begin(), entries_.end(), [](Weight w) { return w != 0; }));
}

double nonzero_ratio(const DenseMatrix& m) {
    const double cells = static_cast<double>(m.rows()) * static_cast<double>(m.cols());
    return static_cast<double>(m.nonzero_count()) / cells;
}

std::vector<Weight> quantize_linear(const std::vector<Weight>& values, std::uint32_t levels) {
    if (levels < 1) {
        throw DegenerateInputError("quantize_linear: levels must be >= 1");
    }
    if (values.empty()) {
        throw DegenerateInputError("quantize_linear: values must be nonempty");
    }
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = static_cast<double>(*lo_it);
    const double hi = static_cast<double>(*hi_it);
    const double step = levels > 1 ? (hi - lo) / (levels - 1) : 0.0;

    std::vector<std::int64_t> level(levels);
    for (std::uint32_t k = 0; k < levels; ++k) {
        const double real = levels > 1 ? lo + step * k : (lo + hi) / 2.0;
        std::int64_t q = std::llround(real);
        if (q == 0) {
            // Zeroness is decided by pruning alone, so a level landing on
            // zero moves one step toward the heavier side of the range.
            const double shift = step > 0.0 ? step : 1.0;
            q = std::llround(real + (hi >= -lo ? shift : -shift));
            if (q == 0) {
                q = hi >= -lo ? 1 : -1;
            }
        }
        level[k] = std::clamp<std::int64_t>(q, std::numeric_limits<Weight>::min(),
                                            std::numeric_limits<Weight>::max());
    }

    std::vector<Weight> out;
    out.reserve(values.size());
    for (const Weight v : values) {
        std::int64_t best = level[0];
        std::int64_t best_dist = std::llabs(static_cast<std::int64_t>(v) - level[0]);
        for (std::uint32_t k = 1; k < levels; ++k) {
            const std::int64_t dist = std::llabs(static_cast<std::int64_t>(v) - level[k]);
            // strict improvement keeps ties on the lower level
            if (dist < best_dist || (dist == best_dist && level[k] < best)) {
                best = level[k];
                best_dist = dist;
            }
        }
        out.push_back(static_cast<Weight>(best));
    }
    return out;
}

namespace {

/// Standard normal via Box-Muller on two engine draws, scaled and rounded
/// to a nonzero integer weight.
Weight random_raw_weight(Rng& rng) {
    constexpr double kScale = 1.0e6;
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    for (;;) {
        const double u1 =
            (static_cast<double>(rng.next() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        const double u2 = static_cast<double>(rng.next() >> 11) * 0x1.0p-53;  // [0, 1)
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
        const std::int64_t w = std::llround(z * kScale);
        if (w != 0) {
            return static_cast<Weight>(
                std::clamp<std::int64_t>(w, std::numeric_limits<Weight>::min(),
                                         std::numeric_limits<Weight>::max()));
        }
    }
}

} // namespace

DenseMatrix generate_dense(const GenSpec& spec) {
    if (spec.rows < 1 || spec.cols < 1) {
        throw DegenerateInputError("generate_dense: rows and cols must be >= 1");
    }
    if (!(spec.target_alpha > 0.0) || spec.target_alpha > 1.0) {
        throw DegenerateInputError("generate_dense: target_alpha must be in (0, 1]");
    }
    if (spec.unique_values < 1) {
        throw DegenerateInputError("generate_dense: unique_values must be >= 1");
    }
    const std::uint64_t total = static_cast<std::uint64_t>(spec.rows) * spec.cols;
    const std::uint64_t nnz =
        static_cast<std::uint64_t>(std::llround(spec.target_alpha * static_cast<double>(total)));
    if (nnz < 1) {
        throw DegenerateInputError("generate_dense: target_alpha rounds to an empty matrix");
    }

    Rng rng(spec.seed);
    std::vector<Weight> raw(total);
    for (auto& w : raw) {
        w = random_raw_weight(rng);
    }

    // Magnitude pruning: keep the nnz largest |raw|; among equal magnitudes
    // the earlier row-major position survives.
    std::vector<std::uint32_t> order(total);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&raw](std::uint32_t a, std::uint32_t b) {
        const std::int64_t ma = std::llabs(static_cast<std::int64_t>(raw[a]));
        const std::int64_t mb = std::llabs(static_cast<std::int64_t>(raw[b]));
        if (ma != mb) {
            return ma > mb;
        }
        return a < b;
    });
    std::vector<std::uint32_t> survivors(order.begin(), order.begin() + nnz);
    std::sort(survivors.begin(), survivors.end());

    std::vector<Weight> surviving_values;
    surviving_values.reserve(nnz);
    for (const std::uint32_t pos : survivors) {
        surviving_values.push_back(raw[pos]);
    }
    const std::vector<Weight> quantized = quantize_linear(surviving_values, spec.unique_values);

    std::vector<Weight> entries(total, 0);
    for (std::size_t k = 0; k < survivors.size(); ++k) {
        entries[survivors[k]] = quantized[k];
    }
    return DenseMatrix(spec.rows, spec.cols, std::move(entries));
}

CsrMatrix to_csr(const DenseMatrix& m) {
    CsrMatrix out;
    out.cols = m.cols();
    out.row_ptr.reserve(m.rows());
    for (std::uint32_t r = 0; r < m.rows(); ++r) {
        for (std::uint32_t c = 0; c < m.cols(); ++c) {
            const Weight w = m.at(r, c);
            if (w != 0) {
                out.values.push_back(w);
                out.col_index.push_back(c);
            }
        }
        out.row_ptr.push_back(static_cast<std::uint32_t>(out.values.size()));
    }
    return out;
}

DenseMatrix from_csr(const CsrMatrix& m) {
    if (m.row_ptr.empty() || m.cols == 0) {
        throw DegenerateInputError("from_csr: matrix must have at least one row and column");
    }
    if (m.values.size() != m.col_index.size()) {
        throw FormatError("from_csr: values and col_index lengths differ");
    }
    if (m.row_ptr.back() != m.values.size()) {
        throw FormatError("from_csr: row_ptr does not end at the nonzero count");
    }
    DenseMatrix out(m.rows(), m.cols);
    std::uint32_t start = 0;
    for (std::uint32_t r = 0; r < m.rows(); ++r) {
        const std::uint32_t end = m.row_ptr[r];
        if (end < start) {
            throw FormatError("from_csr: row_ptr is not non-decreasing");
        }
        for (std::uint32_t k = start; k < end; ++k) {
            if (m.col_index[k] >= m.cols) {
                throw FormatError("from_csr: column index out of range");
            }
            out.set(r, m.col_index[k], m.values[k]);
        }
        start = end;
    }
    return out;
}

std::uint64_t csr_storage_size(const CsrMatrix& m) {
    return 2 * static_cast<std::uint64_t>(m.values.size()) + m.rows();
}

} // namespace csem
