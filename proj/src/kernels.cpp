#include "csem/kernels.hpp"

namespace csem {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) {
        throw OverflowError("multiply kernel: signed accumulator overflow");
    }
    return r;
}

} // namespace

MultiplyResult mm_dense(const DenseMatrix& m, const std::vector<Weight>& v) {
    if (v.size() != m.cols()) {
        throw DimensionError("mm_dense: vector length must equal cols");
    }
    MultiplyResult res;
    res.y.assign(m.rows(), 0);
    for (std::uint32_t r = 0; r < m.rows(); ++r) {
        for (std::uint32_t c = 0; c < m.cols(); ++c) {
            const Weight w = m.at(r, c);
            if (w == 0) {
                continue;
            }
            const std::int64_t p = static_cast<std::int64_t>(w) * v[c];
            res.y[r] = checked_add(res.y[r], p);
            ++res.ops.multiplications;
            ++res.ops.additions;
        }
    }
    return res;
}

MultiplyResult mm_csr(const CsrMatrix& m, const std::vector<Weight>& v) {
    if (v.size() != m.cols) {
        throw DimensionError("mm_csr: vector length must equal cols");
    }
    MultiplyResult res;
    res.y.assign(m.rows(), 0);
    std::uint32_t start = 0;
    for (std::uint32_t r = 0; r < m.rows(); ++r) {
        const std::uint32_t end = m.row_ptr[r];
        for (std::uint32_t k = start; k < end; ++k) {
            if (m.col_index[k] >= m.cols) {
                throw FormatError("mm_csr: column index out of range");
            }
            const std::int64_t p = static_cast<std::int64_t>(m.values[k]) * v[m.col_index[k]];
            res.y[r] = checked_add(res.y[r], p);
            ++res.ops.multiplications;
            ++res.ops.additions;
        }
        start = end;
    }
    return res;
}

MultiplyResult mm_compressed(const CompressedMatrix& c, const std::vector<Weight>& v) {
    if (v.size() != c.cols) {
        throw DimensionError("mm_compressed: vector length must equal cols");
    }
    MultiplyResult res;
    res.y.assign(c.rows, 0);

    // phase 1: one product per weight slot
    std::vector<std::int64_t> products(c.weights.size());
    std::uint32_t start = 0;
    for (std::uint32_t j = 0; j < c.cols; ++j) {
        const std::uint32_t end = c.wp[j];
        if (end < start || end > c.weights.size()) {
            throw FormatError("mm_compressed: wp out of order");
        }
        for (std::uint32_t k = start; k < end; ++k) {
            products[k] = static_cast<std::int64_t>(c.weights[k]) * v[j];
            ++res.ops.multiplications;
        }
        start = end;
    }

    // phase 2: each record adds its two products once, then fans out
    std::uint32_t rec_start = 0;
    for (std::uint32_t k = 0; k < c.n_cse(); ++k) {
        const std::uint32_t rec_end = c.cp[k];
        if (rec_end < rec_start + 4 || rec_end > c.cse.size()) {
            throw FormatError("mm_compressed: malformed CSE record");
        }
        const std::uint32_t wi = c.cse[rec_start];
        const std::uint32_t wj = c.cse[rec_start + 1];
        if (wi >= products.size() || wj >= products.size()) {
            throw FormatError("mm_compressed: CSE weight index out of range");
        }
        const std::int64_t shared = checked_add(products[wi], products[wj]);
        ++res.ops.additions;
        for (std::uint32_t p = rec_start + 2; p < rec_end; ++p) {
            const std::uint32_t r = c.cse[p];
            if (r >= c.rows) {
                throw FormatError("mm_compressed: CSE occurrence row out of range");
            }
            res.y[r] = checked_add(res.y[r], shared);
            ++res.ops.additions;
        }
        rec_start = rec_end;
    }

    // phase 3: remainder singles
    std::uint32_t s_start = 0;
    for (std::uint32_t r = 0; r < c.rows; ++r) {
        const std::uint32_t s_end = c.sp[r];
        if (s_end < s_start || s_end > c.singles.size()) {
            throw FormatError("mm_compressed: sp out of order");
        }
        for (std::uint32_t k = s_start; k < s_end; ++k) {
            const std::uint32_t idx = c.singles[k];
            if (idx >= products.size()) {
                throw FormatError("mm_compressed: singles weight index out of range");
            }
            res.y[r] = checked_add(res.y[r], products[idx]);
            ++res.ops.additions;
        }
        s_start = s_end;
    }
    return res;
}

} // namespace csem
