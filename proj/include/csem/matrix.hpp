#pragma once

#include <cstdint>
#include <vector>

#include "csem/error.hpp"

namespace csem {

/// All matrix entries are signed 32-bit weights. Keeping weights integral
/// makes every kernel-equivalence check exact.
using Weight = std::int32_t;

/// Row-major dense constant matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;

    /// Zero-filled M x N matrix.
    DenseMatrix(std::uint32_t rows, std::uint32_t cols);

    /// Takes ownership of `entries`, which must have rows*cols elements.
    DenseMatrix(std::uint32_t rows, std::uint32_t cols, std::vector<Weight> entries);

    /// Builds from nested row lists; all rows must share one length.
    static DenseMatrix from_rows(const std::vector<std::vector<Weight>>& rows);

    std::uint32_t rows() const { return rows_; }
    std::uint32_t cols() const { return cols_; }

    Weight at(std::uint32_t r, std::uint32_t c) const {
        return entries_[static_cast<std::size_t>(r) * cols_ + c];
    }
    void set(std::uint32_t r, std::uint32_t c, Weight w) {
        entries_[static_cast<std::size_t>(r) * cols_ + c] = w;
    }

    const std::vector<Weight>& entries() const { return entries_; }

    std::uint64_t nonzero_count() const;

    bool operator==(const DenseMatrix&) const = default;

private:
    std::uint32_t rows_ = 0;
    std::uint32_t cols_ = 0;
    std::vector<Weight> entries_;
};

/// CSR with the cumulative row-count convention: row_ptr has one entry per
/// row and row_ptr[r] is the number of nonzeros in rows 0..r, so the last
/// element equals the nonzero count. Row r occupies
/// [r == 0 ? 0 : row_ptr[r-1], row_ptr[r]) of values/col_index.
struct CsrMatrix {
    std::uint32_t cols = 0;
    std::vector<Weight> values;
    std::vector<std::uint32_t> col_index;
    std::vector<std::uint32_t> row_ptr;

    std::uint32_t rows() const { return static_cast<std::uint32_t>(row_ptr.size()); }

    bool operator==(const CsrMatrix&) const = default;
};

/// Recipe for a reproducible experiment matrix: random weights, magnitude
/// pruning down to `target_alpha`, then linear quantization to at most
/// `unique_values` distinct nonzero levels.
struct GenSpec {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    double target_alpha = 1.0;   // nonzero ratio in (0, 1]
    std::uint32_t unique_values = 1;
    std::uint64_t seed = 0;
};

/// Deterministically generates a sparse integer matrix per `spec`:
/// exactly round(alpha*M*N) entries survive pruning (ties at the magnitude
/// threshold keep the earlier row-major position) and surviving values are
/// quantized to at most U distinct nonzero levels.
/// Throws DegenerateInputError when the spec is invalid or would produce an
/// empty matrix.
DenseMatrix generate_dense(const GenSpec& spec);

/// Nonzero ratio E / (M*N).
double nonzero_ratio(const DenseMatrix& m);

/// Maps each value to the nearest of `levels` equally spaced points spanning
/// [min, max] of the inputs (ties go to the lower level). Levels are rounded
/// to integers; a level that would land on zero is displaced by one
/// quantization step so the output alphabet never contains zero.
std::vector<Weight> quantize_linear(const std::vector<Weight>& values, std::uint32_t levels);

CsrMatrix to_csr(const DenseMatrix& m);
DenseMatrix from_csr(const CsrMatrix& m);

/// Element count of the CSR representation: 2E + M.
std::uint64_t csr_storage_size(const CsrMatrix& m);

} // namespace csem
