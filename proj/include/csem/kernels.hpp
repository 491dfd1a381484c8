#pragma once

#include <cstdint>
#include <vector>

#include "csem/codec.hpp"
#include "csem/matrix.hpp"

namespace csem {

/// Exact operation counters. One addition is charged for every accumulation,
/// including the first one into the zero-initialized output.
struct OpStats {
    std::uint64_t additions = 0;
    std::uint64_t multiplications = 0;

    bool operator==(const OpStats&) const = default;
};

struct MultiplyResult {
    std::vector<std::int64_t> y;
    OpStats ops;
};

/// Nested-loop baseline that skips zero entries: one multiplication and one
/// addition per nonzero. Arithmetic is overflow-checked (OverflowError).
MultiplyResult mm_dense(const DenseMatrix& m, const std::vector<Weight>& v);

/// Walks the CSR arrays directly; additions = multiplications = E.
MultiplyResult mm_csr(const CsrMatrix& m, const std::vector<Weight>& v);

/// Executes straight off the six arrays in three phases:
///   1. products  P[k] = weights[k] * v[column(k)]      (|weights| mults)
///   2. CSE       s = P[i] + P[j], then y[r] += s per occurrence row
///   3. singles   y[r] += P[singles[idx]]
/// Additions come to E - gain, multiplications to |weights|.
MultiplyResult mm_compressed(const CompressedMatrix& c, const std::vector<Weight>& v);

} // namespace csem
