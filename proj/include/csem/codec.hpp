#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "csem/extract.hpp"
#include "csem/matrix.hpp"

namespace csem {

/// The six-array compressed form.
///
/// weights  per-column distinct nonzero values of the original matrix,
///          columns in ascending order, each column's group sorted ascending
/// wp       length N; wp[j] is where column j+1's group starts, so column j
///          occupies [j == 0 ? 0 : wp[j-1], wp[j]) and wp[N-1] == |weights|
/// cse      concatenated records [widx_i, widx_j, r1, ..., rz], one per term
/// cp       length |CSE|; cp[k] is where record k+1 starts, cp back == |cse|
/// singles  weight indices of the remainder matrix, row-major
/// sp       length M; sp[r] is the cumulative singles count of rows 0..r
///
/// All pointer arrays follow the "last element holds the length" convention;
/// there is no leading zero entry.
struct CompressedMatrix {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<Weight> weights;
    std::vector<std::uint32_t> wp;
    std::vector<std::uint32_t> cse;
    std::vector<std::uint32_t> cp;
    std::vector<std::uint32_t> singles;
    std::vector<std::uint32_t> sp;

    std::uint32_t n_cse() const { return static_cast<std::uint32_t>(cp.size()); }

    bool operator==(const CompressedMatrix&) const = default;
};

/// Element totals of the three array pairs plus the CSR reference size.
struct StorageReport {
    std::uint64_t s_weights = 0;  // |weights| + |wp|
    std::uint64_t s_cse = 0;      // |cse| + |cp|  ==  gain + 4*n_cse
    std::uint64_t s_singles = 0;  // |singles| + |sp|  ==  E - 2*(gain + n_cse) + M
    std::uint64_t s_total = 0;
    std::uint64_t s_csr = 0;      // 2*E + M
    std::uint64_t gain = 0;       // recovered from the cse/cp arrays
    std::uint32_t n_cse = 0;
};

/// Packs a remainder matrix and the extracted terms into the six arrays.
/// The remainder and the set must cover disjoint cells; violations raise
/// ConsistencyError.
CompressedMatrix encode(const DenseMatrix& remainder, const CseSet& commons);

/// Reconstructs the original dense matrix. Raises FormatError for malformed
/// arrays and ConsistencyError when two writes land on one cell.
DenseMatrix decode(const CompressedMatrix& c);

/// Checks every structural invariant of the six arrays; throws FormatError.
void validate(const CompressedMatrix& c);

/// `e_original` is the nonzero count of the matrix the compressed form
/// represents (recoverable as |singles| + sum of record occurrence counts).
StorageReport storage_report(const CompressedMatrix& c, std::uint64_t e_original);

/// True iff alpha > (U+1)/M + (2*n_cse - gain)/(M*N), the regime where the
/// six-array form beats CSR under the full-alphabet-per-column worst case.
/// Strict comparison, evaluated in ratio space.
bool crossover_predicate(double alpha, std::uint32_t unique_values, std::uint32_t rows,
                         std::uint32_t cols, std::uint64_t n_cse, std::uint64_t gain);

/// Binary container, all little-endian: magic "CSEM", u16 version (1),
/// u32 rows, u32 cols, then the six arrays in order weights, wp, cse, cp,
/// singles, sp, each as a u32 element count followed by 32-bit elements
/// (weights signed two's-complement, the rest unsigned).
void serialize(const CompressedMatrix& c, std::ostream& out);

/// Inverse of serialize. Throws FormatError on magic/version mismatch or a
/// truncated stream and re-validates every invariant; never returns a
/// partially filled object.
CompressedMatrix deserialize(std::istream& in);

std::vector<std::uint8_t> serialize_bytes(const CompressedMatrix& c);
CompressedMatrix deserialize_bytes(const std::vector<std::uint8_t>& bytes);

void save_file(const CompressedMatrix& c, const std::string& path);
CompressedMatrix load_file(const std::string& path);

/// Debug export mirroring the container: rows, cols and the six arrays by name.
nlohmann::json to_json(const CompressedMatrix& c);

} // namespace csem
