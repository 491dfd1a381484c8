#include "csem/codec.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

namespace csem {

namespace {

/// Column of a weight slot, resolved by walking the wp end pointers.
std::vector<std::uint32_t> column_of_slot(const CompressedMatrix& c) {
    std::vector<std::uint32_t> col(c.weights.size());
    std::uint32_t start = 0;
    for (std::uint32_t j = 0; j < c.cols; ++j) {
        const std::uint32_t end = c.wp[j];
        for (std::uint32_t k = start; k < end; ++k) {
            col[k] = j;
        }
        start = end;
    }
    return col;
}

struct RecordView {
    std::uint32_t widx_i;
    std::uint32_t widx_j;
    const std::uint32_t* rows;
    std::uint32_t z;
};

/// Iterates CSE records [cp[k-1], cp[k]); assumes validated boundaries.
template <typename Fn>
void for_each_record(const CompressedMatrix& c, Fn&& fn) {
    std::uint32_t start = 0;
    for (std::uint32_t k = 0; k < c.n_cse(); ++k) {
        const std::uint32_t end = c.cp[k];
        fn(RecordView{c.cse[start], c.cse[start + 1], c.cse.data() + start + 2,
                      end - start - 2});
        start = end;
    }
}

} // namespace

void validate(const CompressedMatrix& c) {
    if (c.rows == 0 || c.cols == 0) {
        throw FormatError("compressed matrix: rows and cols must be >= 1");
    }
    if (c.wp.size() != c.cols) {
        throw FormatError("compressed matrix: wp length must equal cols");
    }
    if (c.sp.size() != c.rows) {
        throw FormatError("compressed matrix: sp length must equal rows");
    }
    if (!std::is_sorted(c.wp.begin(), c.wp.end()) ||
        !std::is_sorted(c.cp.begin(), c.cp.end()) ||
        !std::is_sorted(c.sp.begin(), c.sp.end())) {
        throw FormatError("compressed matrix: pointer arrays must be non-decreasing");
    }
    if (c.wp.back() != c.weights.size()) {
        throw FormatError("compressed matrix: wp does not end at the weights length");
    }
    if (c.sp.back() != c.singles.size()) {
        throw FormatError("compressed matrix: sp does not end at the singles length");
    }
    if (c.cp.empty()) {
        if (!c.cse.empty()) {
            throw FormatError("compressed matrix: cse entries without cp records");
        }
    } else if (c.cp.back() != c.cse.size()) {
        throw FormatError("compressed matrix: cp does not end at the cse length");
    }

    // weight groups: nonzero and distinct within each column
    std::uint32_t start = 0;
    std::vector<Weight> group;
    for (std::uint32_t j = 0; j < c.cols; ++j) {
        const std::uint32_t end = c.wp[j];
        group.assign(c.weights.begin() + start, c.weights.begin() + end);
        std::sort(group.begin(), group.end());
        for (std::size_t k = 0; k < group.size(); ++k) {
            if (group[k] == 0) {
                throw FormatError("compressed matrix: zero weight in a column group");
            }
            if (k > 0 && group[k] == group[k - 1]) {
                throw FormatError("compressed matrix: duplicate weight in a column group");
            }
        }
        start = end;
    }

    const std::vector<std::uint32_t> slot_col = column_of_slot(c);
    std::uint32_t rec_start = 0;
    for (std::uint32_t k = 0; k < c.n_cse(); ++k) {
        const std::uint32_t rec_end = c.cp[k];
        if (rec_end - rec_start < 4) {
            throw FormatError("compressed matrix: CSE record shorter than four entries");
        }
        const std::uint32_t wi = c.cse[rec_start];
        const std::uint32_t wj = c.cse[rec_start + 1];
        if (wi >= c.weights.size() || wj >= c.weights.size()) {
            throw FormatError("compressed matrix: CSE weight index out of range");
        }
        if (slot_col[wi] == slot_col[wj]) {
            throw FormatError("compressed matrix: CSE record references a single column");
        }
        for (std::uint32_t p = rec_start + 2; p < rec_end; ++p) {
            if (c.cse[p] >= c.rows) {
                throw FormatError("compressed matrix: CSE occurrence row out of range");
            }
        }
        rec_start = rec_end;
    }

    for (const std::uint32_t idx : c.singles) {
        if (idx >= c.weights.size()) {
            throw FormatError("compressed matrix: singles weight index out of range");
        }
    }
}

CompressedMatrix encode(const DenseMatrix& remainder, const CseSet& commons) {
    const std::uint32_t rows = remainder.rows();
    const std::uint32_t cols = remainder.cols();

    // Normalize term orientation and check that the set and the remainder
    // cover disjoint cells holding the claimed weights.
    struct NormTerm {
        std::uint32_t col_i, col_j;
        Weight w_i, w_j;
        const std::vector<std::uint32_t>* occ_rows;
    };
    std::vector<NormTerm> terms;
    terms.reserve(commons.terms.size());
    std::vector<std::uint8_t> claimed(static_cast<std::size_t>(rows) * cols, 0);
    for (const auto& t : commons.terms) {
        if (t.col_i == t.col_j || t.col_i >= cols || t.col_j >= cols) {
            throw ConsistencyError("encode: term columns invalid for the matrix");
        }
        if (t.w_i == 0 || t.w_j == 0) {
            throw ConsistencyError("encode: term weight is zero");
        }
        if (t.occ_rows.size() < 2 ||
            !std::is_sorted(t.occ_rows.begin(), t.occ_rows.end()) ||
            std::adjacent_find(t.occ_rows.begin(), t.occ_rows.end()) != t.occ_rows.end()) {
            throw ConsistencyError("encode: term occurrence rows malformed");
        }
        NormTerm n{t.col_i, t.col_j, t.w_i, t.w_j, &t.occ_rows};
        if (n.col_i > n.col_j) {
            std::swap(n.col_i, n.col_j);
            std::swap(n.w_i, n.w_j);
        }
        for (const std::uint32_t r : t.occ_rows) {
            if (r >= rows) {
                throw ConsistencyError("encode: term occurrence row out of range");
            }
            for (const std::uint32_t col : {n.col_i, n.col_j}) {
                auto& flag = claimed[static_cast<std::size_t>(r) * cols + col];
                if (flag) {
                    throw ConsistencyError("encode: two terms claim one cell");
                }
                if (remainder.at(r, col) != 0) {
                    throw ConsistencyError("encode: term cell still nonzero in the remainder");
                }
                flag = 1;
            }
        }
        terms.push_back(n);
    }

    // Per-column distinct values of the original matrix: remainder plus the
    // cells the terms claim.
    std::vector<std::vector<Weight>> col_values(cols);
    for (std::uint32_t r = 0; r < rows; ++r) {
        for (std::uint32_t col = 0; col < cols; ++col) {
            const Weight w = remainder.at(r, col);
            if (w != 0) {
                col_values[col].push_back(w);
            }
        }
    }
    for (const auto& t : terms) {
        col_values[t.col_i].push_back(t.w_i);
        col_values[t.col_j].push_back(t.w_j);
    }

    CompressedMatrix c;
    c.rows = rows;
    c.cols = cols;
    c.wp.reserve(cols);
    std::vector<std::uint32_t> col_start(cols);
    for (std::uint32_t col = 0; col < cols; ++col) {
        auto& vals = col_values[col];
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        col_start[col] = static_cast<std::uint32_t>(c.weights.size());
        c.weights.insert(c.weights.end(), vals.begin(), vals.end());
        c.wp.push_back(static_cast<std::uint32_t>(c.weights.size()));
    }

    auto weight_index = [&](std::uint32_t col, Weight w) -> std::uint32_t {
        const auto& vals = col_values[col];
        const auto it = std::lower_bound(vals.begin(), vals.end(), w);
        if (it == vals.end() || *it != w) {
            throw ConsistencyError("encode: weight missing from its column group");
        }
        return col_start[col] + static_cast<std::uint32_t>(it - vals.begin());
    };

    std::sort(terms.begin(), terms.end(), [](const NormTerm& a, const NormTerm& b) {
        return std::tie(a.col_i, a.col_j, a.w_i, a.w_j, a.occ_rows->front()) <
               std::tie(b.col_i, b.col_j, b.w_i, b.w_j, b.occ_rows->front());
    });
    for (const auto& t : terms) {
        c.cse.push_back(weight_index(t.col_i, t.w_i));
        c.cse.push_back(weight_index(t.col_j, t.w_j));
        c.cse.insert(c.cse.end(), t.occ_rows->begin(), t.occ_rows->end());
        c.cp.push_back(static_cast<std::uint32_t>(c.cse.size()));
    }

    c.sp.reserve(rows);
    for (std::uint32_t r = 0; r < rows; ++r) {
        for (std::uint32_t col = 0; col < cols; ++col) {
            const Weight w = remainder.at(r, col);
            if (w != 0) {
                c.singles.push_back(weight_index(col, w));
            }
        }
        c.sp.push_back(static_cast<std::uint32_t>(c.singles.size()));
    }
    return c;
}

DenseMatrix decode(const CompressedMatrix& c) {
    validate(c);
    const std::vector<std::uint32_t> slot_col = column_of_slot(c);
    DenseMatrix out(c.rows, c.cols);
    std::vector<std::uint8_t> written(static_cast<std::size_t>(c.rows) * c.cols, 0);

    auto write_cell = [&](std::uint32_t r, std::uint32_t col, Weight w) {
        auto& flag = written[static_cast<std::size_t>(r) * c.cols + col];
        if (flag) {
            throw ConsistencyError("decode: two writes to one cell");
        }
        flag = 1;
        out.set(r, col, w);
    };

    for_each_record(c, [&](const RecordView& rec) {
        const std::uint32_t col_i = slot_col[rec.widx_i];
        const std::uint32_t col_j = slot_col[rec.widx_j];
        for (std::uint32_t k = 0; k < rec.z; ++k) {
            const std::uint32_t r = rec.rows[k];
            write_cell(r, col_i, c.weights[rec.widx_i]);
            write_cell(r, col_j, c.weights[rec.widx_j]);
        }
    });

    std::uint32_t start = 0;
    for (std::uint32_t r = 0; r < c.rows; ++r) {
        const std::uint32_t end = c.sp[r];
        for (std::uint32_t k = start; k < end; ++k) {
            const std::uint32_t idx = c.singles[k];
            write_cell(r, slot_col[idx], c.weights[idx]);
        }
        start = end;
    }
    return out;
}

StorageReport storage_report(const CompressedMatrix& c, std::uint64_t e_original) {
    StorageReport rep;
    rep.s_weights = c.weights.size() + c.wp.size();
    rep.s_cse = c.cse.size() + c.cp.size();
    rep.s_singles = c.singles.size() + c.sp.size();
    rep.s_total = rep.s_weights + rep.s_cse + rep.s_singles;
    rep.s_csr = 2 * e_original + c.rows;
    rep.n_cse = c.n_cse();
    rep.gain = 0;
    for_each_record(c, [&](const RecordView& rec) { rep.gain += rec.z - 1; });
    return rep;
}

bool crossover_predicate(double alpha, std::uint32_t unique_values, std::uint32_t rows,
                         std::uint32_t cols, std::uint64_t n_cse, std::uint64_t gain) {
    if (rows < 1 || cols < 1) {
        throw DegenerateInputError("crossover_predicate: rows and cols must be >= 1");
    }
    const double cells = static_cast<double>(rows) * static_cast<double>(cols);
    const double threshold = (static_cast<double>(cols) * (unique_values + 1.0) +
                              2.0 * static_cast<double>(n_cse) - static_cast<double>(gain)) /
                             cells;
    return alpha > threshold;
}

namespace {

constexpr char kMagic[4] = {'C', 'S', 'E', 'M'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::ostream& out, std::uint16_t v) {
    const char bytes[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
    out.write(bytes, 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                           static_cast<char>((v >> 16) & 0xff),
                           static_cast<char>((v >> 24) & 0xff)};
    out.write(bytes, 4);
}

std::uint16_t get_u16(std::istream& in) {
    unsigned char b[2];
    if (!in.read(reinterpret_cast<char*>(b), 2)) {
        throw FormatError("deserialize: truncated stream");
    }
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) {
        throw FormatError("deserialize: truncated stream");
    }
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_array_u32(std::ostream& out, const std::vector<std::uint32_t>& a) {
    put_u32(out, static_cast<std::uint32_t>(a.size()));
    for (const std::uint32_t v : a) {
        put_u32(out, v);
    }
}

/// Reads count then elements, growing as bytes actually arrive so a
/// corrupted count fails with a truncation error instead of a huge
/// allocation.
std::vector<std::uint32_t> get_array_u32(std::istream& in) {
    const std::uint32_t count = get_u32(in);
    std::vector<std::uint32_t> a;
    for (std::uint32_t k = 0; k < count; ++k) {
        a.push_back(get_u32(in));
    }
    return a;
}

} // namespace

void serialize(const CompressedMatrix& c, std::ostream& out) {
    out.write(kMagic, 4);
    put_u16(out, kVersion);
    put_u32(out, c.rows);
    put_u32(out, c.cols);
    put_u32(out, static_cast<std::uint32_t>(c.weights.size()));
    for (const Weight w : c.weights) {
        put_u32(out, std::bit_cast<std::uint32_t>(w));
    }
    put_array_u32(out, c.wp);
    put_array_u32(out, c.cse);
    put_array_u32(out, c.cp);
    put_array_u32(out, c.singles);
    put_array_u32(out, c.sp);
    if (!out) {
        throw Error("serialize: write failed");
    }
}

CompressedMatrix deserialize(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4)) {
        throw FormatError("deserialize: truncated stream");
    }
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw FormatError("deserialize: bad magic, not a CSEM container");
    }
    const std::uint16_t version = get_u16(in);
    if (version != kVersion) {
        throw FormatError("deserialize: unsupported container version");
    }
    CompressedMatrix c;
    c.rows = get_u32(in);
    c.cols = get_u32(in);
    const std::uint32_t n_weights = get_u32(in);
    c.weights.reserve(std::min<std::uint32_t>(n_weights, 1u << 20));
    for (std::uint32_t k = 0; k < n_weights; ++k) {
        c.weights.push_back(std::bit_cast<Weight>(get_u32(in)));
    }
    c.wp = get_array_u32(in);
    c.cse = get_array_u32(in);
    c.cp = get_array_u32(in);
    c.singles = get_array_u32(in);
    c.sp = get_array_u32(in);
    validate(c);
    return c;
}

std::vector<std::uint8_t> serialize_bytes(const CompressedMatrix& c) {
    std::ostringstream out(std::ios::binary);
    serialize(c, out);
    const std::string s = out.str();
    return {s.begin(), s.end()};
}

CompressedMatrix deserialize_bytes(const std::vector<std::uint8_t>& bytes) {
    std::istringstream in(std::string(bytes.begin(), bytes.end()), std::ios::binary);
    return deserialize(in);
}

void save_file(const CompressedMatrix& c, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("save_file: cannot open " + path);
    }
    serialize(c, out);
}

CompressedMatrix load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("load_file: cannot open " + path);
    }
    return deserialize(in);
}

nlohmann::json to_json(const CompressedMatrix& c) {
    return nlohmann::json{{"rows", c.rows},       {"cols", c.cols}, {"weights", c.weights},
                          {"wp", c.wp},           {"cse", c.cse},   {"cp", c.cp},
                          {"singles", c.singles}, {"sp", c.sp}};
}

} // namespace csem
