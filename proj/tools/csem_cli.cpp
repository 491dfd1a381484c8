// csem: generate, compress and multiply sparse constant matrices from the
// command line. Subcommands: generate, extract, multiply, bench, inspect.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "csem/codec.hpp"
#include "csem/extract.hpp"
#include "csem/kernels.hpp"
#include "csem/matrix.hpp"

using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

bool file_is_container(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw csem::Error("cannot open " + path);
    }
    char magic[4] = {};
    in.read(magic, 4);
    return in && magic[0] == 'C' && magic[1] == 'S' && magic[2] == 'E' && magic[3] == 'M';
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw csem::Error("cannot open " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw csem::FormatError(path + ": invalid JSON (" + e.what() + ")");
    }
    return j;
}

csem::DenseMatrix dense_from_json(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("entries")) {
        throw csem::FormatError(path + ": expected a dense dump with rows/cols/entries");
    }
    return csem::DenseMatrix(j["rows"].get<std::uint32_t>(), j["cols"].get<std::uint32_t>(),
                             j["entries"].get<std::vector<csem::Weight>>());
}

json dense_to_json(const csem::DenseMatrix& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", m.entries()}};
}

/// Accepts either a CSEM container (decoded) or a dense JSON dump.
csem::DenseMatrix load_dense_any(const std::string& path) {
    if (file_is_container(path)) {
        return csem::decode(csem::load_file(path));
    }
    return dense_from_json(load_json_file(path), path);
}

std::vector<csem::Weight> load_vector(const std::string& path) {
    const json j = load_json_file(path);
    if (j.is_array()) {
        return j.get<std::vector<csem::Weight>>();
    }
    if (j.is_object() && j.contains("values")) {
        return j["values"].get<std::vector<csem::Weight>>();
    }
    throw csem::FormatError(path + ": expected a JSON array of integers");
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw csem::Error("cannot open " + path + " for writing");
    }
    out << text;
}

struct DimPair {
    std::uint32_t rows;
    std::uint32_t cols;
};

std::vector<DimPair> parse_dims(const std::vector<std::string>& specs) {
    std::vector<DimPair> dims;
    for (const std::string& s : specs) {
        const auto x = s.find('x');
        if (x == std::string::npos) {
            throw CLI::ValidationError("--dims", "expected MxN, got '" + s + "'");
        }
        try {
            dims.push_back({static_cast<std::uint32_t>(std::stoul(s.substr(0, x))),
                            static_cast<std::uint32_t>(std::stoul(s.substr(x + 1)))});
        } catch (const std::exception&) {
            throw CLI::ValidationError("--dims", "expected MxN, got '" + s + "'");
        }
    }
    return dims;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    double alpha = 0.0;
    std::uint32_t unique = 1;
    std::uint64_t seed = 0;
    std::string output;
    std::string format = "csem";
};

int run_generate(const GenerateArgs& a) {
    const csem::GenSpec spec{a.rows, a.cols, a.alpha, a.unique, a.seed};
    const csem::DenseMatrix m = csem::generate_dense(spec);

    if (a.format == "json") {
        write_text_file(a.output, dense_to_json(m).dump());
    } else {
        csem::save_file(csem::encode(m, {}), a.output);
    }
    const json meta{{"rows", a.rows},
                    {"cols", a.cols},
                    {"target_alpha", a.alpha},
                    {"alpha", csem::nonzero_ratio(m)},
                    {"unique_values", a.unique},
                    {"seed", a.seed},
                    {"nonzeros", m.nonzero_count()}};
    write_text_file(a.output + ".meta.json", meta.dump(2) + "\n");

    std::cout << "wrote " << a.output << " (" << a.rows << "x" << a.cols
              << ", E=" << m.nonzero_count() << ")\n";
    return 0;
}

// ----------------------------------------------------------------- extract

struct ExtractArgs {
    std::string input;
    std::string output;
    std::uint32_t iterations = 50;
    std::uint32_t attempts = 200;
    std::uint64_t seed = 0;
    bool early_stop = false;
};

int run_extract(const ExtractArgs& a) {
    csem::DenseMatrix m = [&] {
        if (file_is_container(a.input)) {
            const csem::CompressedMatrix c = csem::load_file(a.input);
            if (c.n_cse() != 0) {
                throw csem::Error(a.input +
                                  " is already compressed (contains CSE records); "
                                  "extraction runs on dense inputs only");
            }
            return csem::decode(c);
        }
        return dense_from_json(load_json_file(a.input), a.input);
    }();

    const std::uint64_t e = m.nonzero_count();
    const auto t_extract = std::chrono::steady_clock::now();
    const csem::ExtractResult res =
        csem::extract(m, {a.iterations, a.attempts, a.seed, a.early_stop});
    const double extract_s = seconds_since(t_extract);

    const auto t_encode = std::chrono::steady_clock::now();
    const csem::CompressedMatrix c = csem::encode(res.remainder, res.commons);
    const double encode_s = seconds_since(t_encode);
    csem::save_file(c, a.output);

    const csem::StorageReport rep = csem::storage_report(c, e);
    const double cells = static_cast<double>(m.rows()) * m.cols();
    std::printf("rows: %u  cols: %u  E: %llu\n", m.rows(), m.cols(),
                static_cast<unsigned long long>(e));
    std::printf("gain: %llu  cse_terms: %u\n", static_cast<unsigned long long>(rep.gain),
                rep.n_cse);
    std::printf("s_total: %llu  s_csr: %llu\n", static_cast<unsigned long long>(rep.s_total),
                static_cast<unsigned long long>(rep.s_csr));
    std::printf("ratio_vs_dense: %.6f  ratio_vs_csr: %.6f\n",
                static_cast<double>(rep.s_total) / cells,
                static_cast<double>(rep.s_total) / static_cast<double>(rep.s_csr));
    std::printf("extract_seconds: %.3f  encode_seconds: %.3f\n", extract_s, encode_s);
    std::printf("wrote %s\n", a.output.c_str());
    return 0;
}

// ---------------------------------------------------------------- multiply

struct MultiplyArgs {
    std::string matrix;
    std::string vector_path;
    std::string kernel = "dense";
    std::string output;
    bool check = false;
};

int run_multiply(const MultiplyArgs& a) {
    const std::vector<csem::Weight> v = load_vector(a.vector_path);

    csem::MultiplyResult res;
    csem::DenseMatrix dense_view(1, 1);
    double multiply_s = 0.0;
    if (a.kernel == "cse") {
        if (!file_is_container(a.matrix)) {
            throw csem::Error("--kernel cse needs a CSEM container, got a dense dump: " +
                              a.matrix);
        }
        const csem::CompressedMatrix c = csem::load_file(a.matrix);
        const auto t0 = std::chrono::steady_clock::now();
        res = csem::mm_compressed(c, v);
        multiply_s = seconds_since(t0);
        dense_view = csem::decode(c);
    } else {
        dense_view = load_dense_any(a.matrix);
        const auto t0 = std::chrono::steady_clock::now();
        res = a.kernel == "csr" ? csem::mm_csr(csem::to_csr(dense_view), v)
                                : csem::mm_dense(dense_view, v);
        multiply_s = seconds_since(t0);
    }

    const json out{{"y", res.y},
                   {"additions", res.ops.additions},
                   {"multiplications", res.ops.multiplications}};
    std::cout << "y: " << json(res.y).dump() << "\n";
    std::cout << "additions: " << res.ops.additions << "\n";
    std::cout << "multiplications: " << res.ops.multiplications << "\n";
    std::printf("multiply_seconds: %.6f\n", multiply_s);
    if (!a.output.empty()) {
        write_text_file(a.output, out.dump(2) + "\n");
    }
    if (a.check) {
        const csem::MultiplyResult ref = csem::mm_dense(dense_view, v);
        if (ref.y == res.y) {
            std::cout << "check: MATCH\n";
        } else {
            std::cout << "check: MISMATCH\n";
            return kExitInternal;
        }
    }
    return 0;
}

// ------------------------------------------------------------------- bench

struct BenchArgs {
    std::vector<std::string> dims{"100x100"};
    std::vector<double> alphas{0.25, 0.5, 0.75};
    std::vector<std::uint32_t> unique{2};
    std::uint32_t iterations = 30;
    std::uint32_t attempts = 100;
    std::uint64_t seed = 1;
    std::uint32_t reps = 1;
    std::string output;
    std::string mode = "grid";
    bool no_timing = false;
};

std::uint64_t cell_seed(const BenchArgs& a, std::size_t d, std::size_t al, std::size_t u,
                        std::uint32_t rep) {
    std::uint64_t s = a.seed;
    for (const std::uint64_t v : {static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(al),
                                  static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(rep)}) {
        s = splitmix64(s ^ v);
    }
    return s;
}

void bench_grid_row(std::ostream& csv, const BenchArgs& a, const DimPair& dim, double alpha,
                    std::uint32_t unique, std::uint32_t rep, std::uint64_t seed) {
    csv << dim.rows << "," << dim.cols << "," << alpha << "," << unique << "," << rep << ","
        << seed << ",";
    try {
        const csem::DenseMatrix m =
            csem::generate_dense({dim.rows, dim.cols, alpha, unique, seed});
        const std::uint64_t e = m.nonzero_count();
        const std::vector<csem::Weight> ones(dim.cols, 1);

        const auto t0 = std::chrono::steady_clock::now();
        const csem::ExtractResult res =
            csem::extract(m, {a.iterations, a.attempts, seed, false});
        const double extract_s = a.no_timing ? 0.0 : seconds_since(t0);

        const csem::CompressedMatrix c = csem::encode(res.remainder, res.commons);
        const csem::StorageReport rep_s = csem::storage_report(c, e);
        const csem::MultiplyResult dense = csem::mm_dense(m, ones);
        const csem::MultiplyResult csr = csem::mm_csr(csem::to_csr(m), ones);
        const csem::MultiplyResult cse = csem::mm_compressed(c, ones);

        const double cells = static_cast<double>(dim.rows) * dim.cols;
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "%llu,%llu,%u,%llu,%llu,%llu,%llu,%llu,%llu,%llu,%llu,%llu,%.6f,%.6f,%.6f",
                      static_cast<unsigned long long>(e),
                      static_cast<unsigned long long>(rep_s.gain), rep_s.n_cse,
                      static_cast<unsigned long long>(dense.ops.additions),
                      static_cast<unsigned long long>(csr.ops.additions),
                      static_cast<unsigned long long>(cse.ops.additions),
                      static_cast<unsigned long long>(cse.ops.multiplications),
                      static_cast<unsigned long long>(rep_s.s_weights),
                      static_cast<unsigned long long>(rep_s.s_cse),
                      static_cast<unsigned long long>(rep_s.s_singles),
                      static_cast<unsigned long long>(rep_s.s_total),
                      static_cast<unsigned long long>(rep_s.s_csr),
                      static_cast<double>(rep_s.s_total) / cells,
                      static_cast<double>(rep_s.s_total) / static_cast<double>(rep_s.s_csr),
                      extract_s);
        csv << buf << ",ok\n";
    } catch (const std::exception& e) {
        csv << ",,,,,,,,,,,,,,,error: " << e.what() << "\n";
    }
}

void bench_sweep_row(std::ostream& csv, const DimPair& dim, double alpha, std::uint32_t unique,
                     std::uint64_t seed) {
    csv << dim.rows << "," << dim.cols << "," << alpha << "," << unique << "," << seed << ",";
    try {
        const csem::DenseMatrix m =
            csem::generate_dense({dim.rows, dim.cols, alpha, unique, seed});
        const std::uint64_t e = m.nonzero_count();
        const csem::CompressedMatrix c = csem::encode(m, {});
        const csem::StorageReport rep = csem::storage_report(c, e);
        const std::uint64_t cells = static_cast<std::uint64_t>(dim.rows) * dim.cols;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%llu,%llu,%llu,%llu,%.6f,%.6f",
                      static_cast<unsigned long long>(e),
                      static_cast<unsigned long long>(rep.s_total),
                      static_cast<unsigned long long>(rep.s_csr),
                      static_cast<unsigned long long>(cells),
                      static_cast<double>(rep.s_total) / static_cast<double>(cells),
                      static_cast<double>(rep.s_total) / static_cast<double>(rep.s_csr));
        csv << buf << ",ok\n";
    } catch (const std::exception& e) {
        csv << ",,,,,,error: " << e.what() << "\n";
    }
}

int run_bench(const BenchArgs& a) {
    const std::vector<DimPair> dims = parse_dims(a.dims);
    std::ostringstream csv;
    if (a.mode == "sweep") {
        // storage-only sweep: no extraction, the compressed form carries no terms
        csv << "rows,cols,alpha,unique_values,seed,E,s_total,s_csr,s_dense,"
               "ratio_vs_dense,ratio_vs_csr,status\n";
        for (std::size_t d = 0; d < dims.size(); ++d) {
            for (std::size_t al = 0; al < a.alphas.size(); ++al) {
                for (std::size_t u = 0; u < a.unique.size(); ++u) {
                    bench_sweep_row(csv, dims[d], a.alphas[al], a.unique[u],
                                    cell_seed(a, d, al, u, 0));
                }
            }
        }
    } else {
        csv << "rows,cols,alpha,unique_values,rep,seed,E,gain,n_cse,adds_baseline,adds_csr,"
               "adds_cse,mults_cse,s_weights,s_cse,s_singles,s_total,s_csr,ratio_vs_dense,"
               "ratio_vs_csr,extract_seconds,status\n";
        for (std::size_t d = 0; d < dims.size(); ++d) {
            for (std::size_t al = 0; al < a.alphas.size(); ++al) {
                for (std::size_t u = 0; u < a.unique.size(); ++u) {
                    for (std::uint32_t rep = 0; rep < a.reps; ++rep) {
                        bench_grid_row(csv, a, dims[d], a.alphas[al], a.unique[u], rep,
                                       cell_seed(a, d, al, u, rep));
                    }
                }
            }
        }
    }
    if (a.output.empty()) {
        std::cout << csv.str();
    } else {
        write_text_file(a.output, csv.str());
        std::cout << "wrote " << a.output << "\n";
    }
    return 0;
}

// ----------------------------------------------------------------- inspect

int run_inspect(const std::string& input, const std::string& output) {
    const csem::CompressedMatrix c = csem::load_file(input);
    const std::string text = csem::to_json(c).dump(2) + "\n";
    if (output.empty()) {
        std::cout << text;
    } else {
        write_text_file(output, text);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CSE-compressed sparse constant matrices: generate, compress, multiply"};
    app.require_subcommand(1);

    GenerateArgs gen;
    CLI::App* cmd_gen = app.add_subcommand("generate", "Generate a reproducible sparse matrix");
    cmd_gen->add_option("-M,--rows", gen.rows, "Row count")->required();
    cmd_gen->add_option("-N,--cols", gen.cols, "Column count")->required();
    cmd_gen->add_option("--alpha", gen.alpha, "Nonzero ratio in (0,1]")->required();
    cmd_gen->add_option("-U,--unique", gen.unique, "Distinct nonzero values")->default_val(1);
    cmd_gen->add_option("--seed", gen.seed, "RNG seed")->default_val(0);
    cmd_gen->add_option("-o,--output", gen.output, "Output path")->required();
    cmd_gen->add_option("--format", gen.format, "Output format")
        ->check(CLI::IsMember({"csem", "json"}))
        ->default_val("csem");

    ExtractArgs ext;
    CLI::App* cmd_ext =
        app.add_subcommand("extract", "Extract two-term subexpressions and compress");
    cmd_ext->add_option("-i,--input", ext.input, "Dense input (CSEM container or JSON dump)")
        ->required();
    cmd_ext->add_option("-o,--output", ext.output, "Compressed output path")->required();
    cmd_ext->add_option("--iterations", ext.iterations, "Search iterations")->default_val(50);
    cmd_ext->add_option("--attempts", ext.attempts, "Swap attempts per iteration")
        ->default_val(200);
    cmd_ext->add_option("--seed", ext.seed, "RNG seed")->default_val(0);
    cmd_ext->add_flag("--early-stop", ext.early_stop, "Stop after a zero-gain iteration");

    MultiplyArgs mul;
    CLI::App* cmd_mul = app.add_subcommand("multiply", "Multiply a matrix by a vector");
    cmd_mul->add_option("-m,--matrix", mul.matrix, "Matrix file")->required();
    cmd_mul->add_option("-v,--vector", mul.vector_path, "Vector file (JSON array)")->required();
    cmd_mul->add_option("--kernel", mul.kernel, "Kernel to run")
        ->check(CLI::IsMember({"dense", "csr", "cse"}))
        ->default_val("dense");
    cmd_mul->add_option("-o,--output", mul.output, "Write result JSON here");
    cmd_mul->add_flag("--check", mul.check, "Cross-validate against the dense kernel");

    BenchArgs bench;
    CLI::App* cmd_bench = app.add_subcommand("bench", "Run an experiment grid, emit CSV");
    cmd_bench->add_option("--dims", bench.dims, "Matrix sizes as MxN")->delimiter(',');
    cmd_bench->add_option("--alphas", bench.alphas, "Nonzero ratios")->delimiter(',');
    cmd_bench->add_option("--unique,-U", bench.unique, "Distinct value counts")->delimiter(',');
    cmd_bench->add_option("--iterations", bench.iterations, "Search iterations")
        ->default_val(30);
    cmd_bench->add_option("--attempts", bench.attempts, "Swap attempts per iteration")
        ->default_val(100);
    cmd_bench->add_option("--seed", bench.seed, "Base seed (per-cell seeds derive from it)")
        ->default_val(1);
    cmd_bench->add_option("--reps", bench.reps, "Repetitions per cell")->default_val(1);
    cmd_bench->add_option("-o,--output", bench.output, "CSV output path (default stdout)");
    cmd_bench->add_option("--mode", bench.mode, "grid: full pipeline; sweep: storage only")
        ->check(CLI::IsMember({"grid", "sweep"}))
        ->default_val("grid");
    cmd_bench->add_flag("--no-timing", bench.no_timing,
                        "Zero the timing column for byte-stable output");

    std::string ins_input, ins_output;
    CLI::App* cmd_ins = app.add_subcommand("inspect", "Dump a CSEM container as JSON");
    cmd_ins->add_option("-i,--input", ins_input, "CSEM container")->required();
    cmd_ins->add_option("-o,--output", ins_output, "Write JSON here (default stdout)");

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(cmd_gen)) {
            return run_generate(gen);
        }
        if (app.got_subcommand(cmd_ext)) {
            return run_extract(ext);
        }
        if (app.got_subcommand(cmd_mul)) {
            return run_multiply(mul);
        }
        if (app.got_subcommand(cmd_bench)) {
            return run_bench(bench);
        }
        if (app.got_subcommand(cmd_ins)) {
            return run_inspect(ins_input, ins_output);
        }
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    } catch (const csem::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
