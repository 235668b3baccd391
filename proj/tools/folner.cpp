#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "folner/codec.hpp"
#include "folner/dynamics.hpp"
#include "folner/experiment.hpp"
#include "folner/io.hpp"
#include "folner/monotiling.hpp"

namespace {

using namespace folner;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitResource = 4;

std::vector<int64_t> parse_list(const std::string& text) {
    std::vector<int64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        int64_t v = 0;
        if (item.empty() || !parse_i64(item, v) || v < 1)
            throw RangeError("list entries must be positive integers");
        out.push_back(v);
    }
    if (out.empty()) throw RangeError("empty list");
    return out;
}

bool known_tiling_token(const std::string& t) {
    return t == "zd-cubes" || t == "heis3" || t == "utd" || t.rfind("utd:p=", 0) == 0;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw UnknownFormat("cannot open input file: " + path);
    return is;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw UnknownFormat("cannot open output file: " + path);
    return os;
}

int run_verify(const GroupDescriptor& G, Monotiling& M, int64_t n_max) {
    auto report = [&](const char* name, bool pass) {
        std::cout << (pass ? "ok   " : "FAIL ") << name << "\n";
        return pass;
    };

    // partition: probe window elements factor through tile times center
    {
        bool pass = true;
        for (int64_t n = 1; n <= n_max && pass; ++n) {
            auto probe = M.tile(2 * n);
            std::size_t step = std::max<std::size_t>(1, probe->size() / 4096);
            for (std::size_t i = 0; i < probe->size(); i += step) {
                const auto& x = probe->elems[i];
                auto [f, z] = M.decompose(n, x);
                if (!M.tile_contains(n, f) || !M.is_center(n, z) ||
                    !(G.index_of(G.multiply(f, z)) == G.index_of(x))) {
                    pass = false;
                    break;
                }
            }
        }
        if (!report("partition", pass)) return kExitData;
    }
    // symmetry of center sets
    {
        bool pass = true;
        for (int64_t n = 1; n <= n_max && pass; ++n) pass = M.is_symmetric_centers(n);
        if (!report("symmetry", pass)) return kExitData;
    }
    // density: center count times tile size equals window size when k divides n
    {
        bool pass = true;
        for (int64_t k = 1; k <= std::min<int64_t>(4, n_max) && pass; ++k) {
            int64_t n = (n_max / k) * k;
            if (n < k) continue;
            pass = M.center_count_in_tile(k, n) * M.tile_size(k) == M.tile_size(n);
        }
        if (!report("density", pass)) return kExitData;
    }
    // defect shrinks as the windows grow
    {
        bool pass = true;
        if (n_max >= 2) {
            const WindowSet& K = *M.tile(2);
            double late = M.folner_defect(K, n_max);
            double early = M.folner_defect(K, std::max<int64_t>(1, n_max / 2));
            pass = late <= early + 1e-12;
        }
        if (!report("defect", pass)) return kExitData;
    }
    // temperedness of the extracted subsequence
    {
        bool pass = true;
        std::size_t len = n_max >= 4 ? 3 : 2;
        auto ns = M.tempered_subsequence(len);
        for (std::size_t i = 2; i <= ns.size(); ++i)
            if (M.temperedness_ratio(ns, i) > 2.0 + 1e-9) pass = false;
        if (!report("temperedness", pass)) return kExitData;
    }
    return kExitOk;
}

int run_encode(const std::string& input, int64_t k, const std::string& tiling,
               const std::string& out, int64_t budget) {
    auto is = open_input(input);
    StoredWord sw = read_word(is);
    GroupDescriptor G = parse_group(sw.group_token);
    Monotiling M = make_monotiling(G, tiling, budget);
    if (!sw.tile_support)
        throw RangeError("encoding needs a tile-backed word");
    Word w = materialize(sw, G, M);
    BitString bits = encode_freq(w, M, k, sw.tile_index);
    auto os = open_output(out);
    write_program(os, bits);
    std::cout << "bits=" << bits.size() << " sites=" << w.size() << "\n";
    return kExitOk;
}

int run_decode(const std::string& input, const std::string& group, Monotiling& M,
               const SamplerModel& model, const std::string& out) {
    auto is = open_input(input);
    BitString bits = read_program(is);
    Word w = decode_freq(bits, M, model.alphabet());
    auto [k, t] = peek_freq_header(bits);
    auto os = open_output(out);
    write_word(os, to_stored_tile(group, t, w));
    std::cout << "sites=" << w.size() << " tile=" << t << "\n";
    return kExitOk;
}

int run_brudno_cmd(const ExperimentConfig& cfg, const std::string& out) {
    if (out.empty()) {
        run_brudno(cfg, &std::cout);
    } else {
        auto os = open_output(out);
        run_brudno(cfg, &os);
    }
    return kExitOk;
}

int run_tempered(Monotiling& M, int64_t count) {
    auto ns = M.tempered_subsequence(std::size_t(count));
    for (std::size_t i = 0; i < ns.size(); ++i) {
        double ratio = M.temperedness_ratio(ns, i + 1);
        std::cout << i + 1 << " " << ns[i] << " " << ratio << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Folner monotilings, tile-frequency compression, entropy experiments"};
    app.require_subcommand(1);

    std::string group = "zd:1";
    std::string tiling = "zd-cubes";
    std::string model = "bernoulli:0.5,0.5";
    std::string klist = "2";
    std::string nlist = "8";
    std::string input;
    std::string out;
    int64_t kval = 2;
    int64_t nval = 8;
    uint64_t samples = 5;
    uint64_t seed = 0;
    int64_t budget = 10'000'000;

    auto* verify = app.add_subcommand("verify", "run tiling invariant checks");
    verify->add_option("--group", group, "group token");
    verify->add_option("--tiling", tiling, "tiling token");
    verify->add_option("--n", nval, "largest tile index to check");
    verify->add_option("--budget", budget, "enumeration budget");

    auto* encode = app.add_subcommand("encode", "compress a word file");
    encode->add_option("input", input, "word file")->required();
    encode->add_option("--k", kval, "inner tile index");
    encode->add_option("--tiling", tiling, "tiling token");
    encode->add_option("--out", out, "output bitstream path")->required();
    encode->add_option("--budget", budget, "enumeration budget");

    auto* decode = app.add_subcommand("decode", "decompress a bitstream file");
    decode->add_option("input", input, "bitstream file")->required();
    decode->add_option("--group", group, "group token");
    decode->add_option("--tiling", tiling, "tiling token");
    decode->add_option("--model", model, "model token fixing the alphabet");
    decode->add_option("--out", out, "output word path")->required();
    decode->add_option("--budget", budget, "enumeration budget");

    auto* brudno = app.add_subcommand("brudno", "compression-rate experiment");
    brudno->add_option("--group", group, "group token");
    brudno->add_option("--tiling", tiling, "tiling token");
    brudno->add_option("--model", model, "sampler model token");
    brudno->add_option("--k", klist, "comma list of inner tile indices");
    brudno->add_option("--n", nlist, "comma list of window indices");
    brudno->add_option("--samples", samples, "samples per n");
    brudno->add_option("--seed", seed, "experiment seed");
    brudno->add_option("--out", out, "CSV path, stdout when omitted");
    brudno->add_option("--budget", budget, "enumeration budget");

    auto* tempered = app.add_subcommand("tempered", "print a tempered subsequence");
    tempered->add_option("--group", group, "group token");
    tempered->add_option("--tiling", tiling, "tiling token");
    tempered->add_option("--n", nval, "how many indices to print");
    tempered->add_option("--budget", budget, "enumeration budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    bool configured = false;
    try {
        if (verify->parsed()) {
            if (nval < 1) throw RangeError("--n must be positive");
            GroupDescriptor G = parse_group(group);
            Monotiling M = make_monotiling(G, tiling, budget);
            configured = true;
            return run_verify(G, M, nval);
        }
        if (encode->parsed()) {
            if (kval < 1) throw RangeError("--k must be positive");
            if (!known_tiling_token(tiling)) throw RangeError("unknown tiling token: " + tiling);
            configured = true;
            return run_encode(input, kval, tiling, out, budget);
        }
        if (decode->parsed()) {
            GroupDescriptor G = parse_group(group);
            Monotiling M = make_monotiling(G, tiling, budget);
            SamplerModel sm = parse_model(model);
            configured = true;
            return run_decode(input, group, M, sm, out);
        }
        if (brudno->parsed()) {
            ExperimentConfig cfg;
            cfg.group = group;
            cfg.tiling = tiling;
            cfg.model = model;
            cfg.ks = parse_list(klist);
            cfg.ns = parse_list(nlist);
            cfg.samples = samples;
            cfg.seed = seed;
            cfg.budget = budget;
            if (cfg.samples < 1) throw RangeError("--samples must be positive");
            GroupDescriptor G = parse_group(cfg.group);
            make_monotiling(G, cfg.tiling, cfg.budget);
            parse_model(cfg.model);
            configured = true;
            return run_brudno_cmd(cfg, out);
        }
        if (tempered->parsed()) {
            if (nval < 1) throw RangeError("--n must be positive");
            GroupDescriptor G = parse_group(group);
            Monotiling M = make_monotiling(G, tiling, budget);
            configured = true;
            return run_tempered(M, nval);
        }
    } catch (const ResourceLimit& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return kExitResource;
    } catch (const SearchBudgetExceeded& e) {
        std::cerr << "search budget exceeded: " << e.what() << "\n";
        return kExitResource;
    } catch (const Overflow& e) {
        std::cerr << "overflow: " << e.what() << "\n";
        return kExitResource;
    } catch (const UnknownFormat& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        if (!configured) {
            std::cerr << "usage error: " << e.what() << "\n";
            return kExitUsage;
        }
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
