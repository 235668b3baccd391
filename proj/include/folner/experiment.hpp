#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "folner/codec.hpp"
#include "folner/dynamics.hpp"
#include "folner/monotiling.hpp"

namespace folner {

struct ExperimentConfig {
    std::string group = "zd:2";
    std::string tiling = "zd-cubes";
    std::string model = "bernoulli:0.5,0.5";
    std::vector<int64_t> ks = {2};
    std::vector<int64_t> ns = {64};
    uint64_t samples = 5;
    uint64_t seed = 0;
    int64_t budget = 10'000'000;
};

struct ResultRow {
    int64_t n = 0;
    int64_t k = 0;
    uint64_t sample = 0;
    uint64_t code_bits = 0;
    uint64_t sites = 0;
    double rate = 0;          // code_bits / sites
    double entropy_rate = 0;  // best-shift empirical entropy per tile site
    double smb = 0;           // information of the observed window per site
    double true_h = 0;
};

struct BrudnoResult {
    std::vector<ResultRow> rows;
    std::map<int64_t, double> mean_min_rate;  // per n, mean over samples of min-over-k rate
};

// one row per (n, k, sample); the same sampled word feeds every k at a given n
inline BrudnoResult run_brudno(const ExperimentConfig& cfg, std::ostream* csv = nullptr) {
    if (cfg.samples < 1) throw RangeError("sample count must be positive");
    if (cfg.ks.empty() || cfg.ns.empty()) throw RangeError("index lists must be nonempty");
    GroupDescriptor G = parse_group(cfg.group);
    Monotiling M = make_monotiling(G, cfg.tiling, cfg.budget);
    SamplerModel model = parse_model(cfg.model);
    model.seed = cfg.seed;
    double h = true_entropy(model);

    std::vector<int64_t> ks = cfg.ks;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    std::vector<int64_t> ns = cfg.ns;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

    auto emit = [&](const char* line) {
        if (csv) (*csv) << line << "\n";
    };
    emit("# brudno-csv 1");
    emit("n,k,sample,code_bits,sites,rate,entropy_rate,smb,true_entropy");

    BrudnoResult out;
    char buf[256];
    for (int64_t n : ns) {
        int64_t kmax = 0;
        for (int64_t k : ks)
            if (M.tile_size(k) <= M.tile_size(n)) kmax = std::max(kmax, k);
        if (kmax == 0) throw RangeError("no tile index fits the window");
        double min_rate_sum = 0;
        auto sup = padded_support(M, kmax, n);
        for (uint64_t s = 0; s < cfg.samples; ++s) {
            Word w = sample_word(model, G, sup, s);
            Word on_tile = restrict_word(G, w, M.tile(n));
            uint64_t sites = uint64_t(M.tile(n)->size());
            double smb = std::numeric_limits<double>::quiet_NaN();
            if (model.kind != ModelKind::PERIODIC) smb = smb_statistic(model, w, M, n);
            double best = -1;
            for (int64_t k : ks) {
                if (M.tile_size(k) > M.tile_size(n)) continue;
                ResultRow row;
                row.n = n;
                row.k = k;
                row.sample = s;
                row.code_bits = encode_freq(on_tile, M, k, n).size();
                row.sites = sites;
                row.rate = double(row.code_bits) / double(sites);
                row.entropy_rate = best_shift_entropy(w, M, k, n).second /
                                   M.tile_size(k).convert_to<double>();
                row.smb = smb;
                row.true_h = h;
                if (csv) {
                    char smb_text[32];
                    if (std::isnan(row.smb))
                        std::snprintf(smb_text, sizeof smb_text, "nan");
                    else
                        std::snprintf(smb_text, sizeof smb_text, "%.6f", row.smb);
                    std::snprintf(buf, sizeof buf,
                                  "%lld,%lld,%llu,%llu,%llu,%.6f,%.6f,%s,%.6f",
                                  (long long)row.n, (long long)row.k,
                                  (unsigned long long)row.sample,
                                  (unsigned long long)row.code_bits,
                                  (unsigned long long)row.sites, row.rate,
                                  row.entropy_rate, smb_text, row.true_h);
                    emit(buf);
                }
                out.rows.push_back(row);
                if (best < 0 || row.rate < best) best = row.rate;
            }
            min_rate_sum += best;
        }
        double mean = min_rate_sum / double(cfg.samples);
        out.mean_min_rate[n] = mean;
        if (csv) {
            std::snprintf(buf, sizeof buf, "# summary n=%lld mean_min_rate=%.6f true_entropy=%.6f",
                          (long long)n, mean, h);
            emit(buf);
        }
    }
    return out;
}

}  // namespace folner
