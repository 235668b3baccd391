#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "folner/monotiling.hpp"

namespace folner {

// ---- source models ----

enum class ModelKind { BERNOULLI, MARKOV_Z, PERIODIC };

struct SamplerModel {
    ModelKind kind = ModelKind::BERNOULLI;
    std::vector<double> probs;                // BERNOULLI letter distribution
    std::vector<std::vector<double>> trans;   // MARKOV_Z row-stochastic matrix
    std::vector<double> pi;                   // MARKOV_Z stationary vector
    std::vector<uint16_t> pattern;            // PERIODIC letters, 1-based
    uint64_t seed = 0;

    uint16_t alphabet() const {
        switch (kind) {
            case ModelKind::BERNOULLI:
                return uint16_t(probs.size());
            case ModelKind::MARKOV_Z:
                return uint16_t(trans.size());
            case ModelKind::PERIODIC: {
                uint16_t m = 1;
                for (uint16_t v : pattern) m = std::max(m, v);
                return m;
            }
        }
        return 1;
    }
};

namespace detail {

inline std::vector<double> parse_prob_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            double v = std::stod(item, &used);
            if (used != item.size()) throw RangeError("bad number: " + item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw RangeError("bad number in model token: " + item);
        }
    }
    if (out.empty()) throw RangeError("empty number list in model token");
    return out;
}

inline std::vector<double> stationary_vector(const std::vector<std::vector<double>>& P) {
    std::size_t L = P.size();
    std::vector<double> v(L, 1.0 / double(L)), w(L);
    for (int iter = 0; iter < 20000; ++iter) {
        double delta = 0;
        for (std::size_t j = 0; j < L; ++j) {
            w[j] = 0;
            for (std::size_t i = 0; i < L; ++i) w[j] += v[i] * P[i][j];
        }
        for (std::size_t j = 0; j < L; ++j) delta += std::abs(w[j] - v[j]);
        v.swap(w);
        if (delta < 1e-15) break;
    }
    double resid = 0;
    for (std::size_t j = 0; j < L; ++j) {
        double s = 0;
        for (std::size_t i = 0; i < L; ++i) s += v[i] * P[i][j];
        resid += std::abs(s - v[j]);
    }
    if (resid > 1e-9) throw RangeError("transition matrix has no computable stationary vector");
    return v;
}

}  // namespace detail

// bernoulli:p1,p2,... | markov:p11,p12;p21,p22;... | periodic:l1,l2,...
inline SamplerModel parse_model(const std::string& token) {
    SamplerModel m;
    auto colon = token.find(':');
    if (colon == std::string::npos) throw RangeError("bad model token: " + token);
    std::string head = token.substr(0, colon), body = token.substr(colon + 1);
    if (head == "bernoulli") {
        m.kind = ModelKind::BERNOULLI;
        m.probs = detail::parse_prob_list(body);
        double s = 0;
        for (double p : m.probs) {
            if (p < 0 || p > 1) throw RangeError("probability out of [0,1]");
            s += p;
        }
        if (std::abs(s - 1.0) > 1e-12) throw RangeError("probabilities do not sum to 1");
        return m;
    }
    if (head == "markov") {
        m.kind = ModelKind::MARKOV_Z;
        std::stringstream ss(body);
        std::string row;
        while (std::getline(ss, row, ';')) m.trans.push_back(detail::parse_prob_list(row));
        std::size_t L = m.trans.size();
        if (L < 1) throw RangeError("empty transition matrix");
        for (const auto& r : m.trans) {
            if (r.size() != L) throw RangeError("transition matrix is not square");
            double s = 0;
            for (double p : r) {
                if (p < 0 || p > 1) throw RangeError("transition entry out of [0,1]");
                s += p;
            }
            if (std::abs(s - 1.0) > 1e-12) throw RangeError("transition row does not sum to 1");
        }
        m.pi = detail::stationary_vector(m.trans);
        return m;
    }
    if (head == "periodic") {
        m.kind = ModelKind::PERIODIC;
        for (double v : detail::parse_prob_list(body)) {
            if (v < 1 || v > 65535 || v != std::floor(v))
                throw RangeError("periodic letters must be positive integers");
            m.pattern.push_back(uint16_t(v));
        }
        return m;
    }
    throw RangeError("bad model token: " + token);
}

// bits per site of the generating process
inline double true_entropy(const SamplerModel& m) {
    auto plog = [](double p) { return p > 0 ? -p * std::log2(p) : 0.0; };
    switch (m.kind) {
        case ModelKind::BERNOULLI: {
            double h = 0;
            for (double p : m.probs) h += plog(p);
            return h;
        }
        case ModelKind::MARKOV_Z: {
            double h = 0;
            for (std::size_t i = 0; i < m.trans.size(); ++i) {
                double row = 0;
                for (double p : m.trans[i]) row += plog(p);
                h += m.pi[i] * row;
            }
            return h;
        }
        case ModelKind::PERIODIC:
            return 0.0;
    }
    return 0.0;
}

// ---- words ----

struct Word {
    uint16_t alphabet = 2;
    std::shared_ptr<const WindowSet> support;
    std::vector<uint16_t> letters;  // parallel to support->elems, values 1..alphabet

    std::size_t size() const { return letters.size(); }

    std::optional<uint16_t> try_letter_index(const bigint& i) const {
        const auto& idx = support->idx;
        auto it = std::lower_bound(idx.begin(), idx.end(), i);
        if (it == idx.end() || *it != i) return std::nullopt;
        return letters[std::size_t(it - idx.begin())];
    }

    uint16_t letter_at(const GroupDescriptor& G, const GroupElement& g) const {
        auto v = try_letter_index(G.index_of(g));
        if (!v) throw SupportViolation("letter read outside the word support");
        return *v;
    }
};

// (g.w)(x) = w(xg); support maps through right multiplication by g^{-1}
inline Word act(const GroupDescriptor& G, const GroupElement& g, const Word& w) {
    GroupElement gi = G.inverse(g);
    std::vector<std::tuple<bigint, GroupElement, uint16_t>> keyed;
    keyed.reserve(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        GroupElement x = G.multiply(w.support->elems[i], gi);
        bigint ix = G.index_of(x);
        keyed.emplace_back(std::move(ix), std::move(x), w.letters[i]);
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
        return std::get<0>(a) < std::get<0>(b);
    });
    auto s = std::make_shared<WindowSet>();
    Word out;
    out.alphabet = w.alphabet;
    out.letters.reserve(w.size());
    s->elems.reserve(w.size());
    s->idx.reserve(w.size());
    for (auto& [i, x, letter] : keyed) {
        s->idx.push_back(std::move(i));
        s->elems.push_back(std::move(x));
        out.letters.push_back(letter);
    }
    out.support = std::move(s);
    return out;
}

inline Word restrict_word(const GroupDescriptor& G, const Word& w,
                          std::shared_ptr<const WindowSet> S) {
    Word out;
    out.alphabet = w.alphabet;
    out.letters.reserve(S->size());
    for (std::size_t i = 0; i < S->size(); ++i) {
        auto v = w.try_letter_index(S->idx[i]);
        if (!v) throw SupportViolation("restriction target is not inside the support");
        out.letters.push_back(*v);
    }
    out.support = std::move(S);
    return out;
}

// ---- counter-based sampling ----

namespace detail {

inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t fold_index(const bigint& i) {
    uint64_t acc = 0x2545f4914f6cdd1dULL;
    bigint v = i;
    while (v != 0) {
        acc = mix64(acc ^ uint64_t(v & 0xffffffffffffffffULL));
        v >>= 64;
    }
    return acc;
}

// one uniform draw per (seed, sample, site), independent of visit order
inline double unit_draw(uint64_t seed, uint64_t sample, const bigint& site) {
    uint64_t h = mix64(seed);
    h = mix64(h ^ mix64(sample));
    h = mix64(h ^ fold_index(site));
    return double(h >> 11) * 0x1.0p-53;
}

inline uint16_t draw_from(const std::vector<double>& dist, double u) {
    double acc = 0;
    for (std::size_t i = 0; i + 1 < dist.size(); ++i) {
        acc += dist[i];
        if (u < acc) return uint16_t(i + 1);
    }
    return uint16_t(dist.size());
}

}  // namespace detail

inline Word sample_word(const SamplerModel& m, const GroupDescriptor& G,
                        std::shared_ptr<const WindowSet> support, uint64_t sample_index = 0) {
    Word w;
    w.alphabet = m.alphabet();
    w.letters.assign(support->size(), 1);
    switch (m.kind) {
        case ModelKind::BERNOULLI: {
            for (std::size_t i = 0; i < support->size(); ++i)
                w.letters[i] = detail::draw_from(
                    m.probs, detail::unit_draw(m.seed, sample_index, support->idx[i]));
            break;
        }
        case ModelKind::MARKOV_Z: {
            // independent chains along the first storage coordinate
            std::map<std::vector<int64_t>, std::vector<std::pair<int64_t, std::size_t>>> lines;
            for (std::size_t i = 0; i < support->size(); ++i) {
                const auto& c = support->elems[i].c;
                std::vector<int64_t> key(c.begin() + 1, c.end());
                lines[key].emplace_back(c[0], i);
            }
            for (auto& [key, sites] : lines) {
                std::sort(sites.begin(), sites.end());
                GroupElement cursor = G.identity();
                std::copy(key.begin(), key.end(), cursor.c.begin() + 1);
                auto draw_at = [&](int64_t pos) {
                    cursor.c[0] = pos;
                    return detail::unit_draw(m.seed, sample_index, G.index_of(cursor));
                };
                std::size_t next = 0;
                uint16_t cur = detail::draw_from(m.pi, draw_at(sites.front().first));
                for (int64_t pos = sites.front().first; pos <= sites.back().first; ++pos) {
                    if (pos != sites.front().first)
                        cur = detail::draw_from(m.trans[cur - 1], draw_at(pos));
                    if (next < sites.size() && sites[next].first == pos)
                        w.letters[sites[next++].second] = cur;
                }
            }
            break;
        }
        case ModelKind::PERIODIC: {
            int64_t L = int64_t(m.pattern.size());
            for (std::size_t i = 0; i < support->size(); ++i) {
                if (G.family == GroupFamily::ZD) {
                    int64_t r = ((support->elems[i].c[0] % L) + L) % L;
                    w.letters[i] = m.pattern[std::size_t(r)];
                } else {
                    w.letters[i] = m.pattern[0];
                }
            }
            break;
        }
    }
    w.support = std::move(support);
    return w;
}

// window covering every read x.g.h with x in F_k, g in F_n, h in F_k^{-1} or e
inline std::shared_ptr<const WindowSet> padded_support(Monotiling& M, int64_t k, int64_t n) {
    const GroupDescriptor& G = M.group();
    if (M.family() == TilingFamily::ZD_CUBES) {
        // box [-(2k-2), n-1+2k-2]^d assembled directly
        std::vector<GroupElement> v;
        GroupElement g = G.identity();
        int64_t lo = -2 * (k - 1), hi = n - 1 + 2 * (k - 1);
        for (auto& c : g.c) c = lo;
        for (;;) {
            v.push_back(g);
            int i = G.d - 1;
            while (i >= 0 && g.c[i] == hi) g.c[i--] = lo;
            if (i < 0) break;
            ++g.c[i];
        }
        return std::make_shared<const WindowSet>(WindowSet::from_elements(G, std::move(v)));
    }
    auto fk = M.tile(k);
    auto fn = M.tile(n);
    std::vector<GroupElement> tails{G.identity()};
    for (const auto& x : fk->elems) tails.push_back(G.inverse(x));
    std::unordered_set<GroupElement, GroupElementHash> seen;
    for (const auto& x : fk->elems)
        for (const auto& f : fn->elems) {
            GroupElement xf = G.multiply(x, f);
            for (const auto& h : tails) seen.insert(G.multiply(xf, h));
        }
    std::vector<GroupElement> v(seen.begin(), seen.end());
    return std::make_shared<const WindowSet>(WindowSet::from_elements(G, std::move(v)));
}

// ---- empirical tile-pattern statistics ----

struct PatternStats {
    int64_t k = 1;
    GroupElement shift;              // h, drawn from F_k^{-1}
    uint64_t total = 0;              // number of centers averaged over
    std::map<bigint, uint64_t> counts;  // pattern-id -> occurrences
};

// 1 + base-|alphabet| value of the tile word read in element index order
inline bigint pattern_id_at(const Word& w, const GroupDescriptor& G,
                            const std::vector<GroupElement>& tile_elems,
                            const GroupElement& gh) {
    bigint v = 0;
    for (const auto& x : tile_elems) {
        uint16_t letter = w.letter_at(G, G.multiply(x, gh));
        v = v * w.alphabet + (letter - 1);
    }
    return v + 1;
}

namespace detail {

inline PatternStats stats_over_centers(const Word& w, Monotiling& M, int64_t k,
                                       const WindowSet& centers, const GroupElement& h) {
    const GroupDescriptor& G = M.group();
    auto fk = M.tile(k);
    PatternStats st;
    st.k = k;
    st.shift = h;
    st.total = centers.size();
    for (const auto& g : centers.elems) {
        bigint pid = pattern_id_at(w, G, fk->elems, G.multiply(g, h));
        ++st.counts[pid];
    }
    return st;
}

}  // namespace detail

inline PatternStats pattern_stats(const Word& w, Monotiling& M, int64_t k, int64_t n,
                                  const GroupElement& h) {
    return detail::stats_over_centers(w, M, k, M.centers_in_window(k, n), h);
}

inline double empirical_entropy(const PatternStats& st) {
    if (st.total == 0) throw RangeError("no centers to average over");
    double h = 0;
    for (const auto& [pid, c] : st.counts) {
        double p = double(c) / double(st.total);
        if (p > 0) h -= p * std::log2(p);
    }
    return h;
}

// minimizing shift h in F_k^{-1}, ties by smallest element index
inline std::pair<GroupElement, double> best_shift_entropy(const Word& w, Monotiling& M,
                                                          int64_t k, int64_t n) {
    const GroupDescriptor& G = M.group();
    WindowSet centers = M.centers_in_window(k, n);
    std::vector<GroupElement> hs;
    for (const auto& x : M.tile(k)->elems) hs.push_back(G.inverse(x));
    WindowSet ordered = WindowSet::from_elements(G, std::move(hs));
    bool first = true;
    GroupElement best = G.identity();
    double best_val = 0;
    for (const auto& h : ordered.elems) {
        double v = empirical_entropy(detail::stats_over_centers(w, M, k, centers, h));
        if (first || v < best_val) {
            first = false;
            best = h;
            best_val = v;
        }
    }
    return {best, best_val};
}

struct WeightedTriple {
    double a1 = 0, a2 = 0, a3 = 0;
};

// three finite-window averages of the pattern indicator: over F_n weighted by
// |F_k|, over the centers in F_n, and over the interior centers
inline WeightedTriple weighted_average_triple(const Word& w, Monotiling& M, int64_t k,
                                              int64_t n, const bigint& pid) {
    const GroupDescriptor& G = M.group();
    auto fk = M.tile(k);
    auto fn = M.tile(n);
    uint64_t hits_fn = 0, centers_fn = 0;
    for (const auto& g : fn->elems) {
        if (!M.is_center(k, g)) continue;
        ++centers_fn;
        if (pattern_id_at(w, G, fk->elems, g) == pid) ++hits_fn;
    }
    WindowSet inner = M.centers_in_window(k, n);
    uint64_t hits_inner = 0;
    for (const auto& g : inner.elems)
        if (pattern_id_at(w, G, fk->elems, g) == pid) ++hits_inner;
    WeightedTriple t;
    t.a1 = double(fk->size()) * double(hits_fn) / double(fn->size());
    t.a2 = centers_fn ? double(hits_fn) / double(centers_fn) : 0.0;
    t.a3 = inner.size() ? double(hits_inner) / double(inner.size()) : 0.0;
    return t;
}

// ---- exact cylinder information ----

// -log2 of the model probability of the letters on F
inline double information_value(const SamplerModel& m, const GroupDescriptor& G, const Word& w,
                                const WindowSet& F) {
    switch (m.kind) {
        case ModelKind::BERNOULLI: {
            double bits = 0;
            for (std::size_t i = 0; i < F.size(); ++i) {
                auto letter = w.try_letter_index(F.idx[i]);
                if (!letter) throw SupportViolation("window leaves the word support");
                double p = *letter <= m.probs.size() ? m.probs[*letter - 1] : 0.0;
                if (p <= 0) return std::numeric_limits<double>::infinity();
                bits -= std::log2(p);
            }
            return bits;
        }
        case ModelKind::MARKOV_Z: {
            std::size_t L = m.trans.size();
            std::map<std::vector<int64_t>, std::vector<std::pair<int64_t, uint16_t>>> lines;
            for (std::size_t i = 0; i < F.size(); ++i) {
                auto letter = w.try_letter_index(F.idx[i]);
                if (!letter) throw SupportViolation("window leaves the word support");
                const auto& c = F.elems[i].c;
                lines[{c.begin() + 1, c.end()}].emplace_back(c[0], *letter);
            }
            // marginalize gaps with matrix powers; cache per gap length
            std::map<int64_t, std::vector<std::vector<double>>> powers;
            powers[1] = m.trans;
            auto power = [&](int64_t g) -> const std::vector<std::vector<double>>& {
                for (int64_t e = powers.rbegin()->first; e < g; ++e) {
                    const auto& prev = powers[e];
                    std::vector<std::vector<double>> r(L, std::vector<double>(L, 0.0));
                    for (std::size_t i = 0; i < L; ++i)
                        for (std::size_t t = 0; t < L; ++t)
                            for (std::size_t j = 0; j < L; ++j)
                                r[i][j] += prev[i][t] * m.trans[t][j];
                    powers.emplace(e + 1, std::move(r));
                }
                return powers[g];
            };
            double bits = 0;
            for (auto& [key, sites] : lines) {
                std::sort(sites.begin(), sites.end());
                double p = m.pi[sites.front().second - 1];
                if (p <= 0) return std::numeric_limits<double>::infinity();
                bits -= std::log2(p);
                for (std::size_t i = 1; i < sites.size(); ++i) {
                    int64_t gap = sites[i].first - sites[i - 1].first;
                    double q = power(gap)[sites[i - 1].second - 1][sites[i].second - 1];
                    if (q <= 0) return std::numeric_limits<double>::infinity();
                    bits -= std::log2(q);
                }
            }
            return bits;
        }
        case ModelKind::PERIODIC:
            throw UnsupportedModel("no cylinder measure for the periodic model");
    }
    throw UnsupportedModel("unknown model");
}

inline double smb_statistic(const SamplerModel& m, const Word& w, Monotiling& M, int64_t n) {
    auto fn = M.tile(n);
    return information_value(m, M.group(), w, *fn) / double(fn->size());
}

}  // namespace folner
