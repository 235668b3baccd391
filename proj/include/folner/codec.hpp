#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "folner/bitcodes.hpp"
#include "folner/dynamics.hpp"
#include "folner/monotiling.hpp"

namespace folner {

// ---- multiset permutation ranking ----

struct FrequencyTable {
    int64_t k = 1;
    std::vector<std::pair<bigint, uint64_t>> entries;  // (pattern-id, count), ids increasing

    uint64_t total() const {
        uint64_t t = 0;
        for (const auto& [id, c] : entries) t += c;
        return t;
    }
};

// total! / prod count!; built from stepwise-exact binomial factors
inline bigint multinomial_count(const FrequencyTable& f) {
    bigint r = 1;
    bigint cum = 0;
    for (const auto& [id, c] : f.entries)
        for (uint64_t i = 1; i <= c; ++i) {
            ++cum;
            r = r * cum / i;
        }
    return r;
}

namespace detail {

struct Fenwick {
    std::vector<int64_t> t;
    explicit Fenwick(std::size_t n) : t(n + 1, 0) {}
    void add(std::size_t i, int64_t d) {
        for (++i; i < t.size(); i += i & (~i + 1)) t[i] += d;
    }
    int64_t prefix(std::size_t i) const {  // sum over positions < i
        int64_t s = 0;
        for (; i > 0; i -= i & (~i + 1)) s += t[i];
        return s;
    }
};

inline std::size_t table_position(const FrequencyTable& f, const bigint& id) {
    std::size_t lo = 0, hi = f.entries.size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (f.entries[mid].first < id)
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo == f.entries.size() || f.entries[lo].first != id)
        throw RangeError("pattern id missing from the frequency table");
    return lo;
}

}  // namespace detail

// lexicographic rank of the id sequence among all arrangements of the table
inline bigint rank_pattern_seq(const std::vector<bigint>& seq, const FrequencyTable& f) {
    uint64_t T = f.total();
    if (seq.size() != T) throw RangeError("sequence length disagrees with the table");
    bigint R = multinomial_count(f);
    detail::Fenwick fw(f.entries.size());
    std::vector<int64_t> cnt(f.entries.size());
    for (std::size_t p = 0; p < f.entries.size(); ++p) {
        cnt[p] = int64_t(f.entries[p].second);
        fw.add(p, cnt[p]);
    }
    bigint N = 0;
    for (uint64_t i = 0; i < T; ++i) {
        std::size_t pos = detail::table_position(f, seq[i]);
        if (cnt[pos] == 0) throw RangeError("sequence uses a pattern more often than counted");
        uint64_t rem = T - i;
        int64_t before = fw.prefix(pos);
        if (before > 0) N += R * before / rem;  // exact: sum of per-id integer shares
        R = R * cnt[pos] / rem;
        fw.add(pos, -1);
        --cnt[pos];
    }
    return N;
}

inline std::vector<bigint> unrank_pattern_seq(bigint N, const FrequencyTable& f) {
    uint64_t T = f.total();
    bigint R = multinomial_count(f);
    if (N < 0 || N >= R) throw RankOutOfRange("rank exceeds the arrangement count");
    detail::Fenwick fw(f.entries.size());
    std::vector<int64_t> cnt(f.entries.size());
    for (std::size_t p = 0; p < f.entries.size(); ++p) {
        cnt[p] = int64_t(f.entries[p].second);
        fw.add(p, cnt[p]);
    }
    std::vector<bigint> seq;
    seq.reserve(T);
    for (uint64_t i = 0; i < T; ++i) {
        uint64_t rem = T - i;
        // largest position whose lower share stays at or under N
        std::size_t lo = 0, hi = f.entries.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi + 1) / 2;
            bigint base = R * fw.prefix(mid) / rem;
            if (base <= N)
                lo = mid;
            else
                hi = mid - 1;
        }
        N -= R * fw.prefix(lo) / rem;
        R = R * cnt[lo] / rem;
        fw.add(lo, -1);
        --cnt[lo];
        seq.push_back(f.entries[lo].first);
    }
    return seq;
}

// ---- shared field helpers ----

namespace detail {

inline void append_run(BitString& s, const bigint& v) {
    s.append(encode_doubling(v));
    s.append(delimiter());
}

inline int64_t to_index(const bigint& v) {
    if (v > (int64_t(1) << 40)) throw ResourceLimit("stream names an oversized tile index");
    return int64_t(v);
}

inline BitString tail(const BitString& s, std::size_t from) {
    BitString r;
    for (std::size_t i = from; i < s.size(); ++i) r.append_bit(s.bit(i));
    return r;
}

}  // namespace detail

using BaseDecoder = std::function<Word(const BitString&)>;

// ---- tile-frequency codec ----

// layout: k t | pair-count (id,count)* | block mark | remainder-length
// remainder-letters | rank, the rank padded to the arrangement-count width
inline BitString encode_freq(const Word& w, Monotiling& M, int64_t k, int64_t t) {
    const GroupDescriptor& G = M.group();
    if (k < 1 || M.tile_size(k) > M.tile_size(t))
        throw RangeError("inner tile does not fit the window");
    WindowSet I = M.centers_in_window(k, t);
    auto fk = M.tile(k);
    std::map<bigint, uint64_t> freq;
    std::vector<bigint> seq;
    seq.reserve(I.size());
    for (const auto& g : I.elems) {
        bigint pid = pattern_id_at(w, G, fk->elems, g);
        ++freq[pid];
        seq.push_back(std::move(pid));
    }
    FrequencyTable table;
    table.k = k;
    table.entries.assign(freq.begin(), freq.end());
    bigint N = rank_pattern_seq(seq, table);

    WindowSet remainder = window_difference(*M.tile(t), M.covered(k, I));
    std::vector<uint16_t> tail_letters;
    tail_letters.reserve(remainder.size());
    for (const auto& g : remainder.elems) tail_letters.push_back(w.letter_at(G, g));

    BitString s;
    detail::append_run(s, k);
    detail::append_run(s, t);
    s.append(encode_prefix_free(bigint(table.entries.size())));
    for (const auto& [id, c] : table.entries) {
        s.append(encode_prefix_free(id));
        s.append(encode_prefix_free(bigint(c)));
    }
    s.append(delimiter());
    detail::append_run(s, bigint(remainder.size()));
    s.append(encode_letters(tail_letters, w.alphabet));
    bigint arrangements = multinomial_count(table);
    if (arrangements > 1) s.append_uint(N, bitlen(arrangements - 1));
    return s;
}

inline Word decode_freq(const BitString& bits, Monotiling& M, uint16_t alphabet) {
    const GroupDescriptor& G = M.group();
    BitReader r(bits);
    int64_t k = detail::to_index(decode_doubling(r));
    int64_t t = detail::to_index(decode_doubling(r));
    if (k < 1 || t < 1 || M.tile_size(k) > M.tile_size(t))
        throw RangeError("inner tile does not fit the window");
    WindowSet I = M.centers_in_window(k, t);

    bigint pairs_big = decode_prefix_free(r);
    if (pairs_big > int64_t(I.size()))
        throw SumMismatch("more patterns than centers");
    std::size_t pairs = std::size_t(pairs_big);
    FrequencyTable table;
    table.k = k;
    uint64_t sum = 0;
    for (std::size_t i = 0; i < pairs; ++i) {
        bigint id = decode_prefix_free(r);
        bigint c = decode_prefix_free(r);
        if (!table.entries.empty() && !(table.entries.back().first < id))
            throw RangeError("pattern ids out of order");
        if (c < 1 || c > int64_t(I.size())) throw SumMismatch("pattern count out of range");
        sum += uint64_t(c);
        table.entries.emplace_back(std::move(id), uint64_t(c));
    }
    if (sum != I.size()) throw SumMismatch("frequencies do not cover the centers");
    if (r.read_bit() != 0 || r.read_bit() != 1)
        throw MalformedPair("missing block mark after the frequency list");

    bigint rem_big = decode_doubling(r);
    WindowSet remainder = window_difference(*M.tile(t), M.covered(k, I));
    if (rem_big != int64_t(remainder.size()))
        throw LengthMismatch("remainder length disagrees with the window");
    std::vector<uint16_t> tail_letters = decode_letters(r, remainder.size(), alphabet);

    bigint N = r.read_uint(r.remaining());
    bigint arrangements = multinomial_count(table);
    if (N >= arrangements) throw RankOutOfRange("rank exceeds the arrangement count");
    std::vector<bigint> seq = unrank_pattern_seq(N, table);

    auto ft = M.tile(t);
    auto fk = M.tile(k);
    Word out;
    out.alphabet = alphabet;
    out.support = ft;
    out.letters.assign(ft->size(), 0);
    auto position = [&](const GroupElement& g) {
        bigint i = G.index_of(g);
        auto it = std::lower_bound(ft->idx.begin(), ft->idx.end(), i);
        if (it == ft->idx.end() || *it != i)
            throw RangeError("reconstructed site leaves the window");
        return std::size_t(it - ft->idx.begin());
    };
    for (std::size_t j = 0; j < I.size(); ++j) {
        bigint v = seq[j] - 1;
        std::vector<uint16_t> letters(fk->size());
        for (std::size_t i = fk->size(); i > 0; --i) {
            letters[i - 1] = uint16_t(v % alphabet + 1);
            v /= alphabet;
        }
        if (v != 0) throw RangeError("pattern id outside the alphabet space");
        for (std::size_t i = 0; i < fk->size(); ++i)
            out.letters[position(G.multiply(fk->elems[i], I.elems[j]))] = letters[i];
    }
    for (std::size_t i = 0; i < remainder.size(); ++i)
        out.letters[position(remainder.elems[i])] = tail_letters[i];
    return out;
}

// leading (inner, outer) tile indices of a frequency program
inline std::pair<int64_t, int64_t> peek_freq_header(const BitString& bits) {
    BitReader r(bits);
    int64_t k = detail::to_index(decode_doubling(r));
    int64_t t = detail::to_index(decode_doubling(r));
    return {k, t};
}

// min over inner indices of the frequency-codec rate on the window
inline double complexity_upper(const Word& w, Monotiling& M, int64_t n,
                               const std::vector<int64_t>& ks) {
    double best = -1;
    for (int64_t k : ks) {
        if (k < 1 || M.tile_size(k) > M.tile_size(n)) continue;
        double rate = double(encode_freq(w, M, k, n).size()) / double(M.tile_size(n));
        if (best < 0 || rate < best) best = rate;
    }
    if (best < 0) throw RangeError("no usable inner index");
    return best;
}

// ---- shift codec ----

// layout: boundary-size boundary-letters n m inner-program; decoding replays
// the inner program, pulls translated letters, and patches the boundary
inline BitString encode_shift(const BitString& inner, Monotiling& M, const GroupElement& g,
                              const Word& w, int64_t n) {
    const GroupDescriptor& G = M.group();
    auto fn = M.tile(n);
    std::vector<uint16_t> patch;
    for (const auto& x : fn->elems) {
        GroupElement site = G.multiply(x, g);
        if (!M.tile_contains(n, site)) patch.push_back(w.letter_at(G, site));
    }
    BitString s;
    detail::append_run(s, bigint(patch.size()));
    s.append(encode_letters(patch, w.alphabet));
    detail::append_run(s, n);
    detail::append_run(s, G.index_of(g));
    s.append(inner);
    return s;
}

inline Word decode_shift(const BitString& bits, Monotiling& M, uint16_t alphabet,
                         const BaseDecoder& base) {
    const GroupDescriptor& G = M.group();
    BitReader r(bits);
    bigint s_big = decode_doubling(r);
    if (s_big * letter_width(alphabet) > bigint(uint64_t(r.remaining())))
        throw Truncated("boundary block longer than the stream");
    std::size_t s = std::size_t(s_big);
    std::vector<uint16_t> patch = decode_letters(r, s, alphabet);
    int64_t n = detail::to_index(decode_doubling(r));
    bigint m = decode_doubling(r);
    GroupElement g = G.element_at(m);
    Word inner = base(detail::tail(bits, r.pos()));

    auto fn = M.tile(n);
    Word out;
    out.alphabet = alphabet;
    out.support = fn;
    out.letters.reserve(fn->size());
    std::size_t used = 0;
    for (const auto& x : fn->elems) {
        GroupElement site = G.multiply(x, g);
        if (M.tile_contains(n, site)) {
            auto v = inner.try_letter_index(G.index_of(site));
            if (!v) throw RangeError("translated read misses the inner word");
            out.letters.push_back(*v);
        } else {
            if (used >= s) throw LengthMismatch("boundary letters exhausted");
            out.letters.push_back(patch[used++]);
        }
    }
    if (used != s) throw LengthMismatch("boundary letters left over");
    return out;
}

// ---- re-indexing codec ----

using Reindexer = std::function<bigint(const GroupElement&)>;

inline BitString encode_reindex(const BitString& inner, int64_t l) {
    BitString s;
    detail::append_run(s, l);
    s.append(inner);
    return s;
}

// reads the inner letter sequence through the alternative enumeration of F_l
inline Word decode_reindex(const BitString& bits, Monotiling& M, const BaseDecoder& base,
                           const Reindexer& other) {
    BitReader r(bits);
    int64_t l = detail::to_index(decode_doubling(r));
    Word inner = base(detail::tail(bits, r.pos()));
    auto fl = M.tile(l);
    if (inner.size() != fl->size())
        throw LengthMismatch("inner word length differs from the tile");
    std::vector<std::pair<bigint, std::size_t>> order;
    order.reserve(fl->size());
    for (std::size_t j = 0; j < fl->size(); ++j) order.emplace_back(other(fl->elems[j]), j);
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < order.size(); ++i)
        if (order[i - 1].first == order[i].first)
            throw RangeError("alternative indexing is not injective");
    std::vector<std::size_t> rank2(fl->size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) rank2[order[pos].second] = pos;
    Word out;
    out.alphabet = inner.alphabet;
    out.support = fl;
    out.letters.resize(fl->size());
    for (std::size_t j = 0; j < fl->size(); ++j) out.letters[j] = inner.letters[rank2[j]];
    return out;
}

// ---- fixed-width fallback coding, used as the inner stage ----

inline BitString encode_plain(const Word& w) {
    return encode_letters(w.letters, w.alphabet);
}

inline Word decode_plain(const BitString& bits, Monotiling& M, int64_t n, uint16_t alphabet) {
    auto fn = M.tile(n);
    BitReader r(bits);
    Word w;
    w.alphabet = alphabet;
    w.support = fn;
    w.letters = decode_letters(r, fn->size(), alphabet);
    if (r.remaining() != 0) throw LengthMismatch("trailing bits after the letter block");
    return w;
}

}  // namespace folner
