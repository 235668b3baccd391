#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_set>
#include <utility>
#include <vector>

#include "folner/group.hpp"

namespace folner {

// finite subset of the group, kept sorted by NaturalIndex
struct WindowSet {
    std::vector<GroupElement> elems;
    std::vector<bigint> idx;  // parallel to elems, strictly increasing

    std::size_t size() const { return elems.size(); }
    bool empty() const { return elems.empty(); }

    bool contains_index(const bigint& i) const {
        auto it = std::lower_bound(idx.begin(), idx.end(), i);
        return it != idx.end() && *it == i;
    }

    bool contains(const GroupDescriptor& G, const GroupElement& g) const {
        return contains_index(G.index_of(g));
    }

    static WindowSet from_elements(const GroupDescriptor& G, std::vector<GroupElement> v) {
        std::vector<std::pair<bigint, GroupElement>> keyed;
        keyed.reserve(v.size());
        for (auto& g : v) keyed.emplace_back(G.index_of(g), std::move(g));
        std::sort(keyed.begin(), keyed.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        WindowSet w;
        w.elems.reserve(keyed.size());
        w.idx.reserve(keyed.size());
        for (auto& [i, g] : keyed) {
            if (!w.idx.empty() && w.idx.back() == i) continue;
            w.idx.push_back(i);
            w.elems.push_back(std::move(g));
        }
        return w;
    }
};

// A \ B, both sorted by index
inline WindowSet window_difference(const WindowSet& a, const WindowSet& b) {
    WindowSet r;
    std::size_t j = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        while (j < b.size() && b.idx[j] < a.idx[i]) ++j;
        if (j < b.size() && b.idx[j] == a.idx[i]) continue;
        r.elems.push_back(a.elems[i]);
        r.idx.push_back(a.idx[i]);
    }
    return r;
}

enum class TilingFamily { ZD_CUBES, HEIS3, UTD_P };

enum class Side { Left, Right };

// Monotiling [F_n, Z_n] of the group: tile() materializes F_n, is_center()
// decides membership in Z_n, decompose() factors g = f z.
class Monotiling {
  public:
    Monotiling(GroupDescriptor G, TilingFamily fam, uint64_t cap = 10'000'000)
        : G_(std::move(G)), fam_(fam), cap_(cap) {
        switch (fam_) {
            case TilingFamily::ZD_CUBES:
                if (G_.family != GroupFamily::ZD)
                    throw RangeError("zd-cubes needs a zd:<d> group");
                break;
            case TilingFamily::HEIS3:
                if (G_.family != GroupFamily::UT || G_.d != 3)
                    throw RangeError("heis3 needs the ut:3 group");
                break;
            case TilingFamily::UTD_P:
                if (G_.family != GroupFamily::UT || G_.p < 2)
                    throw RangeError("utd needs ut:<d> with a prime p");
                break;
        }
    }

    const GroupDescriptor& group() const { return G_; }
    TilingFamily family() const { return fam_; }
    uint64_t cap() const { return cap_; }

    bigint tile_size(const bigint& n) const {
        if (n < 1) throw RangeError("tile index must be positive");
        switch (fam_) {
            case TilingFamily::ZD_CUBES: {
                bigint s = 1;
                for (int i = 0; i < G_.d; ++i) s *= n;
                return s;
            }
            case TilingFamily::HEIS3:
                return n * n * n * n;
            case TilingFamily::UTD_P: {
                bigint s = 1;
                for (int i = 1; i < G_.d; ++i)
                    for (int j = i + 1; j <= G_.d; ++j)
                        s *= bigint(ut_q(n, j - i)) + 1;
                return s;
            }
        }
        return 0;
    }

    std::shared_ptr<const WindowSet> tile(int64_t n) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = tiles_.find(n);
        if (it != tiles_.end()) return it->second;
        auto t = std::make_shared<WindowSet>(build_tile(n));
        tiles_.emplace(n, t);
        return t;
    }

    // membership in F_n without materializing it, where the family allows
    bool tile_contains(int64_t n, const GroupElement& g) {
        if (n < 1) throw RangeError("tile index must be positive");
        switch (fam_) {
            case TilingFamily::ZD_CUBES:
                for (int i = 0; i < G_.d; ++i)
                    if (g.c[i] < 0 || g.c[i] >= n) return false;
                return true;
            case TilingFamily::HEIS3:
                return g.c[0] >= 0 && g.c[0] < n && g.c[2] >= 0 && g.c[2] < n &&
                       g.c[1] >= 0 && g.c[1] < n * n;
            case TilingFamily::UTD_P:
                return tile_set(n)->count(g) != 0;
        }
        return false;
    }

    bool is_center(int64_t n, const GroupElement& g) {
        if (n < 1) throw RangeError("tile index must be positive");
        switch (fam_) {
            case TilingFamily::ZD_CUBES:
                for (int i = 0; i < G_.d; ++i)
                    if (g.c[i] % n != 0) return false;
                return true;
            case TilingFamily::HEIS3:
                return g.c[0] % n == 0 && g.c[2] % n == 0 && g.c[1] % (n * n) == 0;
            case TilingFamily::UTD_P:
                return ut_is_center(n, g);
        }
        return false;
    }

    // g = multiply(f, z) with f in F_n, z in Z_n
    std::pair<GroupElement, GroupElement> decompose(int64_t n, const GroupElement& g) {
        if (n < 1) throw RangeError("tile index must be positive");
        switch (fam_) {
            case TilingFamily::ZD_CUBES: {
                GroupElement f = G_.identity(), z = G_.identity();
                for (int i = 0; i < G_.d; ++i) {
                    int64_t r = g.c[i] % n;
                    if (r < 0) r += n;
                    f.c[i] = r;
                    z.c[i] = checked_add(g.c[i], -r);
                }
                return {f, z};
            }
            case TilingFamily::HEIS3: {
                int64_t a = g.c[0], c = g.c[1], b = g.c[2], n2 = n * n;
                int64_t al = ((a % n) + n) % n;
                int64_t be = ((b % n) + n) % n;
                int64_t x = a - al, y = b - be;
                int64_t t = checked_add(c, -checked_mul(y, al));
                int64_t ga = ((t % n2) + n2) % n2;
                GroupElement f = G_.identity(), z = G_.identity();
                f.c[0] = al;
                f.c[1] = ga;
                f.c[2] = be;
                z.c[0] = x;
                z.c[1] = t - ga;
                z.c[2] = y;
                return {f, z};
            }
            case TilingFamily::UTD_P: {
                // bounded search in tile order; with the over-wide literal
                // exponent ranges the factorization need not be unique, the
                // first hit in NaturalIndex order is returned
                auto t = tile(n);
                for (const auto& f : t->elems) {
                    GroupElement z = G_.multiply(G_.inverse(f), g);
                    if (ut_is_center(n, z)) return {f, z};
                }
                throw RangeError("no tile factorization found");
            }
        }
        throw RangeError("unreachable");
    }

    bool is_symmetric_centers(int64_t n, std::size_t probes = 200) {
        switch (fam_) {
            case TilingFamily::ZD_CUBES:
            case TilingFamily::HEIS3: {
                // centers form a lattice subgroup; probe a small grid anyway
                for (int64_t s = 1; s <= 3; ++s) {
                    GroupElement z = G_.identity();
                    for (auto& v : z.c) v = s * n;
                    if (fam_ == TilingFamily::HEIS3) z.c[1] = s * n * n;
                    if (!is_center(n, G_.inverse(z))) return false;
                }
                return true;
            }
            case TilingFamily::UTD_P: {
                ut_extend_centers(n, probes);
                auto& ce = ut_centers_[n];
                for (std::size_t i = 0; i < std::min(probes, ce.list.size()); ++i)
                    if (!ut_is_center(n, G_.inverse(ce.list[i]))) return false;
                return true;
            }
        }
        return false;
    }

    // boundary of F against the probe window K; Left means K^{-1}F cut by
    // K^{-1}F^c, Right means FK^{-1} cut by F^c K^{-1}
    WindowSet k_boundary(const WindowSet& K, const WindowSet& F, Side side) {
        guard_product(K.size(), F.size());
        std::vector<GroupElement> cand;
        cand.reserve(K.size() * F.size());
        for (const auto& k : K.elems) {
            GroupElement ki = G_.inverse(k);
            for (const auto& f : F.elems)
                cand.push_back(side == Side::Left ? G_.multiply(ki, f) : G_.multiply(f, ki));
        }
        WindowSet all = WindowSet::from_elements(G_, std::move(cand));
        std::vector<GroupElement> out;
        for (const auto& g : all.elems) {
            bool in = false, outside = false;
            for (const auto& k : K.elems) {
                GroupElement t = side == Side::Left ? G_.multiply(k, g) : G_.multiply(g, k);
                (F.contains(G_, t) ? in : outside) = true;
                if (in && outside) break;
            }
            if (in && outside) out.push_back(g);
        }
        return WindowSet::from_elements(G_, std::move(out));
    }

    WindowSet k_interior(const WindowSet& K, const WindowSet& F, Side side) {
        return window_difference(F, k_boundary(K, F, side));
    }

    // I_{k,n}: centers of Z_k whose k-tile sits inside F_n from both sides
    WindowSet centers_in_window(int64_t k, int64_t n) {
        auto fk = tile(k);
        std::vector<GroupElement> fk_inv;
        fk_inv.reserve(fk->size());
        for (const auto& x : fk->elems) fk_inv.push_back(G_.inverse(x));
        auto fn = tile(n);
        std::vector<GroupElement> out;
        for (const auto& g : fn->elems) {
            if (!is_center(k, g)) continue;
            bool ok = true;
            for (const auto& x : fk->elems)
                if (!tile_contains(n, G_.multiply(x, g))) {
                    ok = false;
                    break;
                }
            for (std::size_t i = 0; ok && i < fk_inv.size(); ++i)
                if (!tile_contains(n, G_.multiply(g, fk_inv[i]))) ok = false;
            if (ok) out.push_back(g);
        }
        return WindowSet::from_elements(G_, std::move(out));
    }

    // union of the k-tiles over the given centers
    WindowSet covered(int64_t k, const WindowSet& centers) {
        auto fk = tile(k);
        guard_product(fk->size(), centers.size());
        std::vector<GroupElement> out;
        out.reserve(fk->size() * centers.size());
        for (const auto& h : centers.elems)
            for (const auto& x : fk->elems) out.push_back(G_.multiply(x, h));
        return WindowSet::from_elements(G_, std::move(out));
    }

    bigint center_count_in_tile(int64_t k, int64_t n) {
        switch (fam_) {
            case TilingFamily::ZD_CUBES: {
                bigint c = 1;
                for (int i = 0; i < G_.d; ++i) c *= bigint((n - 1) / k + 1);
                return c;
            }
            case TilingFamily::HEIS3: {
                bigint ab = bigint((n - 1) / k + 1);
                bigint cc = bigint((n * n - 1) / (k * k) + 1);
                return ab * ab * cc;
            }
            case TilingFamily::UTD_P: {
                bigint c = 0;
                for (const auto& g : tile(n)->elems)
                    if (ut_is_center(k, g)) ++c;
                return c;
            }
        }
        return 0;
    }

    double density_ratio(int64_t k, int64_t n) {
        return double(center_count_in_tile(k, n)) / double(tile_size(n));
    }

    // |K F_n symdiff F_n| / |F_n|
    double folner_defect(const WindowSet& K, int64_t n) {
        auto fn = tile(n);
        guard_product(K.size(), fn->size());
        std::unordered_set<GroupElement, GroupElementHash> kf;
        kf.reserve(K.size() * fn->size());
        for (const auto& k : K.elems)
            for (const auto& f : fn->elems) kf.insert(G_.multiply(k, f));
        uint64_t sym = 0;
        for (const auto& g : kf)
            if (!tile_contains(n, g)) ++sym;
        for (const auto& f : fn->elems)
            if (!kf.count(f)) ++sym;
        return double(sym) / double(tile_size(n));
    }

    // |F_m^{-1} F_n| without materializing, cube and Heisenberg box families
    bigint inv_product_size(const bigint& m, const bigint& n) {
        switch (fam_) {
            case TilingFamily::ZD_CUBES: {
                bigint s = 1;
                for (int i = 0; i < G_.d; ++i) s *= (n + m - 1);
                return s;
            }
            case TilingFamily::HEIS3:
                // per (u,v) slot the third coordinate fills one interval of
                // length n^2+m^2-1 stretched by |v| times the a-spread
                return (n + m - 1) * (n + m - 1) * (n * n + m * m - 1) +
                       (m - 1) * (n - 1) * (m * (m - 1) + n * (n - 1)) / 2;
            case TilingFamily::UTD_P: {
                if (m > int64_t(1) << 40 || n > int64_t(1) << 40)
                    throw ResourceLimit("tile index too large to materialize");
                return bigint(explicit_inv_product(int64_t(m), int64_t(n)).size());
            }
        }
        return 0;
    }

    // |union_{j<i} F_{n_j}^{-1} F_{n_i}| / |F_{n_i}|; tiles are nested in n for
    // every family here, so the union collapses to the largest prior index
    double temperedness_ratio(const std::vector<bigint>& indices, std::size_t i) {
        if (i < 1 || i > indices.size()) throw RangeError("prefix position out of range");
        if (i == 1) return 1.0;
        bigint m = indices[0];
        for (std::size_t j = 1; j + 1 < i; ++j) m = std::max(m, indices[j]);
        const bigint& n = indices[i - 1];
        bigint num = inv_product_size(m, n), den = tile_size(n);
        return double((num * 1'000'000) / den) / 1e6;
    }

    // n_1 = 1, then n_{i+1} is the first integer above i+1 whose normalized
    // defect against the union of the prefix drops below 1/|union|
    std::vector<bigint> tempered_subsequence(std::size_t count, double c_target = 2.0) {
        if (count < 1) throw RangeError("need a positive prefix length");
        std::vector<bigint> ns{1};
        while (ns.size() < count) {
            bigint prev = ns.back();  // nested tiles: the union is F_prev
            bigint usize = tile_size(prev);
            auto ok = [&](const bigint& n) {
                bigint sym = inv_product_size(prev, n) - tile_size(n);
                return sym * usize <= tile_size(n);
            };
            bigint lo = bigint(ns.size()) + 1;  // candidates start at lo+1
            bigint hi = lo + 1;
            if (fam_ == TilingFamily::UTD_P) {
                // no closed form here, walk candidates one by one under the cap
                while (!ok(hi)) ++hi;
            } else {
                while (!ok(hi)) {
                    lo = hi;
                    hi *= 2;
                    if (bitlen(hi) > 256) throw ResourceLimit("tempered search diverged");
                }
                // predicate is monotone: the excess over |F_n| is a polynomial
                // in n with nonnegative coefficients over n^d
                while (hi - lo > 1) {
                    bigint mid = (lo + hi) / 2;
                    (ok(mid) ? hi : lo) = mid;
                }
            }
            if (hi <= ns.back()) throw RangeError("subsequence failed to increase");
            ns.push_back(hi);
        }
        for (std::size_t i = 2; i <= ns.size(); ++i)
            if (temperedness_ratio(ns, i) > c_target + 1e-9)
                throw RangeError("constructed prefix misses the tempered target");
        return ns;
    }

  private:
    GroupDescriptor G_;
    TilingFamily fam_;
    uint64_t cap_;
    std::mutex mu_;
    std::map<int64_t, std::shared_ptr<const WindowSet>> tiles_;
    using ElemSet = std::unordered_set<GroupElement, GroupElementHash>;
    std::map<int64_t, std::shared_ptr<const ElemSet>> tile_sets_;

    std::shared_ptr<const ElemSet> tile_set(int64_t n) {
        auto t = tile(n);
        std::lock_guard<std::mutex> lock(mu_);
        auto it = tile_sets_.find(n);
        if (it != tile_sets_.end()) return it->second;
        auto s = std::make_shared<ElemSet>(t->elems.begin(), t->elems.end());
        tile_sets_.emplace(n, s);
        return s;
    }

    struct CenterEnum {
        std::vector<GroupElement> list;  // BFS order, ties by NaturalIndex
        std::unordered_set<GroupElement, GroupElementHash> seen;
        std::vector<GroupElement> frontier;
    };
    std::map<int64_t, CenterEnum> ut_centers_;

    void guard_product(std::size_t a, std::size_t b) const {
        if (a != 0 && uint64_t(a) * uint64_t(b) > cap_)
            throw ResourceLimit("window product exceeds the resource cap");
    }

    int64_t ut_q(const bigint& m, int band) const {
        bigint q = 1;
        for (bigint e = 0; e < m * band; ++e) {
            q *= G_.p;
            if (q > (bigint(1) << 40)) throw ResourceLimit("exponent range too large");
        }
        return int64_t(q);
    }

    WindowSet build_tile(int64_t n) {
        if (n < 1) throw RangeError("tile index must be positive");
        if (tile_size(n) > cap_) throw ResourceLimit("tile exceeds the resource cap");
        std::vector<GroupElement> v;
        switch (fam_) {
            case TilingFamily::ZD_CUBES: {
                v.reserve(std::size_t(tile_size(n)));
                GroupElement g = G_.identity();
                std::vector<int64_t>& c = g.c;
                for (;;) {
                    v.push_back(g);
                    int i = G_.d - 1;
                    while (i >= 0 && c[i] == n - 1) c[i--] = 0;
                    if (i < 0) break;
                    ++c[i];
                }
                break;
            }
            case TilingFamily::HEIS3: {
                v.reserve(std::size_t(tile_size(n)));
                for (int64_t a = 0; a < n; ++a)
                    for (int64_t b = 0; b < n; ++b)
                        for (int64_t c = 0; c < n * n; ++c) {
                            GroupElement g = G_.identity();
                            g.c[0] = a;
                            g.c[1] = c;
                            g.c[2] = b;
                            v.push_back(g);
                        }
                break;
            }
            case TilingFamily::UTD_P: {
                // ordered product over pairs: rows bottom-up, then columns
                std::vector<std::pair<int, int>> pairs;
                for (int i = G_.d - 1; i >= 1; --i)
                    for (int j = i + 1; j <= G_.d; ++j) pairs.emplace_back(i, j);
                std::vector<int64_t> lo(pairs.size()), hi(pairs.size()), k(pairs.size());
                for (std::size_t t = 0; t < pairs.size(); ++t) {
                    int64_t q = ut_q(n, pairs[t].second - pairs[t].first);
                    lo[t] = -(q / 2);
                    hi[t] = (q + 1) / 2;
                    k[t] = lo[t];
                }
                v.reserve(std::size_t(tile_size(n)));
                for (;;) {
                    GroupElement g = G_.identity();
                    for (std::size_t t = 0; t < pairs.size(); ++t) {
                        if (k[t] == 0) continue;
                        GroupElement gen = G_.identity();
                        gen.c[G_.entry_pos(pairs[t].first, pairs[t].second)] = k[t];
                        g = G_.multiply(g, gen);
                    }
                    v.push_back(g);
                    std::size_t t = pairs.size();
                    while (t > 0 && k[t - 1] == hi[t - 1]) {
                        --t;
                        k[t] = lo[t];
                    }
                    if (t == 0) break;
                    ++k[t - 1];
                }
                break;
            }
        }
        return WindowSet::from_elements(G_, std::move(v));
    }

    // grow the BFS enumeration of Z_m until it holds at least `want` centers
    void ut_extend_centers(int64_t m, std::size_t want) {
        auto& ce = ut_centers_[m];
        if (ce.list.empty()) {
            ce.list.push_back(G_.identity());
            ce.seen.insert(G_.identity());
            ce.frontier.push_back(G_.identity());
        }
        std::vector<GroupElement> gens;
        for (int i = 1; i < G_.d; ++i)
            for (int j = i + 1; j <= G_.d; ++j) {
                GroupElement g = G_.identity();
                g.c[G_.entry_pos(i, j)] = ut_q(m, j - i);
                gens.push_back(g);
                gens.push_back(G_.inverse(g));
            }
        while (ce.list.size() < want && !ce.frontier.empty()) {
            if (ce.list.size() > cap_) throw SearchBudgetExceeded("center enumeration budget");
            std::vector<std::pair<bigint, GroupElement>> next;
            for (const auto& z : ce.frontier)
                for (const auto& g : gens) {
                    GroupElement w = G_.multiply(z, g);
                    if (ce.seen.insert(w).second) next.emplace_back(G_.index_of(w), w);
                }
            std::sort(next.begin(), next.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            ce.frontier.clear();
            for (auto& [i, w] : next) {
                ce.list.push_back(w);
                ce.frontier.push_back(std::move(w));
            }
        }
    }

    // semi-decision loop: walk the center enumeration until g lands in some
    // translate F_m z; the hit decides membership
    bool ut_is_center(int64_t m, const GroupElement& g) {
        auto tset = tile_set(m);
        std::size_t probe = 0;
        for (;;) {
            auto& ce = ut_centers_[m];
            if (probe >= ce.list.size()) {
                std::size_t before = ce.list.size();
                ut_extend_centers(m, ce.list.size() * 2 + 64);
                if (ut_centers_[m].list.size() == before)
                    throw SearchBudgetExceeded("center enumeration exhausted");
            }
            const GroupElement& z = ut_centers_[m].list[probe++];
            GroupElement h = G_.multiply(g, G_.inverse(z));
            if (tset->count(h)) return h == G_.identity();
            if (probe > cap_) throw SearchBudgetExceeded("membership probe budget");
        }
    }

    std::unordered_set<GroupElement, GroupElementHash> explicit_inv_product(int64_t m,
                                                                            int64_t n) {
        auto fm = tile(m);
        auto fn = tile(n);
        guard_product(fm->size(), fn->size());
        std::unordered_set<GroupElement, GroupElementHash> prod;
        prod.reserve(fm->size() * fn->size());
        for (const auto& a : fm->elems) {
            GroupElement ai = G_.inverse(a);
            for (const auto& b : fn->elems) prod.insert(G_.multiply(ai, b));
        }
        return prod;
    }
};

// tiling tokens: zd-cubes | heis3 | utd:p=<prime>
inline Monotiling make_monotiling(const GroupDescriptor& G, const std::string& token,
                                  uint64_t cap = 10'000'000) {
    if (token == "zd-cubes") return Monotiling(G, TilingFamily::ZD_CUBES, cap);
    if (token == "heis3") return Monotiling(G, TilingFamily::HEIS3, cap);
    if (token.rfind("utd", 0) == 0) {
        GroupDescriptor g2 = G;
        if (token.rfind("utd:p=", 0) == 0) {
            int64_t p = 0;
            if (!parse_i64(token.substr(6), p) || !is_prime(p))
                throw RangeError("bad tiling token: " + token);
            if (g2.p != 0 && g2.p != p)
                throw RangeError("tiling prime disagrees with group token");
            g2.p = p;
        } else if (token != "utd") {
            throw RangeError("bad tiling token: " + token);
        }
        return Monotiling(g2, TilingFamily::UTD_P, cap);
    }
    throw RangeError("bad tiling token: " + token);
}

}  // namespace folner
