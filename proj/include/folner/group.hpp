#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "folner/bigint.hpp"
#include "folner/errors.hpp"

namespace folner {

// Elements are stored componentwise: Z^d as d coordinates, UT(d,Z) as the
// d(d-1)/2 strictly upper matrix entries in row-major order
// (1,2),(1,3),...,(1,d),(2,3),...,(d-1,d). Unit diagonal is implicit.

enum class GroupFamily { ZD, UT };

inline int64_t checked_add(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw Overflow("integer add overflow");
    return r;
}

inline int64_t checked_mul(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw Overflow("integer mul overflow");
    return r;
}

struct GroupElement {
    std::vector<int64_t> c;

    bool operator==(const GroupElement& o) const = default;
};

struct GroupElementHash {
    std::size_t operator()(const GroupElement& g) const {
        std::size_t h = g.c.size();
        for (int64_t v : g.c)
            h ^= std::size_t(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

struct GroupDescriptor {
    GroupFamily family = GroupFamily::ZD;
    int d = 1;
    int64_t p = 0;  // optional prime, used by the ut:<d>:p=<prime> token

    // number of stored components per element
    int ncomp() const {
        return family == GroupFamily::ZD ? d : d * (d - 1) / 2;
    }

    // position of strict upper entry (i,j), 1-based, i < j <= d
    int entry_pos(int i, int j) const {
        return (i - 1) * (2 * d - i) / 2 + (j - i - 1);
    }

    GroupElement identity() const {
        return GroupElement{std::vector<int64_t>(ncomp(), 0)};
    }

    GroupElement multiply(const GroupElement& a, const GroupElement& b) const {
        check(a);
        check(b);
        GroupElement r = identity();
        if (family == GroupFamily::ZD) {
            for (int i = 0; i < d; ++i) r.c[i] = checked_add(a.c[i], b.c[i]);
            return r;
        }
        for (int i = 1; i < d; ++i)
            for (int j = i + 1; j <= d; ++j) {
                int64_t s = checked_add(a.c[entry_pos(i, j)], b.c[entry_pos(i, j)]);
                for (int k = i + 1; k < j; ++k)
                    s = checked_add(s, checked_mul(a.c[entry_pos(i, k)], b.c[entry_pos(k, j)]));
                r.c[entry_pos(i, j)] = s;
            }
        return r;
    }

    GroupElement inverse(const GroupElement& a) const {
        check(a);
        GroupElement r = identity();
        if (family == GroupFamily::ZD) {
            for (int i = 0; i < d; ++i) {
                if (a.c[i] == INT64_MIN) throw Overflow("integer negate overflow");
                r.c[i] = -a.c[i];
            }
            return r;
        }
        // unitriangular inversion, solved by increasing band j-i
        for (int len = 1; len < d; ++len)
            for (int i = 1; i + len <= d; ++i) {
                int j = i + len;
                int64_t s = a.c[entry_pos(i, j)];
                for (int k = i + 1; k < j; ++k)
                    s = checked_add(s, checked_mul(a.c[entry_pos(i, k)], r.c[entry_pos(k, j)]));
                if (s == INT64_MIN) throw Overflow("integer negate overflow");
                r.c[entry_pos(i, j)] = -s;
            }
        return r;
    }

    // admissible indexing: Z maps n to 2|n| + (n >= 0), components fold left
    // through the Cantor pairing
    bigint index_of(const GroupElement& g) const {
        check(g);
        bigint acc = z_index(g.c[0]);
        for (int i = 1; i < ncomp(); ++i) acc = cantor_pair(acc, z_index(g.c[i]));
        return acc;
    }

    GroupElement element_at(const bigint& index) const {
        int m = ncomp();
        std::vector<bigint> comp(m);
        bigint acc = index;
        for (int i = m - 1; i >= 1; --i) {
            auto [x, y] = cantor_unpair(acc);
            comp[i] = y;
            acc = x;
        }
        comp[0] = acc;
        GroupElement g = identity();
        for (int i = 0; i < m; ++i) g.c[i] = z_unindex(comp[i]);
        return g;
    }

    static bigint cantor_pair(const bigint& x, const bigint& y) {
        return (x + y) * (x + y + 1) / 2 + y;
    }

    static std::pair<bigint, bigint> cantor_unpair(const bigint& z) {
        bigint disc = 8 * z + 1;
        bigint w = (boost::multiprecision::sqrt(disc) - 1) / 2;
        bigint y = z - w * (w + 1) / 2;
        return {w - y, y};
    }

    std::string token() const {
        std::string t = family == GroupFamily::ZD ? "zd:" : "ut:";
        t += std::to_string(d);
        if (family == GroupFamily::UT && p != 0) t += ":p=" + std::to_string(p);
        return t;
    }

  private:
    void check(const GroupElement& g) const {
        if (int(g.c.size()) != ncomp())
            throw RangeError("element has wrong component count for " + token());
    }

    static bigint z_index(int64_t n) {
        bigint a = n < 0 ? -bigint(n) : bigint(n);
        return 2 * a + (n >= 0 ? 1 : 0);
    }

    static int64_t z_unindex(const bigint& i) {
        if (i <= 0) throw IndexNotInRange("index has no preimage in Z");
        bigint n = (i % 2 == 1) ? bigint((i - 1) / 2) : bigint(-(i / 2));
        if (n < INT64_MIN || n > INT64_MAX) throw Overflow("coordinate exceeds 64 bits");
        return int64_t(n);
    }
};

inline bool parse_i64(const std::string& s, int64_t& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    errno = 0;
    long long v = std::strtoll(s.c_str(), &end, 10);
    if (errno != 0 || end != s.c_str() + s.size()) return false;
    out = v;
    return true;
}

inline bool is_prime(int64_t p) {
    if (p < 2) return false;
    for (int64_t q = 2; q * q <= p; ++q)
        if (p % q == 0) return false;
    return true;
}

// group tokens: zd:<d> and ut:<d>[:p=<prime>]
inline GroupDescriptor parse_group(const std::string& token) {
    auto fail = [&] { throw RangeError("bad group token: " + token); };
    auto c1 = token.find(':');
    if (c1 == std::string::npos) fail();
    std::string fam = token.substr(0, c1);
    std::string rest = token.substr(c1 + 1);
    GroupDescriptor g;
    std::string dstr = rest;
    auto c2 = rest.find(':');
    if (c2 != std::string::npos) {
        dstr = rest.substr(0, c2);
        std::string popt = rest.substr(c2 + 1);
        if (popt.rfind("p=", 0) != 0 || !parse_i64(popt.substr(2), g.p) || !is_prime(g.p))
            fail();
    }
    int64_t dv = 0;
    if (!parse_i64(dstr, dv) || dv < 1 || dv > 16) fail();
    g.d = int(dv);
    if (fam == "zd") {
        if (c2 != std::string::npos) fail();
        g.family = GroupFamily::ZD;
    } else if (fam == "ut") {
        if (dv < 2) fail();
        g.family = GroupFamily::UT;
    } else {
        fail();
    }
    return g;
}

}  // namespace folner
