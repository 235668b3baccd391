#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>

#include "folner/group.hpp"

using namespace folner;

namespace {

// oracle: dense unitriangular matrix product, no shortcuts
std::vector<std::vector<int64_t>> to_matrix(const GroupDescriptor& G, const GroupElement& g) {
    int d = G.d;
    std::vector<std::vector<int64_t>> m(d, std::vector<int64_t>(d, 0));
    for (int i = 0; i < d; ++i) m[i][i] = 1;
    for (int i = 1; i < d; ++i)
        for (int j = i + 1; j <= d; ++j) m[i - 1][j - 1] = g.c[G.entry_pos(i, j)];
    return m;
}

GroupElement from_matrix(const GroupDescriptor& G, const std::vector<std::vector<int64_t>>& m) {
    GroupElement g = G.identity();
    for (int i = 1; i < G.d; ++i)
        for (int j = i + 1; j <= G.d; ++j) g.c[G.entry_pos(i, j)] = m[i - 1][j - 1];
    return g;
}

GroupElement matmul_oracle(const GroupDescriptor& G, const GroupElement& a,
                           const GroupElement& b) {
    auto ma = to_matrix(G, a), mb = to_matrix(G, b);
    int d = G.d;
    std::vector<std::vector<int64_t>> mc(d, std::vector<int64_t>(d, 0));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) mc[i][j] += ma[i][k] * mb[k][j];
    return from_matrix(G, mc);
}

// Heisenberg triples (a,b,c) correspond to entries A12=a, A23=b, A13=c
GroupElement heis(const GroupDescriptor& G, int64_t a, int64_t b, int64_t c) {
    GroupElement g = G.identity();
    g.c[0] = a;
    g.c[1] = c;
    g.c[2] = b;
    return g;
}

GroupElement random_elem(const GroupDescriptor& G, std::mt19937_64& rng, int64_t lim) {
    GroupElement g = G.identity();
    std::uniform_int_distribution<int64_t> dist(-lim, lim);
    for (auto& v : g.c) v = dist(rng);
    return g;
}

}  // namespace

TEST_CASE("Z indexing walks 0,-1,1,-2,2,...", "[group]") {
    GroupDescriptor G{GroupFamily::ZD, 1};
    auto at = [&](int64_t n) { return G.index_of(GroupElement{{n}}); };
    CHECK(at(0) == 1);
    CHECK(at(-1) == 2);
    CHECK(at(1) == 3);
    CHECK(at(-2) == 4);
    CHECK(at(2) == 5);
    for (int64_t n = -1000; n <= 1000; ++n) {
        bigint i = at(n);
        CHECK(G.element_at(i).c[0] == n);
    }
    CHECK_THROWS_AS(G.element_at(bigint(0)), IndexNotInRange);
}

TEST_CASE("Cantor pairing against a diagonal-walk table", "[group]") {
    std::map<std::pair<int, int>, bigint> table;
    bigint pos = 0;
    for (int s = 0; s <= 60; ++s)
        for (int y = 0; y <= s; ++y) table[{s - y, y}] = pos++;
    for (auto& [xy, want] : table) {
        CHECK(GroupDescriptor::cantor_pair(xy.first, xy.second) == want);
        auto [x, y] = GroupDescriptor::cantor_unpair(want);
        CHECK(x == xy.first);
        CHECK(y == xy.second);
    }
}

TEST_CASE("Z^2 origin sits at pair(1,1)", "[group]") {
    GroupDescriptor G{GroupFamily::ZD, 2};
    CHECK(G.index_of(GroupElement{{0, 0}}) == GroupDescriptor::cantor_pair(1, 1));
    CHECK(G.index_of(GroupElement{{0, 0}}) == 4);
}

TEST_CASE("indexing is injective and invertible on a grid", "[group]") {
    for (GroupDescriptor G : {GroupDescriptor{GroupFamily::ZD, 2},
                              GroupDescriptor{GroupFamily::ZD, 3},
                              GroupDescriptor{GroupFamily::UT, 3}}) {
        std::mt19937_64 rng(7);
        std::map<bigint, GroupElement> seen;
        for (int t = 0; t < 3000; ++t) {
            GroupElement g = random_elem(G, rng, 50);
            bigint i = G.index_of(g);
            auto [it, fresh] = seen.emplace(i, g);
            if (!fresh) CHECK(it->second == g);
            CHECK(G.element_at(i) == g);
        }
    }
}

TEST_CASE("Heisenberg worked products", "[group]") {
    GroupDescriptor G{GroupFamily::UT, 3};
    CHECK(G.multiply(heis(G, 1, 1, 1), heis(G, -1, -1, 0)) == G.identity());
    CHECK(G.inverse(heis(G, 2, 3, 1)) == heis(G, -2, -3, 5));
    // (a,b,c)(x,y,z) = (a+x, b+y, c+z+ya)
    CHECK(G.multiply(heis(G, 2, 0, 1), heis(G, 1, 5, 3)) == heis(G, 3, 5, 14));
}

TEST_CASE("group laws against the matrix oracle", "[group]") {
    for (int d : {3, 4, 5}) {
        GroupDescriptor G{GroupFamily::UT, d};
        std::mt19937_64 rng(11 + d);
        for (int t = 0; t < 4000; ++t) {
            GroupElement a = random_elem(G, rng, 40), b = random_elem(G, rng, 40),
                         c = random_elem(G, rng, 40);
            GroupElement ab = G.multiply(a, b);
            CHECK(ab == matmul_oracle(G, a, b));
            CHECK(G.multiply(ab, c) == G.multiply(a, G.multiply(b, c)));
            CHECK(G.multiply(a, G.identity()) == a);
            CHECK(G.multiply(G.inverse(a), a) == G.identity());
            CHECK(G.multiply(a, G.inverse(a)) == G.identity());
        }
    }
    GroupDescriptor Z3{GroupFamily::ZD, 3};
    std::mt19937_64 rng(23);
    for (int t = 0; t < 4000; ++t) {
        GroupElement a = random_elem(Z3, rng, 1'000'000), b = random_elem(Z3, rng, 1'000'000);
        CHECK(Z3.multiply(a, b) == Z3.multiply(b, a));
        CHECK(Z3.multiply(a, Z3.inverse(a)) == Z3.identity());
    }
}

TEST_CASE("coordinate overflow fails loudly", "[group]") {
    GroupDescriptor Z{GroupFamily::ZD, 1};
    CHECK_THROWS_AS(Z.multiply(GroupElement{{INT64_MAX}}, GroupElement{{1}}), Overflow);
    GroupDescriptor U{GroupFamily::UT, 3};
    GroupElement big = U.identity();
    big.c[0] = int64_t(1) << 40;
    big.c[2] = int64_t(1) << 40;
    CHECK_THROWS_AS(U.multiply(big, big), Overflow);
}

TEST_CASE("UT indices with a zero component have no preimage", "[group]") {
    GroupDescriptor G{GroupFamily::UT, 3};
    // pair(pair(1,1),0) unpairs to a zero slot
    bigint bad = GroupDescriptor::cantor_pair(GroupDescriptor::cantor_pair(1, 1), 0);
    CHECK_THROWS_AS(G.element_at(bad), IndexNotInRange);
}

TEST_CASE("group tokens parse and print", "[group]") {
    GroupDescriptor g = parse_group("zd:2");
    CHECK(g.family == GroupFamily::ZD);
    CHECK(g.d == 2);
    CHECK(g.token() == "zd:2");
    GroupDescriptor u = parse_group("ut:3:p=2");
    CHECK(u.family == GroupFamily::UT);
    CHECK(u.d == 3);
    CHECK(u.p == 2);
    CHECK(u.token() == "ut:3:p=2");
    CHECK_THROWS_AS(parse_group("zd:0"), RangeError);
    CHECK_THROWS_AS(parse_group("ut:1"), RangeError);
    CHECK_THROWS_AS(parse_group("ut:3:p=4"), RangeError);
    CHECK_THROWS_AS(parse_group("sl:2"), RangeError);
    CHECK_THROWS_AS(parse_group("zd:2:p=3"), RangeError);
}
