#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "folner/monotiling.hpp"

using namespace folner;

namespace {

using Coords = std::vector<int64_t>;

GroupElement heis(int64_t a, int64_t b, int64_t c) {
    return GroupElement{{a, c, b}};  // storage keeps the (1,3) entry in the middle
}

std::set<Coords> to_set(const WindowSet& w) {
    std::set<Coords> s;
    for (const auto& g : w.elems) s.insert(g.c);
    return s;
}

// oracle: product set computed with plain std::set arithmetic
std::set<Coords> brute_product(const GroupDescriptor& G, const std::set<Coords>& A,
                               const std::set<Coords>& B, bool invert_left) {
    std::set<Coords> out;
    for (const auto& a : A) {
        GroupElement ga{a};
        if (invert_left) ga = G.inverse(ga);
        for (const auto& b : B) out.insert(G.multiply(ga, GroupElement{b}).c);
    }
    return out;
}

std::set<Coords> brute_symdiff(const std::set<Coords>& A, const std::set<Coords>& B) {
    std::set<Coords> out;
    for (const auto& a : A)
        if (!B.count(a)) out.insert(a);
    for (const auto& b : B)
        if (!A.count(b)) out.insert(b);
    return out;
}

}  // namespace

TEST_CASE("cube tiles enumerate boxes in index order", "[monotiling]") {
    Monotiling M(parse_group("zd:2"), TilingFamily::ZD_CUBES);
    auto t = M.tile(2);
    CHECK(t->size() == 4);
    CHECK(to_set(*t) == std::set<Coords>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    for (std::size_t i = 1; i < t->idx.size(); ++i) CHECK(t->idx[i - 1] < t->idx[i]);
    CHECK(M.tile_size(5) == 25);
    for (const auto& g : M.tile(3)->elems) CHECK(M.tile_contains(3, g));
    CHECK_FALSE(M.tile_contains(3, GroupElement{{3, 0}}));
    CHECK_FALSE(M.tile_contains(3, GroupElement{{-1, 2}}));
}

TEST_CASE("Heisenberg tiles are n,n,n^2 boxes", "[monotiling]") {
    Monotiling M(parse_group("ut:3"), TilingFamily::HEIS3);
    auto t = M.tile(2);
    CHECK(t->size() == 16);
    CHECK(M.tile_size(3) == 81);
    for (const auto& g : t->elems) {
        CHECK((g.c[0] >= 0 && g.c[0] < 2));
        CHECK((g.c[2] >= 0 && g.c[2] < 2));
        CHECK((g.c[1] >= 0 && g.c[1] < 4));
    }
    CHECK(t->contains(M.group(), M.group().identity()));
    for (std::size_t i = 1; i < t->idx.size(); ++i) CHECK(t->idx[i - 1] < t->idx[i]);
}

TEST_CASE("UT tile holds the literal exponent box", "[monotiling]") {
    Monotiling M(parse_group("ut:3:p=2"), TilingFamily::UTD_P);
    auto t = M.tile(1);
    // superdiagonal exponents range over [-1,1], the corner over [-2,2]
    CHECK(t->size() == 45);
    CHECK(M.tile_size(1) == 45);
    std::set<Coords> want;
    for (int64_t a = -1; a <= 1; ++a)
        for (int64_t b = -1; b <= 1; ++b)
            for (int64_t c = -2; c <= 2; ++c) want.insert({a, c, b});
    CHECK(to_set(*t) == want);
    CHECK(t->contains(M.group(), M.group().identity()));
}

TEST_CASE("tile materialization respects the cap", "[monotiling]") {
    Monotiling M(parse_group("zd:3"), TilingFamily::ZD_CUBES, 100);
    CHECK_THROWS_AS(M.tile(8), ResourceLimit);
    CHECK_NOTHROW(M.tile(4));
}

TEST_CASE("center membership, cube and Heisenberg", "[monotiling]") {
    Monotiling Z(parse_group("zd:1"), TilingFamily::ZD_CUBES);
    CHECK(Z.is_center(3, GroupElement{{6}}));
    CHECK(Z.is_center(3, GroupElement{{-3}}));
    CHECK_FALSE(Z.is_center(3, GroupElement{{4}}));

    Monotiling H(parse_group("ut:3"), TilingFamily::HEIS3);
    CHECK(H.is_center(2, heis(2, 0, 4)));
    CHECK(H.is_center(2, heis(-2, 2, -8)));
    CHECK_FALSE(H.is_center(2, heis(2, 0, 2)));
    CHECK_FALSE(H.is_center(2, heis(1, 0, 4)));
}

TEST_CASE("UT center decision walks the subgroup enumeration", "[monotiling]") {
    Monotiling M(parse_group("ut:3:p=2"), TilingFamily::UTD_P);
    auto T12 = [&](int64_t k) { return GroupElement{{k, 0, 0}}; };
    auto T13 = [&](int64_t k) { return GroupElement{{0, k, 0}}; };
    CHECK(M.is_center(1, T12(2)));
    CHECK_FALSE(M.is_center(1, T12(1)));
    CHECK(M.is_center(1, T13(4)));
    CHECK_FALSE(M.is_center(1, T13(2)));
    auto G = M.group();
    CHECK(M.is_center(1, G.multiply(T12(2), T13(4))));
    CHECK(M.is_center(1, G.multiply(G.inverse(T12(2)), T13(-4))));

    Monotiling tiny(parse_group("ut:3:p=2"), TilingFamily::UTD_P, 1000);
    CHECK_THROWS_AS(tiny.is_center(1, T12(100001)), SearchBudgetExceeded);
}

TEST_CASE("decompose matches the worked factorizations", "[monotiling]") {
    Monotiling M(parse_group("zd:2"), TilingFamily::ZD_CUBES);
    auto [f, z] = M.decompose(3, GroupElement{{-1, 4}});
    CHECK(f == GroupElement{{2, 1}});
    CHECK(z == GroupElement{{-3, 3}});

    Monotiling H(parse_group("ut:3"), TilingFamily::HEIS3);
    auto [hf, hz] = H.decompose(2, heis(3, 1, 5));
    CHECK(hf == heis(1, 1, 1));
    CHECK(hz == heis(2, 0, 4));
}

TEST_CASE("decompose is the unique tile factorization", "[monotiling]") {
    std::mt19937_64 rng(31);
    for (int64_t n : {2, 3}) {
        Monotiling M(parse_group("zd:2"), TilingFamily::ZD_CUBES);
        for (int64_t x = -6; x <= 6; ++x)
            for (int64_t y = -6; y <= 6; ++y) {
                GroupElement g{{x, y}};
                auto [f, z] = M.decompose(n, g);
                CHECK(M.tile_contains(n, f));
                CHECK(M.is_center(n, z));
                CHECK(M.group().multiply(f, z) == g);
                int hits = 0;
                for (const auto& fc : M.tile(n)->elems)
                    if (M.is_center(n, M.group().multiply(M.group().inverse(fc), g))) ++hits;
                CHECK(hits == 1);
            }
        Monotiling H(parse_group("ut:3"), TilingFamily::HEIS3);
        for (int t = 0; t < 150; ++t) {
            GroupElement g = heis(int64_t(rng() % 21) - 10, int64_t(rng() % 21) - 10,
                                  int64_t(rng() % 41) - 20);
            auto [f, z] = H.decompose(n, g);
            CHECK(H.tile_contains(n, f));
            CHECK(H.is_center(n, z));
            CHECK(H.group().multiply(f, z) == g);
            int hits = 0;
            for (const auto& fc : H.tile(n)->elems)
                if (H.is_center(n, H.group().multiply(H.group().inverse(fc), g))) ++hits;
            CHECK(hits == 1);
        }
    }
}

TEST_CASE("UT decompose returns a valid factorization", "[monotiling]") {
    Monotiling M(parse_group("ut:3:p=2"), TilingFamily::UTD_P);
    auto G = M.group();
    std::mt19937_64 rng(37);
    for (int t = 0; t < 40; ++t) {
        GroupElement g{{int64_t(rng() % 9) - 4, int64_t(rng() % 17) - 8, int64_t(rng() % 9) - 4}};
        auto [f, z] = M.decompose(1, g);
        CHECK(M.tile_contains(1, f));
        CHECK(M.is_center(1, z));
        CHECK(G.multiply(f, z) == g);
    }
}

TEST_CASE("center sets are symmetric", "[monotiling]") {
    Monotiling Z(parse_group("zd:2"), TilingFamily::ZD_CUBES);
    Monotiling H(parse_group("ut:3"), TilingFamily::HEIS3);
    Monotiling U(parse_group("ut:3:p=2"), TilingFamily::UTD_P);
    CHECK(Z.is_symmetric_centers(3));
    CHECK(H.is_symmetric_centers(2));
    CHECK(U.is_symmetric_centers(1, 60));
}

TEST_CASE("boundary and interior on the line", "[monotiling]") {
    Monotiling M(parse_group("zd:1"), TilingFamily::ZD_CUBES);
    auto G = M.group();
    WindowSet K = WindowSet::from_elements(G, {GroupElement{{0}}, GroupElement{{1}}});
    WindowSet F = *M.tile(6);
    CHECK(to_set(M.k_boundary(K, F, Side::Left)) == std::set<Coords>{{-1}, {5}});
    CHECK(to_set(M.k_interior(K, F, Side::Left)) ==
          std::set<Coords>{{0}, {1}, {2}, {3}, {4}});
}

TEST_CASE("boundaries match the set oracle", "[monotiling]") {
    std::mt19937_64 rng(41);
    auto check_family = [&](Monotiling& M, auto random_elem) {
        auto G = M.group();
        for (int trial = 0; trial < 15; ++trial) {
            std::vector<GroupElement> kv{G.identity()}, fv;
            for (int i = 0; i < 3; ++i) kv.push_back(random_elem(2));
            for (int i = 0; i < 30; ++i) fv.push_back(random_elem(5));
            WindowSet K = WindowSet::from_elements(G, kv);
            WindowSet F = WindowSet::from_elements(G, fv);
            std::set<Coords> ks = to_set(K), fs = to_set(F);
            for (Side side : {Side::Left, Side::Right}) {
                std::set<Coords> cand;
                for (const auto& k : ks)
                    for (const auto& f : fs) {
                        GroupElement ki = G.inverse(GroupElement{k});
                        cand.insert(side == Side::Left
                                        ? G.multiply(ki, GroupElement{f}).c
                                        : G.multiply(GroupElement{f}, ki).c);
                    }
                std::set<Coords> want;
                for (const auto& g : cand) {
                    bool in = false, out = false;
                    for (const auto& k : ks) {
                        GroupElement t = side == Side::Left
                                             ? G.multiply(GroupElement{k}, GroupElement{g})
                                             : G.multiply(GroupElement{g}, GroupElement{k});
                        (fs.count(t.c) ? in : out) = true;
                    }
                    if (in && out) want.insert(g);
                }
                CHECK(to_set(M.k_boundary(K, F, side)) == want);
            }
        }
    };
    Monotiling Z(parse_group("zd:2"), TilingFamily::ZD_CUBES);
    check_family(Z, [&](int64_t lim) {
        return GroupElement{{int64_t(rng() % (2 * lim + 1)) - lim,
                             int64_t(rng() % (2 * lim + 1)) - lim}};
    });
    Monotiling H(parse_group("ut:3"), TilingFamily::HEIS3);
    check_family(H, [&](int64_t lim) {
        return heis(int64_t(rng() % (2 * lim + 1)) - lim, int64_t(rng() % (2 * lim + 1)) - lim,
                    int64_t(rng() % (4 * lim + 1)) - 2 * lim);
    });
}

TEST_CASE("interior equivalence for windows containing the identity", "[monotiling]") {
    Monotiling M(parse_group("zd:2"), TilingFamily::ZD_CUBES);
    auto G = M.group();
    WindowSet K = *M.tile(2);
    WindowSet F = *M.tile(5);
    WindowSet il = M.k_interior(K, F, Side::Left);
    for (const auto& g : F.elems) {
        bool inside = true;
        for (const auto& k : K.elems)
            if (!F.contains(G, G.multiply(k, g))) inside = false;
        CHECK(il.contains(G, g) == inside);
    }
}

TEST_CASE("centers in window, line case and oracle sweep", "[monotiling]") {
    Monotiling M(parse_group("zd:1"), TilingFamily::ZD_CUBES);
    CHECK(to_set(M.centers_in_window(2, 6)) == std::set<Coords>{{2}, {4}});

    auto sweep = [](Monotiling& T, int64_t k, int64_t n) {
        auto G = T.group();
        auto fk = T.tile(k);
        WindowSet I = T.centers_in_window(k, n);
        std::set<Coords> want;
        for (const auto& g : T.tile(n)->elems) {
            if (!T.is_center(k, g)) continue;
            bool ok = true;
            for (const auto& x : fk->elems) {
                if (!T.tile_contains(n, G.multiply(x, g))) ok = false;
                if (!T.tile_contains(n, G.multiply(g, G.inverse(x)))) ok = false;
            }
            if (ok) want.insert(g.c);
        }
        CHECK(to_set(I) == want);
        WindowSet delta = T.covered(k, I);
        CHECK(delta.size() == I.size() * fk->size());  // translates stay disjoint
        for (const auto& g : delta.elems) CHECK(T.tile_contains(n, g));
    };
    Monotiling Z2(parse_group("zd:2"), TilingFamily::ZD_CUBES);
    sweep(Z2, 2, 6);
    sweep(Z2, 3, 8);
    Monotiling H(parse_group("ut:3"), TilingFamily::HEIS3);
    sweep(H, 2, 4);
}

TEST_CASE("center density", "[monotiling]") {
    Monotiling H(parse_group("ut:3"), TilingFamily::HEIS3);
    CHECK(H.center_count_in_tile(2, 4) * 16 == H.tile_size(4));
    CHECK(H.density_ratio(2, 4) == 1.0 / 16.0);
    Monotiling Z(parse_group("zd:2"), TilingFamily::ZD_CUBES);
    for (int64_t k = 1; k <= 4; ++k)
        for (int64_t n = k; n <= 16; n += k)
            CHECK(Z.center_count_in_tile(k, n) * Z.tile_size(k) == Z.tile_size(n));
}

TEST_CASE("Folner defect shrinks along the tiles", "[monotiling]") {
    Monotiling Z(parse_group("zd:1"), TilingFamily::ZD_CUBES);
    WindowSet K = WindowSet::from_elements(Z.group(), {GroupElement{{0}}, GroupElement{{1}}});
    for (int64_t n : {2, 4, 8, 16}) CHECK(Z.folner_defect(K, n) == 1.0 / double(n));

    Monotiling H(parse_group("ut:3"), TilingFamily::HEIS3);
    WindowSet K1 = WindowSet::from_elements(H.group(), {heis(1, 0, 0)});
    double prev = 10;
    for (int64_t n : {2, 3, 4, 6}) {
        double d = H.folner_defect(K1, n);
        CHECK(d < prev);
        prev = d;
        // oracle at small n
        if (n <= 3) {
            auto fs = to_set(*H.tile(n));
            std::set<Coords> ks{heis(1, 0, 0).c};
            auto kf = brute_product(H.group(), ks, fs, false);
            CHECK(d == double(brute_symdiff(kf, fs).size()) / double(fs.size()));
        }
    }
}

TEST_CASE("two-sided product cardinalities match brute sets", "[monotiling]") {
    Monotiling Z1(parse_group("zd:1"), TilingFamily::ZD_CUBES);
    Monotiling Z2(parse_group("zd:2"), TilingFamily::ZD_CUBES);
    Monotiling H(parse_group("ut:3"), TilingFamily::HEIS3);
    for (int64_t m = 1; m <= 5; ++m)
        for (int64_t n = 1; n <= 5; ++n) {
            for (Monotiling* M : {&Z1, &Z2}) {
                auto fm = to_set(*M->tile(m)), fn = to_set(*M->tile(n));
                auto prod = brute_product(M->group(), fm, fn, true);
                CHECK(M->inv_product_size(m, n) == int64_t(prod.size()));
            }
            auto fm = to_set(*H.tile(m)), fn = to_set(*H.tile(n));
            auto prod = brute_product(H.group(), fm, fn, true);
            CHECK(H.inv_product_size(m, n) == int64_t(prod.size()));
        }
}

TEST_CASE("tempered subsequence, cubes", "[monotiling]") {
    Monotiling Z(parse_group("zd:1"), TilingFamily::ZD_CUBES);
    auto ns = Z.tempered_subsequence(5);
    CHECK(ns == std::vector<bigint>{1, 3, 6, 30, 870});
    for (std::size_t i = 2; i <= ns.size(); ++i) CHECK(Z.temperedness_ratio(ns, i) <= 2.0);

    // oracle: replay the construction with brute set arithmetic
    auto G = Z.group();
    std::vector<int64_t> got{1};
    while (got.size() < 4) {
        std::set<Coords> ftilde;
        for (int64_t j : got)
            for (int64_t x = 0; x < j; ++x) ftilde.insert({x});
        for (int64_t n = int64_t(got.size()) + 2;; ++n) {
            std::set<Coords> fn;
            for (int64_t x = 0; x < n; ++x) fn.insert({x});
            auto prod = brute_product(G, ftilde, fn, true);
            if (brute_symdiff(fn, prod).size() * ftilde.size() <= fn.size()) {
                got.push_back(n);
                break;
            }
        }
    }
    CHECK(got == std::vector<int64_t>{1, 3, 6, 30});

    Monotiling Z2(parse_group("zd:2"), TilingFamily::ZD_CUBES);
    CHECK(Z2.tempered_subsequence(3) == std::vector<bigint>{1, 3, 37});
}

TEST_CASE("tempered subsequence, Heisenberg", "[monotiling]") {
    Monotiling H(parse_group("ut:3"), TilingFamily::HEIS3);
    auto ns = H.tempered_subsequence(3);
    REQUIRE(ns.size() == 3);
    CHECK(ns[0] == 1);
    CHECK(ns[1] == 3);
    CHECK(ns[2] == 408);
    // linear scan over the closed form confirms 408 is the first admissible index
    for (int64_t n = 5; n < 408; ++n) {
        bigint sym = H.inv_product_size(3, n) - H.tile_size(n);
        CHECK(sym * 81 > H.tile_size(n));
    }
    bigint sym = H.inv_product_size(3, 408) - H.tile_size(408);
    CHECK(sym * 81 <= H.tile_size(408));
    for (std::size_t i = 2; i <= ns.size(); ++i) CHECK(H.temperedness_ratio(ns, i) <= 2.0);
    // the prefix extends without materializing anything
    auto ns5 = H.tempered_subsequence(5);
    CHECK(ns5[3] > 408);
    for (std::size_t i = 2; i <= 5; ++i) CHECK(H.temperedness_ratio(ns5, i) <= 2.0);
}

TEST_CASE("raw Heisenberg ratios stay under the box bound", "[monotiling]") {
    Monotiling H(parse_group("ut:3"), TilingFamily::HEIS3);
    std::vector<bigint> raw{1, 2, 3, 4, 5};
    for (std::size_t i = 2; i <= raw.size(); ++i) {
        double r = H.temperedness_ratio(raw, i);
        CHECK(r <= 24.0);
        // brute union over every prior index agrees with the nested collapse
        auto G = H.group();
        std::set<Coords> uni;
        auto fi = to_set(*H.tile(int64_t(raw[i - 1])));
        for (std::size_t j = 0; j + 1 < i; ++j) {
            auto fj = to_set(*H.tile(int64_t(raw[j])));
            for (const auto& c : brute_product(G, fj, fi, true)) uni.insert(c);
        }
        CHECK(std::abs(r - double(uni.size()) / double(fi.size())) < 2e-6);
    }
}

TEST_CASE("UT tempered search stops at the cap", "[monotiling]") {
    Monotiling U(parse_group("ut:3:p=2"), TilingFamily::UTD_P);
    CHECK_THROWS_AS(U.tempered_subsequence(2), ResourceLimit);
}

TEST_CASE("tiling tokens", "[monotiling]") {
    auto M = make_monotiling(parse_group("zd:2"), "zd-cubes");
    CHECK(M.family() == TilingFamily::ZD_CUBES);
    CHECK_THROWS_AS(make_monotiling(parse_group("zd:2"), "heis3"), RangeError);
    CHECK_THROWS_AS(make_monotiling(parse_group("ut:3"), "utd"), RangeError);
    auto U = make_monotiling(parse_group("ut:3"), "utd:p=3");
    CHECK(U.group().p == 3);
    CHECK_THROWS_AS(make_monotiling(parse_group("ut:3:p=2"), "utd:p=3"), RangeError);
    CHECK_THROWS_AS(make_monotiling(parse_group("zd:2"), "what"), RangeError);
}
