#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <vector>

#include "baire/bairetree.hpp"
#include "baire/oracle.hpp"
#include "test_support.hpp"

using namespace baire;

namespace {

DistanceMatrix three_points() {
    DistanceMatrix m(3);
    m(0, 1) = m(1, 0) = 1;
    m(0, 2) = m(2, 0) = 2;
    m(1, 2) = m(2, 1) = 2;
    return m;
}

std::vector<std::string> names(const FcaContext& ctx, const std::vector<std::vector<std::size_t>>& cs) {
    std::vector<std::string> out;
    for (const auto& c : cs) {
        std::string s;
        for (auto i : c) s += ctx.objects[i];
        out.push_back(s);
    }
    return out;
}

std::set<std::string> labels(const FcaLattice& lat) {
    std::set<std::string> out;
    for (const auto& v : lat.vertices) out.insert(v.label());
    return out;
}

}  // namespace

TEST(Hac, ThreePointsForcedOrder) {
    const auto d = hac_single_linkage(three_points());
    ASSERT_EQ(d.merges.size(), 2u);
    EXPECT_EQ(d.merges[0], (Merge{0, 1, 1.0, 2}));
    EXPECT_EQ(d.merges[1], (Merge{2, 3, 2.0, 3}));
    EXPECT_EQ(to_merge_list(d), "0 1 1\n2 3 2\n");
}

TEST(Hac, SinglePointHasNoMerges) {
    EXPECT_TRUE(hac_single_linkage(DistanceMatrix(1)).merges.empty());
    EXPECT_TRUE(hac_single_linkage(DistanceMatrix(0)).merges.empty());
}

TEST(Hac, RejectsBadInput) {
    auto m = three_points();
    m(0, 1) = 5;
    EXPECT_THROW(hac_single_linkage(m), DomainError);
    m = three_points();
    m(0, 2) = m(2, 0) = -1;
    EXPECT_THROW(hac_single_linkage(m), DomainError);
    m = three_points();
    m(1, 1) = 0.5;
    EXPECT_THROW(hac_single_linkage(m), DomainError);
}

TEST(Hac, TiesTakeLexicographicallySmallestPair) {
    DistanceMatrix m(4, 1.0);
    for (std::size_t i = 0; i < 4; ++i) m(i, i) = 0;
    const auto d = hac_single_linkage(m);
    EXPECT_EQ(d.merges[0].left, 0u);
    EXPECT_EQ(d.merges[0].right, 1u);
    // Clusters rank by their smallest leaf, so {0,1} + 2 beats 2 + 3.
    EXPECT_EQ(d.merges[1].left, 2u);
    EXPECT_EQ(d.merges[1].right, 4u);
    EXPECT_EQ(d.merges[2].left, 3u);
    EXPECT_EQ(d.merges[2].right, 5u);
}

TEST(Cophenetic, ThreePoints) {
    const auto c = cophenetic_matrix(hac_single_linkage(three_points()));
    EXPECT_EQ(c, three_points());
}

TEST(Cophenetic, ChainDendrogramMatchesRecursiveOracle) {
    // Merge s joins leaf s+1 onto the cluster holding 0..s at level s+1.
    const std::size_t n = 12;
    Dendrogram d;
    d.leaf_count = n;
    d.merges.push_back({0, 1, 1.0, 2});
    for (std::size_t s = 1; s + 1 < n; ++s) d.merges.push_back({n + s - 1, s + 1, static_cast<double>(s + 1), s + 2});
    const auto c = cophenetic_matrix(d);
    const std::function<double(std::size_t, std::size_t)> join = [&](std::size_t i, std::size_t j) -> double {
        if (i == j) return 0.0;
        return static_cast<double>(std::max(i, j));
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) ASSERT_EQ(c(i, j), join(i, j));
    EXPECT_TRUE(check_ultrametric(c).ok());
}

TEST(Cophenetic, BaireMatrixIsAFixedPoint) {
    const auto keys = testkit::random_keys(100, 3, 10, 6, false, 3);
    const auto m = baire_matrix(keys);
    EXPECT_EQ(cophenetic_matrix(hac_single_linkage(m)), m);
    EXPECT_EQ(cophenetic_matrix(hac_complete_linkage(m)), m);
}

TEST(Cophenetic, UltrametricInputIsReproduced) {
    // Random ultrametric: cophenetic matrix of a random dendrogram.
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 30;
        DistanceMatrix m(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) m(i, j) = m(j, i) = 1.0 + static_cast<double>(rng() % 1000);
        const auto u = cophenetic_matrix(hac_single_linkage(m));
        ASSERT_TRUE(check_ultrametric(u).ok());
        ASSERT_EQ(cophenetic_matrix(hac_single_linkage(u)), u);
    }
}

TEST(Axioms, CollinearEuclideanIsMetricNotUltrametric) {
    const std::vector<double> x{0.0, 1.0, 2.0};
    const auto m = DistanceMatrix::from_function(3, [&](std::size_t i, std::size_t j) { return std::abs(x[i] - x[j]); });
    EXPECT_TRUE(check_metric(m).ok());
    const auto u = check_ultrametric(m);
    EXPECT_FALSE(u.ok());
    ASSERT_FALSE(u.violations.empty());
    EXPECT_EQ(u.violations.front().axiom, "A5");
}

TEST(Axioms, BaireMatrixIsUltrametric) {
    const auto keys = testkit::random_keys(150, 8, 10, 6, true, 3);
    const auto r = check_ultrametric(baire_matrix(keys));
    EXPECT_TRUE(r.ok());
    EXPECT_FALSE(r.sampled);
    EXPECT_EQ(r.triples_checked, 150u * 150u * 150u);
}

TEST(Axioms, NegativeEntryIsA1) {
    auto m = three_points();
    m(0, 1) = m(1, 0) = -1;
    const auto r = check_metric(m);
    EXPECT_FALSE(r.ok());
    EXPECT_TRUE(std::any_of(r.violations.begin(), r.violations.end(), [](const Violation& v) { return v.axiom == "A1"; }));
}

TEST(Axioms, AsymmetryAndIdentity) {
    auto m = three_points();
    m(0, 1) = 1.5;
    auto r = check_metric(m);
    EXPECT_TRUE(std::any_of(r.violations.begin(), r.violations.end(), [](const Violation& v) { return v.axiom == "A3"; }));
    m = three_points();
    m(0, 1) = m(1, 0) = 0;
    r = check_metric(m);
    EXPECT_TRUE(std::any_of(r.violations.begin(), r.violations.end(), [](const Violation& v) { return v.axiom == "A2"; }));
}

TEST(Axioms, SamplesAboveThreshold) {
    const auto keys = testkit::random_keys(400, 9, 10, 6, true, 3);
    CheckOptions opt;
    opt.samples = 20000;
    const auto r = check_ultrametric(baire_matrix(keys), opt);
    EXPECT_TRUE(r.sampled);
    EXPECT_EQ(r.triples_checked, 20000u);
    EXPECT_TRUE(r.ok());
}

TEST(Fca, Dissimilarities) {
    const std::vector<std::uint8_t> a{1, 0, 1}, b{0, 1, 1}, c{1, 0, 1}, ones{1, 1, 1};
    EXPECT_EQ(fca_dissimilarity(a, b).label(), "d1,d2");
    EXPECT_EQ(fca_dissimilarity(a, c).label(), "d2");
    EXPECT_EQ(fca_dissimilarity(ones, ones).level(), 0);
    EXPECT_EQ(fca_dissimilarity(ones, ones).label(), "{}");
    const std::vector<std::uint8_t> two{1, 0};
    EXPECT_THROW(fca_dissimilarity(a, two), ShapeError);
}

TEST(Fca, DemoLattice) {
    const auto ctx = FcaContext::demo_context();
    const auto lat = fca_lattice(ctx);
    EXPECT_EQ(labels(lat), (std::set<std::string>{"d2", "d1,d2", "d2,d3", "d1,d2,d3"}));
    // Diamond: d2 below both pairs, both pairs below the top.
    std::set<std::pair<std::string, std::string>> edges;
    for (const auto& [lo, hi] : lat.edges) edges.emplace(lat.vertices[lo].label(), lat.vertices[hi].label());
    EXPECT_EQ(edges, (std::set<std::pair<std::string, std::string>>{
                         {"d2", "d1,d2"}, {"d2", "d2,d3"}, {"d1,d2", "d1,d2,d3"}, {"d2,d3", "d1,d2,d3"}}));
    EXPECT_EQ(lat.pair_map.size(), 10u);
    const auto top = lat.pairs_for(AttributeSet(0b111, 3));
    EXPECT_EQ(top, (std::vector<std::pair<std::size_t, std::size_t>>{{1, 3}, {3, 4}}));  // be, ef
}

TEST(Fca, SmallLattices) {
    FcaContext ones{{"x", "y", "z"}, {"v1", "v2"}, {{1, 1}, {1, 1}, {1, 1}}};
    const auto l1 = fca_lattice(ones);
    ASSERT_EQ(l1.vertices.size(), 1u);
    EXPECT_EQ(l1.vertices[0].level(), 0);
    FcaContext two{{"x", "y"}, {"v1", "v2"}, {{1, 0}, {0, 1}}};
    const auto l2 = fca_lattice(two);
    EXPECT_EQ(l2.vertices.size(), 1u);
    EXPECT_TRUE(l2.edges.empty());
    FcaContext one{{"x"}, {"v1"}, {{1}}};
    EXPECT_THROW(fca_lattice(one), DomainError);
}

TEST(Fca, DemoClusters) {
    const auto ctx = FcaContext::demo_context();
    EXPECT_EQ(names(ctx, fca_clusters(ctx, 2)), (std::vector<std::string>{"abcf", "ace"}));
    EXPECT_EQ(names(ctx, fca_clusters(ctx, 3)), (std::vector<std::string>{"abcef"}));
    EXPECT_EQ(names(ctx, fca_clusters(ctx, 0)), (std::vector<std::string>{"a", "b", "c", "e", "f"}));
    EXPECT_EQ(names(ctx, fca_clusters(ctx, 1)), (std::vector<std::string>{"ac", "b", "e", "f"}));
    EXPECT_THROW(fca_clusters(ctx, 4), RangeError);
    EXPECT_THROW(fca_clusters(ctx, -1), RangeError);
}

TEST(Fca, ScaleLimit) {
    FcaContext big;
    for (int i = 0; i < 21; ++i) {
        big.objects.push_back("o" + std::to_string(i));
        big.rows.push_back({1, 0});
    }
    big.attributes = {"v1", "v2"};
    EXPECT_THROW(fca_clusters(big, 1), ScaleError);
}

TEST(Fca, AllOnesDuplicatesAtLevelZero) {
    FcaContext ctx{{"x", "y", "z"}, {"v1", "v2"}, {{1, 1}, {1, 1}, {1, 0}}};
    EXPECT_EQ(names(ctx, fca_clusters(ctx, 0)), (std::vector<std::string>{"xy", "z"}));
}

// ---- properties -----------------------------------------------------------

TEST(OracleProperty, CopheneticOutputAlwaysUltrametric) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 5 + rng() % 40;
        DistanceMatrix m(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) m(i, j) = m(j, i) = u(rng);
        for (auto linkage : {Linkage::single, Linkage::complete}) {
            const auto d = hac(m, linkage);
            ASSERT_EQ(d.merges.size(), n - 1);
            for (std::size_t s = 1; s < d.merges.size(); ++s) ASSERT_GE(d.merges[s].level, d.merges[s - 1].level);
            ASSERT_EQ(d.merges.back().size, n);
            ASSERT_TRUE(check_ultrametric(cophenetic_matrix(d)).ok());
        }
    }
}

TEST(OracleProperty, FcaSymmetryLevelBoundAndCoverage) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + rng() % 12, attrs = 1 + rng() % 6;
        FcaContext ctx;
        for (std::size_t i = 0; i < n; ++i) {
            ctx.objects.push_back(std::string(1, static_cast<char>('a' + i)));
            std::vector<std::uint8_t> row(attrs);
            for (auto& v : row) v = rng() & 1;
            ctx.rows.push_back(row);
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const auto a = fca_dissimilarity(ctx.rows[i], ctx.rows[j]);
                ASSERT_EQ(a, fca_dissimilarity(ctx.rows[j], ctx.rows[i]));
                ASSERT_LE(a.level(), static_cast<int>(attrs));
            }
        for (int level = 0; level <= static_cast<int>(attrs); ++level) {
            const auto cs = fca_clusters(ctx, level);
            std::set<std::size_t> covered;
            for (const auto& c : cs) covered.insert(c.begin(), c.end());
            ASSERT_EQ(covered.size(), n);
            // Cliques and maximal.
            for (const auto& c : cs) {
                for (auto x : c)
                    for (auto y : c)
                        if (x < y) ASSERT_LE(fca_dissimilarity(ctx.rows[x], ctx.rows[y]).level(), level);
                for (std::size_t o = 0; o < n; ++o) {
                    if (std::find(c.begin(), c.end(), o) != c.end()) continue;
                    bool joins = true;
                    for (auto x : c) joins = joins && fca_dissimilarity(ctx.rows[x], ctx.rows[o]).level() <= level;
                    ASSERT_FALSE(joins);
                }
            }
        }
    }
}
