#pragma once
// Reference implementations used to verify the prefix tree: a naive
// agglomerative clustering, the cophenetic (induced ultrametric) matrix of its
// dendrogram, metric/ultrametric axiom checkers, and the formal concept
// analysis view of pairwise attribute-set dissimilarities.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "baire/errors.hpp"
#include "baire/madic.hpp"

namespace baire {

// Square n x n matrix of pairwise dissimilarities.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n, double fill = 0.0) : n_(n), d_(n * n, fill) {}

    template <class Fn>
    static DistanceMatrix from_function(std::size_t n, Fn&& dist) {
        DistanceMatrix m(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double v = dist(i, j);
                m(i, j) = v;
                m(j, i) = v;
            }
        return m;
    }

    std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return d_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }

    friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<double> d_;
};

// Pairwise Baire distances with a zero diagonal (an object is at distance 0
// from itself; distinct objects with identical keys sit at base^(-|K|)).
inline DistanceMatrix baire_matrix(std::span<const DigitKey> keys) {
    return DistanceMatrix::from_function(
        keys.size(), [&](std::size_t i, std::size_t j) { return baire_distance(keys[i], keys[j]).value(); });
}

// Clusters are numbered like scipy: leaves 0..n-1, merge s creates n+s.
struct Merge {
    std::size_t left = 0;
    std::size_t right = 0;
    double level = 0;
    std::size_t size = 0;

    friend bool operator==(const Merge&, const Merge&) = default;
};

struct Dendrogram {
    std::size_t leaf_count = 0;
    std::vector<Merge> merges;
};

enum class Linkage { single, complete };

inline void require_dissimilarity(const DistanceMatrix& m) {
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (m(i, i) != 0.0) throw DomainError("dissimilarity matrix has a nonzero diagonal");
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!(m(i, j) >= 0.0) || !std::isfinite(m(i, j)))
                throw DomainError("dissimilarity matrix has a negative or non-finite entry");
            if (m(i, j) != m(j, i)) throw DomainError("dissimilarity matrix is not symmetric");
        }
    }
}

// O(n^3) agglomeration. At each step the closest pair of active clusters is
// merged; ties go to the lexicographically smallest pair, where a cluster is
// identified by its smallest leaf index. Each merge lists the smaller id first.
inline Dendrogram hac(const DistanceMatrix& input, Linkage linkage = Linkage::single) {
    require_dissimilarity(input);
    const std::size_t n = input.size();
    Dendrogram dend;
    dend.leaf_count = n;
    if (n < 2) return dend;

    DistanceMatrix d = input;
    std::vector<bool> active(n, true);
    std::vector<std::size_t> id(n), size(n, 1);
    for (std::size_t i = 0; i < n; ++i) id[i] = i;

    for (std::size_t step = 0; step + 1 < n; ++step) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) continue;
            for (std::size_t j = i + 1; j < n; ++j)
                if (active[j] && d(i, j) < best) {
                    best = d(i, j);
                    bi = i;
                    bj = j;
                }
        }
        dend.merges.push_back({std::min(id[bi], id[bj]), std::max(id[bi], id[bj]), best, size[bi] + size[bj]});
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == bi || k == bj) continue;
            const double v = linkage == Linkage::single ? std::min(d(bi, k), d(bj, k))
                                                        : std::max(d(bi, k), d(bj, k));
            d(bi, k) = v;
            d(k, bi) = v;
        }
        active[bj] = false;
        id[bi] = n + step;
        size[bi] += size[bj];
    }
    return dend;
}

inline Dendrogram hac_single_linkage(const DistanceMatrix& m) { return hac(m, Linkage::single); }
inline Dendrogram hac_complete_linkage(const DistanceMatrix& m) { return hac(m, Linkage::complete); }

// D(i, j) = level of the first merge that puts i and j together.
inline DistanceMatrix cophenetic_matrix(const Dendrogram& dend) {
    const std::size_t n = dend.leaf_count;
    DistanceMatrix out(n);
    std::vector<std::vector<std::size_t>> members(n + dend.merges.size());
    for (std::size_t i = 0; i < n; ++i) members[i] = {i};
    for (std::size_t s = 0; s < dend.merges.size(); ++s) {
        const Merge& m = dend.merges[s];
        if (m.left >= n + s || m.right >= n + s) throw DomainError("merge refers to a later cluster");
        auto& a = members[m.left];
        auto& b = members[m.right];
        for (std::size_t i : a)
            for (std::size_t j : b) {
                out(i, j) = m.level;
                out(j, i) = m.level;
            }
        auto& merged = members[n + s];
        merged.reserve(a.size() + b.size());
        merged.insert(merged.end(), a.begin(), a.end());
        merged.insert(merged.end(), b.begin(), b.end());
        a.clear();
        a.shrink_to_fit();
        b.clear();
        b.shrink_to_fit();
    }
    return out;
}

// One merge per line: "left right level".
inline std::string to_merge_list(const Dendrogram& dend) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (const auto& m : dend.merges) os << m.left << ' ' << m.right << ' ' << m.level << '\n';
    return os.str();
}

struct Violation {
    std::string axiom;  // "A1".."A5"
    std::size_t i = 0, j = 0, k = 0;
};

struct AxiomReport {
    bool ultrametric_checked = false;
    bool sampled = false;
    std::uint64_t triples_checked = 0;
    std::uint64_t violation_count = 0;
    std::vector<Violation> violations;  // first few only

    bool ok() const noexcept { return violation_count == 0; }
};

struct CheckOptions {
    double tolerance = 0.0;           // slack allowed on A4 / A5
    std::size_t exhaustive_limit = 300;
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 0;
    std::size_t max_reported = 100;
};

namespace detail {

inline AxiomReport check_axioms(const DistanceMatrix& m, bool ultrametric, const CheckOptions& opt) {
    AxiomReport rep;
    rep.ultrametric_checked = ultrametric;
    const std::size_t n = m.size();
    const auto report = [&](const char* axiom, std::size_t i, std::size_t j, std::size_t k) {
        ++rep.violation_count;
        if (rep.violations.size() < opt.max_reported) rep.violations.push_back({axiom, i, j, k});
    };

    // Pairwise axioms are always exhaustive.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double v = m(i, j);
            if (!(v >= 0)) report("A1", i, j, j);
            if (i == j ? v != 0 : v == 0) report("A2", i, j, j);
            if (j > i && v != m(j, i)) report("A3", i, j, j);
        }

    const auto triple = [&](std::size_t i, std::size_t j, std::size_t k) {
        ++rep.triples_checked;
        const double xz = m(i, k), xy = m(i, j), yz = m(j, k);
        if (xz > xy + yz + opt.tolerance) report("A4", i, j, k);
        if (ultrametric && xz > std::max(xy, yz) + opt.tolerance) report("A5", i, j, k);
    };

    if (n <= opt.exhaustive_limit) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k) triple(i, j, k);
    } else {
        rep.sampled = true;
        std::mt19937_64 rng(opt.seed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::uint64_t s = 0; s < opt.samples; ++s) {
            const std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
            triple(i, j, k);
        }
    }
    return rep;
}

}  // namespace detail

// A1-A4 over all ordered triples (random sample above exhaustive_limit).
inline AxiomReport check_metric(const DistanceMatrix& m, const CheckOptions& opt = {}) {
    return detail::check_axioms(m, false, opt);
}

// A1-A5.
inline AxiomReport check_ultrametric(const DistanceMatrix& m, const CheckOptions& opt = {}) {
    return detail::check_axioms(m, true, opt);
}

// ---------------------------------------------------------------------------
// Formal concept analysis demo

inline constexpr std::size_t kMaxAttributes = 64;

// Subset of the attribute set J; its level is its cardinality.
class AttributeSet {
public:
    AttributeSet() = default;
    AttributeSet(std::uint64_t mask, std::size_t universe) : mask_(mask), universe_(universe) {}

    std::uint64_t mask() const noexcept { return mask_; }
    std::size_t universe() const noexcept { return universe_; }
    int level() const noexcept { return std::popcount(mask_); }
    bool contains(std::size_t attr) const noexcept { return (mask_ >> attr) & 1u; }
    bool is_subset_of(const AttributeSet& o) const noexcept { return (mask_ & ~o.mask_) == 0; }

    // "d1,d2"; the empty set prints as "{}".
    std::string label() const {
        std::string s;
        for (std::size_t a = 0; a < universe_; ++a)
            if (contains(a)) {
                if (!s.empty()) s += ',';
                s += 'd' + std::to_string(a + 1);
            }
        return s.empty() ? "{}" : s;
    }

    friend bool operator==(const AttributeSet&, const AttributeSet&) = default;
    // By level, then by attribute bits: the order the lattice is printed in.
    friend bool operator<(const AttributeSet& a, const AttributeSet& b) noexcept {
        if (a.level() != b.level()) return a.level() < b.level();
        // Lexicographic on the sorted attribute lists: whichever set holds
        // the lowest attribute the two disagree on comes first.
        const std::uint64_t diff = a.mask_ ^ b.mask_;
        return (a.mask_ & diff & (~diff + 1)) != 0;
    }

private:
    std::uint64_t mask_ = 0;
    std::size_t universe_ = 0;
};

// Attribute j is in the result unless both objects have it. Two absences count
// as a difference, since 0 encodes a property of its own.
inline AttributeSet fca_dissimilarity(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    if (a.size() != b.size()) throw ShapeError("attribute vectors differ in length");
    if (a.size() > kMaxAttributes) throw ShapeError("at most 64 attributes supported");
    std::uint64_t mask = 0;
    for (std::size_t j = 0; j < a.size(); ++j)
        if (!(a[j] && b[j])) mask |= std::uint64_t{1} << j;
    return AttributeSet(mask, a.size());
}

struct FcaContext {
    std::vector<std::string> objects;
    std::vector<std::string> attributes;
    std::vector<std::vector<std::uint8_t>> rows;

    // Five objects a, b, c, e, f over three boolean attributes v1..v3.
    static FcaContext demo_context() {
        return {{"a", "b", "c", "e", "f"},
                {"v1", "v2", "v3"},
                {{1, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 0, 0}, {0, 0, 1}}};
    }
};

struct FcaLattice {
    std::vector<AttributeSet> vertices;                   // sorted by level
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // (lower, upper) covers
    std::map<std::pair<std::size_t, std::size_t>, AttributeSet> pair_map;

    std::vector<std::pair<std::size_t, std::size_t>> pairs_for(const AttributeSet& v) const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (const auto& [p, s] : pair_map)
            if (s == v) out.push_back(p);
        return out;
    }
};

inline FcaLattice fca_lattice(const FcaContext& ctx) {
    const std::size_t n = ctx.rows.size();
    if (n < 2) throw DomainError("lattice needs at least two objects");
    FcaLattice lat;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto s = fca_dissimilarity(ctx.rows[i], ctx.rows[j]);
            lat.pair_map.emplace(std::pair{i, j}, s);
            if (std::find(lat.vertices.begin(), lat.vertices.end(), s) == lat.vertices.end())
                lat.vertices.push_back(s);
        }
    std::sort(lat.vertices.begin(), lat.vertices.end());

    const std::size_t V = lat.vertices.size();
    const auto strict_sub = [&](std::size_t a, std::size_t b) {
        return lat.vertices[a] != lat.vertices[b] && lat.vertices[a].is_subset_of(lat.vertices[b]);
    };
    for (std::size_t a = 0; a < V; ++a)
        for (std::size_t b = 0; b < V; ++b) {
            if (!strict_sub(a, b)) continue;
            bool covered = true;
            for (std::size_t c = 0; c < V && covered; ++c)
                if (strict_sub(a, c) && strict_sub(c, b)) covered = false;
            if (covered) lat.edges.emplace_back(a, b);
        }
    return lat;
}

inline constexpr std::size_t kMaxFcaObjects = 20;

// Maximal object sets whose every pair has dissimilarity level <= max_level
// (maximal cliques of the thresholded pair graph). Sorted lexicographically.
inline std::vector<std::vector<std::size_t>> fca_clusters(const FcaContext& ctx, int max_level) {
    const std::size_t n = ctx.rows.size();
    if (n > kMaxFcaObjects)
        throw ScaleError("clique enumeration limited to " + std::to_string(kMaxFcaObjects) + " objects");
    const int universe = ctx.rows.empty() ? 0 : static_cast<int>(ctx.rows.front().size());
    if (max_level < 0 || max_level > universe)
        throw RangeError("max_level must be in [0, " + std::to_string(universe) + "]");

    std::vector<std::uint32_t> adj(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (fca_dissimilarity(ctx.rows[i], ctx.rows[j]).level() <= max_level) {
                adj[i] |= 1u << j;
                adj[j] |= 1u << i;
            }

    // Bron-Kerbosch without pivoting; n <= 20.
    std::vector<std::uint32_t> cliques;
    const auto bk = [&](auto&& self, std::uint32_t r, std::uint32_t p, std::uint32_t x) -> void {
        if (p == 0 && x == 0) {
            cliques.push_back(r);
            return;
        }
        for (std::size_t v = 0; v < n; ++v) {
            const std::uint32_t bit = 1u << v;
            if (!(p & bit)) continue;
            self(self, r | bit, p & adj[v], x & adj[v]);
            p &= ~bit;
            x |= bit;
        }
    };
    const std::uint32_t all = n == 0 ? 0 : static_cast<std::uint32_t>((std::uint64_t{1} << n) - 1);
    bk(bk, 0, all, 0);

    std::vector<std::vector<std::size_t>> out;
    if (n == 0) return out;
    for (auto c : cliques) {
        std::vector<std::size_t> members;
        for (std::size_t v = 0; v < n; ++v)
            if (c & (1u << v)) members.push_back(v);
        out.push_back(std::move(members));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace baire
