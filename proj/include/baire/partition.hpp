#pragma once
// Lloyd k-means and the machinery for comparing a k-means partition with the
// Baire clusters of one tree level.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "baire/bairetree.hpp"
#include "baire/coincidence.hpp"
#include "baire/errors.hpp"

namespace baire {

// n points of equal dimension, row-major.
class PointSet {
public:
    PointSet() = default;
    explicit PointSet(std::size_t dims) : dims_(dims) {}
    PointSet(std::size_t dims, std::vector<double> values) : dims_(dims), values_(std::move(values)) {
        if (dims_ == 0 || values_.size() % dims_ != 0)
            throw ShapeError("point values do not divide into rows of dimension " + std::to_string(dims_));
    }

    std::size_t dims() const noexcept { return dims_; }
    std::size_t size() const noexcept { return dims_ == 0 ? 0 : values_.size() / dims_; }
    std::span<const double> operator[](std::size_t i) const { return {values_.data() + i * dims_, dims_}; }
    std::span<const double> values() const noexcept { return values_; }

    void push_back(std::span<const double> p) {
        if (p.size() != dims_) throw ShapeError("point dimension mismatch");
        values_.insert(values_.end(), p.begin(), p.end());
    }

private:
    std::size_t dims_ = 0;
    std::vector<double> values_;
};

enum class KMeansInit { random_partition, plus_plus };

struct KMeansConfig {
    std::size_t k = 1;
    int max_iterations = 100;
    std::uint64_t seed = 0;
    KMeansInit init = KMeansInit::plus_plus;
    // Stop once no centroid moves by this much or more. 0 runs all iterations.
    double convergence_epsilon = 1e-9;
};

struct KMeansResult {
    std::size_t k = 0;
    std::size_t dims = 0;
    std::vector<std::uint32_t> assignments;
    std::vector<double> centroids;  // k x dims
    int iterations_run = 0;
    bool converged = false;
    double sse = 0;
    std::vector<double> per_iteration_sse;
    std::vector<bool> empty;  // clusters left without members

    std::span<const double> centroid(std::size_t c) const { return {centroids.data() + c * dims, dims}; }

    std::vector<std::uint64_t> cluster_sizes() const {
        std::vector<std::uint64_t> sizes(k, 0);
        for (auto a : assignments) ++sizes[a];
        return sizes;
    }
};

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline std::vector<double> plus_plus_seeds(const PointSet& pts, std::size_t k, std::mt19937_64& rng) {
    const std::size_t n = pts.size(), dims = pts.dims();
    std::vector<double> centroids;
    centroids.reserve(k * dims);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const auto first = pts[pick(rng)];
    centroids.insert(centroids.end(), first.begin(), first.end());

    std::vector<double> nearest(n);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = squared_distance(pts[i], first);
    for (std::size_t c = 1; c < k; ++c) {
        long double total = 0;
        for (double d : nearest) total += d;
        std::size_t chosen = 0;
        if (total <= 0) {
            chosen = pick(rng);
        } else {
            std::uniform_real_distribution<double> u(0.0, static_cast<double>(total));
            long double target = u(rng), acc = 0;
            chosen = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += nearest[i];
                if (acc > target && nearest[i] > 0) {
                    chosen = i;
                    break;
                }
            }
        }
        const auto p = pts[chosen];
        centroids.insert(centroids.end(), p.begin(), p.end());
        for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], squared_distance(pts[i], p));
    }
    return centroids;
}

// Moves the point farthest from its centroid into each empty cluster.
inline void repair_empty(const PointSet& pts, std::vector<std::uint32_t>& assign,
                         const std::vector<double>& centroids, std::size_t k) {
    const std::size_t dims = pts.dims();
    std::vector<std::uint64_t> sizes(k, 0);
    for (auto a : assign) ++sizes[a];
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] != 0) continue;
        double best = -1;
        std::size_t best_i = assign.size();
        for (std::size_t i = 0; i < assign.size(); ++i) {
            if (sizes[assign[i]] < 2) continue;
            const double d = squared_distance(
                pts[i], std::span<const double>(centroids.data() + assign[i] * dims, dims));
            if (d > best) {
                best = d;
                best_i = i;
            }
        }
        if (best_i == assign.size()) return;  // fewer points than clusters; caller validated
        --sizes[assign[best_i]];
        assign[best_i] = static_cast<std::uint32_t>(c);
        sizes[c] = 1;
    }
}

// Returns squared movement max; writes means into `centroids`.
inline double update_means(const PointSet& pts, const std::vector<std::uint32_t>& assign,
                           std::vector<double>& centroids, std::size_t k) {
    const std::size_t dims = pts.dims();
    std::vector<long double> sums(k * dims, 0.0L);
    std::vector<std::uint64_t> sizes(k, 0);
    for (std::size_t i = 0; i < assign.size(); ++i) {
        const auto p = pts[i];
        const std::size_t c = assign[i];
        ++sizes[c];
        for (std::size_t j = 0; j < dims; ++j) sums[c * dims + j] += p[j];
    }
    double movement = 0;
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] == 0) continue;  // keep the previous position
        double m = 0;
        for (std::size_t j = 0; j < dims; ++j) {
            const double v = static_cast<double>(sums[c * dims + j] / static_cast<long double>(sizes[c]));
            const double d = v - centroids[c * dims + j];
            m += d * d;
            centroids[c * dims + j] = v;
        }
        movement = std::max(movement, m);
    }
    return movement;
}

inline double total_sse(const PointSet& pts, const std::vector<std::uint32_t>& assign,
                        const std::vector<double>& centroids) {
    const std::size_t dims = pts.dims();
    long double s = 0;
    for (std::size_t i = 0; i < assign.size(); ++i)
        s += squared_distance(pts[i], std::span<const double>(centroids.data() + assign[i] * dims, dims));
    return static_cast<double>(s);
}

}  // namespace detail

// Lloyd iterations. Each iteration assigns every point to its nearest centroid
// (ties to the lowest index), repairs empty clusters, then recomputes means.
inline KMeansResult kmeans_fit(const PointSet& pts, const KMeansConfig& cfg) {
    const std::size_t n = pts.size(), k = cfg.k, dims = pts.dims();
    if (n == 0) throw DomainError("k-means on an empty point set");
    if (k < 1 || k > n)
        throw DomainError("k = " + std::to_string(k) + " must be in [1, n = " + std::to_string(n) + "]");
    if (cfg.max_iterations < 1) throw DomainError("max_iterations must be at least 1");
    if (cfg.convergence_epsilon < 0) throw DomainError("convergence_epsilon must be non-negative");

    std::mt19937_64 rng(cfg.seed);
    KMeansResult res;
    res.k = k;
    res.dims = dims;
    res.assignments.assign(n, 0);

    if (cfg.init == KMeansInit::plus_plus) {
        res.centroids = detail::plus_plus_seeds(pts, k, rng);
    } else {
        std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(k - 1));
        for (auto& a : res.assignments) a = pick(rng);
        res.centroids.assign(k * dims, 0.0);
        detail::update_means(pts, res.assignments, res.centroids, k);
        detail::repair_empty(pts, res.assignments, res.centroids, k);
        detail::update_means(pts, res.assignments, res.centroids, k);
    }

    const double eps2 = cfg.convergence_epsilon * cfg.convergence_epsilon;
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto p = pts[i];
            double best = std::numeric_limits<double>::infinity();
            std::uint32_t best_c = 0;
            for (std::size_t c = 0; c < k; ++c) {
                const double d = detail::squared_distance(
                    p, std::span<const double>(res.centroids.data() + c * dims, dims));
                if (d < best) {
                    best = d;
                    best_c = static_cast<std::uint32_t>(c);
                }
            }
            res.assignments[i] = best_c;
        }
        detail::repair_empty(pts, res.assignments, res.centroids, k);
        const double movement = detail::update_means(pts, res.assignments, res.centroids, k);
        res.per_iteration_sse.push_back(detail::total_sse(pts, res.assignments, res.centroids));
        res.iterations_run = it;
        if (cfg.convergence_epsilon > 0 && movement < eps2) {
            res.converged = true;
            break;
        }
    }
    res.sse = res.per_iteration_sse.back();
    const auto sizes = res.cluster_sizes();
    res.empty.resize(k);
    for (std::size_t c = 0; c < k; ++c) res.empty[c] = sizes[c] == 0;
    return res;
}

enum class RowClass { complete, overlapping, empty };

inline const char* to_string(RowClass c) {
    switch (c) {
        case RowClass::complete: return "complete";
        case RowClass::overlapping: return "overlapping";
        case RowClass::empty: return "empty";
    }
    return "?";
}

struct DisplayOrder {
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
};

// Rows: Baire clusters (prefix labels, lexicographic). Columns: k-means
// cluster indices. Cells: co-membership counts.
struct ContingencyTable {
    std::vector<Digits> row_prefixes;
    std::vector<std::string> row_labels;
    Grid<std::uint64_t> cells;
    std::vector<RowClass> row_class;
    DisplayOrder display;

    std::size_t row_count() const noexcept { return cells.rows(); }
    std::size_t col_count() const noexcept { return cells.cols(); }

    std::uint64_t row_sum(std::size_t r) const {
        std::uint64_t s = 0;
        for (std::size_t c = 0; c < cells.cols(); ++c) s += cells(r, c);
        return s;
    }
    std::uint64_t col_sum(std::size_t c) const {
        std::uint64_t s = 0;
        for (std::size_t r = 0; r < cells.rows(); ++r) s += cells(r, c);
        return s;
    }
    std::uint64_t total() const {
        std::uint64_t s = 0;
        for (auto v : cells.cells()) s += v;
        return s;
    }
};

inline RowClass classify_row(const Grid<std::uint64_t>& cells, std::size_t r) {
    std::size_t nonzero = 0;
    for (std::size_t c = 0; c < cells.cols(); ++c)
        if (cells(r, c) != 0) ++nonzero;
    return nonzero == 0 ? RowClass::empty : nonzero == 1 ? RowClass::complete : RowClass::overlapping;
}

// Greedy block-diagonal layout. Complete rows come first: the largest one,
// then its column, then every other complete row in that same column; repeat.
// Overlapping rows follow (largest cell first), each pulling in its unplaced
// nonzero columns; empty rows and leftover columns go last.
inline DisplayOrder permute_for_display(const ContingencyTable& t) {
    DisplayOrder out;
    const std::size_t R = t.row_count(), C = t.col_count();
    if (R == 0) {
        for (std::size_t c = 0; c < C; ++c) out.cols.push_back(c);
        return out;
    }
    std::vector<bool> row_done(R, false), col_done(C, false);
    const auto max_cell = [&](std::size_t r) {
        std::uint64_t m = 0;
        std::size_t at = 0;
        for (std::size_t c = 0; c < C; ++c)
            if (t.cells(r, c) > m) {
                m = t.cells(r, c);
                at = c;
            }
        return std::pair{m, at};
    };
    const auto before = [&](std::size_t a, std::size_t b) {
        const auto ma = max_cell(a).first, mb = max_cell(b).first;
        if (ma != mb) return ma > mb;
        return t.row_labels[a] < t.row_labels[b];
    };
    const auto place_col = [&](std::size_t c) {
        if (!col_done[c]) {
            col_done[c] = true;
            out.cols.push_back(c);
        }
    };

    std::vector<std::size_t> complete, overlapping, empty;
    for (std::size_t r = 0; r < R; ++r) {
        switch (t.row_class[r]) {
            case RowClass::complete: complete.push_back(r); break;
            case RowClass::overlapping: overlapping.push_back(r); break;
            case RowClass::empty: empty.push_back(r); break;
        }
    }
    std::sort(complete.begin(), complete.end(), before);
    std::sort(overlapping.begin(), overlapping.end(), before);
    std::sort(empty.begin(), empty.end(),
              [&](std::size_t a, std::size_t b) { return t.row_labels[a] < t.row_labels[b]; });

    for (std::size_t r : complete) {
        if (row_done[r]) continue;
        const std::size_t col = max_cell(r).second;
        place_col(col);
        for (std::size_t s : complete)
            if (!row_done[s] && max_cell(s).second == col) {
                row_done[s] = true;
                out.rows.push_back(s);
            }
    }
    for (std::size_t r : overlapping) {
        row_done[r] = true;
        out.rows.push_back(r);
        std::vector<std::size_t> cols;
        for (std::size_t c = 0; c < C; ++c)
            if (t.cells(r, c) != 0) cols.push_back(c);
        std::stable_sort(cols.begin(), cols.end(),
                         [&](std::size_t a, std::size_t b) { return t.cells(r, a) > t.cells(r, b); });
        for (std::size_t c : cols) place_col(c);
    }
    for (std::size_t r : empty) out.rows.push_back(r);
    for (std::size_t c = 0; c < C; ++c) place_col(c);
    return out;
}

// Cross-tabulates a level clustering against k-means assignments. point_ids
// maps k-means point index to item id (identity when empty). Every Baire
// member must be one of those items; k-means points outside the Baire
// clustering are not co-clustered. `potential_rows` adds unoccupied prefixes
// as empty rows.
inline ContingencyTable contingency(const LevelClustering& baire, const KMeansResult& km,
                                    std::span<const ItemId> point_ids = {},
                                    std::span<const Digits> potential_rows = {}) {
    if (!point_ids.empty() && point_ids.size() != km.assignments.size())
        throw ShapeError("point id list does not match the k-means assignments");

    std::unordered_map<ItemId, std::size_t> index_of;
    if (!point_ids.empty()) {
        index_of.reserve(point_ids.size());
        for (std::size_t i = 0; i < point_ids.size(); ++i) index_of.emplace(point_ids[i], i);
    }

    std::map<Digits, const std::vector<ItemId>*> rows;
    static const std::vector<ItemId> kNoMembers;
    for (const auto& [prefix, members] : baire.clusters) rows[prefix] = &members;
    for (const auto& p : potential_rows) rows.try_emplace(p, &kNoMembers);

    ContingencyTable t;
    t.cells = Grid<std::uint64_t>(rows.size(), km.k, 0);
    std::size_t r = 0;
    for (const auto& [prefix, members] : rows) {
        t.row_prefixes.push_back(prefix);
        t.row_labels.push_back(prefix_label(prefix));
        for (ItemId id : *members) {
            std::size_t idx;
            if (point_ids.empty()) {
                if (id >= km.assignments.size())
                    throw DomainError("Baire item " + std::to_string(id) + " has no k-means assignment");
                idx = static_cast<std::size_t>(id);
            } else {
                const auto it = index_of.find(id);
                if (it == index_of.end())
                    throw DomainError("Baire item " + std::to_string(id) + " has no k-means assignment");
                idx = it->second;
            }
            ++t.cells(r, km.assignments[idx]);
        }
        t.row_class.push_back(classify_row(t.cells, r));
        ++r;
    }
    t.display = permute_for_display(t);
    return t;
}

struct MatchSummary {
    std::size_t complete = 0;
    std::size_t overlapping = 0;
    std::size_t empty = 0;

    std::size_t rows() const noexcept { return complete + overlapping + empty; }
};

inline MatchSummary match_summary(const ContingencyTable& t) {
    MatchSummary s;
    for (auto c : t.row_class) {
        if (c == RowClass::complete) ++s.complete;
        else if (c == RowClass::overlapping) ++s.overlapping;
        else ++s.empty;
    }
    return s;
}

// All length-`level` prefixes under which some value in [0, range_max) can
// fall, e.g. 60 prefixes "000".."059" for level 3 and range_max "0.6".
inline std::vector<Digits> potential_prefixes(int level, int base, bool include_integer_digit,
                                              std::string_view range_max) {
    if (level < 1 || level > kMaxPrecision) throw RangeError("level out of range");
    const DigitKey bound = encode(range_max, base, kMaxPrecision, include_integer_digit);
    // A prefix qualifies iff it is lexicographically below the bound's first
    // `level` digits, or equal to them with a nonzero digit remaining.
    const auto bd = bound.digits();
    bool bound_has_tail = false;
    for (std::size_t i = static_cast<std::size_t>(level); i < bd.size(); ++i) bound_has_tail |= bd[i] != 0;
    if (bd.size() == static_cast<std::size_t>(level)) {
        // Only reachable when level == kMaxPrecision; check the text directly.
        bound_has_tail = compare_decimal(range_max, to_text(bound)) == std::strong_ordering::greater;
    }

    std::vector<Digits> out;
    Digits cur;
    const auto recurse = [&](auto&& self, bool tight) -> void {
        const std::size_t pos = cur.size();
        if (pos == static_cast<std::size_t>(level)) {
            if (!tight || bound_has_tail) out.push_back(cur);
            return;
        }
        const int limit = tight ? bd[pos] : base - 1;
        for (int d = 0; d <= limit; ++d) {
            cur.push_back(static_cast<Digit>(d));
            self(self, tight && d == limit);
            cur.pop_back();
        }
    };
    recurse(recurse, true);
    return out;
}

}  // namespace baire
