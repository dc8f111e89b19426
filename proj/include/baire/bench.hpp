#pragma once
// Wall-clock comparison of prefix-tree building and k-means on one in-memory
// dataset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "baire/bairetree.hpp"
#include "baire/catalog.hpp"
#include "baire/errors.hpp"
#include "baire/partition.hpp"

namespace baire {

// Prepared once and shared by every method of a plan.
struct BenchData {
    std::vector<KeyedItem> spec_items;
    PointSet points;
};

// dims = 2 clusters (z_spec, z_phot); dims = 1 clusters z_phot alone.
inline PointSet redshift_points(const std::vector<Observation>& obs, int dims = 2) {
    if (dims != 1 && dims != 2) throw ConfigError("--dims must be 1 or 2");
    PointSet pts(static_cast<std::size_t>(dims));
    for (const auto& o : obs) {
        const double phot = detail::parse_real(o.phot_text);
        if (dims == 1) {
            pts.push_back(std::span<const double>(&phot, 1));
        } else {
            const double p[2] = {detail::parse_real(o.spec_text), phot};
            pts.push_back(p);
        }
    }
    return pts;
}

inline BenchData make_bench_data(const std::vector<Observation>& obs, int dims = 2) {
    BenchData d;
    d.spec_items.reserve(obs.size());
    for (const auto& o : obs) d.spec_items.push_back({o.id, o.spec_key});
    d.points = redshift_points(obs, dims);
    return d;
}

struct BenchMethod {
    enum class Kind { baire, kmeans };
    Kind kind = Kind::baire;
    int depth = 3;
    std::size_t k = 60;
    int iterations = 1;

    static BenchMethod baire_tree(int depth) { return {Kind::baire, depth, 0, 0}; }
    static BenchMethod kmeans(std::size_t k, int iterations) { return {Kind::kmeans, 0, k, iterations}; }

    std::string label() const { return kind == Kind::baire ? "baire" : "kmeans"; }
    std::string parameters() const {
        return kind == Kind::baire ? "depth=" + std::to_string(depth)
                                   : "k=" + std::to_string(k) + ";iterations=" + std::to_string(iterations);
    }
};

struct BenchPlan {
    std::vector<BenchMethod> methods;
    int runs = 50;
    int warmup = 1;
    std::uint64_t seed = 0;  // k-means run r uses seed + r
};

struct BenchReport {
    std::string method;
    std::string parameters;
    std::size_t n = 0;
    std::vector<double> samples_ms;
    double median_ms = 0;
    double mean_ms = 0;
    double stddev_ms = 0;
};

inline double median(std::vector<double> v) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline void summarize(BenchReport& r) {
    const auto& s = r.samples_ms;
    r.median_ms = median(s);
    r.mean_ms = s.empty() ? 0 : std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    double var = 0;
    for (double x : s) var += (x - r.mean_ms) * (x - r.mean_ms);
    r.stddev_ms = s.size() > 1 ? std::sqrt(var / static_cast<double>(s.size() - 1)) : 0.0;
}

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
};

inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ShapeError("linear fit needs two equal-length series of >= 2 points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) throw DomainError("linear fit over a constant abscissa");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

namespace detail {

inline double time_once(const BenchData& data, const BenchMethod& m, std::uint64_t seed, std::uint64_t& sink) {
    const auto start = std::chrono::steady_clock::now();
    if (m.kind == BenchMethod::Kind::baire) {
        const auto tree = BaireTree::build(data.spec_items, m.depth);
        sink += tree.node_count();
    } else {
        KMeansConfig cfg;
        cfg.k = m.k;
        cfg.max_iterations = m.iterations;
        cfg.seed = seed;
        cfg.convergence_epsilon = 0.0;  // run exactly `iterations` rounds
        const auto res = kmeans_fit(data.points, cfg);
        sink += res.assignments.empty() ? 0 : res.assignments.front();
    }
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count();
}

}  // namespace detail

inline std::vector<BenchReport> bench(const BenchData& data, const BenchPlan& plan) {
    if (plan.methods.empty()) throw ConfigError("bench plan has no methods");
    if (plan.runs < 1 || plan.warmup < 0) throw ConfigError("bench needs runs >= 1 and warmup >= 0");
    std::vector<BenchReport> out;
    std::uint64_t sink = 0;
    for (const auto& m : plan.methods) {
        BenchReport r;
        r.method = m.label();
        r.parameters = m.parameters();
        r.n = data.spec_items.size();
        for (int w = 0; w < plan.warmup; ++w) detail::time_once(data, m, plan.seed + 1000003u + static_cast<std::uint64_t>(w), sink);
        for (int run = 0; run < plan.runs; ++run)
            r.samples_ms.push_back(detail::time_once(data, m, plan.seed + static_cast<std::uint64_t>(run), sink));
        summarize(r);
        out.push_back(std::move(r));
    }
    // Keep the timed work observable.
    static volatile std::uint64_t observed;
    observed = sink;
    return out;
}

}  // namespace baire
