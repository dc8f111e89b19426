#pragma once
// CSV and JSON renderings of trees, censuses, histograms, contingency tables
// and bench reports. JSON objects keep insertion order so output is stable.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "baire/bairetree.hpp"
#include "baire/bench.hpp"
#include "baire/coincidence.hpp"
#include "baire/partition.hpp"

namespace baire::io {

using Json = nlohmann::ordered_json;

inline std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// ---- tree ---------------------------------------------------------------

namespace detail {
inline Json node_json(const BaireTree& t, std::int32_t idx, std::size_t member_threshold) {
    const auto& nd = t.node(idx);
    Json j;
    j["prefix"] = prefix_label(t.prefix_of(idx));
    j["count"] = nd.count;
    if (nd.count <= member_threshold) {
        auto members = t.retrieve_subtree(t.prefix_of(idx));
        std::sort(members.begin(), members.end());
        j["members"] = members;
    }
    Json children = Json::array();
    for (int d = 0; d < t.base(); ++d)
        if (nd.children[d] != BaireTree::kNone) children.push_back(node_json(t, nd.children[d], member_threshold));
    j["children"] = std::move(children);
    return j;
}
}  // namespace detail

// Member lists appear only on nodes with at most `member_threshold` items.
inline Json tree_json(const BaireTree& t, std::size_t member_threshold = 16) {
    Json j;
    j["base"] = t.base();
    j["max_depth"] = t.max_depth();
    j["item_count"] = t.item_count();
    j["node_count"] = t.node_count();
    j["root"] = detail::node_json(t, 0, member_threshold);
    return j;
}

inline Json level_json(const LevelClustering& lc) {
    Json j;
    j["level"] = lc.level;
    j["cluster_count"] = lc.clusters.size();
    Json clusters = Json::array();
    for (const auto& [prefix, members] : lc.clusters) {
        Json c;
        c["prefix"] = prefix_label(prefix);
        c["size"] = members.size();
        clusters.push_back(std::move(c));
    }
    j["clusters"] = std::move(clusters);
    return j;
}

inline void level_csv(std::ostream& os, const LevelClustering& lc) {
    os << "level,prefix,size\n";
    for (const auto& [prefix, members] : lc.clusters)
        os << lc.level << ',' << prefix_label(prefix) << ',' << members.size() << '\n';
}

// ---- census -------------------------------------------------------------

// Section/label of a census level: with the units digit counted, level 1 is
// "digit 1" and level l > 1 is "decimal digit l - 1".
inline std::pair<std::string, int> census_row_label(const PrecisionCensus& c, int level) {
    if (!c.includes_integer_digit()) return {"decimal", level};
    if (level <= 1) return {"digit", level};
    return {"decimal", level - 1};
}

inline Json census_json(const PrecisionCensus& c) {
    Json j;
    j["total"] = c.total();
    j["precision"] = c.precision();
    Json rows = Json::array();
    for (int level = 0; level <= c.precision(); ++level) {
        const auto [section, index] = census_row_label(c, level);
        Json r;
        r["level"] = level;
        r["section"] = section;
        r["digit"] = index;
        r["count"] = c.count(level);
        r["percent"] = c.percentage(level);
        r["cumulative"] = c.cumulative(level);
        rows.push_back(std::move(r));
    }
    j["levels"] = std::move(rows);
    Json conf = Json::object();
    for (int d = 1; d <= c.precision() && c.total() > 0; ++d)
        conf["at_least_" + std::to_string(d) + "_digits"] = confidence_at_least(c, d);
    j["confidence"] = std::move(conf);
    return j;
}

inline void census_csv(std::ostream& os, const PrecisionCensus& c) {
    os << "level,section,digit,count,percent,cumulative\n";
    for (int level = 0; level <= c.precision(); ++level) {
        const auto [section, index] = census_row_label(c, level);
        os << level << ',' << section << ',' << index << ',' << c.count(level) << ','
           << fixed2(c.percentage(level)) << ',' << c.cumulative(level) << '\n';
    }
}

// Digit / No. / % layout; level 0 is printed only when populated.
inline void census_table(std::ostream& os, const PrecisionCensus& c) {
    char buf[96];
    std::string section;
    for (int level = 0; level <= c.precision(); ++level) {
        if (level == 0 && c.count(0) == 0) continue;
        const auto [sec, index] = census_row_label(c, level);
        if (sec != section) {
            section = sec;
            std::snprintf(buf, sizeof buf, "%-14s %10s %8s\n", sec == "digit" ? "Digit" : "Decimal digit", "No.", "%");
            os << buf;
        }
        std::snprintf(buf, sizeof buf, "%-14d %10llu %8s\n", index,
                      static_cast<unsigned long long>(c.count(level)), fixed2(c.percentage(level)).c_str());
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "%-14s %10llu %8s\n", "", static_cast<unsigned long long>(c.total()), "100");
    os << buf;
}

// ---- histograms ---------------------------------------------------------

inline Json peaks_json(const std::vector<Peak>& peaks) {
    Json a = Json::array();
    for (const auto& p : peaks) a.push_back(Json{{"position", p.position}, {"digit", p.digit}, {"value", p.value}});
    return a;
}

inline Json histogram_json(const DigitHistogram& h) {
    Json j;
    j["base"] = h.base;
    j["observations"] = h.observations;
    j["positions"] = h.positions();
    Json rows = Json::array();
    for (std::size_t r = 0; r < h.counts.rows(); ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c < h.counts.cols(); ++c) row.push_back(h.counts(r, c));
        rows.push_back(std::move(row));
    }
    j["counts"] = std::move(rows);
    return j;
}

// One row per (position, digit) cell, plot-ready.
inline void histogram_csv(std::ostream& os, const DigitHistogram& spec, const DigitHistogram& phot) {
    os << "position,digit,spec,phot,diff\n";
    for (std::size_t r = 0; r < spec.counts.rows(); ++r)
        for (std::size_t c = 0; c < spec.counts.cols(); ++c)
            os << r + 1 << ',' << c << ',' << spec.counts(r, c) << ',' << phot.counts(r, c) << ','
               << static_cast<long long>(spec.counts(r, c)) - static_cast<long long>(phot.counts(r, c)) << '\n';
}

// ---- contingency --------------------------------------------------------

inline Json contingency_json(const ContingencyTable& t) {
    Json j;
    j["rows"] = t.row_labels;
    std::vector<std::size_t> cols(t.col_count());
    for (std::size_t c = 0; c < cols.size(); ++c) cols[c] = c;
    j["cols"] = cols;
    Json cells = Json::array();
    for (std::size_t r = 0; r < t.row_count(); ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c < t.col_count(); ++c) row.push_back(t.cells(r, c));
        cells.push_back(std::move(row));
    }
    j["cells"] = std::move(cells);
    Json cls = Json::array();
    for (auto c : t.row_class) cls.push_back(to_string(c));
    j["row_class"] = std::move(cls);
    j["display"] = Json{{"rows", t.display.rows}, {"cols", t.display.cols}};
    const auto s = match_summary(t);
    j["summary"] = Json{{"complete", s.complete}, {"overlapping", s.overlapping}, {"empty", s.empty}};
    return j;
}

// Rows and columns in display order; last column is the row class.
inline void contingency_csv(std::ostream& os, const ContingencyTable& t) {
    os << "baire";
    for (auto c : t.display.cols) os << ",k" << c;
    os << ",class\n";
    for (auto r : t.display.rows) {
        os << t.row_labels[r];
        for (auto c : t.display.cols) os << ',' << t.cells(r, c);
        os << ',' << to_string(t.row_class[r]) << '\n';
    }
}

// ---- bench --------------------------------------------------------------

inline Json bench_json(const std::vector<BenchReport>& reports) {
    Json a = Json::array();
    for (const auto& r : reports)
        a.push_back(Json{{"method", r.method},
                         {"parameters", r.parameters},
                         {"n", r.n},
                         {"runs", r.samples_ms.size()},
                         {"median_ms", r.median_ms},
                         {"mean_ms", r.mean_ms},
                         {"stddev_ms", r.stddev_ms},
                         {"samples_ms", r.samples_ms}});
    return a;
}

inline void bench_csv(std::ostream& os, const std::vector<BenchReport>& reports) {
    os << "method,parameters,n,runs,median_ms,mean_ms,stddev_ms\n";
    char buf[128];
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, ",%zu,%zu,%.4f,%.4f,%.4f\n", r.n, r.samples_ms.size(), r.median_ms,
                      r.mean_ms, r.stddev_ms);
        os << r.method << ',' << r.parameters << buf;
    }
}

}  // namespace baire::io
