#pragma once
// The `baire` command line tool. Everything lives in run() so the tests can
// drive it in-process; main() only forwards argv.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "baire/baire.hpp"

namespace baire::cli {

enum class Format { table, csv, json };

struct Globals {
    int base = 10;
    int precision = kDefaultPrecision;
    int depth = 4;
    std::string range_max = "0.6";
    std::uint64_t seed = 0;
    std::string format = "table";
    std::string input;
    std::size_t synth_n = 10000;
    std::string columns = "RA,DEC,Spec,Phot";
    char delimiter = ',';
    bool strict = false;
    bool decimal_only = false;

    Format fmt() const {
        if (format == "csv") return Format::csv;
        if (format == "json") return Format::json;
        return Format::table;
    }
};

struct Dataset {
    std::vector<Observation> observations;
    std::string source;
    std::size_t rows_read = 0;
    std::size_t dropped_out_of_range = 0;
    std::size_t skipped_bad_rows = 0;
};

inline CsvConfig csv_config(const Globals& g) {
    CsvConfig cfg;
    cfg.delimiter = g.delimiter;
    cfg.range_max = g.range_max;
    cfg.precision = g.precision;
    cfg.base = g.base;
    cfg.include_integer_digit = !g.decimal_only;
    cfg.skip_bad_rows = !g.strict;
    std::stringstream ss(g.columns);
    std::string name;
    std::size_t i = 0;
    while (std::getline(ss, name, ',')) {
        if (i == 4) throw ConfigError("--columns takes exactly four names");
        cfg.columns[i++] = name;
    }
    if (i != 4) throw ConfigError("--columns takes exactly four names");
    return cfg;
}

// Either the --input CSV or a synthetic catalogue of --synth-n rows.
inline Dataset load_data(const Globals& g) {
    Dataset d;
    if (!g.input.empty()) {
        auto res = load_csv(g.input, csv_config(g));
        d.observations = std::move(res.observations);
        d.source = g.input;
        d.rows_read = res.rows_read;
        d.dropped_out_of_range = res.dropped_out_of_range;
        d.skipped_bad_rows = res.skipped_bad_rows;
        return d;
    }
    if (g.decimal_only) throw ConfigError("synthetic data uses the integer-digit convention");
    detail::check_base_precision(g.base, g.precision);
    const auto model = SynthModel::redshift_like(std::max(g.precision, 2));
    auto res = synth(g.synth_n, g.seed, model);
    for (auto& o : res.observations) {
        o.spec_key = encode(o.spec_text, g.base, g.precision, true);
        o.phot_key = encode(o.phot_text, g.base, g.precision, true);
    }
    d.observations = std::move(res.observations);
    d.source = "synthetic";
    d.rows_read = g.synth_n;
    return d;
}

inline void check_depth(const Globals& g) {
    if (g.depth < 1 || g.depth > g.precision)
        throw RangeError("depth " + std::to_string(g.depth) + " outside [1, precision = " +
                         std::to_string(g.precision) + "]");
}

inline io::Json source_json(const Dataset& d) {
    return io::Json{{"source", d.source},
                    {"rows_read", d.rows_read},
                    {"observations", d.observations.size()},
                    {"dropped_out_of_range", d.dropped_out_of_range},
                    {"skipped_bad_rows", d.skipped_bad_rows}};
}

inline std::vector<KeyedItem> spec_items(const std::vector<Observation>& obs) {
    std::vector<KeyedItem> items;
    items.reserve(obs.size());
    for (const auto& o : obs) items.push_back({o.id, o.spec_key});
    return items;
}

// ---- subcommands ----------------------------------------------------------

struct ClusterOpts {
    bool dump_tree = false;
    std::size_t member_threshold = 16;
    std::string column = "spec";
};

inline void cmd_cluster(const Globals& g, const ClusterOpts& o, std::ostream& out) {
    check_depth(g);
    if (o.column != "spec" && o.column != "phot") throw ConfigError("--column must be spec or phot");
    const Dataset d = load_data(g);
    std::vector<KeyedItem> items;
    items.reserve(d.observations.size());
    for (const auto& ob : d.observations) items.push_back({ob.id, o.column == "spec" ? ob.spec_key : ob.phot_key});
    const auto tree = BaireTree::build(items, g.depth);

    if (o.dump_tree) {
        out << io::tree_json(tree, o.member_threshold).dump(2) << '\n';
        return;
    }
    const int levels = d.observations.empty() ? 0 : g.depth;
    switch (g.fmt()) {
        case Format::json: {
            io::Json j = source_json(d);
            j["depth"] = g.depth;
            io::Json lv = io::Json::array();
            for (int l = 1; l <= levels; ++l) lv.push_back(io::level_json(tree.clusters_at_level(l)));
            j["levels"] = std::move(lv);
            out << j.dump(2) << '\n';
            break;
        }
        case Format::csv:
            out << "level,prefix,size\n";
            for (int l = 1; l <= levels; ++l) {
                const auto lc = tree.clusters_at_level(l);
                for (const auto& [prefix, members] : lc.clusters)
                    out << l << ',' << prefix_label(prefix) << ',' << members.size() << '\n';
            }
            break;
        case Format::table:
            out << "items " << tree.item_count() << ", nodes " << tree.node_count() << ", depth " << g.depth << '\n';
            out << std::left << std::setw(7) << "level" << std::setw(10) << "clusters" << "largest\n";
            for (int l = 1; l <= levels; ++l) {
                const auto lc = tree.clusters_at_level(l);
                std::string big;
                std::size_t big_n = 0;
                for (const auto& [prefix, members] : lc.clusters)
                    if (members.size() > big_n) {
                        big_n = members.size();
                        big = prefix_label(prefix);
                    }
                out << std::setw(7) << l << std::setw(10) << lc.clusters.size() << big << " (" << big_n << ")\n";
            }
            out << std::right;
            break;
    }
}

inline PrecisionCensus data_census(const Dataset& d, const Globals& g) {
    std::vector<CoincidenceRecord> recs;
    recs.reserve(d.observations.size());
    for (const auto& o : d.observations) recs.push_back(coincide(o.spec_key, o.phot_key, o.id));
    return census(recs, g.precision, !g.decimal_only);
}

inline void cmd_coincidence(const Globals& g, std::ostream& out) {
    const Dataset d = load_data(g);
    const auto c = data_census(d, g);
    switch (g.fmt()) {
        case Format::json: {
            io::Json j = source_json(d);
            j["census"] = io::census_json(c);
            out << j.dump(2) << '\n';
            break;
        }
        case Format::csv: io::census_csv(out, c); break;
        case Format::table:
            io::census_table(out, c);
            if (c.total() > 0) {
                char buf[96];
                for (int k = 1; k <= c.precision(); ++k) {
                    std::snprintf(buf, sizeof buf, "at least %d common prefix digit%s: %.2f%%\n", k,
                                  k == 1 ? "" : "s", confidence_at_least(c, k));
                    out << buf;
                }
            }
            break;
    }
}

struct DigitsOpts {
    double sigma = 0.0;
    std::optional<double> min_count;
};

inline void cmd_digits(const Globals& g, const DigitsOpts& o, std::ostream& out) {
    const Dataset d = load_data(g);
    if (d.observations.empty()) throw DomainError("no observations to histogram");
    std::vector<DigitKey> spec, phot;
    for (const auto& ob : d.observations) {
        spec.push_back(ob.spec_key);
        phot.push_back(ob.phot_key);
    }
    const auto hs = digit_histogram(spec), hp = digit_histogram(phot);
    PeakOptions popt;
    popt.smoothing_sigma = o.sigma;
    popt.min_count = o.min_count;
    const auto diff = histogram_diff(hs, hp, popt);
    switch (g.fmt()) {
        case Format::json: {
            io::Json j = source_json(d);
            io::Json s = io::histogram_json(hs);
            s["peaks"] = io::peaks_json(diff.peaks_a);
            io::Json p = io::histogram_json(hp);
            p["peaks"] = io::peaks_json(diff.peaks_b);
            io::Json rows = io::Json::array();
            for (std::size_t r = 0; r < diff.diff.rows(); ++r) {
                io::Json row = io::Json::array();
                for (std::size_t c = 0; c < diff.diff.cols(); ++c) row.push_back(diff.diff(r, c));
                rows.push_back(std::move(row));
            }
            j["spec"] = std::move(s);
            j["phot"] = std::move(p);
            j["diff"] = std::move(rows);
            out << j.dump(2) << '\n';
            break;
        }
        case Format::csv: io::histogram_csv(out, hs, hp); break;
        case Format::table: {
            const auto show = [&](const char* name, const std::vector<Peak>& peaks) {
                out << name << " peaks (" << peaks.size() << "):";
                for (const auto& pk : peaks) out << " (" << pk.position << ',' << pk.digit << ")=" << pk.value;
                out << '\n';
            };
            show("spec", diff.peaks_a);
            show("phot", diff.peaks_b);
            out << "diff spec-phot, rows = position, cols = digit\n";
            for (std::size_t r = 0; r < diff.diff.rows(); ++r) {
                out << std::setw(3) << r + 1;
                for (std::size_t c = 0; c < diff.diff.cols(); ++c) out << std::setw(8) << diff.diff(r, c);
                out << '\n';
            }
            break;
        }
    }
}

struct CompareOpts {
    int level = 2;
    std::size_t k = 0;  // 0: number of potential prefixes at the level
    int dims = 2;
    int iterations = 100;
    std::string init = "plus-plus";
};

inline void cmd_compare(const Globals& g, const CompareOpts& o, std::ostream& out) {
    if (o.level < 1 || o.level > g.precision)
        throw RangeError("level " + std::to_string(o.level) + " outside [1, precision]");
    if (o.init != "plus-plus" && o.init != "random-partition")
        throw ConfigError("--init must be plus-plus or random-partition");
    const Dataset d = load_data(g);
    const auto potential = potential_prefixes(o.level, g.base, !g.decimal_only, g.range_max);

    // Baire side: items whose spec and phot agree on at least `level` digits.
    std::vector<KeyedItem> agreeing;
    for (const auto& ob : d.observations)
        if (lcp_length(ob.spec_key, ob.phot_key) >= o.level) agreeing.push_back({ob.id, ob.spec_key});
    const auto tree = BaireTree::build(agreeing, o.level);
    LevelClustering lc;
    lc.level = o.level;
    if (!agreeing.empty()) lc = tree.clusters_at_level(o.level);

    KMeansConfig cfg;
    cfg.k = o.k == 0 ? potential.size() : o.k;
    cfg.max_iterations = o.iterations;
    cfg.seed = g.seed;
    cfg.init = o.init == "plus-plus" ? KMeansInit::plus_plus : KMeansInit::random_partition;
    const auto pts = redshift_points(d.observations, o.dims);
    const auto km = kmeans_fit(pts, cfg);
    std::vector<ItemId> ids;
    ids.reserve(d.observations.size());
    for (const auto& ob : d.observations) ids.push_back(ob.id);
    const auto table = contingency(lc, km, ids, potential);
    const auto s = match_summary(table);

    switch (g.fmt()) {
        case Format::json: {
            io::Json j = source_json(d);
            j["level"] = o.level;
            j["k"] = cfg.k;
            j["co_clustered"] = table.total();
            j["kmeans"] = io::Json{{"iterations_run", km.iterations_run}, {"converged", km.converged}, {"sse", km.sse}};
            j["contingency"] = io::contingency_json(table);
            out << j.dump(2) << '\n';
            break;
        }
        case Format::csv: io::contingency_csv(out, table); break;
        case Format::table:
            out << "level " << o.level << ", k " << cfg.k << ", co-clustered " << table.total() << " of "
                << d.observations.size() << '\n';
            out << "complete " << s.complete << ", overlapping " << s.overlapping << ", empty " << s.empty << '\n';
            io::contingency_csv(out, table);
            break;
    }
}

struct BenchOpts {
    int runs = 50;
    int warmup = 1;
    int bench_depth = 3;
    std::size_t k = 60;
    std::vector<int> iterations{1, 5, 10, 15, 20, 25, 30, 35, 38};
    int dims = 2;
};

inline void cmd_bench(const Globals& g, const BenchOpts& o, std::ostream& out) {
    const Dataset d = load_data(g);
    const auto data = make_bench_data(d.observations, o.dims);
    BenchPlan plan;
    plan.runs = o.runs;
    plan.warmup = o.warmup;
    plan.seed = g.seed;
    plan.methods.push_back(BenchMethod::baire_tree(o.bench_depth));
    for (int it : o.iterations) plan.methods.push_back(BenchMethod::kmeans(o.k, it));
    const auto reports = bench(data, plan);

    std::optional<LinearFit> fit;
    if (o.iterations.size() >= 2) {
        std::vector<double> x, y;
        for (std::size_t i = 0; i < o.iterations.size(); ++i) {
            x.push_back(o.iterations[i]);
            y.push_back(reports[i + 1].median_ms);
        }
        try {
            fit = linear_fit(x, y);
        } catch (const DomainError&) {
        }
    }
    switch (g.fmt()) {
        case Format::json: {
            io::Json j = source_json(d);
            j["reports"] = io::bench_json(reports);
            if (fit) j["kmeans_fit"] = io::Json{{"slope_ms_per_iteration", fit->slope}, {"intercept_ms", fit->intercept}, {"r2", fit->r2}};
            out << j.dump(2) << '\n';
            break;
        }
        case Format::csv: io::bench_csv(out, reports); break;
        case Format::table:
            io::bench_csv(out, reports);
            if (fit) {
                char buf[128];
                std::snprintf(buf, sizeof buf, "k-means median vs iterations: slope %.4f ms/iteration, r2 %.4f\n",
                              fit->slope, fit->r2);
                out << buf;
            }
            break;
    }
}

struct SynthOpts {
    std::string output;
    std::string sidecar;
};

inline void cmd_synth(const Globals& g, const SynthOpts& o, std::ostream& out) {
    const auto res = synth(g.synth_n, g.seed, SynthModel::redshift_like(g.precision));
    if (o.output.empty()) {
        write_csv(out, res.observations);
    } else {
        std::ofstream f(o.output);
        if (!f) throw ConfigError("cannot write '" + o.output + "'");
        write_csv(f, res.observations);
    }
    if (!o.sidecar.empty()) {
        std::ofstream f(o.sidecar);
        if (!f) throw ConfigError("cannot write '" + o.sidecar + "'");
        write_sidecar(f, res.truth);
    }
}

inline std::string object_list(const FcaContext& ctx, const std::vector<std::size_t>& members) {
    std::string s;
    for (auto m : members) {
        if (!s.empty()) s += ", ";
        s += ctx.objects[m];
    }
    return s;
}

inline void cmd_fca_demo(const Globals& g, std::ostream& out) {
    const auto ctx = FcaContext::demo_context();
    const auto lat = fca_lattice(ctx);
    const auto at2 = fca_clusters(ctx, 2), at3 = fca_clusters(ctx, 3);

    if (g.fmt() == Format::json) {
        io::Json j;
        io::Json pairs = io::Json::array();
        for (const auto& [p, s] : lat.pair_map)
            pairs.push_back(io::Json{{"pair", ctx.objects[p.first] + ctx.objects[p.second]}, {"set", s.label()}, {"level", s.level()}});
        j["pairs"] = std::move(pairs);
        io::Json verts = io::Json::array();
        for (const auto& v : lat.vertices) verts.push_back(v.label());
        j["vertices"] = std::move(verts);
        io::Json edges = io::Json::array();
        for (const auto& [lo, hi] : lat.edges) edges.push_back(io::Json::array({lat.vertices[lo].label(), lat.vertices[hi].label()}));
        j["edges"] = std::move(edges);
        const auto clusters = [&](const auto& cs) {
            io::Json a = io::Json::array();
            for (const auto& c : cs) a.push_back(object_list(ctx, c));
            return a;
        };
        j["clusters_level_2"] = clusters(at2);
        j["clusters_level_3"] = clusters(at3);
        out << j.dump(2) << '\n';
        return;
    }

    out << "   ";
    for (const auto& a : ctx.attributes) out << std::setw(4) << a;
    out << '\n';
    for (std::size_t i = 0; i < ctx.objects.size(); ++i) {
        out << std::setw(3) << ctx.objects[i];
        for (auto v : ctx.rows[i]) out << std::setw(4) << int(v);
        out << '\n';
    }
    out << "\nLattice vertices found   Pairs\n";
    for (auto it = lat.vertices.rbegin(); it != lat.vertices.rend(); ++it) {
        std::string pairs;
        for (const auto& [a, b] : lat.pairs_for(*it)) {
            if (!pairs.empty()) pairs += ", ";
            pairs += ctx.objects[a] + ctx.objects[b];
        }
        out << std::left << std::setw(25) << it->label() << std::right << pairs << '\n';
    }
    out << "\nHasse covers\n";
    for (const auto& [lo, hi] : lat.edges)
        out << lat.vertices[lo].label() << " < " << lat.vertices[hi].label() << '\n';
    out << "\nClusters defined by all pairwise linkage at level <= 2:\n";
    for (const auto& c : at2) out << object_list(ctx, c) << '\n';
    out << "\nClusters defined by all pairwise linkage at level <= 3:\n";
    for (const auto& c : at3) out << object_list(ctx, c) << '\n';
}

struct VerifyOpts {
    std::size_t n = 200;
};

// Axiom checks and the tree / HAC / metric agreement on a sample of the
// data. Returns false when any check fails.
inline bool cmd_verify(const Globals& g, const VerifyOpts& o, std::ostream& out) {
    const Dataset d = load_data(g);
    const std::size_t n = std::min(o.n, d.observations.size());
    std::vector<DigitKey> keys;
    std::vector<KeyedItem> items;
    for (std::size_t i = 0; i < n; ++i) {
        keys.push_back(d.observations[i].spec_key);
        items.push_back({i, d.observations[i].spec_key});
    }
    const auto m = baire_matrix(keys);
    CheckOptions copt;
    copt.seed = g.seed;
    const auto rep = check_ultrametric(m, copt);
    bool same_hac = true, same_tree = true;
    if (n >= 2) {
        same_hac = cophenetic_matrix(hac_single_linkage(m)) == m;
        const auto tree = BaireTree::build(items, g.precision);
        for (std::size_t i = 0; i < n && same_tree; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (tree.cophenetic_distance(i, j) != baire_distance(keys[i], keys[j])) {
                    same_tree = false;
                    break;
                }
    }
    const auto line = [&](const char* what, bool ok) { out << (ok ? "ok    " : "FAIL  ") << what << '\n'; };
    out << "sample " << n << " keys, " << rep.triples_checked << " triples\n";
    line("ultrametric axioms A1-A5", rep.ok());
    line("single-linkage cophenetic matrix equals input", same_hac);
    line("tree cophenetic distance equals Baire distance", same_tree);
    return rep.ok() && same_hac && same_tree;
}

// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Baire (longest common prefix) clustering of redshift catalogues", "baire"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--base", g.base, "digit base")->capture_default_str()->check(CLI::Range(2, 16));
    app.add_option("--precision", g.precision, "digits kept per value")->capture_default_str();
    app.add_option("--depth", g.depth, "tree depth")->capture_default_str();
    app.add_option("--range-max", g.range_max, "keep values in [0, range-max)")->capture_default_str();
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--format", g.format, "output format")->capture_default_str()->check(CLI::IsMember({"csv", "json", "table"}));
    app.add_option("--input", g.input, "catalogue CSV (default: synthetic data)");
    app.add_option("--synth-n", g.synth_n, "rows of synthetic data when no --input")->capture_default_str();
    app.add_option("--columns", g.columns, "RA,DEC,z_spec,z_phot header names")->capture_default_str();
    app.add_option("--delimiter", g.delimiter, "CSV field delimiter");
    app.add_flag("--strict", g.strict, "abort on the first unparsable row");
    app.add_flag("--decimal-only", g.decimal_only, "first digit is the first decimal (values below 1)");

    ClusterOpts cluster_o;
    auto* cluster = app.add_subcommand("cluster", "build the prefix tree and summarise each level");
    cluster->add_flag("--dump-tree", cluster_o.dump_tree, "print the tree as JSON");
    cluster->add_option("--member-threshold", cluster_o.member_threshold, "list members of nodes up to this size")->capture_default_str();
    cluster->add_option("--column", cluster_o.column, "spec or phot")->capture_default_str();

    auto* coin = app.add_subcommand("coincidence", "spec/phot longest-common-prefix census");

    DigitsOpts digits_o;
    auto* digits = app.add_subcommand("digits", "digit histograms, peaks and their difference");
    digits->add_option("--sigma", digits_o.sigma, "Gaussian smoothing width in cells (0 = off)")->capture_default_str();
    digits->add_option("--min-count", digits_o.min_count, "peak threshold (default 1% of rows)");

    CompareOpts compare_o;
    auto* compare = app.add_subcommand("compare", "k-means vs Baire clusters contingency table");
    compare->add_option("--level", compare_o.level, "Baire level")->capture_default_str();
    compare->add_option("--k", compare_o.k, "k-means clusters (default: potential prefixes at level)");
    compare->add_option("--dims", compare_o.dims, "1 = z_phot, 2 = (z_spec, z_phot)")->capture_default_str()->check(CLI::Range(1, 2));
    compare->add_option("--iterations", compare_o.iterations, "maximum Lloyd iterations")->capture_default_str();
    compare->add_option("--init", compare_o.init, "plus-plus or random-partition")->capture_default_str();

    BenchOpts bench_o;
    auto* benchc = app.add_subcommand("bench", "time tree building against k-means");
    benchc->add_option("--runs", bench_o.runs, "timed runs per method")->capture_default_str();
    benchc->add_option("--warmup", bench_o.warmup, "untimed runs per method")->capture_default_str();
    benchc->add_option("--bench-depth", bench_o.bench_depth, "tree depth timed")->capture_default_str();
    benchc->add_option("--k", bench_o.k, "k-means clusters")->capture_default_str();
    benchc->add_option("--iterations", bench_o.iterations, "k-means iteration counts")->delimiter(',')->capture_default_str();
    benchc->add_option("--dims", bench_o.dims, "k-means dimensions")->capture_default_str()->check(CLI::Range(1, 2));

    SynthOpts synth_o;
    auto* synthc = app.add_subcommand("synth", "write a synthetic catalogue CSV");
    synthc->add_option("--output", synth_o.output, "CSV path (default stdout)");
    synthc->add_option("--sidecar", synth_o.sidecar, "planted ground truth, JSON lines");

    auto* fca = app.add_subcommand("fca-demo", "formal concept analysis lattice example");

    VerifyOpts verify_o;
    auto* verify = app.add_subcommand("verify", "axiom and hierarchy consistency checks on the data");
    verify->add_option("--n", verify_o.n, "keys sampled")->capture_default_str();

    std::vector<const char*> argv{"baire"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        err << app.help();
        return 1;
    }

    try {
        if (*cluster) cmd_cluster(g, cluster_o, out);
        else if (*coin) cmd_coincidence(g, out);
        else if (*digits) cmd_digits(g, digits_o, out);
        else if (*compare) cmd_compare(g, compare_o, out);
        else if (*benchc) cmd_bench(g, bench_o, out);
        else if (*synthc) cmd_synth(g, synth_o, out);
        else if (*fca) cmd_fca_demo(g, out);
        else if (*verify) return cmd_verify(g, verify_o, out) ? 0 : 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace baire::cli
