#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "baire/baire.hpp"
#include "cli.hpp"
#include "test_support.hpp"

using namespace baire;
namespace fs = std::filesystem;

namespace {

const char* kCatalogSnippet =
    "RA,DEC,Spec,Phot\n"
    "145.4339,0.56416792,0.14611299,0.15175095\n"
    "145.42139,0.53370196,0.145909,0.17476539\n"
    "145.6607,0.63385916,0.46691701,0.41157582\n"
    "145.64568,0.50961215,0.15610801,0.18679948\n";

LoadResult load_text(const std::string& text, CsvConfig cfg = {}) {
    std::istringstream in(text);
    return load_csv(in, cfg);
}

struct Run {
    int code;
    std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class TempDir {
public:
    TempDir() : path_(fs::temp_directory_path() / ("baire_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" + std::to_string(counter()++))) {
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    static int& counter() {
        static int c = 0;
        return c;
    }
    fs::path path_;
};

}  // namespace

// ---- ingestion ------------------------------------------------------------

TEST(LoadCsv, CatalogSnippet) {
    const auto r = load_text(kCatalogSnippet);
    ASSERT_EQ(r.observations.size(), 4u);
    EXPECT_EQ(r.observations[0].spec_text, "0.14611299");
    EXPECT_EQ(r.observations[0].phot_text, "0.15175095");
    EXPECT_DOUBLE_EQ(r.observations[0].ra, 145.4339);
    EXPECT_DOUBLE_EQ(r.observations[2].dec, 0.63385916);
    EXPECT_EQ(r.observations[0].spec_key, encode("0.146112", 10, 6, true));
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(r.observations[i].id, i);
}

TEST(LoadCsv, HalfOpenRangeFilter) {
    const auto r = load_text("RA,DEC,Spec,Phot\n1,2,0.61,0.3\n1,2,0.6,0.3\n1,2,0.5999,0.3\n1,2,0.3,-0.1\n");
    EXPECT_EQ(r.observations.size(), 1u);
    EXPECT_EQ(r.dropped_out_of_range, 3u);
    EXPECT_EQ(r.rows_read, 4u);
    EXPECT_EQ(r.observations[0].id, 2u);
}

TEST(LoadCsv, HeaderOnly) {
    const auto r = load_text("RA,DEC,Spec,Phot\n");
    EXPECT_TRUE(r.observations.empty());
    EXPECT_EQ(r.rows_read, 0u);
}

TEST(LoadCsv, FormatErrors) {
    EXPECT_THROW(load_text(""), FormatError);
    EXPECT_THROW(load_text("RA,DEC,Spec\n1,2,0.1\n"), FormatError);
}

TEST(LoadCsv, BadRowsSkippedOrFatal) {
    const std::string text = "RA,DEC,Spec,Phot\n1,2,0.1,0.2\n1,2,abc,0.2\n1,2\n1,2,0.3,0.4\n";
    const auto r = load_text(text);
    EXPECT_EQ(r.observations.size(), 2u);
    EXPECT_EQ(r.skipped_bad_rows, 2u);
    EXPECT_EQ(r.observations[1].id, 3u);
    CsvConfig strict;
    strict.skip_bad_rows = false;
    try {
        load_text(text, strict);
        FAIL() << "expected RowError";
    } catch (const RowError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(LoadCsv, CaseInsensitiveQuotedAndCustomDialect) {
    auto r = load_text("ra,\"dec\",SPEC,phot\n1,2,\"0.25\",0.26\n");
    ASSERT_EQ(r.observations.size(), 1u);
    EXPECT_EQ(r.observations[0].spec_text, "0.25");
    CsvConfig cfg;
    cfg.delimiter = ';';
    cfg.columns = {"alpha", "delta", "zs", "zp"};
    r = load_text("zp;zs;delta;alpha;extra\n0.2;0.1;5;6;x\n", cfg);
    ASSERT_EQ(r.observations.size(), 1u);
    EXPECT_EQ(r.observations[0].spec_text, "0.1");
    EXPECT_EQ(r.observations[0].phot_text, "0.2");
    EXPECT_DOUBLE_EQ(r.observations[0].ra, 6.0);
}

TEST(LoadCsv, OtherBaseAndPrecision) {
    CsvConfig cfg;
    cfg.base = 2;
    cfg.precision = 4;
    const auto r = load_text("RA,DEC,Spec,Phot\n1,2,0.5,0.25\n", cfg);
    EXPECT_EQ(r.observations[0].spec_key, DigitKey({0, 1, 0, 0}, 2, true));
    EXPECT_EQ(r.observations[0].phot_key, DigitKey({0, 0, 1, 0}, 2, true));
}

TEST(LoadCsv, RoundTripKeepsLeadingDigits) {
    std::mt19937_64 rng(4);
    std::ostringstream csv;
    csv << "RA,DEC,Spec,Phot\n";
    std::vector<std::string> texts;
    for (int i = 0; i < 500; ++i) {
        auto t = testkit::random_fraction_text(rng, 1 + static_cast<int>(rng() % 10));
        t[2] = static_cast<char>('0' + rng() % 6);
        texts.push_back(t);
        csv << "1,1," << t << ',' << t << '\n';
    }
    const auto r = load_text(csv.str());
    ASSERT_EQ(r.observations.size(), texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        const auto back = to_text(r.observations[i].spec_key);  // "0.ddddd"
        std::string expect = texts[i].substr(0, 7);
        expect.resize(7, '0');
        ASSERT_EQ(back, expect) << texts[i];
    }
}

// ---- synthetic data -------------------------------------------------------

TEST(Synth, Empty) {
    EXPECT_TRUE(synth(0, 1, SynthModel::redshift_like()).observations.empty());
}

TEST(Synth, SingleBinFixedAgreement) {
    SynthModel m;
    m.precision = 6;
    m.bin_weights = {0, 0, 0, 0, 1};
    m.level_weights = {0, 0, 0, 1, 0, 0, 0};
    const auto s = synth(1000, 5, m);
    ASSERT_EQ(s.observations.size(), 1000u);
    for (std::size_t i = 0; i < s.observations.size(); ++i) {
        const auto& o = s.observations[i];
        EXPECT_EQ(o.spec_text.substr(0, 3), "0.4");
        EXPECT_EQ(s.truth[i].bin, "04");
        EXPECT_EQ(lcp_length(o.spec_key, o.phot_key), 3);
    }
}

TEST(Synth, PlantedTruthMatchesKeys) {
    const auto s = synth(5000, 8, SynthModel::redshift_like());
    for (std::size_t i = 0; i < s.observations.size(); ++i) {
        const auto& o = s.observations[i];
        ASSERT_EQ(lcp_length(o.spec_key, o.phot_key), s.truth[i].lcp);
        ASSERT_EQ(prefix_label(o.spec_key.digits().first(2)), s.truth[i].bin);
        ASSERT_TRUE(compare_decimal(o.spec_text, "0.6") < 0);
        ASSERT_TRUE(compare_decimal(o.phot_text, "0.6") < 0);
    }
}

TEST(Synth, DeterministicBytes) {
    std::ostringstream a, b, c;
    write_csv(a, synth(2000, 42, SynthModel::redshift_like()).observations);
    write_csv(b, synth(2000, 42, SynthModel::redshift_like()).observations);
    write_csv(c, synth(2000, 43, SynthModel::redshift_like()).observations);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_NE(a.str(), c.str());
}

TEST(Synth, CensusFollowsModelAtFullScale) {
    const auto m = SynthModel::redshift_like(6);
    const auto s = synth(443094, 2, m);
    std::vector<CoincidenceRecord> recs;
    recs.reserve(s.observations.size());
    for (const auto& o : s.observations) recs.push_back(coincide(o.spec_key, o.phot_key));
    const auto c = census(recs);
    double total_w = 0;
    for (double w : m.level_weights) total_w += w;
    for (int l = 0; l <= 6; ++l)
        EXPECT_NEAR(c.exact_percentage(l), 100.0 * m.level_weights[static_cast<std::size_t>(l)] / total_w, 0.3) << "level " << l;
}

TEST(Synth, ConfigErrors) {
    auto m = SynthModel::redshift_like();
    m.bin_weights = {-1, 2};
    EXPECT_THROW(synth(10, 0, m), ConfigError);
    m = SynthModel::redshift_like();
    m.bin_weights = {0, 0};
    EXPECT_THROW(synth(10, 0, m), ConfigError);
    m = SynthModel::redshift_like();
    m.level_weights.pop_back();
    EXPECT_THROW(synth(10, 0, m), ConfigError);
    m = SynthModel::redshift_like();
    m.bin_weights = {1};
    EXPECT_THROW(synth(10, 0, m), ConfigError);  // lcp 1 needs a second bin
    m = SynthModel::redshift_like();
    m.bin_spread = 0;
    EXPECT_THROW(synth(10, 0, m), ConfigError);
}

TEST(Synth, SidecarIsJsonLines) {
    const auto s = synth(50, 3, SynthModel::redshift_like());
    std::ostringstream os;
    write_sidecar(os, s.truth);
    std::istringstream in(os.str());
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        EXPECT_EQ(j.at("id").get<std::size_t>(), n);
        EXPECT_EQ(j.at("lcp").get<int>(), s.truth[n].lcp);
        EXPECT_EQ(j.at("bin").get<std::string>(), s.truth[n].bin);
        ++n;
    }
    EXPECT_EQ(n, 50u);
}

// ---- bench ----------------------------------------------------------------

TEST(Bench, SingleRunSingleMethod) {
    const auto data = make_bench_data(synth(2000, 1, SynthModel::redshift_like()).observations);
    BenchPlan plan;
    plan.runs = 1;
    plan.warmup = 0;
    plan.methods = {BenchMethod::baire_tree(3)};
    const auto r = bench(data, plan);
    ASSERT_EQ(r.size(), 1u);
    ASSERT_EQ(r[0].samples_ms.size(), 1u);
    EXPECT_EQ(r[0].median_ms, r[0].mean_ms);
    EXPECT_EQ(r[0].stddev_ms, 0.0);
}

TEST(Bench, SampleCountsAndSharedInput) {
    const auto data = make_bench_data(synth(3000, 1, SynthModel::redshift_like()).observations);
    BenchPlan plan;
    plan.runs = 4;
    plan.methods = {BenchMethod::baire_tree(3), BenchMethod::kmeans(6, 2)};
    const auto r = bench(data, plan);
    ASSERT_EQ(r.size(), 2u);
    for (const auto& rep : r) {
        EXPECT_EQ(rep.samples_ms.size(), 4u);
        EXPECT_EQ(rep.n, 3000u);
        for (double s : rep.samples_ms) EXPECT_GE(s, 0.0);
    }
    EXPECT_EQ(r[1].parameters, "k=6;iterations=2");
    EXPECT_EQ(data.points.size(), data.spec_items.size());
    plan.methods.clear();
    EXPECT_THROW(bench(data, plan), ConfigError);
}

TEST(Bench, LinearFitRecoversLine) {
    const std::vector<double> x{1, 5, 10, 15, 20}, y{3, 11, 21, 31, 41};
    const auto f = linear_fit(x, y);
    EXPECT_NEAR(f.slope, 2.0, 1e-12);
    EXPECT_NEAR(f.intercept, 1.0, 1e-12);
    EXPECT_NEAR(f.r2, 1.0, 1e-12);
    const std::vector<double> one{1};
    EXPECT_THROW(linear_fit(one, one), ShapeError);
}

TEST(Bench, MedianOfEvenAndOdd) {
    EXPECT_EQ(median({3, 1, 2}), 2.0);
    EXPECT_EQ(median({4, 1, 3, 2}), 2.5);
}

// ---- exports --------------------------------------------------------------

TEST(Export, TreeJsonElidesLargeMemberLists) {
    std::vector<KeyedItem> items;
    for (ItemId i = 0; i < 5; ++i) items.push_back({i, encode(i < 4 ? "0.41" : "0.52", 10, 3, true)});
    const auto j = io::tree_json(BaireTree::build(items, 3), 2);
    EXPECT_EQ(j["root"]["count"], 5);
    EXPECT_FALSE(j["root"].contains("members"));
    const auto& zero = j["root"]["children"][0];
    EXPECT_EQ(zero["prefix"], "0");
    ASSERT_EQ(zero["children"].size(), 2u);
    EXPECT_FALSE(zero["children"][0].contains("members"));
    EXPECT_EQ(zero["children"][1]["prefix"], "05");
    EXPECT_EQ(zero["children"][1]["members"], nlohmann::json::array({4}));
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    EXPECT_EQ(keys, (std::vector<std::string>{"base", "max_depth", "item_count", "node_count", "root"}));
}

TEST(Export, CensusTableLayout) {
    const auto c = PrecisionCensus::from_counts({0, 76187, 270920, 85999, 8982, 912, 90, 4});
    std::ostringstream os;
    io::census_table(os, c);
    const auto s = os.str();
    EXPECT_NE(s.find("Digit"), std::string::npos);
    EXPECT_NE(s.find("No."), std::string::npos);
    EXPECT_NE(s.find("Decimal digit"), std::string::npos);
    EXPECT_NE(s.find("76187"), std::string::npos);
    EXPECT_NE(s.find("61.14"), std::string::npos);
    EXPECT_NE(s.find("443094"), std::string::npos);
    std::ostringstream csv;
    io::census_csv(csv, c);
    EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "level,section,digit,count,percent,cumulative");
}

// ---- command line ---------------------------------------------------------

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run_cli({}).code, 1);
    EXPECT_EQ(run_cli({"frobnicate"}).code, 1);
    EXPECT_EQ(run_cli({"cluster", "--no-such-flag"}).code, 1);
    EXPECT_EQ(run_cli({"--format", "xml", "cluster"}).code, 1);
    const auto h = run_cli({"--help"});
    EXPECT_EQ(h.code, 0);
    EXPECT_NE(h.out.find("coincidence"), std::string::npos);
}

TEST(Cli, DepthBeyondPrecisionIsRangeError) {
    const auto r = run_cli({"cluster", "--depth", "9", "--precision", "6", "--synth-n", "100"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("depth 9"), std::string::npos);
}

TEST(Cli, FcaDemo) {
    const auto r = run_cli({"fca-demo"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("a, b, c, f\n"), std::string::npos);
    EXPECT_NE(r.out.find("a, c, e\n"), std::string::npos);
    EXPECT_NE(r.out.find("a, b, c, e, f\n"), std::string::npos);
    EXPECT_NE(r.out.find("d1,d2,d3"), std::string::npos);
}

TEST(Cli, CoincidenceTableLayout) {
    const auto r = run_cli({"coincidence", "--synth-n", "20000", "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("Digit"), std::string::npos);
    EXPECT_NE(r.out.find("No."), std::string::npos);
    EXPECT_NE(r.out.find("%"), std::string::npos);
    EXPECT_NE(r.out.find("at least 2 common prefix digits"), std::string::npos);
}

TEST(Cli, JsonIsStableAcrossRuns) {
    for (const auto& sub : {"cluster", "coincidence", "digits", "compare"}) {
        const auto a = run_cli({sub, "--format", "json", "--synth-n", "3000", "--seed", "9"});
        const auto b = run_cli({sub, "--format", "json", "--synth-n", "3000", "--seed", "9"});
        ASSERT_EQ(a.code, 0) << sub << ": " << a.err;
        EXPECT_EQ(a.out, b.out) << sub;
        EXPECT_NO_THROW((void)nlohmann::json::parse(a.out)) << sub;
    }
}

TEST(Cli, JsonGoldenFiles) {
    TempDir dir;
    {
        std::ofstream f(dir / "snippet.csv");
        f << kCatalogSnippet;
    }
    const auto input = (dir / "snippet.csv").string();
    const std::map<std::string, std::vector<std::string>> cases{
        {"fca_demo.json", {"fca-demo", "--format", "json"}},
        {"cluster_snippet.json", {"cluster", "--format", "json", "--input", input, "--depth", "3"}},
        {"coincidence_snippet.json", {"coincidence", "--format", "json", "--input", input}},
        {"tree_snippet.json", {"cluster", "--dump-tree", "--input", input, "--depth", "3"}},
    };
    for (const auto& [golden, args] : cases) {
        auto r = run_cli(args);
        ASSERT_EQ(r.code, 0) << golden << ": " << r.err;
        // The source path differs per run; pin it before comparing.
        const auto pos = r.out.find(input);
        if (pos != std::string::npos) r.out.replace(pos, input.size(), "snippet.csv");
        EXPECT_EQ(r.out, read_file(fs::path(BAIRE_GOLDEN_DIR) / golden)) << golden;
    }
}

TEST(Cli, CsvInputWithColumnOverride) {
    TempDir dir;
    {
        std::ofstream f(dir / "alt.csv");
        f << "a;b;zs;zp\n1;2;0.43;0.44\n1;2;0.44;0.45\n1;2;0.51;0.52\n1;2;0.7;0.1\n";
    }
    const auto r = run_cli({"cluster", "--format", "csv", "--input", (dir / "alt.csv").string(), "--columns", "a,b,zs,zp",
                        "--delimiter", ";", "--depth", "2", "--precision", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "level,prefix,size\n1,0,3\n2,04,2\n2,05,1\n");
    EXPECT_EQ(run_cli({"cluster", "--input", (dir / "missing.csv").string()}).code, 1);
    EXPECT_EQ(run_cli({"cluster", "--input", (dir / "alt.csv").string()}).code, 1);  // default columns absent
    EXPECT_EQ(run_cli({"cluster", "--columns", "a,b", "--input", (dir / "alt.csv").string()}).code, 1);
}

TEST(Cli, SynthWritesCatalogAndSidecar) {
    TempDir dir;
    const auto csv = (dir / "s.csv").string(), side = (dir / "s.jsonl").string();
    ASSERT_EQ(run_cli({"synth", "--synth-n", "200", "--seed", "4", "--output", csv, "--sidecar", side}).code, 0);
    const auto a = read_file(csv);
    const auto stdout_run = run_cli({"synth", "--synth-n", "200", "--seed", "4"});
    EXPECT_EQ(a, stdout_run.out);
    std::istringstream in(read_file(side));
    std::string line;
    int n = 0;
    while (std::getline(in, line)) ++n;
    EXPECT_EQ(n, 200);
    const auto loaded = load_csv(csv, CsvConfig{});
    EXPECT_EQ(loaded.observations.size(), 200u);
}

TEST(Cli, CompareReportsAllPotentialRows) {
    const auto r = run_cli({"compare", "--format", "json", "--synth-n", "4000", "--level", "3", "--k", "20", "--iterations", "10"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    const auto& s = j["contingency"]["summary"];
    EXPECT_EQ(s["complete"].get<int>() + s["overlapping"].get<int>() + s["empty"].get<int>(), 60);
    EXPECT_EQ(j["k"], 20);
    EXPECT_EQ(run_cli({"compare", "--synth-n", "100", "--dims", "3"}).code, 1);
    EXPECT_EQ(run_cli({"compare", "--synth-n", "100", "--init", "bogus"}).code, 1);
}

TEST(Cli, DigitsAndBenchAndVerify) {
    auto r = run_cli({"digits", "--format", "csv", "--synth-n", "1000"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "position,digit,spec,phot,diff");
    r = run_cli({"digits", "--synth-n", "1000", "--sigma", "1.0"});
    EXPECT_EQ(r.code, 0) << r.err;
    r = run_cli({"bench", "--format", "json", "--synth-n", "2000", "--runs", "2", "--k", "6", "--iterations", "1,3,5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["reports"].size(), 4u);
    EXPECT_TRUE(j.contains("kmeans_fit"));
    r = run_cli({"verify", "--synth-n", "500", "--n", "120"});
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST(Cli, OtherBaseRoutesThroughEncoding) {
    const auto r = run_cli({"cluster", "--format", "json", "--base", "2", "--precision", "8", "--depth", "5", "--synth-n", "500"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["levels"].size(), 5u);
    for (const auto& lv : j["levels"]) EXPECT_LE(lv["cluster_count"].get<int>(), 1 << lv["level"].get<int>());
}
