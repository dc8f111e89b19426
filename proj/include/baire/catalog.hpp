#pragma once
// Redshift catalog rows (RA, DEC, z_spec, z_phot): CSV ingestion and a seeded
// synthetic generator with planted ground truth.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "baire/bairetree.hpp"
#include "baire/errors.hpp"
#include "baire/madic.hpp"

namespace baire {

struct Observation {
    ItemId id = 0;  // 0-based data row in the source
    double ra = 0;
    double dec = 0;
    std::string spec_text;
    std::string phot_text;
    DigitKey spec_key;
    DigitKey phot_key;
};

struct CsvConfig {
    char delimiter = ',';
    std::array<std::string, 4> columns{"RA", "DEC", "Spec", "Phot"};
    std::string range_max = "0.6";  // keep values in [0, range_max)
    int precision = kDefaultPrecision;
    int base = 10;
    bool include_integer_digit = true;
    bool skip_bad_rows = true;  // false: first bad row raises RowError
};

struct LoadResult {
    std::vector<Observation> observations;
    std::size_t rows_read = 0;
    std::size_t dropped_out_of_range = 0;
    std::size_t skipped_bad_rows = 0;
};

namespace detail {

inline std::string_view unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return trim(s);
}

inline std::vector<std::string_view> split_fields(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        out.push_back(unquote(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

inline double parse_real(std::string_view s) {
    double v = 0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || s.empty()) throw ParseError("not a number: '" + std::string(s) + "'");
    return v;
}

inline bool in_range(std::string_view text, std::string_view range_max) {
    return compare_decimal(text, range_max) == std::strong_ordering::less;
}

}  // namespace detail

inline LoadResult load_csv(std::istream& in, const CsvConfig& cfg) {
    detail::check_base_precision(cfg.base, cfg.precision);
    if (cfg.include_integer_digit &&
        compare_decimal(cfg.range_max, std::to_string(cfg.base)) == std::strong_ordering::greater)
        throw ConfigError("range maximum exceeds what a single units digit can encode");

    LoadResult res;
    std::string line;
    if (!std::getline(in, line)) throw FormatError("missing header row");
    const auto header = detail::split_fields(line, cfg.delimiter);
    std::array<std::size_t, 4> col{};
    for (std::size_t c = 0; c < 4; ++c) {
        const auto it = std::find_if(header.begin(), header.end(),
                                     [&](std::string_view h) { return detail::iequals(h, cfg.columns[c]); });
        if (it == header.end()) throw FormatError("missing column '" + cfg.columns[c] + "'");
        col[c] = static_cast<std::size_t>(it - header.begin());
    }

    std::size_t line_no = 1;
    ItemId row = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const ItemId id = row++;
        ++res.rows_read;
        try {
            const auto f = detail::split_fields(line, cfg.delimiter);
            for (auto c : col)
                if (c >= f.size()) throw RowError(line_no, "too few fields");
            Observation o;
            o.id = id;
            o.ra = detail::parse_real(f[col[0]]);
            o.dec = detail::parse_real(f[col[1]]);
            o.spec_text = std::string(f[col[2]]);
            o.phot_text = std::string(f[col[3]]);
            bool keep = true;
            for (const auto* t : {&o.spec_text, &o.phot_text}) {
                try {
                    keep = keep && detail::in_range(*t, cfg.range_max);
                } catch (const DomainError&) {
                    keep = false;  // negative
                }
            }
            if (!keep) {
                ++res.dropped_out_of_range;
                continue;
            }
            o.spec_key = encode(o.spec_text, cfg.base, cfg.precision, cfg.include_integer_digit);
            o.phot_key = encode(o.phot_text, cfg.base, cfg.precision, cfg.include_integer_digit);
            res.observations.push_back(std::move(o));
        } catch (const RowError&) {
            if (!cfg.skip_bad_rows) throw;
            ++res.skipped_bad_rows;
        } catch (const Error& e) {
            if (!cfg.skip_bad_rows) throw RowError(line_no, e.what());
            ++res.skipped_bad_rows;
        }
    }
    return res;
}

inline LoadResult load_csv(const std::string& path, const CsvConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path + "'");
    return load_csv(in, cfg);
}

inline void write_csv(std::ostream& os, const std::vector<Observation>& obs) {
    os << "RA,DEC,Spec,Phot\n";
    char buf[64];
    for (const auto& o : obs) {
        std::snprintf(buf, sizeof buf, "%.5f,%.8f,", o.ra, o.dec);
        os << buf << o.spec_text << ',' << o.phot_text << '\n';
    }
}

// ---------------------------------------------------------------------------
// Synthetic catalogs

// Values are "0.<bin><rest>": the bin is the first decimal digit, drawn by
// bin_weights. z_phot agrees with z_spec on exactly `lcp` leading digits
// (units digit counted), with lcp drawn from level_weights[lcp].
struct SynthModel {
    std::vector<double> bin_weights;
    std::vector<double> level_weights;  // index = lcp, size precision + 1
    double bin_spread = 1.0;             // fraction of each bin's width used, centred
    int text_decimals = 8;
    int precision = kDefaultPrecision;

    // Bin weights follow the row totals of a level-2 Baire/k-means
    // comparison on the real catalogue; level weights follow the observed
    // lcp census (units digit, then decimals 1..6), folded into `precision`.
    static SynthModel redshift_like(int precision = kDefaultPrecision) {
        SynthModel m;
        m.precision = precision;
        m.bin_weights = {162034, 144693, 22643, 26441, 11116, 21};
        const std::array<double, 7> census{76187, 270920, 85999, 8982, 912, 90, 4};
        m.level_weights.assign(static_cast<std::size_t>(precision) + 1, 0.0);
        for (std::size_t i = 0; i < census.size(); ++i) {
            const std::size_t level = std::min<std::size_t>(i + 1, static_cast<std::size_t>(precision));
            m.level_weights[level] += census[i];
        }
        return m;
    }
};

struct PlantedTruth {
    ItemId id = 0;
    std::string bin;  // "0b"
    int lcp = 0;
};

struct SynthResult {
    std::vector<Observation> observations;
    std::vector<PlantedTruth> truth;
};

namespace detail {

inline void validate(const SynthModel& m) {
    const auto bad_weights = [](const std::vector<double>& w) {
        double s = 0;
        for (double v : w) {
            if (!(v >= 0)) return true;
            s += v;
        }
        return !(s > 0);
    };
    if (m.precision < 2 || m.precision > kMaxPrecision) throw ConfigError("precision must be in [2, 32]");
    if (m.bin_weights.empty() || m.bin_weights.size() > 10 || bad_weights(m.bin_weights))
        throw ConfigError("bin weights: 1..10 non-negative values with a positive sum");
    if (m.level_weights.size() != static_cast<std::size_t>(m.precision) + 1 || bad_weights(m.level_weights))
        throw ConfigError("level weights: precision + 1 non-negative values with a positive sum");
    if (m.level_weights[0] != 0)
        throw ConfigError("lcp 0 is impossible: every value shares the units digit 0");
    if (m.level_weights[1] > 0 &&
        std::count_if(m.bin_weights.begin(), m.bin_weights.end(), [](double w) { return w > 0; }) < 2)
        throw ConfigError("lcp 1 needs at least two populated bins");
    if (!(m.bin_spread > 0 && m.bin_spread <= 1)) throw ConfigError("bin_spread must be in (0, 1]");
    if (m.text_decimals < m.precision - 1 || m.text_decimals > 15)
        throw ConfigError("text_decimals must be in [precision - 1, 15]");
}

}  // namespace detail

inline SynthResult synth(std::size_t n, std::uint64_t seed, const SynthModel& model) {
    detail::validate(model);
    SynthResult res;
    res.observations.reserve(n);
    res.truth.reserve(n);

    std::mt19937_64 rng(seed);
    std::discrete_distribution<int> pick_bin(model.bin_weights.begin(), model.bin_weights.end());
    std::discrete_distribution<int> pick_level(model.level_weights.begin(), model.level_weights.end());
    std::uniform_int_distribution<int> digit(0, 9);
    std::uniform_real_distribution<double> ra_dist(0.0, 360.0), dec_dist(-10.0, 70.0);

    const int tail = model.text_decimals - 1;  // digits after the bin digit
    std::uint64_t scale = 1;
    for (int i = 0; i < tail; ++i) scale *= 10;
    const auto lo = static_cast<std::uint64_t>((1.0 - model.bin_spread) / 2.0 * static_cast<double>(scale));
    const auto width = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(model.bin_spread * static_cast<double>(scale)));
    std::uniform_int_distribution<std::uint64_t> in_window(lo, std::min(scale, lo + width) - 1);

    const auto tail_digits = [&](std::uint64_t v) {
        std::string s(static_cast<std::size_t>(tail), '0');
        for (int i = tail - 1; i >= 0; --i) {
            s[static_cast<std::size_t>(i)] = static_cast<char>('0' + v % 10);
            v /= 10;
        }
        return s;
    };
    const auto window_ok = [&](const std::string& t) {
        const std::uint64_t v = tail == 0 ? 0 : std::stoull(t);
        return v >= in_window.a() && v <= in_window.b();
    };

    for (std::size_t i = 0; i < n; ++i) {
        const int bin = pick_bin(rng);
        const std::string spec_tail = tail > 0 ? tail_digits(in_window(rng)) : std::string{};
        const int lcp = pick_level(rng);

        int phot_bin = bin;
        std::string phot_tail;
        if (lcp == 1) {
            // Different first decimal: move to another populated bin.
            std::vector<double> others = model.bin_weights;
            others[static_cast<std::size_t>(bin)] = 0;
            phot_bin = std::discrete_distribution<int>(others.begin(), others.end())(rng);
            phot_tail = tail > 0 ? tail_digits(in_window(rng)) : std::string{};
        } else if (lcp >= model.precision) {
            phot_tail = spec_tail;
            for (int p = model.precision - 2; p < tail; ++p)
                phot_tail[static_cast<std::size_t>(p)] = static_cast<char>('0' + digit(rng));
        } else {
            // Decimals 2..lcp-1 shared, decimal lcp differs. Tail index t holds decimal t + 2.
            const auto split = static_cast<std::size_t>(lcp - 2);
            for (int attempt = 0; attempt < 100; ++attempt) {
                phot_tail = spec_tail;
                int d;
                do d = digit(rng);
                while (d == spec_tail[split] - '0');
                phot_tail[split] = static_cast<char>('0' + d);
                for (std::size_t p = split + 1; p < phot_tail.size(); ++p)
                    phot_tail[p] = static_cast<char>('0' + digit(rng));
                if (window_ok(phot_tail)) break;
            }
        }

        Observation o;
        o.id = i;
        o.ra = ra_dist(rng);
        o.dec = dec_dist(rng);
        o.spec_text = "0." + std::string(1, static_cast<char>('0' + bin)) + spec_tail;
        o.phot_text = "0." + std::string(1, static_cast<char>('0' + phot_bin)) + phot_tail;
        o.spec_key = encode(o.spec_text, 10, model.precision, true);
        o.phot_key = encode(o.phot_text, 10, model.precision, true);
        res.observations.push_back(std::move(o));
        res.truth.push_back({i, std::string("0") + static_cast<char>('0' + bin), lcp});
    }
    return res;
}

// JSON lines, one object per observation.
inline void write_sidecar(std::ostream& os, const std::vector<PlantedTruth>& truth) {
    for (const auto& t : truth)
        os << "{\"id\":" << t.id << ",\"bin\":\"" << t.bin << "\",\"lcp\":" << t.lcp << "}\n";
}

}  // namespace baire
