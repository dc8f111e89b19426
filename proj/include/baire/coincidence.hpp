#pragma once
// Pairwise prefix coincidence between two digit encodings of the same object
// (spectrometric vs photometric redshift), the per-level census of those
// coincidences, and per-position digit histograms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "baire/errors.hpp"
#include "baire/madic.hpp"

namespace baire {

struct CoincidenceRecord {
    std::uint64_t id = 0;
    int lcp = 0;
    Digits shared_prefix;
    int precision = 0;
    bool includes_integer_digit = true;
};

inline CoincidenceRecord coincide(const DigitKey& spec_key, const DigitKey& phot_key,
                                  std::uint64_t id = 0) {
    CoincidenceRecord r;
    r.id = id;
    r.lcp = lcp_length(spec_key, phot_key);
    const auto d = spec_key.digits();
    r.shared_prefix.assign(d.begin(), d.begin() + r.lcp);
    r.precision = spec_key.precision();
    r.includes_integer_digit = spec_key.includes_integer_digit();
    return r;
}

// Number of records whose lcp is exactly each level 0..precision.
class PrecisionCensus {
public:
    PrecisionCensus() = default;

    // counts[level] for level = 0..precision.
    static PrecisionCensus from_counts(std::vector<std::uint64_t> counts,
                                       bool includes_integer_digit = true) {
        PrecisionCensus c;
        c.counts_ = std::move(counts);
        c.includes_integer_digit_ = includes_integer_digit;
        for (auto v : c.counts_) c.total_ += v;
        return c;
    }

    int precision() const noexcept {
        return counts_.empty() ? 0 : static_cast<int>(counts_.size()) - 1;
    }
    bool includes_integer_digit() const noexcept { return includes_integer_digit_; }
    std::uint64_t total() const noexcept { return total_; }
    std::span<const std::uint64_t> counts() const noexcept { return counts_; }

    std::uint64_t count(int level) const {
        return level >= 0 && level < static_cast<int>(counts_.size())
                   ? counts_[static_cast<std::size_t>(level)]
                   : 0;
    }

    // Records with lcp >= level.
    std::uint64_t cumulative(int level) const {
        std::uint64_t s = 0;
        for (int k = std::max(level, 0); k < static_cast<int>(counts_.size()); ++k)
            s += counts_[static_cast<std::size_t>(k)];
        return s;
    }

    // Share of records at exactly `level`, in percent, truncated to 2 decimals.
    double percentage(int level) const {
        if (total_ == 0) return 0.0;
        const auto hundredths = count(level) * 10000u / total_;
        return static_cast<double>(hundredths) / 100.0;
    }

    double exact_percentage(int level) const {
        return total_ == 0 ? 0.0 : 100.0 * static_cast<double>(count(level)) / static_cast<double>(total_);
    }

private:
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
    bool includes_integer_digit_ = true;
};

// Precision is taken from the records; pass it explicitly to size the census of
// an empty input.
inline PrecisionCensus census(std::span<const CoincidenceRecord> records,
                              std::optional<int> precision = std::nullopt,
                              bool includes_integer_digit = true) {
    int k = precision.value_or(records.empty() ? 0 : records.front().precision);
    if (!records.empty()) includes_integer_digit = records.front().includes_integer_digit;
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(k) + 1, 0);
    for (const auto& r : records) {
        if (r.precision != records.front().precision ||
            r.includes_integer_digit != records.front().includes_integer_digit)
            throw ConventionError("census over records with mixed precision or convention");
        if (r.lcp < 0 || r.lcp > k)
            throw DomainError("record lcp " + std::to_string(r.lcp) + " outside [0, " +
                              std::to_string(k) + "]");
        ++counts[static_cast<std::size_t>(r.lcp)];
    }
    if (records.empty() && k == 0) counts.clear();
    return PrecisionCensus::from_counts(std::move(counts), includes_integer_digit);
}

// Percent of records sharing at least `prefix_digits` leading digits. Under
// the integer-digit convention the units digit counts, so 2 means "units digit
// plus at least one decimal".
inline double confidence_at_least(const PrecisionCensus& c, int prefix_digits) {
    if (c.total() == 0) throw DomainError("confidence over an empty census");
    if (prefix_digits < 1 || prefix_digits > c.precision())
        throw RangeError("prefix_digits " + std::to_string(prefix_digits) + " outside [1, " +
                         std::to_string(c.precision()) + "]");
    return 100.0 * static_cast<double>(c.cumulative(prefix_digits)) / static_cast<double>(c.total());
}

// Dense row-major grid; rows are digit positions, columns digit values.
template <class T>
class Grid {
public:
    Grid() = default;
    Grid(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), cells_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    T& operator()(std::size_t r, std::size_t c) { return cells_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return cells_[r * cols_ + c]; }
    std::span<const T> cells() const noexcept { return cells_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> cells_;
};

// counts(p, d): keys whose digit at position p+1 equals d.
struct DigitHistogram {
    int base = 0;
    std::uint64_t observations = 0;
    Grid<std::uint64_t> counts;

    int positions() const noexcept { return static_cast<int>(counts.rows()); }
    std::uint64_t at(int position, int digit) const {
        return counts(static_cast<std::size_t>(position - 1), static_cast<std::size_t>(digit));
    }
};

inline DigitHistogram digit_histogram(std::span<const DigitKey> keys) {
    DigitHistogram h;
    if (keys.empty()) return h;
    const DigitKey& first = keys.front();
    h.base = first.base();
    h.counts = Grid<std::uint64_t>(static_cast<std::size_t>(first.precision()),
                                   static_cast<std::size_t>(first.base()));
    for (const auto& k : keys) {
        require_same_convention(first, k);
        for (int p = 0; p < k.precision(); ++p) ++h.counts(static_cast<std::size_t>(p), k[static_cast<std::size_t>(p)]);
        ++h.observations;
    }
    return h;
}

struct Peak {
    int position = 0;  // 1-based
    int digit = 0;
    double value = 0;

    friend bool operator==(const Peak&, const Peak&) = default;
};

struct PeakOptions {
    // Absolute count a peak must exceed; unset means 1% of the observations.
    std::optional<double> min_count;
    // Gaussian smoothing width in grid cells before peak search; 0 disables.
    double smoothing_sigma = 0.0;
};

template <class T>
Grid<double> to_double(const Grid<T>& g) {
    Grid<double> out(g.rows(), g.cols());
    for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < g.cols(); ++c) out(r, c) = static_cast<double>(g(r, c));
    return out;
}

// Separable Gaussian convolution, truncated at 3 sigma, edges renormalized.
inline Grid<double> gaussian_smooth(const Grid<double>& g, double sigma) {
    if (sigma <= 0) return g;
    const int radius = std::max(1, static_cast<int>(std::ceil(3 * sigma)));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    for (int i = -radius; i <= radius; ++i)
        kernel[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * i * i / (sigma * sigma));

    const auto pass = [&](const Grid<double>& in, bool along_rows) {
        Grid<double> out(in.rows(), in.cols());
        const int R = static_cast<int>(in.rows()), C = static_cast<int>(in.cols());
        for (int r = 0; r < R; ++r)
            for (int c = 0; c < C; ++c) {
                double acc = 0, wsum = 0;
                for (int i = -radius; i <= radius; ++i) {
                    const int rr = along_rows ? r + i : r;
                    const int cc = along_rows ? c : c + i;
                    if (rr < 0 || rr >= R || cc < 0 || cc >= C) continue;
                    const double w = kernel[static_cast<std::size_t>(i + radius)];
                    acc += w * in(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
                    wsum += w;
                }
                out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = acc / wsum;
            }
        return out;
    };
    return pass(pass(g, true), false);
}

// Cells strictly greater than all 8 neighbours and above `min_count`.
inline std::vector<Peak> find_peaks(const Grid<double>& g, double min_count) {
    std::vector<Peak> peaks;
    const int R = static_cast<int>(g.rows()), C = static_cast<int>(g.cols());
    for (int r = 0; r < R; ++r)
        for (int c = 0; c < C; ++c) {
            const double v = g(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            if (!(v > min_count)) continue;
            bool is_peak = true;
            for (int dr = -1; dr <= 1 && is_peak; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    const int rr = r + dr, cc = c + dc;
                    if (rr < 0 || rr >= R || cc < 0 || cc >= C) continue;
                    if (g(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc)) >= v) {
                        is_peak = false;
                        break;
                    }
                }
            if (is_peak) peaks.push_back({r + 1, c, v});
        }
    return peaks;
}

inline std::vector<Peak> histogram_peaks(const DigitHistogram& h, const PeakOptions& opt = {}) {
    const double threshold = opt.min_count.value_or(0.01 * static_cast<double>(h.observations));
    return find_peaks(gaussian_smooth(to_double(h.counts), opt.smoothing_sigma), threshold);
}

struct HistogramDiff {
    Grid<std::int64_t> diff;  // a - b
    std::vector<Peak> peaks_a;
    std::vector<Peak> peaks_b;
};

inline HistogramDiff histogram_diff(const DigitHistogram& a, const DigitHistogram& b,
                                    const PeakOptions& opt = {}) {
    if (a.counts.rows() != b.counts.rows() || a.counts.cols() != b.counts.cols())
        throw ShapeError("digit histograms differ in shape");
    HistogramDiff out;
    out.diff = Grid<std::int64_t>(a.counts.rows(), a.counts.cols());
    for (std::size_t r = 0; r < a.counts.rows(); ++r)
        for (std::size_t c = 0; c < a.counts.cols(); ++c)
            out.diff(r, c) = static_cast<std::int64_t>(a.counts(r, c)) -
                             static_cast<std::int64_t>(b.counts(r, c));
    out.peaks_a = histogram_peaks(a, opt);
    out.peaks_b = histogram_peaks(b, opt);
    return out;
}

}  // namespace baire
