#pragma once
// m-adic digit encoding of decimal numerals and the Baire (longest common
// prefix) ultrametric on those encodings.
//
// Keys are built from the source text, never from a binary double, so that the
// digits a value is clustered on are exactly the digits that were written down.

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "baire/errors.hpp"

namespace baire {

inline constexpr int kMinBase = 2;
inline constexpr int kMaxBase = 16;
inline constexpr int kMaxPrecision = 32;
inline constexpr int kDefaultPrecision = 6;

using Digit = std::uint8_t;
using Digits = std::vector<Digit>;

inline char digit_char(Digit d) {
    return "0123456789abcdef"[d & 0xF];
}

// "04", "0a1" ... ; the label used for tree nodes and cluster rows.
inline std::string prefix_label(std::span<const Digit> digits) {
    std::string out;
    out.reserve(digits.size());
    for (Digit d : digits) out.push_back(digit_char(d));
    return out;
}

// Fixed-precision base-m digit sequence of one value. Position 0 is either the
// units digit (includes_integer_digit) or the first fractional digit.
class DigitKey {
public:
    DigitKey() = default;

    DigitKey(std::span<const Digit> digits, int base, bool includes_integer_digit)
        : base_(static_cast<std::uint8_t>(base)), includes_integer_digit_(includes_integer_digit) {
        if (base < kMinBase || base > kMaxBase)
            throw DomainError("base must be in [2, 16], got " + std::to_string(base));
        if (digits.empty() || digits.size() > static_cast<std::size_t>(kMaxPrecision))
            throw DomainError("precision must be in [1, " + std::to_string(kMaxPrecision) + "]");
        for (std::size_t i = 0; i < digits.size(); ++i) {
            if (digits[i] >= base)
                throw DomainError("digit " + std::to_string(digits[i]) + " not below base " +
                                  std::to_string(base));
            digits_[i] = digits[i];
        }
        size_ = static_cast<std::uint8_t>(digits.size());
    }

    DigitKey(std::initializer_list<Digit> digits, int base, bool includes_integer_digit)
        : DigitKey(std::span<const Digit>(digits.begin(), digits.size()), base,
                   includes_integer_digit) {}

    std::span<const Digit> digits() const noexcept { return {digits_.data(), size_}; }
    Digit operator[](std::size_t i) const noexcept { return digits_[i]; }
    int precision() const noexcept { return size_; }
    int base() const noexcept { return base_; }
    bool includes_integer_digit() const noexcept { return includes_integer_digit_; }

    bool same_convention(const DigitKey& other) const noexcept {
        return base_ == other.base_ && size_ == other.size_ &&
               includes_integer_digit_ == other.includes_integer_digit_;
    }

    friend bool operator==(const DigitKey& a, const DigitKey& b) noexcept {
        return a.same_convention(b) &&
               std::equal(a.digits_.begin(), a.digits_.begin() + a.size_, b.digits_.begin());
    }

private:
    std::array<Digit, kMaxPrecision> digits_{};
    std::uint8_t size_ = 0;
    std::uint8_t base_ = 10;
    bool includes_integer_digit_ = false;
};

// base^(-exponent). Exponent 0 means the keys differ in their first position.
class BaireValue {
public:
    BaireValue() = default;
    BaireValue(int exponent, int base) : exponent_(exponent), base_(base) {
        if (exponent < 0) throw DomainError("Baire exponent must be non-negative");
        if (base < kMinBase) throw DomainError("Baire base must be at least 2");
    }

    int exponent() const noexcept { return exponent_; }
    int base() const noexcept { return base_; }

    // 1 / base^p, with base^p formed exactly in integers so that e.g. p = 2,
    // base 10 yields the double nearest to 0.01.
    double value() const noexcept {
        double power = 1.0;
        for (int i = 0; i < exponent_; ++i) power *= base_;
        return 1.0 / power;
    }

    friend bool operator==(const BaireValue&, const BaireValue&) = default;

    // Larger exponent = closer. Only meaningful for equal bases.
    friend std::partial_ordering operator<=>(const BaireValue& a, const BaireValue& b) noexcept {
        if (a.base_ != b.base_) return std::partial_ordering::unordered;
        return b.exponent_ <=> a.exponent_;
    }

private:
    int exponent_ = 0;
    int base_ = 10;
};

namespace detail {

inline void check_base_precision(int base, int precision) {
    if (base < kMinBase || base > kMaxBase)
        throw DomainError("base must be in [2, 16], got " + std::to_string(base));
    if (precision < 1 || precision > kMaxPrecision)
        throw DomainError("precision must be in [1, " + std::to_string(kMaxPrecision) + "], got " +
                          std::to_string(precision));
}

inline std::string_view trim(std::string_view s) {
    const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && ws(s.front())) s.remove_prefix(1);
    while (!s.empty() && ws(s.back())) s.remove_suffix(1);
    return s;
}

struct Numeral {
    std::string_view integer;   // decimal digits, may be empty
    std::string_view fraction;  // decimal digits, may be empty
};

// Splits a plain non-negative decimal numeral. Signs, exponents, separators and
// anything else that is not "digits[.digits]" are rejected.
inline Numeral split_numeral(std::string_view raw) {
    const std::string_view text = trim(raw);
    if (text.empty()) throw ParseError("empty numeral");
    std::string_view body = text;
    if (body.front() == '-') {
        // Reject "-0.0" too; the data range is non-negative and sign is not encoded.
        throw DomainError("negative value '" + std::string(text) + "'");
    }
    if (body.front() == '+') body.remove_prefix(1);
    const auto dot = body.find('.');
    Numeral n;
    n.integer = body.substr(0, dot);
    n.fraction = dot == std::string_view::npos ? std::string_view{} : body.substr(dot + 1);
    const auto all_digits = [](std::string_view s) {
        return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    if ((n.integer.empty() && n.fraction.empty()) || !all_digits(n.integer) ||
        !all_digits(n.fraction))
        throw ParseError("not a decimal numeral: '" + std::string(text) + "'");
    return n;
}

}  // namespace detail

// Exact comparison of two non-negative decimal numerals by value.
inline std::strong_ordering compare_decimal(std::string_view a, std::string_view b) {
    auto na = detail::split_numeral(a);
    auto nb = detail::split_numeral(b);
    const auto strip_lead = [](std::string_view s) {
        while (!s.empty() && s.front() == '0') s.remove_prefix(1);
        return s;
    };
    const auto strip_trail = [](std::string_view s) {
        while (!s.empty() && s.back() == '0') s.remove_suffix(1);
        return s;
    };
    const auto ia = strip_lead(na.integer), ib = strip_lead(nb.integer);
    if (ia.size() != ib.size()) return ia.size() <=> ib.size();
    if (auto c = ia.compare(ib); c != 0) return c <=> 0;
    const auto fa = strip_trail(na.fraction), fb = strip_trail(nb.fraction);
    const std::size_t len = std::max(fa.size(), fb.size());
    for (std::size_t i = 0; i < len; ++i) {
        const char ca = i < fa.size() ? fa[i] : '0';
        const char cb = i < fb.size() ? fb[i] : '0';
        if (ca != cb) return ca <=> cb;
    }
    return std::strong_ordering::equal;
}

// First `precision` digits of the base-`base` expansion of `text`, truncated and
// zero filled. With include_integer_digit the value must be below `base`
// (single units digit); without it the value must be below 1.
inline DigitKey encode(std::string_view text, int base, int precision, bool include_integer_digit) {
    detail::check_base_precision(base, precision);
    const auto numeral = detail::split_numeral(text);

    std::uint64_t integer = 0;
    for (char c : numeral.integer) {
        if (integer >= static_cast<std::uint64_t>(base) * 10)
            break;  // already out of range; avoid overflow on absurd inputs
        integer = integer * 10 + static_cast<std::uint64_t>(c - '0');
    }
    if (include_integer_digit && integer >= static_cast<std::uint64_t>(base))
        throw DomainError("value '" + std::string(detail::trim(text)) +
                          "' has a multi-digit integer part in base " + std::to_string(base));
    if (!include_integer_digit && integer != 0)
        throw DomainError("value '" + std::string(detail::trim(text)) +
                          "' is not below 1 (decimal-only convention)");

    std::array<Digit, kMaxPrecision> out{};
    int pos = 0;
    if (include_integer_digit) out[pos++] = static_cast<Digit>(integer);

    if (base == 10) {
        for (std::size_t i = 0; pos < precision && i < numeral.fraction.size(); ++i)
            out[pos++] = static_cast<Digit>(numeral.fraction[i] - '0');
    } else {
        // Repeated multiplication of the decimal fraction by the base; the carry
        // out of the units position is the next base-m digit. Exact for any length.
        std::vector<int> frac(numeral.fraction.size());
        for (std::size_t i = 0; i < frac.size(); ++i) frac[i] = numeral.fraction[i] - '0';
        while (!frac.empty() && frac.back() == 0) frac.pop_back();
        while (pos < precision && !frac.empty()) {
            int carry = 0;
            for (std::size_t i = frac.size(); i-- > 0;) {
                const int v = frac[i] * base + carry;
                frac[i] = v % 10;
                carry = v / 10;
            }
            out[pos++] = static_cast<Digit>(carry);
            while (!frac.empty() && frac.back() == 0) frac.pop_back();
        }
    }
    return DigitKey(std::span<const Digit>(out.data(), static_cast<std::size_t>(precision)), base,
                    include_integer_digit);
}

// Renders a key back to positional text, e.g. [0,1,4,6] -> "0.146".
inline std::string to_text(const DigitKey& key) {
    const auto d = key.digits();
    std::string out;
    std::size_t i = 0;
    if (key.includes_integer_digit()) {
        out.push_back(digit_char(d[0]));
        i = 1;
    } else {
        out.push_back('0');
    }
    if (i < d.size()) {
        out.push_back('.');
        for (; i < d.size(); ++i) out.push_back(digit_char(d[i]));
    }
    return out;
}

inline void require_same_convention(const DigitKey& a, const DigitKey& b) {
    if (!a.same_convention(b))
        throw ConventionError("digit keys differ in base, precision or integer-digit convention");
}

inline int lcp_length(const DigitKey& a, const DigitKey& b) {
    require_same_convention(a, b);
    const int n = a.precision();
    int p = 0;
    while (p < n && a[p] == b[p]) ++p;
    return p;
}

// Baire distance. Identical keys give base^(-precision), never 0.
inline BaireValue baire_distance(const DigitKey& a, const DigitKey& b) {
    return BaireValue(lcp_length(a, b), a.base());
}

// Keeps the first `precision` digits (truncation preserves prefix nesting).
inline DigitKey truncate(const DigitKey& key, int precision) {
    if (precision < 1 || precision > key.precision())
        throw RangeError("cannot truncate precision " + std::to_string(key.precision()) + " to " +
                         std::to_string(precision));
    return DigitKey(key.digits().first(static_cast<std::size_t>(precision)), key.base(),
                    key.includes_integer_digit());
}

}  // namespace baire
