#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mapf {

struct Scaled;

// Rational suboptimality factor w = num/den with num >= den >= 1, gcd 1.
// Every heuristic/cost comparison in the solver happens in integer units of
// 1/den, so the bounded-suboptimality inequalities are exact.
struct SuboptFactor {
    std::int64_t num = 1;
    std::int64_t den = 1;

    static SuboptFactor make(std::int64_t num, std::int64_t den);
    // Accepts "2", "3/2", or a decimal like "1.5"; the reduced denominator
    // must not exceed 1000.
    static std::optional<SuboptFactor> parse(std::string_view text);

    bool is_one() const { return num == den; }
    double as_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;

    // Plain integer value expressed in scaled units.
    Scaled scale(std::int64_t plain) const;
    // w * plain, exact in scaled units.
    Scaled scale_weighted(std::int64_t plain) const;

    friend bool operator==(const SuboptFactor&, const SuboptFactor&) = default;
};

// Integer value in units of 1/den(w). Strong type so plain and scaled
// quantities cannot be mixed accidentally.
struct Scaled {
    std::int64_t v = 0;

    friend auto operator<=>(const Scaled&, const Scaled&) = default;
    Scaled operator+(Scaled o) const { return Scaled{v + o.v}; }
    Scaled operator-(Scaled o) const { return Scaled{v - o.v}; }
    Scaled& operator+=(Scaled o) {
        v += o.v;
        return *this;
    }
};

inline Scaled SuboptFactor::scale(std::int64_t plain) const { return Scaled{plain * den}; }
inline Scaled SuboptFactor::scale_weighted(std::int64_t plain) const { return Scaled{plain * num}; }

inline SuboptFactor SuboptFactor::make(std::int64_t num, std::int64_t den) {
    if (den <= 0 || num < den) throw std::invalid_argument("suboptimality factor must be >= 1");
    const std::int64_t g = std::gcd(num, den);
    return SuboptFactor{num / g, den / g};
}

inline std::optional<SuboptFactor> SuboptFactor::parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    const std::string s(text);
    try {
        if (const auto slash = s.find('/'); slash != std::string::npos) {
            std::size_t pos_n = 0, pos_d = 0;
            const std::int64_t num = std::stoll(s.substr(0, slash), &pos_n);
            const std::int64_t den = std::stoll(s.substr(slash + 1), &pos_d);
            if (pos_n != slash || pos_d != s.size() - slash - 1) return std::nullopt;
            if (den <= 0 || num < den) return std::nullopt;
            SuboptFactor w = make(num, den);
            if (w.den > 1000) return std::nullopt;
            return w;
        }
        if (const auto dot = s.find('.'); dot != std::string::npos) {
            const std::string frac = s.substr(dot + 1);
            const std::string whole = s.substr(0, dot);
            if (frac.empty() || whole.empty()) return std::nullopt;
            std::int64_t den = 1;
            for (char c : frac) {
                if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
                den *= 10;
                if (den > 1'000'000'000) return std::nullopt;
            }
            std::size_t pos = 0;
            const std::int64_t whole_v = std::stoll(whole, &pos);
            if (pos != whole.size() || whole_v < 0) return std::nullopt;
            const std::int64_t num = whole_v * den + std::stoll(frac);
            if (num < den) return std::nullopt;
            SuboptFactor w = make(num, den);
            if (w.den > 1000) return std::nullopt;
            return w;
        }
        std::size_t pos = 0;
        const std::int64_t num = std::stoll(s, &pos);
        if (pos != s.size() || num < 1) return std::nullopt;
        return SuboptFactor{num, 1};
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

inline std::string SuboptFactor::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

}  // namespace mapf
