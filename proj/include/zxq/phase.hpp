#pragma once

#include <cstdint>
#include <numbers>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "zxq/error.hpp"

namespace zxq {

/// An angle (num/den)·π kept reduced and normalised into [0, 2π).
class Phase {
public:
    constexpr Phase() = default;
    Phase(std::int64_t num, std::int64_t den) { assign(num, den); }

    static Phase zero() { return {}; }
    static Phase pi() { return {1, 1}; }

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }

    bool is_zero() const noexcept { return num_ == 0; }
    bool is_pi() const noexcept { return num_ == 1 && den_ == 1; }
    bool is_pauli() const noexcept { return den_ == 1; }

    double radians() const noexcept {
        return std::numbers::pi * static_cast<double>(num_) / static_cast<double>(den_);
    }

    Phase operator-() const { return {-num_, den_}; }
    Phase operator+(Phase const& o) const {
        std::int64_t const l = std::lcm(den_, o.den_);
        return {num_ * (l / den_) + o.num_ * (l / o.den_), l};
    }
    Phase operator-(Phase const& o) const { return *this + (-o); }

    friend bool operator==(Phase const&, Phase const&) = default;
    friend auto operator<=>(Phase const&, Phase const&) = default;

    /// "p/q" or "p" meaning (p/q)·π. Examples: "1/2", "-1/4", "1", "0".
    static Phase parse(std::string_view text) {
        auto const slash = text.find('/');
        try {
            std::size_t used = 0;
            std::string const head(text.substr(0, slash));
            std::int64_t const num = std::stoll(head, &used);
            if (used != head.size()) throw std::invalid_argument("trailing");
            std::int64_t den = 1;
            if (slash != std::string_view::npos) {
                std::string const tail(text.substr(slash + 1));
                den = std::stoll(tail, &used);
                if (used != tail.size()) throw std::invalid_argument("trailing");
            }
            if (den <= 0) throw std::invalid_argument("denominator");
            return {num, den};
        } catch (std::logic_error const&) {
            throw Error(ErrorKind::parse, "bad phase literal '" + std::string(text) + "'");
        }
    }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

private:
    void assign(std::int64_t num, std::int64_t den) {
        if (den <= 0) throw Error(ErrorKind::invalid_argument, "phase denominator must be positive");
        std::int64_t const g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        std::int64_t const period = 2 * den;
        num %= period;
        if (num < 0) num += period;
        num_ = num;
        den_ = den;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline std::ostream& operator<<(std::ostream& os, Phase const& p) { return os << p.str(); }

}  // namespace zxq
