#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lvbif {

// Polynomial in up to four variables; every product is truncated at total degree cap().
class TruncMultiPoly {
public:
    using Exponent = std::array<std::uint8_t, 4>;
    static constexpr int kMaxVars = 4;
    static constexpr int kMaxCap = 6;

    TruncMultiPoly(std::vector<std::string> names, int cap);

    static TruncMultiPoly constant(std::vector<std::string> names, int cap, double c);
    static TruncMultiPoly variable(std::vector<std::string> names, int cap, std::string_view name);

    int nvars() const noexcept { return static_cast<int>(names_.size()); }
    int cap() const noexcept { return cap_; }
    const std::vector<std::string>& names() const noexcept { return names_; }
    int var_index(std::string_view name) const;

    const std::map<Exponent, double>& terms() const noexcept { return terms_; }
    double coeff(const Exponent& e) const;
    // Adds c to the coefficient of e; terms above the cap are dropped.
    void add_term(const Exponent& e, double c);

    double max_abs_coeff() const noexcept;
    bool is_zero(double threshold = 0.0) const noexcept;
    // Only the terms of total degree <= d.
    TruncMultiPoly up_to_degree(int d) const;
    double eval(std::span<const double> x) const;
    std::string to_string() const;

    TruncMultiPoly& operator+=(const TruncMultiPoly& o);
    TruncMultiPoly& operator-=(const TruncMultiPoly& o);
    TruncMultiPoly& operator*=(double s);
    friend TruncMultiPoly operator+(TruncMultiPoly a, const TruncMultiPoly& b) { return a += b; }
    friend TruncMultiPoly operator-(TruncMultiPoly a, const TruncMultiPoly& b) { return a -= b; }
    friend TruncMultiPoly operator*(double s, TruncMultiPoly a) { return a *= s; }
    friend TruncMultiPoly operator*(const TruncMultiPoly& a, const TruncMultiPoly& b);
    friend bool operator==(const TruncMultiPoly& a, const TruncMultiPoly& b) {
        return a.names_ == b.names_ && a.cap_ == b.cap_ && a.terms_ == b.terms_;
    }

    TruncMultiPoly diff(std::string_view var) const;
    TruncMultiPoly diff(int var) const;
    // Substitutes subs[i] for variable i. All subs share one variable set, which the
    // result inherits; the result cap is this cap.
    TruncMultiPoly compose(std::span<const TruncMultiPoly> subs) const;

private:
    void check_compatible(const TruncMultiPoly& o) const;

    std::vector<std::string> names_;
    int cap_;
    std::map<Exponent, double> terms_;  // exact zeros are never stored
};

inline int total_degree(const TruncMultiPoly::Exponent& e) { return e[0] + e[1] + e[2] + e[3]; }

// Free-function spellings of the ring operations.
inline TruncMultiPoly tp_add(const TruncMultiPoly& p, const TruncMultiPoly& q) { return p + q; }
inline TruncMultiPoly tp_mul(const TruncMultiPoly& p, const TruncMultiPoly& q) { return p * q; }
inline TruncMultiPoly tp_diff(const TruncMultiPoly& p, std::string_view var) { return p.diff(var); }
inline TruncMultiPoly tp_compose(const TruncMultiPoly& p, std::span<const TruncMultiPoly> subs) {
    return p.compose(subs);
}

}  // namespace lvbif
