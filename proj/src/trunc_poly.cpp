#include "lvbif/trunc_poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lvbif/types.hpp"

namespace lvbif {

TruncMultiPoly::TruncMultiPoly(std::vector<std::string> names, int cap) : names_(std::move(names)), cap_(cap) {
    if (names_.empty() || nvars() > kMaxVars) throw UsageError("TruncMultiPoly: 1 to 4 variables");
    if (cap_ < 0 || cap_ > kMaxCap) throw UsageError("TruncMultiPoly: cap must be in [0, 6]");
}

TruncMultiPoly TruncMultiPoly::constant(std::vector<std::string> names, int cap, double c) {
    TruncMultiPoly p(std::move(names), cap);
    p.add_term({0, 0, 0, 0}, c);
    return p;
}

TruncMultiPoly TruncMultiPoly::variable(std::vector<std::string> names, int cap, std::string_view name) {
    TruncMultiPoly p(std::move(names), cap);
    Exponent e{};
    e[static_cast<std::size_t>(p.var_index(name))] = 1;
    p.add_term(e, 1.0);
    return p;
}

int TruncMultiPoly::var_index(std::string_view name) const {
    for (int i = 0; i < nvars(); ++i)
        if (names_[static_cast<std::size_t>(i)] == name) return i;
    throw UsageError("TruncMultiPoly: unknown variable '" + std::string(name) + "'");
}

double TruncMultiPoly::coeff(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? 0.0 : it->second;
}

void TruncMultiPoly::add_term(const Exponent& e, double c) {
    if (total_degree(e) > cap_ || c == 0.0) return;
    for (int i = nvars(); i < kMaxVars; ++i)
        if (e[static_cast<std::size_t>(i)] != 0) throw UsageError("TruncMultiPoly: exponent on unused variable");
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

double TruncMultiPoly::max_abs_coeff() const noexcept {
    double m = 0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

bool TruncMultiPoly::is_zero(double threshold) const noexcept {
    return std::all_of(terms_.begin(), terms_.end(), [&](const auto& t) { return std::abs(t.second) <= threshold; });
}

TruncMultiPoly TruncMultiPoly::up_to_degree(int d) const {
    TruncMultiPoly r(names_, cap_);
    for (const auto& [e, c] : terms_)
        if (total_degree(e) <= d) r.terms_.emplace(e, c);
    return r;
}

double TruncMultiPoly::eval(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != nvars()) throw UsageError("TruncMultiPoly::eval: wrong point dimension");
    double s = 0;
    for (const auto& [e, c] : terms_) {
        double m = c;
        for (int i = 0; i < nvars(); ++i) m *= std::pow(x[static_cast<std::size_t>(i)], e[static_cast<std::size_t>(i)]);
        s += m;
    }
    return s;
}

std::string TruncMultiPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        first = false;
        os << std::abs(c);
        for (int i = 0; i < nvars(); ++i) {
            const int k = e[static_cast<std::size_t>(i)];
            if (k == 0) continue;
            os << "*" << names_[static_cast<std::size_t>(i)];
            if (k > 1) os << "^" << k;
        }
    }
    return os.str();
}

void TruncMultiPoly::check_compatible(const TruncMultiPoly& o) const {
    if (names_ != o.names_) throw UsageError("TruncMultiPoly: variable sets differ");
    if (cap_ != o.cap_) throw UsageError("TruncMultiPoly: degree caps differ");
}

TruncMultiPoly& TruncMultiPoly::operator+=(const TruncMultiPoly& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

TruncMultiPoly& TruncMultiPoly::operator-=(const TruncMultiPoly& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

TruncMultiPoly& TruncMultiPoly::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
        it->second *= s;
        it = (it->second == 0.0) ? terms_.erase(it) : std::next(it);
    }
    return *this;
}

TruncMultiPoly operator*(const TruncMultiPoly& a, const TruncMultiPoly& b) {
    a.check_compatible(b);
    TruncMultiPoly r(a.names_, a.cap_);
    for (const auto& [ea, ca] : a.terms_) {
        const int da = total_degree(ea);
        for (const auto& [eb, cb] : b.terms_) {
            if (da + total_degree(eb) > a.cap_) continue;
            TruncMultiPoly::Exponent e;
            for (std::size_t i = 0; i < 4; ++i) e[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
            r.add_term(e, ca * cb);
        }
    }
    return r;
}

TruncMultiPoly TruncMultiPoly::diff(std::string_view var) const { return diff(var_index(var)); }

TruncMultiPoly TruncMultiPoly::diff(int var) const {
    if (var < 0 || var >= nvars()) throw UsageError("TruncMultiPoly::diff: bad variable index");
    const auto v = static_cast<std::size_t>(var);
    TruncMultiPoly r(names_, cap_);
    for (const auto& [e, c] : terms_) {
        if (e[v] == 0) continue;
        Exponent d = e;
        d[v] = static_cast<std::uint8_t>(e[v] - 1);
        r.add_term(d, c * e[v]);
    }
    return r;
}

TruncMultiPoly TruncMultiPoly::compose(std::span<const TruncMultiPoly> subs) const {
    if (static_cast<int>(subs.size()) != nvars())
        throw UsageError("TruncMultiPoly::compose: need one substitution per variable");
    for (const auto& s : subs)
        if (s.names_ != subs[0].names_) throw UsageError("TruncMultiPoly::compose: substitutions disagree on variables");
    // powers[i][k] = subs[i]^k, truncated at our cap
    std::vector<std::vector<TruncMultiPoly>> powers(subs.size());
    for (std::size_t i = 0; i < subs.size(); ++i) {
        TruncMultiPoly si(subs[i].names_, cap_);
        for (const auto& [e, c] : subs[i].terms_) si.add_term(e, c);
        powers[i].push_back(constant(subs[i].names_, cap_, 1.0));
        for (int k = 1; k <= cap_; ++k) powers[i].push_back(powers[i].back() * si);
    }
    TruncMultiPoly r(subs[0].names_, cap_);
    for (const auto& [e, c] : terms_) {
        TruncMultiPoly m = constant(subs[0].names_, cap_, c);
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (e[i] > 0) m = m * powers[i][e[i]];
        r += m;
    }
    return r;
}

}  // namespace lvbif
