#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace lvbif {

// Bad input from the caller: wrong model, wrong dimension, bad option values.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A coefficient guard failed; guard() names the offending quantity.
class DegenerateModelError : public std::domain_error {
public:
    DegenerateModelError(std::string guard, const std::string& what)
        : std::domain_error(what), guard_(std::move(guard)) {}
    const std::string& guard() const noexcept { return guard_; }

private:
    std::string guard_;
};

// Argument outside the domain of a closed-form expression.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Newton divergence, step underflow and similar.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// State of a scalar (dim 1) or planar (dim 2) model.
class StateVector {
public:
    StateVector() = default;
    explicit StateVector(double x) : v_{x, 0.0}, n_(1) {}
    StateVector(double x1, double x2) : v_{x1, x2}, n_(2) {}

    static StateVector zeros(int dim) { return dim == 1 ? StateVector(0.0) : StateVector(0.0, 0.0); }

    int size() const noexcept { return n_; }
    double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return v_[static_cast<std::size_t>(i)]; }

    double norm_inf() const noexcept {
        return n_ == 1 ? std::abs(v_[0]) : std::max(std::abs(v_[0]), std::abs(v_[1]));
    }
    double norm2() const noexcept { return std::sqrt(v_[0] * v_[0] + (n_ == 2 ? v_[1] * v_[1] : 0.0)); }
    bool finite() const noexcept { return std::isfinite(v_[0]) && std::isfinite(v_[1]); }

    StateVector& operator+=(const StateVector& o) {
        v_[0] += o.v_[0];
        v_[1] += o.v_[1];
        return *this;
    }
    StateVector& operator-=(const StateVector& o) {
        v_[0] -= o.v_[0];
        v_[1] -= o.v_[1];
        return *this;
    }
    StateVector& operator*=(double s) {
        v_[0] *= s;
        v_[1] *= s;
        return *this;
    }
    friend StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
    friend StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
    friend StateVector operator*(double s, StateVector a) { return a *= s; }
    friend StateVector operator*(StateVector a, double s) { return a *= s; }
    friend StateVector operator-(StateVector a) { return a *= -1.0; }
    friend bool operator==(const StateVector& a, const StateVector& b) {
        return a.n_ == b.n_ && a.v_[0] == b.v_[0] && (a.n_ == 1 || a.v_[1] == b.v_[1]);
    }

private:
    std::array<double, 2> v_{};
    int n_ = 2;
};

inline double dot(const StateVector& a, const StateVector& b) {
    return a[0] * b[0] + (a.size() == 2 ? a[1] * b[1] : 0.0);
}

// Row-major 2x2 matrix. For scalar models only a00 is meaningful.
struct Matrix2 {
    double a00 = 0, a01 = 0, a10 = 0, a11 = 0;

    double trace() const noexcept { return a00 + a11; }
    double det() const noexcept { return a00 * a11 - a01 * a10; }
    double norm_max() const noexcept {
        return std::max(std::max(std::abs(a00), std::abs(a01)), std::max(std::abs(a10), std::abs(a11)));
    }
    bool finite() const noexcept {
        return std::isfinite(a00) && std::isfinite(a01) && std::isfinite(a10) && std::isfinite(a11);
    }
    StateVector operator*(const StateVector& v) const {
        if (v.size() == 1) return StateVector(a00 * v[0]);
        return {a00 * v[0] + a01 * v[1], a10 * v[0] + a11 * v[1]};
    }
    Matrix2 transposed() const { return {a00, a10, a01, a11}; }
};

inline Matrix2 operator*(const Matrix2& a, const Matrix2& b) {
    return {a.a00 * b.a00 + a.a01 * b.a10, a.a00 * b.a01 + a.a01 * b.a11,
            a.a10 * b.a00 + a.a11 * b.a10, a.a10 * b.a01 + a.a11 * b.a11};
}

// Second and third partial derivatives of the field, symmetric in the lower indices:
// d2[i][j][k] = d^2 f_i / dx_j dx_k.
struct SecondDerivs {
    double d[2][2][2] = {};
};
struct ThirdDerivs {
    double d[2][2][2][2] = {};
};

}  // namespace lvbif
