#pragma once

#include <array>
#include <vector>

#include "lvbif/types.hpp"

namespace lvbif {

// Real polynomial of degree <= 4, coefficients in ascending order.
class Poly1 {
public:
    explicit Poly1(std::vector<double> ascending);

    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    double coeff(int i) const { return i <= degree() ? c_[static_cast<std::size_t>(i)] : 0.0; }
    const std::vector<double>& coeffs() const noexcept { return c_; }
    double operator()(double x) const noexcept;
    Poly1 derivative() const;
    double scale() const noexcept;  // max |coefficient|
    // Sum |c_i| |x|^i: magnitude bound used for rounding-level tests.
    double magnitude(double x) const noexcept;

private:
    std::vector<double> c_;  // trailing zeros trimmed; empty = zero polynomial
};

struct RealRoot {
    double value;
    int multiplicity;
};

// All real roots, ascending. Roots closer than cluster_tol are merged and their
// multiplicities summed. Throws UsageError for the zero polynomial.
std::vector<RealRoot> solve_poly_real(const Poly1& p, double cluster_tol = 1e-7);

struct EigenData {
    int count = 2;  // 1 for scalar models
    double trace = 0, det = 0;
    bool complex = false;
    std::array<double, 2> re{}, im{};  // real pair sorted ascending; complex pair has im[0] > 0
};

EigenData eigen2(const Matrix2& m);
EigenData eigen_scalar(double derivative);
EigenData eigen_of(const Matrix2& jac, int dim);

// Unit eigenvector for a real eigenvalue of m.
StateVector real_eigenvector(const Matrix2& m, double lambda);
// Unit left eigenvector (w^T m = lambda w^T).
StateVector real_left_eigenvector(const Matrix2& m, double lambda);

// Solve m x = rhs; throws NumericalError when singular.
StateVector solve2(const Matrix2& m, const StateVector& rhs);

}  // namespace lvbif
