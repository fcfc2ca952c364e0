#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvdyn/gauss.hpp"

namespace mvdyn {

/// Dense univariate polynomial over C, coefficients in ascending degree.
///
/// A polynomial is *exact* when every coefficient is a Gaussian rational that
/// was never rounded; exact polynomials carry both the exact coefficients and
/// their double images. Arithmetic between two exact polynomials stays exact;
/// anything touching a floating polynomial degrades to floating.
///
/// Canonical form: the leading coefficient is nonzero unless the polynomial is
/// identically zero (exact zero for exact, bitwise 0.0 for floating).
class ComplexPoly {
public:
    ComplexPoly() = default;  // zero polynomial, exact
    explicit ComplexPoly(std::vector<cplx> coeffs);
    explicit ComplexPoly(std::vector<Gauss> coeffs);

    static ComplexPoly constant(const Gauss& c) { return ComplexPoly(std::vector<Gauss>{c}); }
    static ComplexPoly constant(cplx c) { return ComplexPoly(std::vector<cplx>{c}); }
    /// The identity polynomial z (exact).
    static ComplexPoly identity() { return ComplexPoly(std::vector<Gauss>{Gauss(0), Gauss(1)}); }
    /// (z - r)^m, exact when r is.
    static ComplexPoly linear_power(const Gauss& r, int m);

    bool is_exact() const { return exact_.has_value(); }
    bool is_zero() const { return coeffs_.empty(); }
    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

    std::span<const cplx> coeffs() const { return coeffs_; }
    /// Precondition: is_exact().
    const std::vector<Gauss>& exact_coeffs() const;

    cplx coeff(int k) const;
    cplx leading() const { return is_zero() ? cplx{} : coeffs_.back(); }
    double max_abs_coeff() const;

    ComplexPoly to_float() const { return ComplexPoly(coeffs_); }
    ComplexPoly derivative() const;
    ComplexPoly monic() const;
    /// p(lambda*z + mu), exact when all inputs are.
    ComplexPoly affine_compose(const Gauss& lambda, const Gauss& mu) const;
    ComplexPoly shifted(const Gauss& a) const { return affine_compose(Gauss(1), a); }
    ComplexPoly shifted(cplx a) const;
    /// Coefficients with |c| <= rel_tol * max|c| set to zero, then trimmed. Result is floating
    /// unless nothing was dropped.
    ComplexPoly trimmed(double rel_tol) const;

    ComplexPoly& operator+=(const ComplexPoly& o);
    ComplexPoly& operator-=(const ComplexPoly& o);
    ComplexPoly& operator*=(const ComplexPoly& o);
    friend ComplexPoly operator+(ComplexPoly a, const ComplexPoly& b) { return a += b; }
    friend ComplexPoly operator-(ComplexPoly a, const ComplexPoly& b) { return a -= b; }
    friend ComplexPoly operator*(ComplexPoly a, const ComplexPoly& b) { return a *= b; }
    friend ComplexPoly operator-(const ComplexPoly& a);
    friend ComplexPoly operator*(const Gauss& c, const ComplexPoly& p);
    friend ComplexPoly operator*(cplx c, const ComplexPoly& p);

    /// Coefficient-wise equality; exact polynomials compare exactly.
    friend bool operator==(const ComplexPoly& a, const ComplexPoly& b);

private:
    void canonicalize();

    std::vector<cplx> coeffs_;
    std::optional<std::vector<Gauss>> exact_ = std::vector<Gauss>{};
};

ComplexPoly pow(const ComplexPoly& p, int e);

struct DivMod {
    ComplexPoly quotient;
    ComplexPoly remainder;
};
/// Euclidean division; exact when both operands are. Precondition: divisor nonzero.
DivMod divmod(const ComplexPoly& num, const ComplexPoly& den);

/// Horner evaluation on raw ascending coefficients.
cplx horner(std::span<const cplx> coeffs, cplx z);

/// Evaluates p at z. For exact p the evaluation is carried out exactly (a double is a
/// dyadic Gaussian rational) and rounded once at the end.
cplx eval(const ComplexPoly& p, cplx z);
Gauss eval(const ComplexPoly& p, const Gauss& z);

struct Root {
    cplx value;
    int multiplicity = 1;
};
using RootList = std::vector<Root>;

struct RootOptions {
    /// Residual tolerance, relative to the largest coefficient, used for verification.
    double tol = 1e-9;
    std::uint64_t seed = 0;
    int max_iter = 600;
    int max_restarts = 8;
};

/// All complex roots with multiplicities, sorted by (real, imag). For exact input the
/// multiplicities come from the square-free decomposition; for floating input from
/// clustering at radius 1e-6 * (1 + max|root|). Throws NonConvergence.
RootList roots(const ComplexPoly& p, const RootOptions& opts = {});

/// Raw simultaneous-iteration roots, one entry per root counted with multiplicity, no
/// clustering. `guesses` (if non-empty, size == degree) warm-starts the iteration.
std::vector<cplx> raw_roots(std::span<const cplx> coeffs, std::span<const cplx> guesses = {},
                            const RootOptions& opts = {});

/// Roots of w^2 + b w + c, larger-magnitude root first, the other from the product.
std::array<cplx, 2> quadratic_roots(cplx b, cplx c);

/// Monic GCD. Exact Euclid when both are exact, tolerance-thresholded remainders otherwise.
/// gcd(0, 0) throws PreconditionFailed.
ComplexPoly gcd(const ComplexPoly& p, const ComplexPoly& q, double tol = 1e-9);

/// Square-free decomposition p = lc * prod_k f_k^k, f_k monic, pairwise coprime.
/// Exact input only. Entry k-1 holds f_k (possibly 1).
std::vector<ComplexPoly> squarefree_decomposition(const ComplexPoly& p);

/// Polynomial in w whose coefficients (ascending powers of w) are polynomials in z.
using WPoly = std::vector<ComplexPoly>;

struct ResultantOptions {
    double trim_tol = 1e-9;
};

/// Res_w(A, B) as a polynomial in z by evaluation and interpolation at
/// (deg_w A + deg_w B) * max coefficient degree + 3 sample points. Exact samples at
/// z = 0, 1, 2, ... when all coefficients are exact; roots of unity otherwise.
/// Throws DegenerateFamily when the resultant vanishes identically.
ComplexPoly resultant_w(const WPoly& a, const WPoly& b, const ResultantOptions& opts = {});

/// Determinant of the Sylvester matrix of two numeric polynomials (ascending coefficients),
/// using the formal degrees given by the vector sizes.
cplx sylvester_det(std::span<const cplx> a, std::span<const cplx> b);
Gauss sylvester_det(std::span<const Gauss> a, std::span<const Gauss> b);

struct SquareTest {
    bool is_square = false;
    /// s with s*s == p; leading coefficient has argument in [0, pi).
    std::optional<ComplexPoly> witness;
};

/// Perfect-square test. Exact input: decided by the square-free decomposition, no tolerance.
/// Floating input: coefficient square root with residual <= tol * max(1, max|p|).
SquareTest is_perfect_square(const ComplexPoly& p, double tol = 1e-9);

RootList odd_multiplicity_roots(const ComplexPoly& p, const RootOptions& opts = {});

/// Comma-separated ascending coefficients; each `re`, `re+imi`, `p/q`. Always exact.
ComplexPoly parse_poly(std::string_view text);
std::string to_string(const ComplexPoly& p);

}  // namespace mvdyn
