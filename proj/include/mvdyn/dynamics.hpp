#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "mvdyn/multiset.hpp"
#include "mvdyn/poly.hpp"

namespace mvdyn {

/// The 2-valued dynamics z -> roots of P_z(w) = w^2 + 2 p1(z) w + p0(z).
class QuadDynamics {
public:
    QuadDynamics(ComplexPoly p1, ComplexPoly p0) : p1_(std::move(p1)), p0_(std::move(p0)) {}

    const ComplexPoly& p1() const { return p1_; }
    const ComplexPoly& p0() const { return p0_; }
    bool is_exact() const { return p1_.is_exact() && p0_.is_exact(); }

    /// p1^2 - p0, the expression under the radical.
    ComplexPoly discriminant() const { return p1_ * p1_ - p0_; }
    /// P_z(w) as a polynomial in w with coefficients in z.
    WPoly family() const;
    /// Both images of z, larger-magnitude root first.
    std::array<cplx, 2> images(cplx z) const;

private:
    ComplexPoly p1_;
    ComplexPoly p0_;
};

CMultiset eval_T(const QuadDynamics& t, cplx z);

/// v^4 + q3(z) v^3 + q2(z) v^2 + q1(z) v + q0(z), whose roots are T(T(z)).
struct QuarticFamily {
    std::array<ComplexPoly, 4> q;

    WPoly as_wpoly() const;
    /// Numeric coefficients of the quartic in v at z, ascending.
    std::array<cplx, 5> coeffs_at(cplx z) const;
    /// Roots with multiplicity expanded, via roots().
    CMultiset roots_at(cplx z) const;
    /// Raw simultaneous-iteration roots, optionally warm-started.
    std::vector<cplx> raw_roots_at(cplx z, std::span<const cplx> guesses = {}) const;
};

/// Eliminates w from v^2 + 2 p1(w) v + p0(w) = 0 and w^2 + 2 p1(z) w + p0(z) = 0.
QuarticFamily compose(const QuadDynamics& t);

struct DegeneracyReport {
    /// p1^2 - p0 is a perfect square: T is a pair of single-valued maps.
    bool splits_into_single_valued = false;
    /// Some (hence almost every) z has four distinct images under T o T.
    bool has_generic_four_distinct = false;
    /// Res_v(P_z, P_z'); zero polynomial when it vanishes identically.
    ComplexPoly discriminant_resultant;
    RootList exceptional_points;

    bool non_degenerate() const { return !splits_into_single_valued && has_generic_four_distinct; }
};

DegeneracyReport degeneracy(const QuadDynamics& t);

struct Preimage {
    cplx z;
    /// How many times w occurs in T(z): 1 or 2.
    int edge_multiplicity = 1;
};

/// Roots of Q_w(z) = w^2 + 2 p1(z) w + p0(z). Throws IdenticallyZero when Q_w == 0.
std::vector<Preimage> preimages(const QuadDynamics& t, cplx w);

struct InvertibilityPoint {
    cplx w;
    std::vector<Preimage> preimages;
    int total_edges = 0;
};

struct InvertibilityReport {
    bool strongly_invertible_on_grid = true;
    std::vector<InvertibilityPoint> points;
    std::vector<cplx> violations;
};

InvertibilityReport strong_invertibility_probe(const QuadDynamics& t, std::span<const cplx> grid);

/// The n x n grid re in [lo_re, lo_re + (n-1) step], same for im.
std::vector<cplx> square_grid(cplx corner, double step, int n);

struct SqrtSquareForm {
    /// T(z) = (sqrt(alpha) +- sqrt(beta))^2
    ComplexPoly alpha;
    ComplexPoly beta;
    /// Largest bottleneck distance between the form and eval_T over the check points.
    double max_mismatch = 0;
};

/// Requires p0 to be a perfect square; throws NotPerfectSquare otherwise.
SqrtSquareForm sqrt_square_form(const QuadDynamics& t, std::uint64_t seed = 0);

/// sigma^-1 o T o sigma for sigma(z) = z + a.
QuadDynamics conjugate_by_shift(const QuadDynamics& t, const Gauss& a);
QuadDynamics conjugate_by_shift(const QuadDynamics& t, cplx a);

struct ShiftResult {
    QuadDynamics shifted;
    cplx a;
    /// The shift is a Gaussian rational and the conjugation was done exactly.
    bool exact = false;
};

/// Conjugates T by the shift that moves an odd-multiplicity root of p1^2 - p0 to 0
/// (smallest magnitude first, ties by smallest argument). Throws NoOddRoot.
ShiftResult shift_normalize(const QuadDynamics& t);

/// All odd-multiplicity roots of p1^2 - p0 in the order shift_normalize prefers them.
RootList odd_discriminant_roots(const QuadDynamics& t);

/// Recovers r as a Gaussian rational with small denominators when p(r) == 0 exactly.
std::optional<Gauss> exact_root(const ComplexPoly& p, cplx r);

}  // namespace mvdyn
