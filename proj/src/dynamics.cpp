#include "mvdyn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mvdyn/error.hpp"

namespace mvdyn {

namespace {

Gauss exact_from(cplx z) { return Gauss(mpq_class(z.real()), mpq_class(z.imag())); }

// Lagrange basis at v = 0..n-1, each as an exact polynomial in v.
std::vector<std::vector<Gauss>> lagrange_basis(int n) {
    std::vector<std::vector<Gauss>> out;
    for (int j = 0; j < n; ++j) {
        std::vector<Gauss> c{Gauss(1)};
        Gauss denom(1);
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            std::vector<Gauss> next(c.size() + 1);
            for (std::size_t i = 0; i < c.size(); ++i) {
                next[i + 1] += c[i];
                next[i] -= c[i] * Gauss(k);
            }
            c = std::move(next);
            denom *= Gauss(j - k);
        }
        for (auto& x : c) x /= denom;
        out.push_back(std::move(c));
    }
    return out;
}

// Best rational approximation with denominator <= max_den by continued fractions.
mpq_class rationalize(double x, long max_den) {
    if (!std::isfinite(x)) return 0;
    mpq_class exact(x);
    mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    mpq_class rest = exact;
    for (int iter = 0; iter < 64; ++iter) {
        mpz_class a;
        mpz_fdiv_q(a.get_mpz_t(), rest.get_num_mpz_t(), rest.get_den_mpz_t());
        mpz_class p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        mpq_class frac = rest - mpq_class(a);
        if (sgn(frac) == 0) break;
        rest = 1 / frac;
    }
    return mpq_class(p1, q1);
}

}  // namespace

WPoly QuadDynamics::family() const {
    return {p0_, Gauss(2) * p1_, ComplexPoly::constant(Gauss(1))};
}

std::array<cplx, 2> QuadDynamics::images(cplx z) const {
    const cplx a = horner(p1_.coeffs(), z);
    const cplx b = horner(p0_.coeffs(), z);
    return quadratic_roots(2.0 * a, b);
}

CMultiset eval_T(const QuadDynamics& t, cplx z) {
    auto im = t.images(z);
    return CMultiset{im[0], im[1]};
}

WPoly QuarticFamily::as_wpoly() const {
    return {q[0], q[1], q[2], q[3], ComplexPoly::constant(Gauss(1))};
}

std::array<cplx, 5> QuarticFamily::coeffs_at(cplx z) const {
    return {horner(q[0].coeffs(), z), horner(q[1].coeffs(), z), horner(q[2].coeffs(), z),
            horner(q[3].coeffs(), z), cplx(1)};
}

CMultiset QuarticFamily::roots_at(cplx z) const {
    auto c = coeffs_at(z);
    std::vector<cplx> out;
    for (const auto& r : roots(ComplexPoly(std::vector<cplx>(c.begin(), c.end()))))
        for (int k = 0; k < r.multiplicity; ++k) out.push_back(r.value);
    return CMultiset(std::move(out));
}

std::vector<cplx> QuarticFamily::raw_roots_at(cplx z, std::span<const cplx> guesses) const {
    auto c = coeffs_at(z);
    return raw_roots(c, guesses);
}

QuarticFamily compose(const QuadDynamics& t) {
    const bool exact = t.is_exact();
    const int n = 5;
    // B(w) = w^2 + 2 p1(z) w + p0(z), coefficients in z.
    const WPoly b = t.family();
    const int dw = std::max(t.p1().degree(), t.p0().degree());

    std::vector<ComplexPoly> samples;
    for (int j = 0; j < n; ++j) {
        // A(w) = v^2 + 2 p1(w) v + p0(w) at v = j, coefficients constant in z.
        const Gauss v(j);
        WPoly a;
        for (int k = 0; k <= std::max(dw, 0); ++k) {
            if (exact) {
                Gauss c = (k <= t.p0().degree() ? t.p0().exact_coeffs()[k] : Gauss(0));
                if (k <= t.p1().degree()) c += Gauss(2) * v * t.p1().exact_coeffs()[k];
                if (k == 0) c += v * v;
                a.push_back(ComplexPoly::constant(c));
            } else {
                cplx c = t.p0().coeff(k) + 2.0 * double(j) * t.p1().coeff(k);
                if (k == 0) c += double(j * j);
                a.push_back(ComplexPoly::constant(c));
            }
        }
        while (!a.empty() && a.back().is_zero()) a.pop_back();
        if (a.empty()) {
            samples.emplace_back();
            continue;
        }
        try {
            samples.push_back(resultant_w(a, b));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateFamily) throw;
            samples.emplace_back();  // v = j is an image of every point
        }
    }

    const auto basis = lagrange_basis(n);
    std::array<ComplexPoly, 5> coef;
    for (int i = 0; i < n; ++i) {
        ComplexPoly acc = exact ? ComplexPoly() : ComplexPoly(std::vector<cplx>{});
        for (int j = 0; j < n; ++j) {
            if (i < static_cast<int>(basis[j].size())) acc += basis[j][i] * samples[j];
        }
        coef[i] = exact ? acc : acc.trimmed(1e-9);
    }
    const bool monic = exact ? coef[4] == ComplexPoly::constant(Gauss(1))
                             : (coef[4].degree() == 0 && std::abs(coef[4].coeff(0) - 1.0) < 1e-8);
    if (!monic) throw Error(ErrorCode::DegenerateFamily, "composite is not monic quartic in v");
    return QuarticFamily{{coef[0], coef[1], coef[2], coef[3]}};
}

DegeneracyReport degeneracy(const QuadDynamics& t) {
    DegeneracyReport rep;
    const ComplexPoly disc = t.discriminant();
    rep.splits_into_single_valued = disc.is_zero() || is_perfect_square(disc).is_square;

    const QuarticFamily q = compose(t);
    const WPoly p = q.as_wpoly();
    WPoly dp;
    for (std::size_t k = 1; k < p.size(); ++k) dp.push_back(Gauss(long(k)) * p[k]);
    try {
        rep.discriminant_resultant = resultant_w(p, dp);
        rep.has_generic_four_distinct = true;
        if (rep.discriminant_resultant.degree() > 0) rep.exceptional_points = roots(rep.discriminant_resultant);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateFamily) throw;
        rep.has_generic_four_distinct = false;
    }
    return rep;
}

std::vector<Preimage> preimages(const QuadDynamics& t, cplx w) {
    ComplexPoly qw;
    if (t.is_exact()) {
        const Gauss we = exact_from(w);
        qw = ComplexPoly::constant(we * we) + Gauss(2) * we * t.p1() + t.p0();
    } else {
        qw = ComplexPoly::constant(w * w) + 2.0 * w * t.p1() + t.p0();
        qw = qw.trimmed(1e-12);
    }
    if (qw.is_zero()) throw Error(ErrorCode::IdenticallyZero, "Q_w vanishes identically");
    std::vector<Preimage> out;
    if (qw.degree() == 0) return out;

    // w is a double image of z exactly when z is also a root of p1^2 - p0.
    const ComplexPoly disc = t.discriminant();
    ComplexPoly g = disc.is_zero() ? qw.monic() : gcd(qw, disc);
    RootList double_pts = g.degree() > 0 ? roots(g) : RootList{};

    for (const auto& r : roots(qw)) {
        Preimage pre{r.value, 1};
        for (const auto& d : double_pts) {
            if (std::abs(d.value - r.value) <= 1e-6 * (1 + std::abs(r.value))) pre.edge_multiplicity = 2;
        }
        out.push_back(pre);
    }
    return out;
}

InvertibilityReport strong_invertibility_probe(const QuadDynamics& t, std::span<const cplx> grid) {
    InvertibilityReport rep;
    for (cplx w : grid) {
        InvertibilityPoint pt{w, preimages(t, w), 0};
        for (const auto& p : pt.preimages) pt.total_edges += p.edge_multiplicity;
        if (pt.total_edges != 2) {
            rep.strongly_invertible_on_grid = false;
            rep.violations.push_back(w);
        }
        rep.points.push_back(std::move(pt));
    }
    return rep;
}

std::vector<cplx> square_grid(cplx corner, double step, int n) {
    std::vector<cplx> out;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.push_back(corner + cplx(i * step, j * step));
    return out;
}

SqrtSquareForm sqrt_square_form(const QuadDynamics& t, std::uint64_t seed) {
    const SquareTest sq = t.p0().is_zero() ? SquareTest{true, ComplexPoly()} : is_perfect_square(t.p0());
    if (!sq.is_square || !sq.witness) throw Error(ErrorCode::NotPerfectSquare, "p0 is not a perfect square");
    const ComplexPoly& s = *sq.witness;
    const Gauss half = Gauss(mpq_class(1, 2));
    SqrtSquareForm form;
    form.alpha = half * (-t.p1() - s);
    form.beta = half * (-t.p1() + s);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 20; ++i) {
        const cplx z(u(rng), u(rng));
        const cplx ra = std::sqrt(eval(form.alpha, z));
        const cplx rb = std::sqrt(eval(form.beta, z));
        const CMultiset viaform{(ra + rb) * (ra + rb), (ra - rb) * (ra - rb)};
        form.max_mismatch = std::max(form.max_mismatch, bottleneck_match(viaform, eval_T(t, z)).distance);
    }
    return form;
}

QuadDynamics conjugate_by_shift(const QuadDynamics& t, const Gauss& a) {
    if (!t.is_exact()) return conjugate_by_shift(t, a.to_complex());
    const ComplexPoly p1s = t.p1().shifted(a);
    const ComplexPoly p0s = t.p0().shifted(a);
    return QuadDynamics(p1s + ComplexPoly::constant(a),
                        p0s + Gauss(2) * a * p1s + ComplexPoly::constant(a * a));
}

QuadDynamics conjugate_by_shift(const QuadDynamics& t, cplx a) {
    const ComplexPoly p1s = t.p1().shifted(a);
    const ComplexPoly p0s = t.p0().shifted(a);
    return QuadDynamics(p1s + ComplexPoly::constant(a), p0s + 2.0 * a * p1s + ComplexPoly::constant(a * a));
}

RootList odd_discriminant_roots(const QuadDynamics& t) {
    const ComplexPoly disc = t.discriminant();
    if (disc.degree() <= 0) return {};
    RootList odd = odd_multiplicity_roots(disc);
    std::stable_sort(odd.begin(), odd.end(), [](const Root& x, const Root& y) {
        const double mx = std::abs(x.value), my = std::abs(y.value);
        if (std::abs(mx - my) > 1e-12 * (1 + mx)) return mx < my;
        return std::arg(x.value) < std::arg(y.value);
    });
    return odd;
}

std::optional<Gauss> exact_root(const ComplexPoly& p, cplx r) {
    if (!p.is_exact()) return std::nullopt;
    for (long den : {1L, 1000L, 1000000L}) {
        const Gauss g(rationalize(r.real(), den), rationalize(r.imag(), den));
        if (std::abs(g.to_complex() - r) > 1e-6 * (1 + std::abs(r))) continue;
        if (eval(p, g).is_zero()) return g;
    }
    return std::nullopt;
}

ShiftResult shift_normalize(const QuadDynamics& t) {
    const RootList odd = odd_discriminant_roots(t);
    if (odd.empty()) throw Error(ErrorCode::NoOddRoot, "p1^2 - p0 has no root of odd multiplicity");
    const cplx r = odd.front().value;
    if (auto g = exact_root(t.discriminant(), r)) return {conjugate_by_shift(t, *g), g->to_complex(), true};
    return {conjugate_by_shift(t, r), r, false};
}

}  // namespace mvdyn
