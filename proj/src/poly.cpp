#include "mvdyn/poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "mvdyn/error.hpp"

namespace mvdyn {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::vector<cplx> to_doubles(const std::vector<Gauss>& g) {
    std::vector<cplx> out;
    out.reserve(g.size());
    for (const auto& c : g) out.push_back(c.to_complex());
    return out;
}

Gauss exact_of(cplx z) { return Gauss(mpq_class(z.real()), mpq_class(z.imag())); }

}  // namespace

// ---------------------------------------------------------------------------
// ComplexPoly

ComplexPoly::ComplexPoly(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)), exact_(std::nullopt) {
    canonicalize();
}

ComplexPoly::ComplexPoly(std::vector<Gauss> coeffs) : exact_(std::move(coeffs)) { canonicalize(); }

void ComplexPoly::canonicalize() {
    if (exact_) {
        while (!exact_->empty() && exact_->back().is_zero()) exact_->pop_back();
        coeffs_ = to_doubles(*exact_);
    } else {
        while (!coeffs_.empty() && coeffs_.back() == cplx{}) coeffs_.pop_back();
    }
}

ComplexPoly ComplexPoly::linear_power(const Gauss& r, int m) {
    return pow(ComplexPoly(std::vector<Gauss>{-r, Gauss(1)}), m);
}

const std::vector<Gauss>& ComplexPoly::exact_coeffs() const {
    if (!exact_) throw Error(ErrorCode::PreconditionFailed, "polynomial is not exact");
    return *exact_;
}

cplx ComplexPoly::coeff(int k) const {
    return k >= 0 && k < static_cast<int>(coeffs_.size()) ? coeffs_[k] : cplx{};
}

double ComplexPoly::max_abs_coeff() const {
    double m = 0;
    for (auto c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

ComplexPoly ComplexPoly::derivative() const {
    if (degree() < 1) return exact_ ? ComplexPoly() : ComplexPoly(std::vector<cplx>{});
    if (exact_) {
        std::vector<Gauss> d;
        for (std::size_t k = 1; k < exact_->size(); ++k) d.push_back((*exact_)[k] * Gauss(static_cast<long>(k)));
        return ComplexPoly(std::move(d));
    }
    std::vector<cplx> d;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d.push_back(coeffs_[k] * static_cast<double>(k));
    return ComplexPoly(std::move(d));
}

ComplexPoly ComplexPoly::monic() const {
    if (is_zero()) return *this;
    if (exact_) {
        Gauss inv = Gauss(1) / exact_->back();
        return inv * *this;
    }
    return (1.0 / coeffs_.back()) * *this;
}

ComplexPoly ComplexPoly::affine_compose(const Gauss& lambda, const Gauss& mu) const {
    if (!exact_) {
        ComplexPoly lin(std::vector<cplx>{mu.to_complex(), lambda.to_complex()});
        ComplexPoly r(std::vector<cplx>{});
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = r * lin + ComplexPoly::constant(*it);
        return r;
    }
    ComplexPoly lin(std::vector<Gauss>{mu, lambda});
    ComplexPoly r;
    for (auto it = exact_->rbegin(); it != exact_->rend(); ++it) r = r * lin + ComplexPoly::constant(*it);
    return r;
}

ComplexPoly ComplexPoly::shifted(cplx a) const {
    ComplexPoly lin(std::vector<cplx>{a, 1.0});
    ComplexPoly r(std::vector<cplx>{});
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = r * lin + ComplexPoly::constant(*it);
    return r;
}

ComplexPoly ComplexPoly::trimmed(double rel_tol) const {
    double cut = rel_tol * max_abs_coeff();
    bool drop = std::any_of(coeffs_.begin(), coeffs_.end(), [&](cplx c) { return c != cplx{} && std::abs(c) <= cut; });
    if (!drop) return *this;
    std::vector<cplx> c = coeffs_;
    for (auto& v : c)
        if (std::abs(v) <= cut) v = 0;
    return ComplexPoly(std::move(c));
}

ComplexPoly& ComplexPoly::operator+=(const ComplexPoly& o) {
    if (exact_ && o.exact_) {
        if (exact_->size() < o.exact_->size()) exact_->resize(o.exact_->size());
        for (std::size_t k = 0; k < o.exact_->size(); ++k) (*exact_)[k] += (*o.exact_)[k];
    } else {
        exact_.reset();
        if (coeffs_.size() < o.coeffs_.size()) coeffs_.resize(o.coeffs_.size());
        for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
    }
    canonicalize();
    return *this;
}

ComplexPoly operator-(const ComplexPoly& a) {
    if (a.exact_) return Gauss(-1) * a;
    return cplx(-1.0) * a;
}

ComplexPoly& ComplexPoly::operator-=(const ComplexPoly& o) { return *this += -o; }

ComplexPoly& ComplexPoly::operator*=(const ComplexPoly& o) {
    if (is_zero() || o.is_zero()) {
        bool exact = exact_ && o.exact_;
        *this = exact ? ComplexPoly() : ComplexPoly(std::vector<cplx>{});
        return *this;
    }
    if (exact_ && o.exact_) {
        std::vector<Gauss> r(exact_->size() + o.exact_->size() - 1);
        for (std::size_t i = 0; i < exact_->size(); ++i)
            for (std::size_t j = 0; j < o.exact_->size(); ++j) r[i + j] += (*exact_)[i] * (*o.exact_)[j];
        *exact_ = std::move(r);
    } else {
        std::vector<cplx> r(coeffs_.size() + o.coeffs_.size() - 1);
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            for (std::size_t j = 0; j < o.coeffs_.size(); ++j) r[i + j] += coeffs_[i] * o.coeffs_[j];
        exact_.reset();
        coeffs_ = std::move(r);
    }
    canonicalize();
    return *this;
}

ComplexPoly operator*(const Gauss& c, const ComplexPoly& p) {
    if (!p.exact_) return c.to_complex() * p;
    std::vector<Gauss> r = *p.exact_;
    for (auto& v : r) v *= c;
    return ComplexPoly(std::move(r));
}

ComplexPoly operator*(cplx c, const ComplexPoly& p) {
    std::vector<cplx> r = p.coeffs_;
    for (auto& v : r) v *= c;
    return ComplexPoly(std::move(r));
}

bool operator==(const ComplexPoly& a, const ComplexPoly& b) {
    if (a.exact_ && b.exact_) return *a.exact_ == *b.exact_;
    return a.coeffs_ == b.coeffs_;
}

ComplexPoly pow(const ComplexPoly& p, int e) {
    ComplexPoly r = p.is_exact() ? ComplexPoly::constant(Gauss(1)) : ComplexPoly::constant(cplx(1.0));
    for (int k = 0; k < e; ++k) r *= p;
    return r;
}

DivMod divmod(const ComplexPoly& num, const ComplexPoly& den) {
    if (den.is_zero()) throw Error(ErrorCode::PreconditionFailed, "division by zero polynomial");
    int n = num.degree();
    int d = den.degree();
    if (num.is_exact() && den.is_exact()) {
        if (n < d) return {ComplexPoly(), num};
        std::vector<Gauss> rem = num.exact_coeffs();
        const auto& dc = den.exact_coeffs();
        std::vector<Gauss> quo(n - d + 1);
        Gauss inv = Gauss(1) / dc.back();
        for (int k = n - d; k >= 0; --k) {
            Gauss q = rem[k + d] * inv;
            if (q.is_zero()) continue;
            quo[k] = q;
            for (int j = 0; j <= d; ++j) rem[k + j] -= q * dc[j];
        }
        rem.resize(d);
        return {ComplexPoly(std::move(quo)), ComplexPoly(std::move(rem))};
    }
    if (n < d) return {ComplexPoly(std::vector<cplx>{}), num.to_float()};
    std::vector<cplx> rem(num.coeffs().begin(), num.coeffs().end());
    auto dc = den.coeffs();
    std::vector<cplx> quo(n - d + 1);
    for (int k = n - d; k >= 0; --k) {
        cplx q = rem[k + d] / dc[d];
        quo[k] = q;
        for (int j = 0; j <= d; ++j) rem[k + j] -= q * dc[j];
        rem[k + d] = 0;
    }
    rem.resize(d);
    return {ComplexPoly(std::move(quo)), ComplexPoly(std::move(rem))};
}

cplx horner(std::span<const cplx> coeffs, cplx z) {
    cplx r = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * z + *it;
    return r;
}

Gauss eval(const ComplexPoly& p, const Gauss& z) {
    if (!p.is_exact()) return exact_of(horner(p.coeffs(), z.to_complex()));
    Gauss r;
    const auto& c = p.exact_coeffs();
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * z + *it;
    return r;
}

cplx eval(const ComplexPoly& p, cplx z) {
    if (p.is_exact() && std::isfinite(z.real()) && std::isfinite(z.imag())) return eval(p, exact_of(z)).to_complex();
    return horner(p.coeffs(), z);
}

// ---------------------------------------------------------------------------
// Roots

std::array<cplx, 2> quadratic_roots(cplx b, cplx c) {
    // w = (-b +- sqrt(b^2 - 4c)) / 2; take the sign that avoids cancellation
    cplx s = std::sqrt(b * b - 4.0 * c);
    cplx t = -b;
    if (std::real(std::conj(t) * s) < 0) s = -s;
    cplx w1 = (t + s) / 2.0;
    if (w1 == cplx{}) return {cplx{}, cplx{}};
    return {w1, c / w1};
}

namespace {

// Sum |a_k| |z|^k: scale of the rounding error in a Horner evaluation.
double horner_scale(std::span<const cplx> a, double r) {
    double s = 0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) s = s * r + std::abs(*it);
    return s;
}

void horner_with_derivative(std::span<const cplx> a, cplx z, cplx& p, cplx& dp) {
    p = 0;
    dp = 0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) {
        dp = dp * z + p;
        p = p * z + *it;
    }
}

std::vector<cplx> initial_circle(std::span<const cplx> a, int n, double phase) {
    // Radius: geometric mean of root moduli when the constant term is nonzero, else
    // half the Fujiwara bound.
    double r = 0;
    if (std::abs(a[0]) > 0) {
        r = std::pow(std::abs(a[0]) / std::abs(a[n]), 1.0 / n);
    } else {
        for (int k = 1; k <= n; ++k) r = std::max(r, std::pow(std::abs(a[n - k] / a[n]), 1.0 / k));
    }
    if (!(r > 0) || !std::isfinite(r)) r = 1;
    std::vector<cplx> z(n);
    for (int k = 0; k < n; ++k) z[k] = std::polar(r, 2 * std::numbers::pi * k / n + phase);
    return z;
}

bool aberth(std::span<const cplx> a, std::vector<cplx>& z, int max_iter) {
    const int n = static_cast<int>(z.size());
    std::vector<char> done(n, 0);
    for (int it = 0; it < max_iter; ++it) {
        int active = 0;
        for (int i = 0; i < n; ++i) {
            if (done[i]) continue;
            cplx p, dp;
            horner_with_derivative(a, z[i], p, dp);
            if (std::abs(p) <= 4.0 * n * kEps * horner_scale(a, std::abs(z[i]))) {
                done[i] = 1;
                continue;
            }
            ++active;
            cplx ratio = dp == cplx{} ? cplx(1e-3 * (1 + std::abs(z[i]))) : p / dp;
            cplx s = 0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                cplx diff = z[i] - z[j];
                if (diff != cplx{}) s += 1.0 / diff;
            }
            cplx w = ratio / (1.0 - ratio * s);
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return false;
            z[i] -= w;
            if (std::abs(w) <= kEps * std::abs(z[i])) done[i] = 1;
        }
        if (active == 0) return true;
    }
    return std::all_of(done.begin(), done.end(), [](char c) { return c != 0; });
}

void newton_polish(std::span<const cplx> a, std::vector<cplx>& z, double keep_apart) {
    for (std::size_t i = 0; i < z.size(); ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < z.size(); ++j)
            if (j != i) nearest = std::min(nearest, std::abs(z[i] - z[j]));
        if (nearest < keep_apart) continue;
        for (int step = 0; step < 3; ++step) {
            cplx p, dp;
            horner_with_derivative(a, z[i], p, dp);
            if (dp == cplx{} || p == cplx{}) break;
            cplx cand = z[i] - p / dp;
            if (std::abs(horner(a, cand)) >= std::abs(p)) break;
            z[i] = cand;
        }
    }
}

}  // namespace

std::vector<cplx> raw_roots(std::span<const cplx> coeffs, std::span<const cplx> guesses, const RootOptions& opts) {
    std::vector<cplx> a(coeffs.begin(), coeffs.end());
    while (!a.empty() && a.back() == cplx{}) a.pop_back();
    if (a.empty()) throw Error(ErrorCode::PreconditionFailed, "roots of the zero polynomial");
    std::vector<cplx> out;
    // exact zeros at the origin
    std::size_t lead_zero = 0;
    while (lead_zero < a.size() - 1 && a[lead_zero] == cplx{}) ++lead_zero;
    out.assign(lead_zero, cplx{});
    a.erase(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(lead_zero));
    const int n = static_cast<int>(a.size()) - 1;
    if (n == 0) return out;
    if (n == 1) {
        out.push_back(-a[0] / a[1]);
        return out;
    }
    if (n == 2) {
        auto q = quadratic_roots(a[1] / a[2], a[0] / a[2]);
        out.insert(out.end(), q.begin(), q.end());
        return out;
    }
    std::vector<cplx> z;
    if (guesses.size() == lead_zero + n) {
        z.assign(guesses.begin() + static_cast<std::ptrdiff_t>(lead_zero), guesses.end());
    } else {
        z = initial_circle(a, n, 0.7);
    }
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> phase(0, 2 * std::numbers::pi);
    for (int attempt = 0; attempt <= opts.max_restarts; ++attempt) {
        if (attempt > 0) {
            z = initial_circle(a, n, phase(rng));
            for (auto& v : z) v *= 1.0 + 0.1 * std::sin(phase(rng));
        }
        if (aberth(a, z, opts.max_iter)) {
            double scale = 0;
            for (auto v : z) scale = std::max(scale, std::abs(v));
            newton_polish(a, z, 1e-6 * (1 + scale));
            out.insert(out.end(), z.begin(), z.end());
            return out;
        }
    }
    throw Error(ErrorCode::NonConvergence, "simultaneous iteration failed after restarts");
}

namespace {

void sort_roots(RootList& r) {
    std::sort(r.begin(), r.end(), [](const Root& x, const Root& y) {
        if (x.value.real() != y.value.real()) return x.value.real() < y.value.real();
        return x.value.imag() < y.value.imag();
    });
}

// Groups raw roots closer than `radius` and refines each group centre by Newton on
// the (m-1)-th derivative, where the group is a simple root.
RootList cluster(const ComplexPoly& p, const std::vector<cplx>& raw, double radius) {
    const std::size_t n = raw.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(raw[i] - raw[j]) < radius) parent[find(i)] = find(j);
    std::vector<std::vector<cplx>> groups(n);
    for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(raw[i]);
    RootList out;
    for (auto& g : groups) {
        if (g.empty()) continue;
        cplx c = std::accumulate(g.begin(), g.end(), cplx{}) / static_cast<double>(g.size());
        int m = static_cast<int>(g.size());
        if (m > 1) {
            ComplexPoly d = p.to_float();
            for (int k = 0; k < m - 1; ++k) d = d.derivative();
            ComplexPoly dd = d.derivative();
            for (int step = 0; step < 4; ++step) {
                cplx f = horner(d.coeffs(), c);
                cplx df = horner(dd.coeffs(), c);
                if (df == cplx{} || f == cplx{}) break;
                cplx cand = c - f / df;
                if (std::abs(cand - c) > radius || std::abs(horner(d.coeffs(), cand)) >= std::abs(f)) break;
                c = cand;
            }
        }
        out.push_back({c, m});
    }
    return out;
}

}  // namespace

RootList roots(const ComplexPoly& p, const RootOptions& opts) {
    if (p.is_zero()) throw Error(ErrorCode::PreconditionFailed, "roots of the zero polynomial");
    RootList out;
    if (p.degree() == 0) return out;
    if (p.is_exact()) {
        auto parts = squarefree_decomposition(p);
        for (std::size_t k = 0; k < parts.size(); ++k) {
            if (parts[k].degree() < 1) continue;
            for (cplx v : raw_roots(parts[k].coeffs(), {}, opts)) out.push_back({v, static_cast<int>(k + 1)});
        }
    } else {
        auto raw = raw_roots(p.coeffs(), {}, opts);
        double scale = 0;
        for (auto v : raw) scale = std::max(scale, std::abs(v));
        out = cluster(p, raw, 1e-6 * (1 + scale));
    }
    int total = 0;
    for (const auto& r : out) total += r.multiplicity;
    if (total != p.degree()) throw Error(ErrorCode::NonConvergence, "root multiplicities do not sum to the degree");
    sort_roots(out);
    return out;
}

RootList odd_multiplicity_roots(const ComplexPoly& p, const RootOptions& opts) {
    RootList out;
    for (const auto& r : roots(p, opts))
        if (r.multiplicity % 2 == 1) out.push_back(r);
    return out;
}

// ---------------------------------------------------------------------------
// GCD and square-free structure

ComplexPoly gcd(const ComplexPoly& p, const ComplexPoly& q, double tol) {
    if (p.is_zero() && q.is_zero()) throw Error(ErrorCode::PreconditionFailed, "gcd(0, 0)");
    if (p.is_exact() && q.is_exact()) {
        ComplexPoly a = p.monic();
        ComplexPoly b = q.monic();
        if (a.degree() < b.degree()) std::swap(a, b);
        while (!b.is_zero()) {
            ComplexPoly r = divmod(a, b).remainder;
            a = std::move(b);
            b = r.monic();
        }
        return a.monic();
    }
    // Normalising each remainder to unit max-norm keeps the threshold meaningful.
    auto unit = [](const ComplexPoly& x) { return x.is_zero() ? x.to_float() : cplx(1.0 / x.max_abs_coeff()) * x.to_float(); };
    ComplexPoly a = unit(p);
    ComplexPoly b = unit(q);
    if (a.degree() < b.degree()) std::swap(a, b);
    while (!b.is_zero()) {
        ComplexPoly r = divmod(a, b).remainder;
        if (r.max_abs_coeff() <= tol) break;
        a = std::move(b);
        b = unit(r.trimmed(tol));
    }
    return b.is_zero() ? a.monic() : b.monic();
}

std::vector<ComplexPoly> squarefree_decomposition(const ComplexPoly& p) {
    if (!p.is_exact()) throw Error(ErrorCode::PreconditionFailed, "square-free decomposition needs exact input");
    if (p.is_zero()) throw Error(ErrorCode::PreconditionFailed, "square-free decomposition of zero");
    std::vector<ComplexPoly> out;
    if (p.degree() == 0) return out;
    // Yun's algorithm
    ComplexPoly f = p.monic();
    ComplexPoly df = f.derivative();
    ComplexPoly a0 = gcd(f, df);
    ComplexPoly b = divmod(f, a0).quotient;
    ComplexPoly c = divmod(df, a0).quotient;
    ComplexPoly d = c - b.derivative();
    while (b.degree() > 0) {
        ComplexPoly a = d.is_zero() ? b : gcd(b, d);
        out.push_back(a);
        b = divmod(b, a).quotient;
        c = divmod(d, a).quotient;
        d = c - b.derivative();
    }
    while (!out.empty() && out.back().degree() == 0) out.pop_back();
    return out;
}

// ---------------------------------------------------------------------------
// Resultants

namespace {

template <class T>
std::vector<std::vector<T>> sylvester_matrix(std::span<const T> a, std::span<const T> b) {
    const int m = static_cast<int>(a.size()) - 1;
    const int n = static_cast<int>(b.size()) - 1;
    const int size = m + n;
    std::vector<std::vector<T>> s(size, std::vector<T>(size, T{}));
    for (int r = 0; r < n; ++r)
        for (int k = 0; k <= m; ++k) s[r][r + k] = a[m - k];
    for (int r = 0; r < m; ++r)
        for (int k = 0; k <= n; ++k) s[n + r][r + k] = b[n - k];
    return s;
}

}  // namespace

cplx sylvester_det(std::span<const cplx> a, std::span<const cplx> b) {
    auto s = sylvester_matrix<cplx>(a, b);
    const std::size_t size = s.size();
    cplx det = 1;
    for (std::size_t col = 0; col < size; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < size; ++r)
            if (std::abs(s[r][col]) > std::abs(s[piv][col])) piv = r;
        if (s[piv][col] == cplx{}) return 0;
        if (piv != col) {
            std::swap(s[piv], s[col]);
            det = -det;
        }
        det *= s[col][col];
        for (std::size_t r = col + 1; r < size; ++r) {
            cplx f = s[r][col] / s[col][col];
            if (f == cplx{}) continue;
            for (std::size_t k = col; k < size; ++k) s[r][k] -= f * s[col][k];
        }
    }
    return det;
}

Gauss sylvester_det(std::span<const Gauss> a, std::span<const Gauss> b) {
    auto s = sylvester_matrix<Gauss>(a, b);
    const std::size_t size = s.size();
    Gauss det(1);
    for (std::size_t col = 0; col < size; ++col) {
        std::size_t piv = col;
        while (piv < size && s[piv][col].is_zero()) ++piv;
        if (piv == size) return Gauss(0);
        if (piv != col) {
            std::swap(s[piv], s[col]);
            det = -det;
        }
        det *= s[col][col];
        Gauss inv = Gauss(1) / s[col][col];
        for (std::size_t r = col + 1; r < size; ++r) {
            if (s[r][col].is_zero()) continue;
            Gauss f = s[r][col] * inv;
            for (std::size_t k = col; k < size; ++k) s[r][k] -= f * s[col][k];
        }
    }
    return det;
}

namespace {

WPoly trim_w(WPoly p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
    return p;
}

// Newton divided differences at 0, 1, ..., N-1 converted to monomial form.
ComplexPoly interpolate_exact(const std::vector<Gauss>& values) {
    const std::size_t n = values.size();
    std::vector<Gauss> dd = values;
    for (std::size_t level = 1; level < n; ++level)
        for (std::size_t i = n - 1; i >= level; --i)
            dd[i] = (dd[i] - dd[i - 1]) / Gauss(static_cast<long>(level));
    ComplexPoly r;
    for (std::size_t k = n; k-- > 0;) {
        r = r * ComplexPoly(std::vector<Gauss>{Gauss(-static_cast<long>(k)), Gauss(1)}) + ComplexPoly::constant(dd[k]);
    }
    return r;
}

double hadamard_bound(std::span<const cplx> a, std::span<const cplx> b) {
    auto norm = [](std::span<const cplx> v) {
        double s = 0;
        for (auto c : v) s += std::norm(c);
        return std::sqrt(s);
    };
    const std::size_t m = a.size() - 1;
    const std::size_t n = b.size() - 1;
    return std::pow(std::max(norm(a), 1e-300), static_cast<double>(n)) *
           std::pow(std::max(norm(b), 1e-300), static_cast<double>(m));
}

}  // namespace

ComplexPoly resultant_w(const WPoly& a_in, const WPoly& b_in, const ResultantOptions& opts) {
    WPoly a = trim_w(a_in);
    WPoly b = trim_w(b_in);
    if (a.empty() || b.empty()) throw Error(ErrorCode::PreconditionFailed, "resultant of a polynomial that is zero in w");
    const int m = static_cast<int>(a.size()) - 1;
    const int n = static_cast<int>(b.size()) - 1;
    int max_deg = 0;
    bool exact = true;
    for (const auto* side : {&a, &b})
        for (const auto& c : *side) {
            max_deg = std::max(max_deg, c.degree());
            exact = exact && c.is_exact();
        }
    const int bound = (m + n) * max_deg + 2;
    const int samples = bound + 1;

    if (exact) {
        std::vector<Gauss> values;
        values.reserve(samples);
        std::vector<Gauss> av(a.size()), bv(b.size());
        for (int k = 0; k < samples; ++k) {
            Gauss z(k);
            for (std::size_t i = 0; i < a.size(); ++i) av[i] = eval(a[i], z);
            for (std::size_t i = 0; i < b.size(); ++i) bv[i] = eval(b[i], z);
            values.push_back(sylvester_det(std::span<const Gauss>(av), std::span<const Gauss>(bv)));
        }
        ComplexPoly r = interpolate_exact(values);
        if (r.is_zero()) throw Error(ErrorCode::DegenerateFamily, "resultant vanishes identically");
        return r;
    }

    std::vector<cplx> values(samples);
    std::vector<cplx> av(a.size()), bv(b.size());
    double scale = 0;
    for (int k = 0; k < samples; ++k) {
        cplx z = std::polar(1.0, 2 * std::numbers::pi * k / samples);
        for (std::size_t i = 0; i < a.size(); ++i) av[i] = horner(a[i].coeffs(), z);
        for (std::size_t i = 0; i < b.size(); ++i) bv[i] = horner(b[i].coeffs(), z);
        values[k] = sylvester_det(av, bv);
        scale = std::max(scale, hadamard_bound(av, bv));
    }
    std::vector<cplx> coeffs(samples);
    for (int j = 0; j < samples; ++j) {
        cplx acc = 0;
        for (int k = 0; k < samples; ++k)
            acc += values[k] * std::polar(1.0, -2 * std::numbers::pi * static_cast<double>((static_cast<long>(j) * k) % samples) / samples);
        coeffs[j] = acc / static_cast<double>(samples);
    }
    ComplexPoly r(std::move(coeffs));
    if (r.max_abs_coeff() <= opts.trim_tol * scale) throw Error(ErrorCode::DegenerateFamily, "resultant vanishes identically");
    return r.trimmed(opts.trim_tol);
}

// ---------------------------------------------------------------------------
// Perfect squares

namespace {

cplx canonical_sign(cplx s) {
    // argument in [0, pi)
    if (s.imag() < 0 || (s.imag() == 0 && s.real() < 0)) return -s;
    return s;
}

Gauss canonical_sign(const Gauss& s) {
    if (sgn(s.im()) < 0 || (sgn(s.im()) == 0 && sgn(s.re()) < 0)) return -s;
    return s;
}

}  // namespace

SquareTest is_perfect_square(const ComplexPoly& p, double tol) {
    if (p.is_zero()) throw Error(ErrorCode::PreconditionFailed, "perfect-square test of zero");
    if (p.degree() % 2 != 0) return {};
    if (p.is_exact()) {
        auto parts = squarefree_decomposition(p);
        ComplexPoly m = ComplexPoly::constant(Gauss(1));
        for (std::size_t k = 0; k < parts.size(); ++k) {
            const int mult = static_cast<int>(k + 1);
            if (parts[k].degree() < 1) continue;
            if (mult % 2 != 0) return {};
            m *= pow(parts[k], mult / 2);
        }
        const Gauss& lc = p.exact_coeffs().back();
        if (auto r = lc.exact_sqrt()) return {true, canonical_sign(*r) * m};
        return {true, canonical_sign(std::sqrt(lc.to_complex())) * m};
    }
    // monic coefficient square root, top-down
    ComplexPoly q = p.monic();
    const int half = p.degree() / 2;
    auto a = q.coeffs();
    std::vector<cplx> s(half + 1);
    s[half] = 1;
    for (int k = 1; k <= half; ++k) {
        cplx acc = a[2 * half - k];
        for (int j = 1; j < k; ++j) acc -= s[half - j] * s[half - k + j];
        s[half - k] = acc / 2.0;
    }
    ComplexPoly m(std::move(s));
    ComplexPoly resid = q - m * m;
    if (resid.max_abs_coeff() > tol * std::max(1.0, q.max_abs_coeff())) return {};
    return {true, canonical_sign(std::sqrt(p.leading())) * m};
}

// ---------------------------------------------------------------------------
// Text form

ComplexPoly parse_poly(std::string_view text) {
    std::vector<Gauss> c;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = text.find(',', start);
        std::string_view item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        c.push_back(parse_gauss(item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return ComplexPoly(std::move(c));
}

std::string to_string(const ComplexPoly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    for (int k = 0; k <= p.degree(); ++k) {
        if (k) out += ',';
        out += p.is_exact() ? to_string(p.exact_coeffs()[k]) : format_complex(p.coeffs()[k]);
    }
    return out;
}

}  // namespace mvdyn
