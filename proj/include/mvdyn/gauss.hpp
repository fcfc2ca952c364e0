#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace mvdyn {

using cplx = std::complex<double>;

/// Exact element of Q(i): re + im*i with arbitrary-precision rational parts.
class Gauss {
public:
    Gauss() = default;
    Gauss(long v) : re_(v), im_(0) {}  // NOLINT(google-explicit-constructor)
    Gauss(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im)) {
        re_.canonicalize();
        im_.canonicalize();
    }

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }

    /// Each part rounded to nearest (mpq_get_d alone truncates).
    cplx to_complex() const { return {nearest_double(re_), nearest_double(im_)}; }
    static double nearest_double(const mpq_class& q);

    /// |z|^2, exact.
    mpq_class norm() const { return re_ * re_ + im_ * im_; }
    Gauss conj() const { return {re_, -im_}; }

    Gauss& operator+=(const Gauss& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    Gauss& operator-=(const Gauss& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    Gauss& operator*=(const Gauss& o) {
        mpq_class r = re_ * o.re_ - im_ * o.im_;
        mpq_class i = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }
    Gauss& operator/=(const Gauss& o);

    friend Gauss operator+(Gauss a, const Gauss& b) { return a += b; }
    friend Gauss operator-(Gauss a, const Gauss& b) { return a -= b; }
    friend Gauss operator*(Gauss a, const Gauss& b) { return a *= b; }
    friend Gauss operator/(Gauss a, const Gauss& b) { return a /= b; }
    friend Gauss operator-(const Gauss& a) { return {-a.re_, -a.im_}; }
    friend bool operator==(const Gauss& a, const Gauss& b) { return a.re_ == b.re_ && a.im_ == b.im_; }

    /// Square root in Q(i) when one exists; the returned root has re > 0, or re == 0 and im >= 0.
    std::optional<Gauss> exact_sqrt() const;

private:
    mpq_class re_{0};
    mpq_class im_{0};
};

/// Parses `re`, `re+imi`, `imi` with each part an integer, `p/q` rational or decimal literal.
/// Decimal literals are converted exactly (0.1 == 1/10). Throws Error(ParseError).
Gauss parse_gauss(std::string_view text);

std::string to_string(const Gauss& g);

/// Shortest round-trip decimal form; -0 prints as 0.
std::string format_double(double v);

/// `re` or `re+imi` form, matching the polynomial coefficient grammar.
std::string format_complex(cplx z);

/// Convenience: parse a complex literal and round it to double.
cplx parse_complex(std::string_view text);

}  // namespace mvdyn
