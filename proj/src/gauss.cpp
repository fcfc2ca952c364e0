#include "mvdyn/gauss.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>

#include "mvdyn/error.hpp"

namespace mvdyn {

Gauss& Gauss::operator/=(const Gauss& o) {
    mpq_class n = o.norm();
    if (sgn(n) == 0) throw std::domain_error("Gauss: division by zero");
    Gauss num = *this * o.conj();
    re_ = num.re_ / n;
    im_ = num.im_ / n;
    return *this;
}

namespace {

std::optional<mpq_class> rational_sqrt(const mpq_class& q) {
    if (sgn(q) < 0) return std::nullopt;
    mpz_class n = q.get_num();
    mpz_class d = q.get_den();
    if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return std::nullopt;
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
    mpq_class r(rn, rd);
    r.canonicalize();
    return r;
}

[[noreturn]] void fail(std::string_view text, const char* why) {
    throw Error(ErrorCode::ParseError, std::string("bad complex literal '") + std::string(text) + "': " + why);
}

// Integer, p/q, or decimal with optional exponent; exact.
mpq_class parse_real(std::string_view full, std::string_view s) {
    if (s.empty()) fail(full, "empty number");
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        mpq_class num = parse_real(full, s.substr(0, slash));
        mpq_class den = parse_real(full, s.substr(slash + 1));
        if (sgn(den) == 0) fail(full, "zero denominator");
        mpq_class r = num / den;
        r.canonicalize();
        return r;
    }
    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') {
        neg = s[i] == '-';
        ++i;
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_dot = false;
    bool any_digit = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            any_digit = true;
            if (seen_dot) ++frac_digits;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    if (!any_digit) fail(full, "missing digits");
    long exponent = 0;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        auto [ptr, ec] = std::from_chars(s.data() + i + (i < s.size() && s[i] == '+' ? 1 : 0), s.data() + s.size(), exponent);
        if (ec != std::errc() || ptr != s.data() + s.size()) fail(full, "bad exponent");
        i = s.size();
    }
    if (i != s.size()) fail(full, "trailing characters");
    mpz_class mant(digits, 10);
    long shift = exponent - frac_digits;
    mpz_class pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
    mpq_class r = shift >= 0 ? mpq_class(mant * pow10) : mpq_class(mant, pow10);
    r.canonicalize();
    return neg ? mpq_class(-r) : r;
}

std::string trim(std::string_view s) {
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
    return out;
}

}  // namespace

std::optional<Gauss> Gauss::exact_sqrt() const {
    if (is_zero()) return Gauss{};
    auto modulus = rational_sqrt(norm());
    if (!modulus) return std::nullopt;
    // x^2 = (|c| + a)/2, y^2 = (|c| - a)/2, sign(x*y) = sign(b)
    mpq_class half(1, 2);
    auto x = rational_sqrt((*modulus + re_) * half);
    auto y = rational_sqrt((*modulus - re_) * half);
    if (!x || !y) return std::nullopt;
    mpq_class yi = sgn(im_) < 0 ? mpq_class(-*y) : *y;
    Gauss r(*x, yi);
    if (sgn(r.re_) < 0 || (sgn(r.re_) == 0 && sgn(r.im_) < 0)) r = -r;
    return r;
}

Gauss parse_gauss(std::string_view text) {
    std::string s = trim(text);
    if (s.empty()) fail(text, "empty");
    if (s.back() != 'i') return Gauss(parse_real(text, s));
    s.pop_back();
    // split at the last sign that is not a leading sign or part of an exponent
    std::size_t split = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    std::string re_part = split == std::string::npos ? "" : s.substr(0, split);
    std::string im_part = split == std::string::npos ? s : s.substr(split);
    if (im_part.empty() || im_part == "+") im_part = "1";
    if (im_part == "-") im_part = "-1";
    if (im_part[0] == '+') im_part.erase(0, 1);
    mpq_class re = re_part.empty() ? mpq_class(0) : parse_real(text, re_part);
    return Gauss(re, parse_real(text, im_part));
}

double Gauss::nearest_double(const mpq_class& q) {
    double d = q.get_d();
    if (!std::isfinite(d)) return d;
    double up = std::nextafter(d, q > d ? HUGE_VAL : -HUGE_VAL);
    if (!std::isfinite(up)) return d;
    mpq_class err_d = abs(q - mpq_class(d));
    mpq_class err_up = abs(q - mpq_class(up));
    if (err_up < err_d) return up;
    if (err_up == err_d) {
        // ties to even mantissa
        std::int64_t bits;
        std::memcpy(&bits, &d, sizeof bits);
        return (bits & 1) ? up : d;
    }
    return d;
}

cplx parse_complex(std::string_view text) { return parse_gauss(text).to_complex(); }

std::string to_string(const Gauss& g) {
    std::string out = g.re().get_str();
    if (!g.is_real()) {
        std::string im = g.im().get_str();
        if (im[0] != '-') out += '+';
        out += im;
        out += 'i';
    }
    return out;
}

std::string format_double(double v) {
    if (v == 0.0) v = 0.0;
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_complex(cplx z) {
    std::string out = format_double(z.real());
    if (z.imag() != 0.0) {
        std::string im = format_double(z.imag());
        if (im[0] != '-') out += '+';
        out += im;
        out += 'i';
    }
    return out;
}

}  // namespace mvdyn
