#include "mvdyn/groups.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "mvdyn/error.hpp"

namespace mvdyn {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_names(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

[[noreturn]] void parse_fail(int line, const std::string& msg) {
    throw Error(ErrorCode::ParseError, "table line " + std::to_string(line) + ": " + msg);
}

std::array<int, 4> sorted4(std::array<int, 4> v) {
    std::sort(v.begin(), v.end());
    return v;
}

std::string ids_text(const TwoValuedTable& t, std::span<const int> ids) {
    std::string s = "[";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) s += ", ";
        s += t.carrier[ids[i]];
    }
    return s + "]";
}

std::string ints_text(std::span<const int> v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(v[i]);
    }
    return s + "]";
}

template <class Mult>
void associativity_sweep(int n, Mult&& mult, AxiomReport& rep,
                         const std::function<std::string(std::span<const int>)>& show) {
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int z = 0; z < n; ++z) {
                ++rep.checked;
                auto yz = mult(y, z);
                auto xy = mult(x, y);
                if (!yz || !xy) {
                    rep.violations.push_back({"associativity", {x, y, z}, "undefined product"});
                    continue;
                }
                auto l0 = mult(x, (*yz)[0]), l1 = mult(x, (*yz)[1]);
                auto r0 = mult((*xy)[0], z), r1 = mult((*xy)[1], z);
                if (!l0 || !l1 || !r0 || !r1) {
                    rep.violations.push_back({"associativity", {x, y, z}, "undefined product"});
                    continue;
                }
                auto left = sorted4({(*l0)[0], (*l0)[1], (*l1)[0], (*l1)[1]});
                auto right = sorted4({(*r0)[0], (*r0)[1], (*r1)[0], (*r1)[1]});
                if (left != right)
                    rep.violations.push_back({"associativity", {x, y, z},
                                              "x*(y*z) = " + show(left) + ", (x*y)*z = " + show(right)});
            }
}

bool poly_equal(const ComplexPoly& a, const ComplexPoly& b) {
    if (a.is_exact() && b.is_exact()) return a == b;
    ComplexPoly d = a - b;
    double scale = 1 + std::max(a.max_abs_coeff(), b.max_abs_coeff());
    return d.is_zero() || d.max_abs_coeff() <= 1e-9 * scale;
}

}  // namespace

int TwoValuedTable::id(std::string_view name) const {
    for (int i = 0; i < size(); ++i)
        if (carrier[i] == name) return i;
    throw Error(ErrorCode::PreconditionFailed, "unknown element '" + std::string(name) + "'");
}

std::optional<std::array<int, 2>> TwoValuedTable::product(int x, int y) const {
    auto it = mult.find({x, y});
    if (it == mult.end()) return std::nullopt;
    return it->second;
}

TwoValuedTable parse_table(std::string_view text) {
    TwoValuedTable t;
    std::optional<std::string> unit_name;
    std::vector<std::pair<std::string, std::string>> inv_pairs;
    struct Entry { int line; std::string x, y, u, v; };
    std::vector<Entry> entries;

    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (auto arrow = line.find("->"); arrow != std::string_view::npos) {
            auto lhs = split_names(line.substr(0, arrow));
            auto rhs_text = trim(line.substr(arrow + 2));
            if (rhs_text.size() < 2 || rhs_text.front() != '[' || rhs_text.back() != ']')
                parse_fail(lineno, "product must be written [u, v]");
            auto rhs = split_names(rhs_text.substr(1, rhs_text.size() - 2));
            if (lhs.size() != 2 || rhs.size() != 2) parse_fail(lineno, "expected `x,y -> [u, v]`");
            entries.push_back({lineno, lhs[0], lhs[1], rhs[0], rhs[1]});
            continue;
        }
        auto colon = line.find(':');
        if (colon == std::string_view::npos) parse_fail(lineno, "unrecognised line");
        auto key = trim(line.substr(0, colon));
        auto value = trim(line.substr(colon + 1));
        if (key == "carrier") {
            if (!t.carrier.empty()) parse_fail(lineno, "carrier given twice");
            t.carrier = split_names(value);
            if (t.carrier.empty()) parse_fail(lineno, "empty carrier");
            std::set<std::string> uniq(t.carrier.begin(), t.carrier.end());
            if (uniq.size() != t.carrier.size()) parse_fail(lineno, "repeated carrier element");
        } else if (key == "unit") {
            auto names = split_names(value);
            if (names.size() != 1) parse_fail(lineno, "unit takes one element");
            unit_name = names[0];
        } else if (key == "inv") {
            std::string_view rest = value;
            while (!rest.empty()) {
                auto comma = rest.find(',');
                auto item = split_names(rest.substr(0, comma));
                if (item.size() != 2) parse_fail(lineno, "inv entries are `x y` pairs");
                inv_pairs.emplace_back(item[0], item[1]);
                rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
            }
        } else {
            parse_fail(lineno, "unknown key '" + std::string(key) + "'");
        }
    }
    if (t.carrier.empty()) throw Error(ErrorCode::ParseError, "table has no carrier");
    if (!unit_name) throw Error(ErrorCode::ParseError, "table has no unit");

    auto lookup = [&](const std::string& name, int line) {
        auto it = std::find(t.carrier.begin(), t.carrier.end(), name);
        if (it == t.carrier.end()) parse_fail(line, "unknown element '" + name + "'");
        return static_cast<int>(it - t.carrier.begin());
    };
    t.unit = lookup(*unit_name, 0);
    t.inv.assign(t.carrier.size(), -1);
    for (auto& [x, y] : inv_pairs) t.inv[lookup(x, 0)] = lookup(y, 0);
    for (int i = 0; i < t.size(); ++i)
        if (t.inv[i] < 0) throw Error(ErrorCode::ParseError, "no inverse for '" + t.carrier[i] + "'");
    for (auto& e : entries) {
        auto key = std::pair{lookup(e.x, e.line), lookup(e.y, e.line)};
        if (t.mult.count(key)) parse_fail(e.line, "product given twice");
        t.mult[key] = {lookup(e.u, e.line), lookup(e.v, e.line)};
    }
    return t;
}

std::string to_text(const TwoValuedTable& t) {
    std::string s = "carrier:";
    for (auto& c : t.carrier) s += " " + c;
    s += "\nunit: " + t.carrier[t.unit] + "\ninv:";
    for (int i = 0; i < t.size(); ++i) s += (i ? ", " : " ") + t.carrier[i] + " " + t.carrier[t.inv[i]];
    s += "\n";
    for (auto& [k, v] : t.mult)
        s += t.carrier[k.first] + "," + t.carrier[k.second] + " -> [" + t.carrier[v[0]] + ", " + t.carrier[v[1]] + "]\n";
    return s;
}

AxiomReport check_associativity(const TwoValuedTable& t) {
    AxiomReport rep;
    associativity_sweep(t.size(), [&](int x, int y) { return t.product(x, y); }, rep,
                        [&](std::span<const int> ids) { return ids_text(t, ids); });
    return rep;
}

AxiomReport check_associativity(const BNGroup&, int bound) {
    AxiomReport rep;
    associativity_sweep(bound + 1, [](int x, int y) { return std::optional(BNGroup::product(x, y)); }, rep,
                        [](std::span<const int> v) { return ints_text(v); });
    return rep;
}

AxiomReport check_unit_inverse(const TwoValuedTable& t) {
    AxiomReport rep;
    for (int x = 0; x < t.size(); ++x) {
        ++rep.checked;
        std::array<int, 2> xx{x, x};
        for (auto [a, b] : {std::pair{t.unit, x}, std::pair{x, t.unit}}) {
            auto p = t.product(a, b);
            if (!p || sorted4({(*p)[0], (*p)[1], 0, 0}) != sorted4({x, x, 0, 0}))
                rep.violations.push_back({"unit", {a, b},
                                          t.carrier[a] + "*" + t.carrier[b] + " = " +
                                              (p ? ids_text(t, *p) : "undefined") + ", expected " + ids_text(t, xx)});
        }
        int ix = t.inv[x];
        for (auto [a, b] : {std::pair{ix, x}, std::pair{x, ix}}) {
            auto p = t.product(a, b);
            if (!p || ((*p)[0] != t.unit && (*p)[1] != t.unit))
                rep.violations.push_back({"inverse", {a, b},
                                          t.carrier[a] + "*" + t.carrier[b] + " = " +
                                              (p ? ids_text(t, *p) : "undefined") + " does not contain the unit"});
        }
    }
    return rep;
}

AxiomReport check_unit_inverse(const BNGroup&, int bound) {
    AxiomReport rep;
    for (int n = 0; n <= bound; ++n) {
        ++rep.checked;
        for (auto p : {BNGroup::product(0, n), BNGroup::product(n, 0)})
            if (p[0] != n || p[1] != n)
                rep.violations.push_back({"unit", {0, n}, "0*n = " + ints_text(p)});
        auto q = BNGroup::product(n, n);
        if (q[0] != 0 && q[1] != 0) rep.violations.push_back({"inverse", {n, n}, "n*n = " + ints_text(q)});
    }
    return rep;
}

ClosureResult subgroup_closure(const TwoValuedTable& t, int a) {
    if (a < 0 || a >= t.size()) throw Error(ErrorCode::PreconditionFailed, "generator not in carrier");
    std::set<int> y{a};
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<int> cur(y.begin(), y.end());
        for (int b : cur) grew |= y.insert(t.inv[b]).second;
        for (int b : cur)
            for (int c : cur)
                if (auto p = t.product(b, c)) {
                    grew |= y.insert((*p)[0]).second;
                    grew |= y.insert((*p)[1]).second;
                }
    }
    ClosureResult r;
    r.elements.assign(y.begin(), y.end());
    r.whole_carrier = static_cast<int>(r.elements.size()) == t.size();
    return r;
}

ClosureResult subgroup_closure(const BNGroup& g, int a) {
    if (a < 0 || a > g.bound) throw Error(ErrorCode::PreconditionFailed, "generator outside 0..bound");
    std::vector<bool> in(g.bound + 1, false);
    in[a] = true;
    ClosureResult r;
    bool grew = true;
    while (grew) {
        grew = false;
        for (int b = 0; b <= g.bound; ++b) {
            if (!in[b]) continue;
            for (int c = 0; c <= g.bound; ++c) {
                if (!in[c]) continue;
                for (int v : BNGroup::product(b, c)) {
                    if (v > g.bound) {
                        r.saturated = true;
                    } else if (!in[v]) {
                        in[v] = true;
                        grew = true;
                    }
                }
            }
        }
    }
    for (int n = 0; n <= g.bound; ++n)
        if (in[n]) r.elements.push_back(n);
    r.whole_carrier = static_cast<int>(r.elements.size()) == g.bound + 1;
    return r;
}

CMultiset bn_action(int n, cplx z) {
    cplx s = std::sqrt(z);
    return CMultiset{(double(n) + s) * (double(n) + s), (double(n) - s) * (double(n) - s)};
}

ActionSpec ActionSpec::buchstaber_novikov(int bound) {
    ActionSpec s;
    s.name = "buchstaber-novikov";
    s.unit = 0;
    s.bound = bound;
    s.mult = [](int n, int m) { return BNGroup::product(n, m); };
    s.nu = [](int n, cplx z) { return bn_action(n, z); };
    return s;
}

ActionReport verify_action(const ActionSpec& spec, int pairs_bound, std::span<const cplx> points, double tol) {
    ActionReport rep;
    auto record = [&](const CMultiset& a, const CMultiset& b, const std::string& what) {
        ++rep.checked;
        double d = bottleneck_match(a, b).distance;
        rep.max_distance = std::max(rep.max_distance, d);
        if (!(d <= tol)) rep.violations.push_back(what + ": " + to_string(a) + " vs " + to_string(b));
    };
    for (cplx s : points) {
        record(spec.nu(spec.unit, s), CMultiset{s, s}, "unit at " + format_complex(s));
        for (int a1 = 0; a1 <= pairs_bound; ++a1)
            for (int a2 = 0; a2 <= pairs_bound; ++a2) {
                auto inner = spec.nu(a2, s);
                auto left = concat(spec.nu(a1, inner[0]), spec.nu(a1, inner[1]));
                auto prod = spec.mult(a1, a2);
                auto right = concat(spec.nu(prod[0], s), spec.nu(prod[1], s));
                record(left, right,
                       "(" + std::to_string(a1) + ", " + std::to_string(a2) + ") at " + format_complex(s));
            }
    }
    return rep;
}

std::optional<BNConjugacy> bn_structural_match(const QuadDynamics& t) {
    const ComplexPoly& p1 = t.p1();
    ComplexPoly disc = t.discriminant();
    if (p1.degree() != 1) return std::nullopt;
    ComplexPoly z = ComplexPoly::identity();
    ComplexPoly k_poly = -p1 - z;  // must be the constant k
    if (k_poly.degree() > 0) return std::nullopt;
    cplx k = k_poly.coeff(0);

    BNConjugacy m;
    if (k_poly.is_zero() || std::abs(k) <= 1e-12 * (1 + p1.max_abs_coeff())) {
        // T(z) = z +- sqrt(D): only D == 0 gives the unit action.
        if (!poly_equal(disc, ComplexPoly{})) return std::nullopt;
        m.lambda = 0;
        m.mu = 0;
    } else {
        // sigma^-1 o nu(1, .) o sigma = z + k +- 2k sqrt(z/k + mu) with lambda = 1/k.
        if (disc.degree() > 1) return std::nullopt;
        ComplexPoly expected_linear = Gauss(4) * k_poly * z;
        ComplexPoly lin = disc.is_exact() && !disc.is_zero() ? disc - ComplexPoly::constant(disc.exact_coeffs()[0])
                                                             : disc - ComplexPoly::constant(disc.coeff(0));
        if (!poly_equal(lin, expected_linear)) return std::nullopt;
        m.lambda = 1.0 / k;
        m.mu = disc.coeff(0) / (4.0 * k * k);
    }

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 20; ++i) {
        cplx zz{u(rng), u(rng)};
        CMultiset want;
        if (m.lambda == cplx(0)) {
            want = CMultiset{zz, zz};
        } else {
            auto img = bn_action(1, m.lambda * zz + m.mu);
            want = CMultiset{(img[0] - m.mu) / m.lambda, (img[1] - m.mu) / m.lambda};
        }
        m.max_mismatch = std::max(m.max_mismatch, bottleneck_match(want, eval_T(t, zz)).distance);
    }
    return m;
}

DefinabilityReport group_definability_report(const QuadDynamics& t) {
    DefinabilityReport rep;
    if (auto bn = bn_structural_match(t)) {
        rep.bn = bn;
        rep.verdict = Verdict::KnownGroupDefinable;
        if (bn->lambda == cplx(0))
            rep.notes.push_back("T = [z, z], the unit action nu(0, .)");
        else
            rep.notes.push_back("T = sigma^-1 o nu(1, .) o sigma, sigma(z) = " + format_complex(bn->lambda) + " z + " +
                                format_complex(bn->mu) + ", action of Z+ with n*m = [n+m, |n-m|]");
        return rep;
    }

    if (odd_discriminant_roots(t).empty()) {
        rep.notes.push_back("p1^2 - p0 is a perfect square: T is a pair of single-valued maps; no criterion applies");
        return rep;
    }
    ShiftResult sr = shift_normalize(t);
    rep.shift = sr.a;
    const QuadDynamics& ts = sr.shifted;
    SquareTest sq = is_perfect_square(ts.p0());
    rep.p0_perfect_square = sq.is_square;
    rep.p0_root = sq.witness;

    if (!sq.is_square) {
        try {
            rep.obstruction = obstruction_verdict(t);
            rep.verdict = rep.obstruction->verdict;
            if (rep.verdict == Verdict::NotGroupDefinable)
                rep.notes.push_back("normalised p0 has an odd root; splitting types at z1 and 0 are incompatible");
            else
                rep.notes.push_back("normalised p0 has an odd root but the loop certificate did not close");
        } catch (const Error& e) {
            if (e.code() != ErrorCode::PreconditionFailed) throw;
            rep.notes.push_back(std::string("obstruction not applicable: ") + e.what());
        }
        return rep;
    }

    rep.verdict = Verdict::NecessaryConditionHolds;
    rep.notes.push_back("normalised p0 is a perfect square");
    try {
        rep.form = sqrt_square_form(ts);
    } catch (const Error& e) {
        rep.notes.push_back(std::string("no sqrt-square form: ") + e.what());
        return rep;
    }

    const ComplexPoly* constant = nullptr;
    const ComplexPoly* gamma = nullptr;
    auto is_nonzero_constant = [](const ComplexPoly& p) {
        return p.degree() == 0 && std::abs(p.coeff(0)) > 1e-12;
    };
    if (is_nonzero_constant(rep.form->alpha) && rep.form->beta.degree() >= 1) {
        constant = &rep.form->alpha;
        gamma = &rep.form->beta;
    } else if (is_nonzero_constant(rep.form->beta) && rep.form->alpha.degree() >= 1) {
        constant = &rep.form->beta;
        gamma = &rep.form->alpha;
    }
    if (!constant) return rep;

    RootList gr = roots(*gamma);
    if (gr.size() < 2) {
        rep.notes.push_back("constant-alpha form with gamma having a single distinct root; probe not applicable");
        return rep;
    }
    std::vector<cplx> vals;
    for (auto& r : gr) vals.push_back(r.value);
    double sep = min_separation(vals);
    cplx c = std::sqrt(constant->coeff(0));
    cplx eps = std::min(1e-3, 0.005 * sep);
    try {
        rep.sufficiency = sufficiency_probe(c, *gamma, eps);
        if (rep.sufficiency->certificate) {
            rep.verdict = Verdict::NotGroupDefinable;
            rep.notes.push_back("T = (c +- sqrt(gamma))^2: " + rep.sufficiency->certificate_text);
        } else {
            rep.notes.push_back("sufficiency probe ran but no certificate");
        }
    } catch (const Error& e) {
        rep.notes.push_back(std::string("sufficiency probe failed: ") + e.what());
    }
    return rep;
}

}  // namespace mvdyn
