#include "mvdyn/monodromy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mvdyn/error.hpp"

namespace mvdyn {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

double scale_of(std::span<const cplx> v) {
    double m = 0;
    for (cplx x : v) m = std::max(m, std::abs(x));
    return 1 + m;
}

Gauss exact_from(cplx z) { return Gauss(mpq_class(z.real()), mpq_class(z.imag())); }

bool magnitude_then_arg(cplx x, cplx y) {
    const double mx = std::abs(x), my = std::abs(y);
    if (std::abs(mx - my) > 1e-12 * (1 + mx)) return mx < my;
    return std::arg(x) < std::arg(y);
}

std::string fmt_perm(std::span<const int> p) {
    std::string out = "[";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(p[i]);
    }
    return out + "]";
}

}  // namespace

LoopPath LoopPath::circle(cplx center, double radius, int samples, int turns) {
    if (!(radius > 0)) throw Error(ErrorCode::PreconditionFailed, "circle radius must be positive");
    if (turns == 0) throw Error(ErrorCode::PreconditionFailed, "circle must turn at least once");
    LoopPath l;
    l.kind = Kind::Circle;
    l.center = center;
    l.radius = radius;
    l.turns = turns;
    l.samples = std::max(samples, 4);
    return l;
}

LoopPath LoopPath::polyline(std::vector<cplx> vertices, int samples) {
    if (vertices.size() < 2) throw Error(ErrorCode::PreconditionFailed, "polyline needs at least two vertices");
    LoopPath l;
    l.kind = Kind::Polyline;
    l.vertices = std::move(vertices);
    l.samples = std::max(samples, 4);
    return l;
}

cplx LoopPath::at(double t) const {
    if (kind == Kind::Circle) return center + std::polar(radius, kTwoPi * turns * t);
    const std::size_t n = vertices.size();
    const double s = std::clamp(t, 0.0, 1.0) * static_cast<double>(n);
    const std::size_t i = std::min(static_cast<std::size_t>(s), n - 1);
    const double f = s - static_cast<double>(i);
    if (i == n - 1 && f >= 1) return vertices[0];
    return vertices[i] + f * (vertices[(i + 1) % n] - vertices[i]);
}

LoopPath LoopPath::reversed() const {
    LoopPath l = *this;
    if (kind == Kind::Circle) {
        l.turns = -turns;
    } else {
        std::reverse(l.vertices.begin() + 1, l.vertices.end());
    }
    return l;
}

LoopPath LoopPath::repeated(int d) const {
    if (d < 1) throw Error(ErrorCode::PreconditionFailed, "repeat count must be positive");
    LoopPath l = *this;
    l.samples = samples * d;
    if (kind == Kind::Circle) {
        l.turns = turns * d;
    } else {
        l.vertices.clear();
        for (int k = 0; k < d; ++k) l.vertices.insert(l.vertices.end(), vertices.begin(), vertices.end());
    }
    return l;
}

bool MonodromyResult::is_identity() const {
    for (std::size_t i = 0; i < permutation.size(); ++i)
        if (permutation[i] != static_cast<int>(i)) return false;
    return true;
}

MonodromyResult trace_branches(const SheetFunction& family, const LoopPath& loop, const TraceOptions& opts) {
    std::vector<cplx> cur = family(loop.at(0), {});
    const std::size_t k = cur.size();
    const std::vector<cplx> start = cur;
    const double sep0 = min_separation(cur);
    if (k >= 2 && sep0 <= 10 * 1e-8 * scale_of(cur))
        throw Error(ErrorCode::BranchCollision, "sheets coincide at the base point " + format_complex(loop.at(0)));

    MonodromyResult res;
    res.trace.reference = opts.reference;
    res.trace.min_separation = sep0;
    res.trace.times.push_back(0);
    res.trace.sheets.push_back(cur);

    std::vector<double> acc(k, 0);
    std::vector<double> darg(k);
    std::vector<cplx> ordered(k);
    const double hmax = 1.0 / loop.samples;
    const double hmin = std::ldexp(1.0, -opts.max_halvings);
    double t = 0, h = hmax;
    while (t < 1) {
        h = std::min(h, 1 - t);
        const double tn = t + h;
        const std::vector<cplx> next = family(loop.at(tn), cur);
        if (next.size() != k) throw Error(ErrorCode::NonConvergence, "family changed its number of sheets");
        const Matching m = bottleneck_match(CMultiset(cur), CMultiset(next));
        for (std::size_t i = 0; i < k; ++i) ordered[i] = next[m.pairing[i]];

        const double sep = std::min(min_separation(cur), min_separation(ordered));
        if (k >= 2 && sep < opts.collision_rel * scale_of(ordered)) {
            throw Error(ErrorCode::BranchCollision,
                        "sheets collide near " + format_complex(loop.at(tn)) + "; perturb the loop");
        }
        bool ok = k < 2 || m.distance < sep / 3;
        for (std::size_t i = 0; i < k && ok; ++i) {
            const cplx a = cur[i] - opts.reference, b = ordered[i] - opts.reference;
            darg[i] = (a == cplx{} || b == cplx{}) ? 0.0 : std::arg(b / a);
            if (std::abs(darg[i]) >= 0.5) ok = false;
        }
        if (!ok) {
            h /= 2;
            if (h < hmin) throw Error(ErrorCode::BranchCollision, "step size underflow near " + format_complex(loop.at(t)));
            continue;
        }
        for (std::size_t i = 0; i < k; ++i) acc[i] += darg[i];
        cur = ordered;
        t = tn;
        res.trace.times.push_back(t);
        res.trace.sheets.push_back(cur);
        res.trace.min_separation = std::min(res.trace.min_separation, sep);
        h = std::min(2 * h, hmax);
    }

    const Matching close = bottleneck_match(CMultiset(cur), CMultiset(start));
    if (k >= 2 && close.distance >= sep0 / 3) throw Error(ErrorCode::BranchCollision, "traced sheets do not close up");
    res.permutation = close.pairing;
    for (double a : acc) res.branch_turns.push_back(a / kTwoPi);

    std::vector<bool> seen(k, false);
    for (std::size_t i = 0; i < k; ++i) {
        if (seen[i]) continue;
        std::vector<int> cyc;
        double total = 0;
        for (int j = static_cast<int>(i); !seen[j]; j = res.permutation[j]) {
            seen[j] = true;
            cyc.push_back(j);
            total += res.branch_turns[j];
        }
        const double rounded = std::round(total);
        if (std::abs(total - rounded) > 0.05)
            throw Error(ErrorCode::BranchCollision, "non-integer cycle winding " + format_double(total));
        res.cycles.push_back(std::move(cyc));
        res.cycle_windings.push_back(static_cast<int>(rounded));
    }
    return res;
}

MonodromyResult trace_branches(const QuadDynamics& t, const LoopPath& loop, const TraceOptions& opts) {
    return trace_branches(
        [&t](cplx z, std::span<const cplx>) {
            auto im = t.images(z);
            return std::vector<cplx>{im[0], im[1]};
        },
        loop, opts);
}

MonodromyResult trace_branches(const QuarticFamily& q, const LoopPath& loop, const TraceOptions& opts) {
    return trace_branches([&q](cplx z, std::span<const cplx> hint) { return q.raw_roots_at(z, hint); }, loop, opts);
}

bool omega_swap_check(const QuadDynamics& t, const LoopPath& loop, int d) {
    const ComplexPoly disc = t.discriminant();
    int order = -1;
    const double cut = 1e-9 * disc.max_abs_coeff();
    for (int k = 0; k <= disc.degree(); ++k) {
        const bool zero = disc.is_exact() ? disc.exact_coeffs()[k].is_zero() : std::abs(disc.coeff(k)) <= cut;
        if (!zero) {
            order = k;
            break;
        }
    }
    if (order <= 0 || order % 2 == 0)
        throw Error(ErrorCode::PreconditionFailed, "0 is not an odd-multiplicity root of p1^2 - p0");
    const MonodromyResult r = trace_branches(t, loop.repeated(d));
    return r.permutation.size() == 2 && r.permutation[0] == 1;
}

std::string to_string(Splitting s) {
    switch (s) {
        case Splitting::Type1: return "Type1";
        case Splitting::Type2: return "Type2";
        case Splitting::NoValidSplitting: return "NoValidSplitting";
        case Splitting::Unconstrained: return "Unconstrained";
    }
    return "?";
}

std::string label_name(int label) {
    static const char* names[] = {"11", "12", "21", "22"};
    return names[label];
}

std::string partition_name(int index) {
    const auto& p = kPairPartitions[index];
    return "{{" + label_name(p[0][0]) + "," + label_name(p[0][1]) + "},{" + label_name(p[1][0]) + "," +
           label_name(p[1][1]) + "}}";
}

bool preserves(std::span<const int> sigma, const PairPartition& p) {
    for (const auto& block : p) {
        const int a = sigma[block[0]], b = sigma[block[1]];
        if (!((a == block[0] && b == block[1]) || (a == block[1] && b == block[0]))) return false;
    }
    return true;
}

SplittingReport classify_splitting(const QuadDynamics& t, const LoopPath& loop, const TraceOptions& opts) {
    return classify_splitting(t, compose(t), loop, opts);
}

SplittingReport classify_splitting(const QuadDynamics& t, const QuarticFamily& q, const LoopPath& loop,
                                   const TraceOptions& opts) {
    SplittingReport rep;
    rep.base = loop.at(0);
    // Same deterministic call the tracer makes first, so sheet indices agree.
    const std::vector<cplx> sheets = q.raw_roots_at(rep.base);
    const double tol = 1e-6 * scale_of(sheets);

    rep.first_level = t.images(rep.base);
    const auto d1 = t.images(rep.first_level[0]);
    const auto d2 = t.images(rep.first_level[1]);
    rep.labelled = {d1[0], d1[1], d2[0], d2[1]};
    for (int a = 0; a < 2; ++a)
        for (int b = 2; b < 4; ++b)
            if (std::abs(rep.labelled[a] - rep.labelled[b]) <= tol)
                throw Error(ErrorCode::GenealogyAmbiguous,
                            "composite image " + format_complex(rep.labelled[a]) + " descends from both first-level images");

    const Matching m = bottleneck_match(CMultiset(sheets), CMultiset(std::vector<cplx>(rep.labelled.begin(), rep.labelled.end())));
    if (m.distance > tol) throw Error(ErrorCode::NonConvergence, "quartic roots disagree with the two-step images");
    for (int i = 0; i < 4; ++i) rep.genealogy[i] = m.pairing[i];

    rep.monodromy = trace_branches(q, loop, opts);
    rep.label_permutation.assign(4, 0);
    for (int i = 0; i < 4; ++i) rep.label_permutation[rep.genealogy[i]] = rep.genealogy[rep.monodromy.permutation[i]];
    for (int p = 0; p < 3; ++p)
        if (preserves(rep.label_permutation, kPairPartitions[p])) rep.preserved_partitions.push_back(p);

    const auto& kept = rep.preserved_partitions;
    if (kept.empty()) {
        rep.classification = Splitting::NoValidSplitting;
    } else if (kept.size() > 1) {
        rep.classification = Splitting::Unconstrained;
    } else {
        rep.classification = kept[0] == 0 ? Splitting::Type1 : Splitting::Type2;
    }
    return rep;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::NotGroupDefinable: return "NOT_GROUP_DEFINABLE";
        case Verdict::NecessaryConditionHolds: return "NECESSARY_CONDITION_HOLDS";
        case Verdict::KnownGroupDefinable: return "KNOWN_GROUP_DEFINABLE";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

double loop_radius(cplx center, std::span<const cplx> exceptional, const ObstructionOptions& opts) {
    double dist = 1;
    bool any = false;
    for (cplx p : exceptional) {
        const double d = std::abs(p - center);
        if (d <= 1e-9 * (1 + std::abs(center))) continue;
        dist = any ? std::min(dist, d) : d;
        any = true;
    }
    return std::max(opts.radius_factor * dist, opts.min_radius);
}

ObstructionReport obstruction_verdict(const QuadDynamics& t, const ObstructionOptions& opts) {
    ObstructionReport rep;
    const RootList odd_disc = odd_discriminant_roots(t);
    if (odd_disc.empty())
        throw Error(ErrorCode::PreconditionFailed, "p1^2 - p0 is a perfect square; T splits into single-valued maps");

    std::optional<QuadDynamics> shifted;
    RootList odd_p0;
    for (const auto& r : odd_disc) {
        auto g = exact_root(t.discriminant(), r.value);
        QuadDynamics s = g ? conjugate_by_shift(t, *g) : conjugate_by_shift(t, r.value);
        RootList cand = s.p0().is_zero() ? RootList{} : odd_multiplicity_roots(s.p0());
        if (cand.empty()) {
            rep.diagnostics.push_back("shift by " + format_complex(r.value) + ": p0 has no odd root");
            continue;
        }
        rep.shift = g ? g->to_complex() : r.value;
        rep.shift_exact = g.has_value();
        shifted = std::move(s);
        odd_p0 = std::move(cand);
        break;
    }
    if (!shifted)
        throw Error(ErrorCode::PreconditionFailed,
                    "after shift normalisation p0 has no root of odd multiplicity; the necessary condition "
                    "(p0 a perfect square) holds");
    rep.shifted_p1 = shifted->p1();
    rep.shifted_p0 = shifted->p0();

    const DegeneracyReport deg = degeneracy(*shifted);
    if (!deg.has_generic_four_distinct)
        throw Error(ErrorCode::PreconditionFailed, "degenerate: T o T never has four distinct images");

    std::vector<cplx> exceptional;
    for (const auto& r : deg.exceptional_points) exceptional.push_back(r.value);
    for (const auto& r : roots(shifted->discriminant())) exceptional.push_back(r.value);

    // Prefer z1 away from the normalised branch point so the two loops are distinct.
    std::stable_sort(odd_p0.begin(), odd_p0.end(), [](const Root& a, const Root& b) {
        const bool za = std::abs(a.value) < 1e-9, zb = std::abs(b.value) < 1e-9;
        if (za != zb) return zb;
        return magnitude_then_arg(a.value, b.value);
    });

    const QuarticFamily q = compose(*shifted);
    const double p1_scale = 1e-9 * (1 + shifted->p1().max_abs_coeff());
    for (const auto& z1 : odd_p0) {
        const double r1 = loop_radius(z1.value, exceptional, opts);
        const double r0 = loop_radius(0, exceptional, opts);
        LoopVerdict v1{z1.value, r1, {}, std::nullopt};
        LoopVerdict v0{0, r0, {}, std::nullopt};
        try {
            v1.report = classify_splitting(*shifted, q, LoopPath::circle(z1.value, r1, opts.samples));
            v0.report = classify_splitting(*shifted, q, LoopPath::circle(0, r0, opts.samples));
            if (opts.check_half_radius) {
                v1.half_radius = classify_splitting(*shifted, q, LoopPath::circle(z1.value, r1 / 2, opts.samples));
                v0.half_radius = classify_splitting(*shifted, q, LoopPath::circle(0, r0 / 2, opts.samples));
            }
        } catch (const Error& e) {
            rep.diagnostics.push_back("z1 = " + format_complex(z1.value) + ": " + e.what());
            continue;
        }
        const bool stable = !opts.check_half_radius ||
                            (v1.half_radius->label_permutation == v1.report.label_permutation &&
                             v0.half_radius->label_permutation == v0.report.label_permutation);
        const Splitting s1 = v1.report.classification, s0 = v0.report.classification;
        const bool pattern = (s1 == Splitting::Type1 || s1 == Splitting::NoValidSplitting) &&
                             (s0 == Splitting::Type2 || s0 == Splitting::NoValidSplitting);
        if (!rep.at_z1 || (pattern && stable)) {
            rep.z1 = z1.value;
            rep.z1_multiplicity = z1.multiplicity;
            rep.z1_root_of_p1 = std::abs(eval(shifted->p1(), z1.value)) <= p1_scale;
            rep.at_z1 = v1;
            rep.at_0 = v0;
        }
        if (!stable) {
            rep.diagnostics.push_back("z1 = " + format_complex(z1.value) + ": monodromy changed when the radius was halved");
            continue;
        }
        if (pattern) {
            rep.verdict = Verdict::NotGroupDefinable;
            return rep;
        }
        rep.diagnostics.push_back("z1 = " + format_complex(z1.value) + ": " + to_string(s1) + " at z1 and " +
                                  to_string(s0) + " at 0 (label permutations " +
                                  fmt_perm(v1.report.label_permutation) + ", " +
                                  fmt_perm(v0.report.label_permutation) + ") do not match the obstruction pattern");
    }
    rep.verdict = Verdict::Inconclusive;
    return rep;
}

SufficiencyReport sufficiency_probe(cplx c, const ComplexPoly& gamma, cplx eps) {
    if (c == cplx{}) throw Error(ErrorCode::PreconditionFailed, "c must be nonzero");
    if (gamma.degree() < 2) throw Error(ErrorCode::PreconditionFailed, "gamma needs two distinct roots");
    const RootList gr = roots(gamma);
    if (gr.size() < 2) throw Error(ErrorCode::PreconditionFailed, "gamma has fewer than two distinct roots");
    double sep = 1e300;
    for (std::size_t i = 0; i < gr.size(); ++i)
        for (std::size_t j = i + 1; j < gr.size(); ++j) sep = std::min(sep, std::abs(gr[i].value - gr[j].value));
    if (!(std::abs(eps) < 0.01 * sep))
        throw Error(ErrorCode::PreconditionFailed, "|eps| must be below 0.01 times the root separation of gamma");

    SufficiencyReport rep;
    rep.c = c;
    rep.z1 = gr[0].value;
    rep.z2 = gr[1].value;
    rep.tol = 1e-7;
    const bool exact = gamma.is_exact();
    auto minus_square = [&](cplx x) {
        return exact ? gamma - ComplexPoly::constant(exact_from(x) * exact_from(x)) : gamma - ComplexPoly::constant(x * x);
    };
    const double nbhd = 0.25 * sep;

    bool found = false;
    for (int attempt = 0; attempt <= 10 && !found; ++attempt) {
        if (attempt > 0) {
            eps *= std::polar(1.0, std::numbers::pi / 7);
            ++rep.perturbations;
        }
        std::vector<cplx> near;
        for (const auto& r : roots(minus_square(eps)))
            for (int k = 0; k < r.multiplicity; ++k) near.push_back(r.value);
        auto nearest = [&](cplx z) {
            return *std::min_element(near.begin(), near.end(),
                                     [&](cplx a, cplx b) { return std::abs(a - z) < std::abs(b - z); });
        };
        const cplx z1p = nearest(rep.z1), z2p = nearest(rep.z2);
        if (std::abs(z1p - rep.z1) >= nbhd || std::abs(z2p - rep.z2) >= nbhd) continue;

        std::vector<cplx> far;
        for (const auto& r : roots(minus_square(2.0 * c + eps))) {
            if (std::abs(r.value - rep.z1) < nbhd || std::abs(r.value - rep.z2) < nbhd) continue;
            for (int k = 0; k < r.multiplicity; ++k) far.push_back(r.value);
        }
        if (far.size() < 2) continue;
        const cplx z3p = far[0], z4p = far[1];
        const double dtol = 1e-6 * (1 + std::abs(z3p));
        if (std::abs(z3p - z4p) <= dtol) continue;
        if (std::abs(z3p - z1p) <= dtol || std::abs(z3p - z2p) <= dtol || std::abs(z4p - z1p) <= dtol ||
            std::abs(z4p - z2p) <= dtol)
            continue;
        rep.z1p = z1p;
        rep.z2p = z2p;
        rep.z3p = z3p;
        rep.z4p = z4p;
        found = true;
    }
    if (!found) throw Error(ErrorCode::RootProximity, "z3' and z4' could not be separated by perturbing eps");
    rep.eps = eps;

    const ComplexPoly c2 = ComplexPoly::constant(c * c);
    const QuadDynamics t(-(c2 + gamma), (c2 - gamma) * (c2 - gamma));
    rep.target = CMultiset{(c + eps) * (c + eps), (3.0 * c + eps) * (3.0 * c + eps)};
    rep.image_z3 = eval_T(t, rep.z3p);
    rep.image_z4 = eval_T(t, rep.z4p);
    rep.mismatch_z3 = bottleneck_match(rep.image_z3, rep.target).distance;
    rep.mismatch_z4 = bottleneck_match(rep.image_z4, rep.target).distance;

    const cplx low = rep.target[0];
    auto hits = [&](cplx z) {
        for (cplx w : t.images(z))
            if (std::abs(w - low) <= rep.tol) return true;
        return false;
    };
    rep.certificate = rep.mismatch_z3 <= rep.tol && rep.mismatch_z4 <= rep.tol && hits(rep.z1p) && hits(rep.z2p);

    std::ostringstream os;
    if (rep.certificate) {
        os << "z1'=" << format_complex(rep.z1p) << " and z2'=" << format_complex(rep.z2p) << " map onto "
           << format_complex(low) << " near c^2, while z3'=" << format_complex(rep.z3p)
           << " and z4'=" << format_complex(rep.z4p) << " both map to " << to_string(rep.target)
           << ". A continuous inverse through c^2 -> [z1, z2] would need T^-1("
           << format_complex(rep.target[1]) << ") to equal both [z3', z3'] and [z4', z4'], and z3' != z4'.";
    } else {
        os << "images of z3', z4' miss the target pair by " << format_double(std::max(rep.mismatch_z3, rep.mismatch_z4));
    }
    rep.certificate_text = os.str();
    return rep;
}

}  // namespace mvdyn
