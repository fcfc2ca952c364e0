// Acceptance run: one PASS/FAIL line per criterion. `acceptance [N ...]` runs the listed
// criteria (all by default) and exits non-zero if any of them fails.
#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mvdyn/error.hpp"
#include "mvdyn/groups.hpp"
#include "oracles.hpp"

using namespace mvdyn;

namespace {

// Pinned tolerances and budgets.
constexpr double kActionTol = 1e-9;
constexpr double kActionSeconds = 5;
constexpr double kAxiomSeconds = 5;
constexpr double kComposeTol = 1e-7;
constexpr double kObstructionSeconds = 30;
constexpr double kProbeTol = 1e-7;
constexpr int kRandomPoints = 50;
constexpr int kRandomLoops = 20;

struct Outcome {
    bool pass = false;
    std::string detail;
};

ComplexPoly P(const char* s) { return parse_poly(s); }

QuadDynamics bn() { return {P("-1,-1"), P("1,-2,1")}; }
QuadDynamics obstruction() { return {P("0,1"), P("0,-1,1")}; }

std::string num(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string perm_text(std::span<const int> p) {
    std::string s;
    for (int v : p) s += (s.empty() ? "" : " ") + label_name(v);
    return "(" + s + ")";
}

Outcome action_identity() {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<cplx> grid;
    for (int i = -2; i <= 2; ++i)
        for (int j = -2; j <= 2; ++j) grid.emplace_back(35.0 * i, 35.0 * j);
    double max_abs = 0;
    for (cplx z : grid) max_abs = std::max(max_abs, std::abs(z));
    auto rep = verify_action(ActionSpec::buchstaber_novikov(20), 10, grid, kActionTol);
    double secs = seconds_since(t0);
    bool pass = rep.ok() && rep.max_distance < kActionTol && secs < kActionSeconds && max_abs <= 100 &&
                rep.checked == 25 * (1 + 121);
    return {pass, std::to_string(rep.checked) + " identities on 25 points (|z| <= " + num(max_abs) +
                      "), max distance " + num(rep.max_distance) + " < " + num(kActionTol) + ", " + num(secs) +
                      " s < " + num(kActionSeconds) + " s"};
}

Outcome group_axioms() {
    auto t0 = std::chrono::steady_clock::now();
    BNGroup g{20};
    auto assoc = check_associativity(g, 20);
    auto ui = check_unit_inverse(g, 20);
    double secs = seconds_since(t0);
    bool pass = assoc.ok() && ui.ok() && assoc.checked == 21 * 21 * 21 && secs < kAxiomSeconds;
    return {pass, std::to_string(assoc.checked) + " triples, " + std::to_string(assoc.violations.size()) +
                      " associativity and " + std::to_string(ui.violations.size()) +
                      " unit/inverse violations (e = 0, inv = id), " + num(secs) + " s < " + num(kAxiomSeconds) + " s"};
}

Outcome composition_equivalence() {
    std::vector<QuadDynamics> zoo{obstruction(),
                                  bn(),
                                  {P("0,0,1"), P("0,-1,1")},
                                  {P("1+i,2"), P("3,0,-1")},
                                  {P("0,1/2,1"), P("2,-1,0,1")}};
    std::mt19937_64 rng(2024);
    double worst = 0;
    for (auto& t : zoo) {
        auto q = compose(t);
        for (cplx z : oracle::random_points(rng, kRandomPoints, 2)) {
            auto direct = oracle::two_step(t.p1(), t.p0(), z);
            auto roots = q.roots_at(z);
            std::vector<cplx> r(roots.values().begin(), roots.values().end());
            worst = std::max(worst, oracle::bottleneck(r, direct));
        }
    }
    return {worst <= kComposeTol, "5 dynamics x " + std::to_string(kRandomPoints) + " points, max distance " +
                                      num(worst) + " <= " + num(kComposeTol)};
}

Outcome composite_structure() {
    auto q = compose(bn());
    std::mt19937_64 rng(77);
    double worst = 0;
    for (cplx z : oracle::random_points(rng, kRandomPoints, 5)) {
        cplx s = std::sqrt(z);
        std::vector<cplx> want{z, z, (2.0 + s) * (2.0 + s), (2.0 - s) * (2.0 - s)};
        auto roots = q.roots_at(z);
        std::vector<cplx> r(roots.values().begin(), roots.values().end());
        worst = std::max(worst, oracle::bottleneck(r, want));
    }
    return {worst <= kComposeTol, "T o T = [z, z] + (2 +- sqrt z)^2 at " + std::to_string(kRandomPoints) +
                                      " points, max distance " + num(worst) + " <= " + num(kComposeTol)};
}

Outcome square_condition() {
    ComplexPoly sq = P("1,-2,1");
    auto a = is_perfect_square(sq);
    auto b = is_perfect_square(sq);
    auto no = is_perfect_square(P("0,-1,1"));
    bool witness_ok = a.is_square && a.witness && a.witness->is_exact() && (*a.witness) * (*a.witness) == sq;
    std::string w1 = a.witness ? to_string(*a.witness) : "none";
    std::string w2 = b.witness ? to_string(*b.witness) : "none";
    bool pass = witness_ok && w1 == "-1,1" && w1 == w2 && !no.is_square && !no.witness;
    return {pass, "(z-1)^2 square with exact witness " + w1 + " (repeat run " + w2 + "), z^2 - z " +
                      (no.is_square ? "square" : "not square")};
}

Outcome obstruction_reproduction() {
    auto t0 = std::chrono::steady_clock::now();
    ObstructionReport rep;
    try {
        rep = obstruction_verdict(obstruction());
    } catch (const Error& e) {
        return {false, std::string("obstruction_verdict threw ") + e.what()};
    }
    double secs = seconds_since(t0);
    std::string d = "verdict " + to_string(rep.verdict);
    bool type1_at_z1 = false, type2_at_0 = false, stable = true, certificates = true;
    if (rep.at_z1) {
        auto& v = *rep.at_z1;
        type1_at_z1 = v.report.classification == Splitting::Type1 && std::abs(v.center - cplx(1)) < 1e-12;
        stable &= v.half_radius && v.half_radius->classification == v.report.classification;
        certificates &= v.report.label_permutation.size() == 4;
        d += "; about z1 = " + format_complex(v.center) + " r = " + num(v.radius) + ": " +
             to_string(v.report.classification) + " " + perm_text(v.report.label_permutation) +
             (v.half_radius ? ", r/2: " + to_string(v.half_radius->classification) : "");
    } else {
        stable = certificates = false;
    }
    if (rep.at_0) {
        auto& v = *rep.at_0;
        type2_at_0 = v.report.classification == Splitting::Type2;
        stable &= v.half_radius && v.half_radius->classification == v.report.classification;
        certificates &= v.report.label_permutation.size() == 4;
        d += "; about 0 r = " + num(v.radius) + ": " + to_string(v.report.classification) + " " +
             perm_text(v.report.label_permutation) +
             (v.half_radius ? ", r/2: " + to_string(v.half_radius->classification) : "");
    } else {
        stable = certificates = false;
    }
    d += "; " + num(secs) + " s < " + num(kObstructionSeconds) + " s";
    if (!type2_at_0) d += "; required Type2 about 0 not observed";
    bool pass = rep.verdict == Verdict::NotGroupDefinable && type1_at_z1 && type2_at_0 && stable && certificates &&
                secs < kObstructionSeconds;
    return {pass, d};
}

Outcome monodromy_sanity() {
    QuadDynamics root{ComplexPoly{}, P("0,-1")};  // T(z) = +- sqrt z
    auto once = trace_branches(root, LoopPath::circle(0, 1));
    bool transposition = once.permutation == std::vector<int>{1, 0} && once.cycle_windings == std::vector<int>{1};
    auto twice = trace_branches(root, LoopPath::circle(0, 1).repeated(2));
    bool identity = twice.is_identity();

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-2, 2), rad(0.2, 2.5);
    int composed = 0, nontrivial = 0;
    for (int i = 0; i < kRandomLoops; ++i) {
        cplx c{u(rng), u(rng)};
        double r = rad(rng);
        if (std::abs(std::abs(c) - r) < 0.05) r += 0.1;
        auto loop = LoopPath::circle(c, r);
        TraceOptions opts;
        opts.reference = c;
        auto fwd = trace_branches(root, loop, opts);
        auto back = trace_branches(root, loop.reversed(), opts);
        bool id = true;
        for (int k = 0; k < 2; ++k) id &= back.permutation[fwd.permutation[k]] == k;
        composed += id;
        nontrivial += !fwd.is_identity();
    }
    bool pass = transposition && identity && composed == kRandomLoops && nontrivial > 0;
    return {pass, std::string("unit circle: ") + (transposition ? "transposition, cycle winding 1" : "unexpected") +
                      "; twice: " + (identity ? "identity" : "not identity") + "; reversal composes to identity on " +
                      std::to_string(composed) + "/" + std::to_string(kRandomLoops) + " loops (" +
                      std::to_string(nontrivial) + " non-trivial)"};
}

Outcome invertibility() {
    auto cor = strong_invertibility_probe(obstruction(), square_grid({-2.3, -2.3}, 0.5, 10));
    bool all_two = cor.points.size() == 100;
    for (auto& p : cor.points) all_two &= p.total_edges == 2;

    auto three = strong_invertibility_probe(bn(), square_grid({-2.25, -2.25}, 0.75, 10));
    bool only_zero = three.violations.size() == 1 && std::abs(three.violations[0]) < 1e-12;
    bool simple_one = false;
    for (auto& p : three.points)
        if (std::abs(p.w) < 1e-12)
            simple_one = p.total_edges == 1 && p.preimages.size() == 1 && std::abs(p.preimages[0].z - cplx(1)) < 1e-9 &&
                         p.preimages[0].edge_multiplicity == 1;
    bool pass = cor.strongly_invertible_on_grid && all_two && only_zero && simple_one && three.points.size() == 100;
    return {pass, "p1 = z, p0 = z^2 - z: " + std::string(all_two ? "2 edges at all 100 targets" : "edge count off") +
                      "; (1 +- sqrt z)^2: violations at " + std::to_string(three.violations.size()) + " target(s)" +
                      (only_zero ? " (w = 0)" : "") + (simple_one ? ", single simple preimage 1" : "")};
}

Outcome sufficiency() {
    SufficiencyReport rep;
    try {
        rep = sufficiency_probe(1, P("0,-1,1"), 1e-3);
    } catch (const Error& e) {
        return {false, std::string("probe threw ") + e.what()};
    }
    CMultiset want{(1.0 + rep.eps) * (1.0 + rep.eps), (3.0 + rep.eps) * (3.0 + rep.eps)};
    double target_err = bottleneck_match(rep.target, want).distance;
    bool distinct = std::abs(rep.z3p - rep.z4p) > 1e-3;
    bool pass = rep.certificate && rep.mismatch_z3 <= kProbeTol && rep.mismatch_z4 <= kProbeTol &&
                target_err < 1e-12 && distinct && rep.eps == cplx(1e-3);
    return {pass, "z1' = " + format_complex(rep.z1p) + ", z2' = " + format_complex(rep.z2p) + ", z3' = " +
                      format_complex(rep.z3p) + ", z4' = " + format_complex(rep.z4p) + "; mismatch " +
                      num(std::max(rep.mismatch_z3, rep.mismatch_z4)) + " <= " + num(kProbeTol) + "; certificate " +
                      (rep.certificate ? "emitted" : "missing")};
}

std::string capture(const std::string& cmd, int& status) {
    std::string out;
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
    if (!pipe) {
        status = -1;
        return out;
    }
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), n);
    status = pclose(pipe.release());
    return out;
}

Outcome determinism() {
    const std::string exe = MVDYN_EXE;
    const std::vector<std::string> commands{
        "eval --p1 -1,-1 --p0 1,-2,1 --z 9",
        "compose --p1 0,1 --p0 0,-1,1",
        "trace --p1 0 --p0 0,-1",
        "trace --p1 0,1 --p0 0,-1,1 --family TT --center 1 --radius 0.1",
        "classify --p1 0,1 --p0 0,-1,1 --center 0 --radius 0.0125",
        "verdict --p1 0,1 --p0 0,-1,1",
        "verdict --p1 -1,1,-1 --p0 1,2,-1,-2,1",
        "check-group --bound 20",
        "check-action",
        "invertibility --p1 -1,-1 --p0 1,-2,1",
        "sufficiency-probe",
    };
    int identical = 0;
    std::string failed;
    for (auto& c : commands) {
        std::string line = exe + " " + c + " --seed 7 2>/dev/null";
        int s1 = 0, s2 = 0;
        auto a = capture(line, s1);
        auto b = capture(line, s2);
        if (s1 == 0 && s2 == 0 && !a.empty() && a == b)
            ++identical;
        else
            failed += " [" + c + "]";
    }
    int total = static_cast<int>(commands.size());
    return {identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                    " invocations byte-identical across two processes" + failed};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "Buchstaber-Novikov action identity", action_identity},
        {2, "Buchstaber-Novikov group axioms", group_axioms},
        {3, "resultant composition vs two-step evaluation", composition_equivalence},
        {4, "composite of (1 +- sqrt z)^2", composite_structure},
        {5, "perfect-square necessary condition", square_condition},
        {6, "obstruction for p1 = z, p0 = z^2 - z", obstruction_reproduction},
        {7, "monodromy kernel sanity", monodromy_sanity},
        {8, "strong invertibility probes", invertibility},
        {9, "sufficiency probe for c = 1, gamma = z(z-1)", sufficiency},
        {10, "CLI determinism", determinism},
    };
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.push_back(std::stoi(argv[i]));

    bool ok = true;
    for (auto& c : all) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        ok &= o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << c.id << " " << c.name << ": " << o.detail << std::endl;
    }
    return ok ? 0 : 1;
}
