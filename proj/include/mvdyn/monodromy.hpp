#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvdyn/dynamics.hpp"

namespace mvdyn {

/// A closed curve parametrised by t in [0, 1].
struct LoopPath {
    enum class Kind { Circle, Polyline };

    Kind kind = Kind::Circle;
    cplx center{};
    double radius = 1;
    /// Signed number of turns; negative runs clockwise.
    int turns = 1;
    /// Closed polyline: the last vertex connects back to the first.
    std::vector<cplx> vertices;
    /// Initial number of steps; the tracer refines adaptively.
    int samples = 256;

    static LoopPath circle(cplx center, double radius, int samples = 256, int turns = 1);
    static LoopPath polyline(std::vector<cplx> vertices, int samples = 256);

    cplx at(double t) const;
    LoopPath reversed() const;
    /// The same curve traversed d times.
    LoopPath repeated(int d) const;
};

struct TraceOptions {
    /// Windings are measured about this point.
    cplx reference{};
    /// Collision threshold relative to 1 + max|sheet|.
    double collision_rel = 1e-7;
    /// Steps are refused below 2^-max_halvings of the loop.
    int max_halvings = 48;
};

struct BranchTrace {
    std::vector<double> times;
    /// sheets[s][i]: branch i at times[s].
    std::vector<std::vector<cplx>> sheets;
    double min_separation = 0;
    cplx reference{};
};

struct MonodromyResult {
    /// Branch starting as sheet i ends on sheet permutation[i].
    std::vector<int> permutation;
    /// Accumulated argument of each branch about the reference, in turns.
    std::vector<double> branch_turns;
    std::vector<std::vector<int>> cycles;
    /// Total turns of each cycle, an integer.
    std::vector<int> cycle_windings;
    BranchTrace trace;

    bool is_identity() const;
};

/// Returns all k values of the family at z; `hint` holds the previous sheets (possibly empty).
using SheetFunction = std::function<std::vector<cplx>(cplx z, std::span<const cplx> hint)>;

/// Lifts the loop through the family by nearest matching with adaptive steps.
/// Throws BranchCollision when sheets come closer than the collision threshold.
MonodromyResult trace_branches(const SheetFunction& family, const LoopPath& loop, const TraceOptions& opts = {});
MonodromyResult trace_branches(const QuadDynamics& t, const LoopPath& loop, const TraceOptions& opts = {});
MonodromyResult trace_branches(const QuarticFamily& q, const LoopPath& loop, const TraceOptions& opts = {});

/// Traces `loop` d times and reports whether the two images of T are exchanged.
/// Requires 0 to be an odd-multiplicity root of p1^2 - p0 (PreconditionFailed otherwise).
bool omega_swap_check(const QuadDynamics& t, const LoopPath& loop, int d);

enum class Splitting { Type1, Type2, NoValidSplitting, Unconstrained };
std::string to_string(Splitting s);

/// Labels 0..3 stand for the genealogy 11, 12, 21, 22.
using PairPartition = std::array<std::array<int, 2>, 2>;
inline constexpr std::array<PairPartition, 3> kPairPartitions{{
    {{{0, 1}, {2, 3}}},  // descendants of one first-level image together
    {{{0, 2}, {1, 3}}},
    {{{0, 3}, {1, 2}}},
}};
std::string partition_name(int index);
std::string label_name(int label);

/// True when sigma maps each block of the partition onto itself.
bool preserves(std::span<const int> sigma, const PairPartition& p);

struct SplittingReport {
    cplx base;
    std::array<cplx, 2> first_level;
    /// Value carrying each label 11, 12, 21, 22 at the base point.
    std::array<cplx, 4> labelled;
    /// Label of each traced quartic sheet.
    std::array<int, 4> genealogy;
    /// Monodromy on labels: label l ends on label_permutation[l].
    std::vector<int> label_permutation;
    /// Indices into kPairPartitions.
    std::vector<int> preserved_partitions;
    Splitting classification = Splitting::Unconstrained;
    MonodromyResult monodromy;
};

SplittingReport classify_splitting(const QuadDynamics& t, const LoopPath& loop, const TraceOptions& opts = {});
SplittingReport classify_splitting(const QuadDynamics& t, const QuarticFamily& q, const LoopPath& loop,
                                   const TraceOptions& opts = {});

enum class Verdict { NotGroupDefinable, NecessaryConditionHolds, KnownGroupDefinable, Inconclusive };
std::string to_string(Verdict v);

struct ObstructionOptions {
    double radius_factor = 0.1;
    double min_radius = 1e-4;
    int samples = 256;
    /// Repeat both classifications at half the radius and require the same outcome.
    bool check_half_radius = true;
};

struct LoopVerdict {
    cplx center;
    double radius = 0;
    SplittingReport report;
    std::optional<SplittingReport> half_radius;
};

struct ObstructionReport {
    Verdict verdict = Verdict::Inconclusive;
    cplx shift;
    bool shift_exact = false;
    ComplexPoly shifted_p1;
    ComplexPoly shifted_p0;
    cplx z1;
    int z1_multiplicity = 0;
    /// z1 is also a root of the shifted p1, so T o T(z1) = [0, 0, ...].
    bool z1_root_of_p1 = false;
    std::optional<LoopVerdict> at_z1;
    std::optional<LoopVerdict> at_0;
    std::vector<std::string> diagnostics;
};

/// Shift-normalises T, picks an odd root z1 of p0 and classifies the splitting of T o T on
/// small loops about z1 and about 0. Throws PreconditionFailed when p0 has no odd root or
/// T is degenerate.
ObstructionReport obstruction_verdict(const QuadDynamics& t, const ObstructionOptions& opts = {});

/// Radius used for a loop about `center`: factor * distance to the nearest other point, floored.
double loop_radius(cplx center, std::span<const cplx> exceptional, const ObstructionOptions& opts);

struct SufficiencyReport {
    cplx c;
    /// eps after any perturbation.
    cplx eps;
    int perturbations = 0;
    cplx z1, z2;
    cplx z1p, z2p, z3p, z4p;
    CMultiset target;
    CMultiset image_z3;
    CMultiset image_z4;
    double mismatch_z3 = 0;
    double mismatch_z4 = 0;
    double tol = 0;
    bool certificate = false;
    std::string certificate_text;
};

/// Builds the four points of the counterexample for T = (c +- sqrt(gamma))^2. Throws
/// PreconditionFailed (gamma has fewer than two distinct roots, c == 0, eps too large) and
/// RootProximity (z3' and z4' never separate).
SufficiencyReport sufficiency_probe(cplx c, const ComplexPoly& gamma, cplx eps);

}  // namespace mvdyn
