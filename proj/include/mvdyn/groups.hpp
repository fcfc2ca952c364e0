#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvdyn/dynamics.hpp"
#include "mvdyn/monodromy.hpp"

namespace mvdyn {

/// A finite 2-valued multiplication table. Elements are indices into `carrier`.
struct TwoValuedTable {
    std::vector<std::string> carrier;
    std::map<std::pair<int, int>, std::array<int, 2>> mult;
    int unit = 0;
    std::vector<int> inv;

    int size() const { return static_cast<int>(carrier.size()); }
    /// Throws PreconditionFailed for names not in the carrier.
    int id(std::string_view name) const;
    std::optional<std::array<int, 2>> product(int x, int y) const;
};

/// Parses the line format
///   carrier: e a b
///   unit: e
///   inv: e e, a b, b a
///   a,b -> [e, a]
/// Blank lines and `#` comments are ignored. Throws ParseError.
TwoValuedTable parse_table(std::string_view text);
std::string to_text(const TwoValuedTable& t);

/// Z+ with n * m = [n + m, |n - m|], unit 0, inverse the identity.
struct BNGroup {
    int bound = 20;
    static std::array<int, 2> product(int n, int m) { return {n + m, n > m ? n - m : m - n}; }
};

struct AxiomViolation {
    std::string law;
    std::vector<int> elements;
    std::string detail;
};

struct AxiomReport {
    long checked = 0;
    std::vector<AxiomViolation> violations;
    bool ok() const { return violations.empty(); }
};

AxiomReport check_associativity(const TwoValuedTable& t);
/// All triples in 0..bound.
AxiomReport check_associativity(const BNGroup& g, int bound);
AxiomReport check_unit_inverse(const TwoValuedTable& t);
AxiomReport check_unit_inverse(const BNGroup& g, int bound);

struct ClosureResult {
    std::vector<int> elements;
    bool whole_carrier = false;
    /// Some product left the finite window and was dropped.
    bool saturated = false;
};

ClosureResult subgroup_closure(const TwoValuedTable& t, int a);
ClosureResult subgroup_closure(const BNGroup& g, int a);

/// [(n + sqrt z)^2, (n - sqrt z)^2] with the principal root.
CMultiset bn_action(int n, cplx z);

/// A 2-valued group on 0..bound acting on C.
struct ActionSpec {
    std::string name;
    int unit = 0;
    int bound = 0;
    std::function<std::array<int, 2>(int, int)> mult;
    std::function<CMultiset(int, cplx)> nu;

    static ActionSpec buchstaber_novikov(int bound);
};

struct ActionReport {
    long checked = 0;
    double max_distance = 0;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// nu(a1, nu(a2, s)) == nu(a1 * a2, s) for a1, a2 <= pairs_bound, and nu(e, s) == [s, s].
ActionReport verify_action(const ActionSpec& spec, int pairs_bound, std::span<const cplx> points, double tol);

/// T = sigma^-1 o nu(1, .) o sigma with sigma(z) = lambda z + mu; lambda == 0 encodes T = nu(0, .).
struct BNConjugacy {
    cplx lambda;
    cplx mu;
    double max_mismatch = 0;
};

/// Exact structural match of T to an affine conjugate of (1 +- sqrt z)^2, or to [z, z].
std::optional<BNConjugacy> bn_structural_match(const QuadDynamics& t);

struct DefinabilityReport {
    Verdict verdict = Verdict::Inconclusive;
    std::optional<bool> p0_perfect_square;
    std::optional<ComplexPoly> p0_root;
    cplx shift{};
    std::optional<SqrtSquareForm> form;
    std::optional<BNConjugacy> bn;
    std::optional<ObstructionReport> obstruction;
    std::optional<SufficiencyReport> sufficiency;
    std::vector<std::string> notes;
};

DefinabilityReport group_definability_report(const QuadDynamics& t);

}  // namespace mvdyn
