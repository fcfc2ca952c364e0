#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvdyn/gauss.hpp"

namespace mvdyn {

/// An element of Sym^m(C): m complex values, order irrelevant.
class CMultiset {
public:
    CMultiset() = default;
    CMultiset(std::initializer_list<cplx> v) : values_(v) {}
    explicit CMultiset(std::vector<cplx> v) : values_(std::move(v)) {}

    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    std::span<const cplx> values() const { return values_; }
    cplx operator[](std::size_t i) const { return values_[i]; }
    double max_abs() const;

private:
    std::vector<cplx> values_;
};

struct Matching {
    bool matched = false;
    /// Bottleneck distance: min over pairings of the max pair distance.
    double distance = 0;
    /// pairing[i] is the index in the second operand matched to a[i].
    std::vector<int> pairing;
};

/// Optimal bottleneck pairing; brute force over permutations for m <= 4, threshold
/// bipartite matching beyond. Throws SizeMismatch.
Matching bottleneck_match(const CMultiset& a, const CMultiset& b);

/// matched == (bottleneck distance <= tol).
Matching matches(const CMultiset& a, const CMultiset& b, double tol);

/// 1e-8 * (1 + largest magnitude in either operand).
double default_tol(const CMultiset& a, const CMultiset& b);

CMultiset concat(const CMultiset& a, const CMultiset& b);

/// |v0 - v1| for a 2-multiset; throws SizeMismatch otherwise.
double diagonal_distance(const CMultiset& a);

/// Smallest pairwise distance; +inf for fewer than two values.
double min_separation(std::span<const cplx> v);

/// `[a, b, ...]` with complex literals in polynomial-coefficient form.
std::string to_string(const CMultiset& m);
CMultiset parse_multiset(std::string_view text);

}  // namespace mvdyn
