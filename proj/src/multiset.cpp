#include "mvdyn/multiset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mvdyn/error.hpp"

namespace mvdyn {

double CMultiset::max_abs() const {
    double m = 0;
    for (auto v : values_) m = std::max(m, std::abs(v));
    return m;
}

namespace {

Matching brute_force(const CMultiset& a, const CMultiset& b) {
    std::vector<int> perm(b.size());
    std::iota(perm.begin(), perm.end(), 0);
    Matching best;
    best.distance = std::numeric_limits<double>::infinity();
    double best_sum = best.distance;
    do {
        double worst = 0;
        double sum = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            double d = std::abs(a[i] - b[perm[i]]);
            worst = std::max(worst, d);
            sum += d;
        }
        if (worst < best.distance || (worst == best.distance && sum < best_sum)) {
            best.distance = worst;
            best_sum = sum;
            best.pairing = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Kuhn's augmenting paths restricted to edges with distance <= limit.
bool perfect_within(const CMultiset& a, const CMultiset& b, double limit, std::vector<int>& pairing) {
    const std::size_t n = a.size();
    std::vector<int> owner(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<char> seen(n, 0);
        auto augment = [&](auto&& self, std::size_t u) -> bool {
            for (std::size_t v = 0; v < n; ++v) {
                if (seen[v] || std::abs(a[u] - b[v]) > limit) continue;
                seen[v] = 1;
                if (owner[v] < 0 || self(self, static_cast<std::size_t>(owner[v]))) {
                    owner[v] = static_cast<int>(u);
                    return true;
                }
            }
            return false;
        };
        if (!augment(augment, i)) return false;
    }
    pairing.assign(n, -1);
    for (std::size_t v = 0; v < n; ++v) pairing[owner[v]] = static_cast<int>(v);
    return true;
}

Matching threshold_search(const CMultiset& a, const CMultiset& b) {
    std::vector<double> d;
    for (auto x : a.values())
        for (auto y : b.values()) d.push_back(std::abs(x - y));
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    std::size_t lo = 0, hi = d.size() - 1;
    std::vector<int> pairing;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (perfect_within(a, b, d[mid], pairing)) hi = mid;
        else lo = mid + 1;
    }
    perfect_within(a, b, d[lo], pairing);
    return {false, d[lo], pairing};
}

}  // namespace

Matching bottleneck_match(const CMultiset& a, const CMultiset& b) {
    if (a.size() != b.size())
        throw Error(ErrorCode::SizeMismatch, "multisets of sizes " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
    if (a.empty()) return {true, 0, {}};
    return a.size() <= 4 ? brute_force(a, b) : threshold_search(a, b);
}

Matching matches(const CMultiset& a, const CMultiset& b, double tol) {
    Matching m = bottleneck_match(a, b);
    m.matched = m.distance <= tol;
    return m;
}

double default_tol(const CMultiset& a, const CMultiset& b) { return 1e-8 * (1 + std::max(a.max_abs(), b.max_abs())); }

CMultiset concat(const CMultiset& a, const CMultiset& b) {
    std::vector<cplx> v(a.values().begin(), a.values().end());
    v.insert(v.end(), b.values().begin(), b.values().end());
    return CMultiset(std::move(v));
}

double diagonal_distance(const CMultiset& a) {
    if (a.size() != 2) throw Error(ErrorCode::SizeMismatch, "diagonal distance needs a 2-multiset");
    return std::abs(a[0] - a[1]);
}

double min_separation(std::span<const cplx> v) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) m = std::min(m, std::abs(v[i] - v[j]));
    return m;
}

std::string to_string(const CMultiset& m) {
    std::string out = "[";
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i) out += ", ";
        out += format_complex(m[i]);
    }
    return out + "]";
}

CMultiset parse_multiset(std::string_view text) {
    auto first = text.find_first_not_of(" \t\n");
    auto last = text.find_last_not_of(" \t\n");
    if (first == std::string_view::npos || text[first] != '[' || text[last] != ']')
        throw Error(ErrorCode::ParseError, "multiset must be written as [a, b, ...]");
    std::string_view body = text.substr(first + 1, last - first - 1);
    std::vector<cplx> v;
    if (body.find_first_not_of(" \t\n") == std::string_view::npos) return CMultiset();
    std::size_t start = 0;
    while (true) {
        std::size_t comma = body.find(',', start);
        v.push_back(parse_complex(body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return CMultiset(std::move(v));
}

}  // namespace mvdyn
