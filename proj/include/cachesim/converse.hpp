#pragma once

// Small-instance numerical verifier of the converse machinery: permutation
// pruning, acyclic-set inequalities over per-sender side-information graphs,
// brute-forced coefficient ledgers with their symmetry properties, and the
// per-type converse value that meets the achievable load exactly.

#include "cachesim/bounds.hpp"
#include "cachesim/combinatorics.hpp"
#include "cachesim/demand.hpp"
#include "cachesim/envelope.hpp"
#include "cachesim/rational.hpp"
#include "cachesim/scenario.hpp"
#include "cachesim/subsets.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace cachesim {

// Successive pruning: keep, for each distinct demanded file, the leftmost
// user of u demanding it. |result| = number of distinct files demanded in u.
inline std::vector<int> prune(const std::vector<int>& u, const Demand& d) {
    std::vector<int> f;
    std::set<int> seen_files;
    for (int user : u) {
        if (user < 1 || size_t(user) > d.size())
            throw std::invalid_argument("prune: user outside demand range");
        if (seen_files.insert(d[size_t(user) - 1]).second) f.push_back(user);
    }
    return f;
}

inline void check_permutation(int i, const std::vector<int>& u, int64_t K) {
    if (u.size() != size_t(K - 1))
        throw std::invalid_argument("converse: u must permute the other users");
    UserMask seen = 0;
    for (int user : u) {
        if (user < 1 || user > K || user == i || mask_has(seen, user))
            throw std::invalid_argument("converse: u must permute the other users");
        seen |= user_bit(user);
    }
}

// Size of sub-piece of file d_k with holder set V, owned by i, in file units.
using SubPieceSize = std::function<Rational(int k, int i, UserMask V)>;

// The uniform one-shot scheme: every sub-file with |V| = t splits into t
// owner pieces of 1/(t binom(K,t)) each; everything else has size zero.
inline SubPieceSize uniform_scheme_sizes(const Scenario& s) {
    Rational piece(1, s.t * binom(s.K, s.t));
    int64_t t = s.t;
    return [piece, t](int k, int i, UserMask V) -> Rational {
        if (mask_size(V) != t || !mask_has(V, i) || mask_has(V, k)) return 0;
        return piece;
    };
}

// RHS of the acyclic-set inequality for sender i and permutation u:
//   sum over levels j, over V_j subseteq [K] \ {f_1..f_j} with i in V_j,
//   of |W^{f_j, i}_{d_{f_j}, V_j}|.
inline Rational acyclic_rhs(int i, const std::vector<int>& u, const Demand& d,
                            const SubPieceSize& sizes) {
    int64_t K = int64_t(d.size());
    if (K > 16) throw std::invalid_argument("acyclic_rhs: K too large");
    check_permutation(i, u, K);
    std::vector<int> f = prune(u, d);
    Rational total = 0;
    UserMask removed = 0;
    for (int fj : f) {
        removed |= user_bit(fj);
        UserMask ground = full_mask(K) & ~removed & ~user_bit(i);
        for (UserMask sub = ground;; sub = (sub - 1) & ground) {
            total += sizes(fj, i, sub | user_bit(i));
            if (sub == 0) break;
        }
    }
    return total;
}

// ---- acyclicity audit ------------------------------------------------------

struct ConverseNode {
    int demander = 0;
    int owner = 0;
    int file = 0;
    UserMask holders = 0;
};

// Level-j nodes for sender i: pieces of file d_{f_j} with holder sets of
// size t avoiding the pruned prefix and containing i.
inline std::vector<ConverseNode> build_converse_nodes(int i, const std::vector<int>& u,
                                                      const Demand& d, int64_t t) {
    int64_t K = int64_t(d.size());
    check_permutation(i, u, K);
    std::vector<int> f = prune(u, d);
    std::vector<ConverseNode> nodes;
    UserMask removed = 0;
    for (int fj : f) {
        removed |= user_bit(fj);
        UserMask ground = full_mask(K) & ~removed;
        for_each_subset_of(ground, t, [&](UserMask V) {
            if (!mask_has(V, i)) return;
            nodes.push_back({fj, i, d[size_t(fj) - 1], V});
        });
    }
    return nodes;
}

// Side-information digraph: edge n1 -> n2 iff the demander of n1 caches the
// sub-piece of n2. True iff no directed cycle (Kahn's algorithm).
inline bool is_acyclic(const std::vector<ConverseNode>& nodes) {
    size_t n = nodes.size();
    std::vector<std::vector<size_t>> out(n);
    std::vector<size_t> indeg(n, 0);
    for (size_t a = 0; a < n; ++a)
        for (size_t b = 0; b < n; ++b)
            if (mask_has(nodes[b].holders, nodes[a].demander)) {
                out[a].push_back(b);
                ++indeg[b];
            }
    std::vector<size_t> ready;
    for (size_t v = 0; v < n; ++v)
        if (indeg[v] == 0) ready.push_back(v);
    size_t seen = 0;
    while (!ready.empty()) {
        size_t v = ready.back();
        ready.pop_back();
        ++seen;
        for (size_t w : out[v])
            if (--indeg[w] == 0) ready.push_back(w);
    }
    return seen == n;
}

inline bool acyclicity_audit(int i, const std::vector<int>& u, const Demand& d,
                             const Scenario& s) {
    return is_acyclic(build_converse_nodes(i, u, d, s.t));
}

// ---- coefficient ledger ----------------------------------------------------

constexpr int64_t kMaxLedgerUsers = 8;

struct CoefficientLedger {
    int64_t K = 0;
    Demand d;
    // counts[(k, i, V)]: appearances of the sub-piece demanded by k, owned by
    // i, with holder set V, across the (K-1)! permutations of sender i.
    std::map<std::tuple<int, int, UserMask>, int64_t> counts;

    int64_t count(int k, int i, UserMask V) const {
        auto it = counts.find({k, i, V});
        return it == counts.end() ? 0 : it->second;
    }

    // The symmetry lemma: the count depends on the owner only through
    // membership in V.
    bool symmetry_holds() const {
        for (const auto& [key, cnt] : counts) {
            auto [k, i, V] = key;
            if (!mask_has(V, i) || mask_has(V, k)) return false;
            for (int j : mask_members(V))
                if (count(k, j, V) != cnt) return false;
        }
        return true;
    }

    // a^k_V: the owner-averaged count normalized by (K-1)!. When the
    // owner-symmetry property holds this is the common per-owner value; in
    // general it is the coefficient an owner-even placement sees exactly.
    Rational a_coeff(int k, UserMask V) const {
        if (V == 0) return 0;
        BigInt owner_sum = 0;
        for (int i : mask_members(V)) owner_sum += count(k, i, V);
        return Rational(owner_sum, BigInt(mask_size(V)) * factorial(K - 1));
    }
};

inline CoefficientLedger ledger_build(int64_t K, const Demand& d) {
    if (K < 2 || K > kMaxLedgerUsers)
        throw std::invalid_argument("ledger_build: K infeasible for brute force");
    if (int64_t(d.size()) != K)
        throw std::invalid_argument("ledger_build: demand length != K");
    CoefficientLedger ledger;
    ledger.K = K;
    ledger.d = d;
    for (int i = 1; i <= K; ++i) {
        std::vector<int> u;
        for (int j = 1; j <= K; ++j)
            if (j != i) u.push_back(j);
        do {
            std::vector<int> f = prune(u, d);
            UserMask removed = 0;
            for (int fj : f) {
                removed |= user_bit(fj);
                UserMask ground = full_mask(K) & ~removed & ~user_bit(i);
                for (UserMask sub = ground;; sub = (sub - 1) & ground) {
                    ++ledger.counts[{fj, i, sub | user_bit(i)}];
                    if (sub == 0) break;
                }
            }
        } while (std::next_permutation(u.begin(), u.end()));
    }
    return ledger;
}

// Weighted RHS of the summed inequality under given sub-piece sizes, in file
// units: (1/(K-1)!) sum_{k,V,i} a^{k,i}_V |W^{k,i}_{d_k,V}|. Under the
// uniform scheme sizes this equals the per-demand load exactly.
inline Rational ledger_weighted_rhs(const CoefficientLedger& ledger,
                                    const SubPieceSize& sizes) {
    Rational total = 0;
    for (const auto& [key, cnt] : ledger.counts) {
        auto [k, i, V] = key;
        total += Rational(cnt) * sizes(k, i, V);
    }
    return total / Rational(factorial(ledger.K - 1));
}

// ---- per-type aggregation --------------------------------------------------

struct TypeLedger {
    int64_t N = 0, K = 0;
    Composition type;
    BigInt num_demands = 0;
    // b[(q, V)]: coefficient of |W_{q,V}| after summing over the type.
    std::map<std::pair<int, UserMask>, Rational> b;

    Rational b_coeff(int q, UserMask V) const {
        auto it = b.find({q, V});
        return it == b.end() ? Rational(0) : it->second;
    }

    // b_{q,V} must depend only on |V| once the whole type is summed.
    bool b_symmetric() const {
        std::map<int64_t, Rational> per_size;
        for (int q = 1; q <= N; ++q) {
            for (UserMask V = 1; V < (UserMask(1) << K); ++V) {
                Rational val = b_coeff(q, V);
                auto [it, fresh] = per_size.try_emplace(mask_size(V), val);
                if (!fresh && it->second != val) return false;
            }
        }
        return true;
    }

    Rational b_t(int64_t t) const {
        if (t < 1 || t > K) throw std::invalid_argument("b_t: t out of range");
        for (int q = 1; q <= N; ++q)
            for (UserMask V = 1; V < (UserMask(1) << K); ++V)
                if (mask_size(V) == t) return b_coeff(q, V);
        return 0;
    }
};

inline Rational b_t_closed_form(int64_t N, int64_t K, int64_t t,
                                const Composition& type) {
    Demand rep = demand_from_composition(type, K);
    BigInt sum_i = 0;
    for (int i = 1; i <= K; ++i)
        sum_i += binom(K - 1, t) - binom(K - 1 - n_distinct_excluding(rep, i), t);
    return Rational(demand_count(type, K) * sum_i, t * N * binom(K, t));
}

inline TypeLedger type_ledger_build(int64_t N, int64_t K, const Composition& type) {
    if (K < 2 || K > kMaxLedgerUsers)
        throw std::invalid_argument("type_ledger_build: K infeasible");
    TypeLedger out;
    out.N = N;
    out.K = K;
    out.type = type;
    for_each_demand(N, K, [&](const Demand& d) {
        if (composition_of(d, N) != type) return;
        out.num_demands += 1;
        CoefficientLedger ledger = ledger_build(K, d);
        std::map<std::pair<int, UserMask>, bool> seen;
        for (const auto& [key, cnt] : ledger.counts) {
            auto [k, i, V] = key;
            (void)i;
            (void)cnt;
            if (!seen.emplace(std::make_pair(k, V), true).second) continue;
            out.b[{d[size_t(k) - 1], V}] += ledger.a_coeff(k, V);
        }
    });
    return out;
}

// ---- per-type converse value -----------------------------------------------

// Corner loads r_{t,s} in file units at memory points M_t = tN/K; the
// converse is their lower convex envelope evaluated at the scenario memory.
inline std::vector<CurvePoint> type_corner_points(int64_t N, int64_t K,
                                                  const Composition& type) {
    std::vector<CurvePoint> points;
    for (int64_t t = 1; t <= K; ++t) {
        CurvePoint p;
        p.t = t;
        p.M = Rational(N * t, K);
        p.R = d2d_per_demand(K, t, type);
        p.boundary = t == K;
        points.push_back(std::move(p));
    }
    return points;
}

inline Rational converse_value_at(int64_t N, int64_t K, const Rational& M,
                                  const Composition& type) {
    return eval_envelope(lower_convex_envelope(type_corner_points(N, K, type)), M);
}

inline Rational converse_value(const Scenario& s, const Composition& type) {
    return converse_value_at(s.N, s.K, s.M, type);
}

}  // namespace cachesim
