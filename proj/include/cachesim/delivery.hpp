#pragma once

// One-shot device-to-device delivery.
//
// Sender i forms, for every t-subset A of [K]\{i}, the codeword
//   Y^i_A = xor over k in A of W_{d_k, (A+{i})\{k}, i}
// and broadcasts only those with A intersecting its leader set U^i (one
// representative per distinct file requested by the others). Receivers
// reconstruct the suppressed codewords from the broadcast ones via the
// exact-cover XOR identity and then cancel cached sub-pieces. Every
// recovered sub-piece is a function of a single sender's codewords plus the
// receiver's own cache; the decoder records that provenance so it can be
// audited.

#include "cachesim/demand.hpp"
#include "cachesim/placement.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace cachesim {

enum class LeaderRule { lowest_index, highest_index };

// One user per distinct file among [K]\{sender}.
inline UserMask select_leaders(const Demand& d, int sender, LeaderRule rule) {
    int K = static_cast<int>(d.size());
    UserMask leaders = 0;
    std::vector<bool> seen(static_cast<size_t>(*std::max_element(d.begin(), d.end())) + 1, false);
    auto visit = [&](int user) {
        if (user == sender) return;
        int file = d[static_cast<size_t>(user - 1)];
        if (!seen[static_cast<size_t>(file)]) {
            seen[static_cast<size_t>(file)] = true;
            leaders |= user_bit(user);
        }
    };
    if (rule == LeaderRule::lowest_index)
        for (int u = 1; u <= K; ++u) visit(u);
    else
        for (int u = K; u >= 1; --u) visit(u);
    return leaders;
}

struct Codeword {
    int sender = 0;
    UserMask targets = 0;              // |targets| = t, sender excluded
    BitBlock payload;
    std::vector<SubPieceId> sources;   // XOR constituents; owner == sender
};

inline Codeword build_codeword(const SubPieceStore& store, const Demand& d, int sender,
                               UserMask targets) {
    const Scenario& s = store.scenario;
    assert(mask_size(targets) == s.t && !mask_has(targets, sender));
    Codeword cw;
    cw.sender = sender;
    cw.targets = targets;
    cw.payload = BitBlock(static_cast<size_t>(s.subpiece_bits()));
    for (int k : mask_members(targets)) {
        SubPieceId id{d[static_cast<size_t>(k - 1)],
                      (targets | user_bit(sender)) & ~user_bit(k), sender};
        cw.payload.xor_in(store.get(id));
        cw.sources.push_back(id);
    }
    return cw;
}

struct SenderLog {
    int sender = 0;
    UserMask leaders = 0;
    std::vector<Codeword> codewords;  // ascending colex target order
};

struct TransmissionLog {
    Scenario scenario;
    Demand demand;
    std::vector<SenderLog> senders;  // index sender-1

    int64_t total_codewords() const {
        int64_t n = 0;
        for (const auto& sl : senders) n += static_cast<int64_t>(sl.codewords.size());
        return n;
    }

    // Broadcast bits divided by F, exact.
    Rational measured_load() const {
        return Rational(total_codewords(), scenario.subpieces_per_file());
    }

    const Codeword* find(int sender, UserMask targets) const {
        const auto& list = senders[static_cast<size_t>(sender - 1)].codewords;
        auto it = std::lower_bound(list.begin(), list.end(), targets,
                                   [](const Codeword& c, UserMask m) { return c.targets < m; });
        if (it == list.end() || it->targets != targets) return nullptr;
        return &*it;
    }
};

inline int64_t expected_codeword_count(const Scenario& s, int64_t distinct_others) {
    return (binom(s.K - 1, s.t) - binom(s.K - 1 - distinct_others, s.t)).convert_to<int64_t>();
}

inline TransmissionLog transmit_all(const SubPieceStore& store, const Demand& d,
                                    LeaderRule rule = LeaderRule::lowest_index) {
    const Scenario& s = store.scenario;
    validate_demand(s, d);
    TransmissionLog log;
    log.scenario = s;
    log.demand = d;
    log.senders.resize(static_cast<size_t>(s.K));
    for (int i = 1; i <= s.K; ++i) {
        SenderLog& sl = log.senders[static_cast<size_t>(i - 1)];
        sl.sender = i;
        sl.leaders = select_leaders(d, i, rule);
        UserMask ground = full_mask(static_cast<int>(s.K)) & ~user_bit(i);
        for_each_subset_of(ground, static_cast<int>(s.t), [&](UserMask targets) {
            if ((targets & sl.leaders) == 0) return;  // suppressed: derivable
            sl.codewords.push_back(build_codeword(store, d, i, targets));
        });
        assert(static_cast<int64_t>(sl.codewords.size()) ==
               expected_codeword_count(s, distinct_in(d, ground)));
    }
    return log;
}

// All V inside C picking exactly one demander of every file requested by
// [K]\{sender}. Requires C to contain at least one demander per such file.
inline std::vector<UserMask> exact_cover_family(const Demand& d, int sender, UserMask C) {
    int K = static_cast<int>(d.size());
    std::map<int, std::vector<int>> candidates;  // file -> demanders inside C
    for (int u = 1; u <= K; ++u) {
        if (u == sender) continue;
        if (mask_has(C, u)) candidates[d[static_cast<size_t>(u - 1)]].push_back(u);
    }
    // files demanded outside C but not inside make the family empty
    for (int u = 1; u <= K; ++u) {
        if (u == sender) continue;
        if (!candidates.count(d[static_cast<size_t>(u - 1)])) return {};
    }
    std::vector<UserMask> family = {0};
    for (auto& [file, users] : candidates) {
        (void)file;
        std::vector<UserMask> next;
        next.reserve(family.size() * users.size());
        for (UserMask partial : family)
            for (int u : users) next.push_back(partial | user_bit(u));
        family = std::move(next);
    }
    return family;
}

struct Lemma1Result {
    bool holds = false;
    bool degenerate = false;  // XOR of empty codewords; holds vacuously
};

// xor over V in family of Y^sender_{C \ V} vanishes whenever C >= U^sender.
inline Lemma1Result lemma1_null_check(const SubPieceStore& store, const Demand& d, int sender,
                                      UserMask C, LeaderRule rule = LeaderRule::lowest_index) {
    const Scenario& s = store.scenario;
    UserMask leaders = select_leaders(d, sender, rule);
    if ((C & leaders) != leaders || mask_has(C, sender))
        throw std::invalid_argument("lemma1: C must contain the leader set and not the sender");
    auto family = exact_cover_family(d, sender, C);
    assert(!family.empty());
    int64_t cover_size = mask_size(family.front());
    if (mask_size(C) - cover_size != s.t)
        return {true, true};  // every Y^sender_{C\V} is an empty XOR
    BitBlock acc(static_cast<size_t>(s.subpiece_bits()));
    for (UserMask V : family)
        acc.xor_in(build_codeword(store, d, sender, C & ~V).payload);
    return {acc.is_zero(), false};
}

struct PieceProvenance {
    SubPieceId id;
    bool cached = false;
    int sender = 0;                                    // 0 when cached
    std::vector<std::pair<int, int64_t>> codeword_refs;  // (sender, index in its log)
};

struct RecoveredPiece {
    BitBlock bits;
    PieceProvenance provenance;  // provenance.id names the sub-piece
};

// Sub-pieces of the cache user's demanded file recoverable from sender i's
// codewords plus that cache alone, in colex order of the residual holders.
inline std::vector<RecoveredPiece> recover_from_sender(const TransmissionLog& log,
                                                       const CacheView& cache, int i) {
    const Scenario& s = log.scenario;
    const Demand& d = log.demand;
    int k = cache.user();
    int want = d[static_cast<size_t>(k - 1)];
    assert(i != k);

    std::vector<RecoveredPiece> out;
    const SenderLog& sl = log.senders[static_cast<size_t>(i - 1)];
    UserMask others = full_mask(static_cast<int>(s.K)) & ~user_bit(i) & ~user_bit(k);
    for_each_subset_of(others, static_cast<int>(s.t - 1), [&](UserMask rest) {
        SubPieceId target{want, rest | user_bit(i), i};
        UserMask A = rest | user_bit(k);

        PieceProvenance prov;
        prov.id = target;
        prov.sender = i;

        BitBlock codeword(static_cast<size_t>(s.subpiece_bits()));
        if ((A & sl.leaders) != 0) {
            const Codeword* direct = log.find(i, A);
            assert(direct != nullptr);
            codeword = direct->payload;
            prov.codeword_refs.emplace_back(
                i, direct - sl.codewords.data());
        } else {
            // reconstruct the suppressed Y^i_A: C = A + U^i, and every
            // V != U^i in the cover family leaves a leader inside C\V
            UserMask C = A | sl.leaders;
            for (UserMask V : exact_cover_family(d, i, C)) {
                if (V == sl.leaders) continue;
                const Codeword* part = log.find(i, C & ~V);
                assert(part != nullptr);
                codeword.xor_in(part->payload);
                prov.codeword_refs.emplace_back(
                    i, part - sl.codewords.data());
            }
        }

        // cancel the cached sub-pieces of the other targeted users
        for (int j : mask_members(A)) {
            if (j == k) continue;
            SubPieceId held{d[static_cast<size_t>(j - 1)],
                            (A | user_bit(i)) & ~user_bit(j), i};
            codeword.xor_in(cache.get(held));
        }
        out.push_back({std::move(codeword), std::move(prov)});
    });
    return out;
}

struct DecodeResult {
    int user = 0;
    BitBlock file;
    std::vector<PieceProvenance> provenance;  // canonical sub-piece order
};

// Recover W_{d_k} for user k from the log plus k's cache only.
inline DecodeResult decode_all(const TransmissionLog& log, const CacheView& cache) {
    const Scenario& s = log.scenario;
    const Demand& d = log.demand;
    int k = cache.user();
    int want = d[static_cast<size_t>(k - 1)];

    DecodeResult result;
    result.user = k;
    std::map<int64_t, BitBlock> recovered;  // subpiece_index -> bits

    for (int i = 1; i <= s.K; ++i) {
        if (i == k) continue;
        for (RecoveredPiece& piece : recover_from_sender(log, cache, i)) {
            recovered.emplace(subpiece_index(s, piece.provenance.id), std::move(piece.bits));
            result.provenance.push_back(std::move(piece.provenance));
        }
    }

    result.file = assemble_file(s, want, [&](const SubPieceId& id) -> BitBlock {
        if (cache.holds(id)) {
            PieceProvenance prov;
            prov.id = id;
            prov.cached = true;
            result.provenance.push_back(prov);
            return cache.get(id);
        }
        auto it = recovered.find(subpiece_index(s, id));
        assert(it != recovered.end());
        return it->second;
    });
    return result;
}

// Each non-cached sub-piece must come from exactly one sender's codewords,
// all references valid; cached ones must use none.
inline bool one_shot_audit(const TransmissionLog& log, const DecodeResult& result) {
    for (const auto& prov : result.provenance) {
        if (prov.cached) {
            if (!prov.codeword_refs.empty()) return false;
            continue;
        }
        if (prov.codeword_refs.empty()) return false;
        for (const auto& [sender, idx] : prov.codeword_refs) {
            if (sender != prov.sender) return false;
            const auto& list = log.senders[static_cast<size_t>(sender - 1)].codewords;
            if (idx < 0 || idx >= static_cast<int64_t>(list.size())) return false;
        }
        if (prov.id.owner != prov.sender) return false;
    }
    return true;
}

}  // namespace cachesim
