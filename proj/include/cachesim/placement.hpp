#pragma once

// Uncoded placement. Each file splits into binom(K,t) sub-files indexed by
// the t-subsets of users that cache them; each sub-file further splits into
// t equal sub-pieces, one per owning user in the subset. Concatenating a
// file's sub-pieces in (holders colex, owner ascending) order reproduces it.

#include "cachesim/bitblock.hpp"
#include "cachesim/rng.hpp"
#include "cachesim/scenario.hpp"
#include "cachesim/subsets.hpp"

#include <cassert>
#include <cstdint>
#include <vector>

namespace cachesim {

struct SubPieceId {
    int file = 0;          // 1..N
    UserMask holders = 0;  // |holders| = t
    int owner = 0;         // member of holders

    friend bool operator==(const SubPieceId&, const SubPieceId&) = default;
};

// Linear index in (file, holders colex, owner position) order.
inline int64_t subpiece_index(const Scenario& s, const SubPieceId& id) {
    assert(id.file >= 1 && id.file <= s.N);
    assert(mask_size(id.holders) == s.t && mask_has(id.holders, id.owner));
    int64_t within = colex_rank(id.holders) * s.t + mask_index_of(id.holders, id.owner);
    return (id.file - 1) * s.subpieces_per_file() + within;
}

struct Database {
    std::vector<BitBlock> files;  // index q-1
};

inline Database generate_database(const Scenario& s, uint64_t seed) {
    Database db;
    db.files.reserve(s.N);
    for (int64_t q = 1; q <= s.N; ++q)
        db.files.push_back(random_bits(seed, static_cast<uint64_t>(q), s.F));
    return db;
}

struct SubPieceStore {
    Scenario scenario;
    std::vector<BitBlock> pieces;  // by subpiece_index

    const BitBlock& get(const SubPieceId& id) const {
        return pieces[subpiece_index(scenario, id)];
    }
};

inline SubPieceStore man_placement(const Scenario& s, const Database& db) {
    assert(static_cast<int64_t>(db.files.size()) == s.N);
    SubPieceStore store;
    store.scenario = s;
    store.pieces.reserve(s.N * s.subpieces_per_file());
    int64_t piece_bits = s.subpiece_bits();
    for (int64_t q = 1; q <= s.N; ++q) {
        const BitBlock& file = db.files[q - 1];
        assert(file.size_bits() == static_cast<size_t>(s.F));
        int64_t offset = 0;
        for_each_subset(static_cast<int>(s.K), static_cast<int>(s.t), [&](UserMask holders) {
            (void)holders;
            for (int64_t j = 0; j < s.t; ++j) {
                store.pieces.push_back(file.slice(offset, piece_bits));
                offset += piece_bits;
            }
        });
        assert(offset == s.F);
    }
    return store;
}

// Sub-piece ids cached by one user, in canonical order.
inline std::vector<SubPieceId> cache_of(const Scenario& s, int user) {
    std::vector<SubPieceId> ids;
    for (int q = 1; q <= s.N; ++q)
        for_each_subset(static_cast<int>(s.K), static_cast<int>(s.t), [&](UserMask holders) {
            if (!mask_has(holders, user)) return;
            for (int owner : mask_members(holders)) ids.push_back({q, holders, owner});
        });
    return ids;
}

// Read access restricted to one user's cache; decoding paths go through this
// so a decoder can never touch bits its user does not hold.
class CacheView {
public:
    CacheView(const SubPieceStore& store, int user) : store_(store), user_(user) {}

    int user() const { return user_; }

    bool holds(const SubPieceId& id) const { return mask_has(id.holders, user_); }

    const BitBlock& get(const SubPieceId& id) const {
        assert(holds(id));
        return store_.get(id);
    }

private:
    const SubPieceStore& store_;
    int user_;
};

// Reassemble one file from a complete sub-piece map (canonical order).
template <typename Lookup>
inline BitBlock assemble_file(const Scenario& s, int file, Lookup&& lookup) {
    BitBlock out;
    for_each_subset(static_cast<int>(s.K), static_cast<int>(s.t), [&](UserMask holders) {
        for (int owner : mask_members(holders))
            out.append(lookup(SubPieceId{file, holders, owner}));
    });
    assert(out.size_bits() == static_cast<size_t>(s.F));
    return out;
}

}  // namespace cachesim
