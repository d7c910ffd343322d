// Reasoning for the ontology fragment: a depth-bounded restricted chase,
// ABox consistency and Boolean CQ/UCQ containment.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hkb/core.hpp"

namespace hkb {

/// Existentially closed conjunction of DL atoms.
struct BooleanCQ {
    std::vector<Atom> atoms;

    auto operator<=>(const BooleanCQ&) const = default;
};

/// Disjunction of Boolean CQs; the empty disjunction is false.
struct BooleanUCQ {
    std::vector<BooleanCQ> disjuncts;
};

std::string to_string(const BooleanCQ& q);

/// Labeled nulls are constants whose names start with this prefix, which
/// the surface syntax cannot produce.
inline constexpr const char* kNullPrefix = "_n";
/// Frozen query variables use this prefix.
inline constexpr const char* kFrozenPrefix = "_f";

bool is_null(const Term& t);

struct CanonicalInstance {
    std::set<Atom> atoms;
    std::map<std::string, int> depth;  // nulls only; constants have depth 0
    bool clash = false;
    std::string clash_detail;
    int next_null = 0;

    bool contains(const Atom& a) const { return atoms.count(a) > 0; }
};

/// Chases `seed` (ground atoms over constants or frozen variables) under
/// the TBox. Nulls are created only below `depth_bound`.
CanonicalInstance chase(const std::vector<Atom>& seed, const TBox& tbox, int depth_bound);

/// Adds atoms to an existing instance and continues the chase.
void extend(CanonicalInstance& inst, const std::vector<Atom>& atoms, const TBox& tbox, int depth_bound);

bool is_abox_consistent(const TBox& tbox, const std::vector<Atom>& abox);

/// Maps the query into the instance: constants map to themselves,
/// variables to any element.
bool has_homomorphism(const BooleanCQ& q, const CanonicalInstance& inst);

/// Replaces each variable X of q by the constant `_fX` plus `suffix`.
std::vector<Atom> freeze(const BooleanCQ& q, const std::string& suffix = "");

/// Largest atom count over the disjuncts of q2 (at least 1).
int default_depth_bound(const BooleanUCQ& q2);

/// Depth at which every unsatisfiable existential filler has shown its clash.
int clash_depth(const TBox& tbox);

/// T ⊨ q1 → q2: the chase of frozen q1 clashes or some disjunct of q2
/// maps into it. Without an explicit bound the chase runs to the larger of
/// default_depth_bound(q2) and clash_depth(tbox).
bool cq_ucq_containment(const TBox& tbox, const BooleanCQ& q1, const BooleanUCQ& q2,
                        std::optional<int> depth_bound = std::nullopt);

}  // namespace hkb
