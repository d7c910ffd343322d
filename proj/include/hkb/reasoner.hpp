// Nonmonotonic satisfiability of hybrid KBs by guessing how the DL parts of
// the program are settled, and ground entailment on top of it.
#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hkb/core.hpp"
#include "hkb/datalog.hpp"
#include "hkb/dl.hpp"

namespace hkb {

struct GroundingUnit {
    enum class Kind { body_cq, head_atom };
    Kind kind = Kind::body_cq;  // kind of the first occurrence; merged units keep it
    BooleanCQ cq;               // existential variables survive in body units
    std::string key;            // canonical text, used for merging and ordering
};

/// A rule instantiated on its Datalog-bound variables.
struct RuleInstance {
    std::size_t rule = 0;      // index into kb.rules
    Rule instance;             // DL-only variables remain
    std::optional<std::size_t> body_unit;
    std::vector<std::size_t> head_units;  // one per DL head atom, in head order
};

struct DLGrounding {
    std::vector<GroundingUnit> units;      // sorted by key
    std::vector<RuleInstance> instances;
    std::set<std::string> constants;       // C_Π
    std::set<Atom> derivable;              // over-approximated Datalog atoms
};

/// Instantiates only rules whose positive Datalog body can possibly hold
/// (an over-approximation that treats DL and NAF literals as satisfiable).
DLGrounding dl_grounding(const HybridKB& kb);

/// Turns `gr`, the grounding of kb restricted to its first `base_rules`
/// rules, into dl_grounding(kb). Regrounds from scratch when the new rules
/// derive atoms that an earlier rule could use.
void extend_grounding(DLGrounding& gr, const HybridKB& kb, std::size_t base_rules);

/// Datalog atoms that some rule instance of the grounding can derive, plus the
/// facts. A superset of what holds in any NM-model.
std::set<Atom> datalog_upper_bound(const HybridKB& kb);

/// Every substitution that maps all of `pattern` into `atoms`.
std::vector<Substitution> match_body(const std::vector<Atom>& pattern, const std::set<Atom>& atoms);

/// `positive[i]` places unit i in G_P, otherwise it is in G_N.
struct Partition {
    std::vector<bool> positive;

    std::vector<std::size_t> g_pos() const;
    std::vector<std::size_t> g_neg() const;
};

GroundProgram residual_program(const HybridKB& kb, const DLGrounding& gr, const Partition& p);

/// The DL guess is consistent: some model of T and A ∪ G_P refutes every
/// CQ in G_N.
bool dl_guess_consistent(const HybridKB& kb, const DLGrounding& gr, const Partition& p);

struct ReasonerLimits {
    std::size_t max_partitions = std::size_t{1} << 16;
    std::size_t max_herbrand = 24;
};

struct SatResult {
    bool satisfiable = false;
    DLGrounding grounding;
    std::optional<Partition> partition;
    Interpretation model;
    std::size_t partitions_tested = 0;  // complete guesses reaching the Datalog check
};

/// Throws ResourceError when 2^|units| exceeds max_partitions or a residual
/// program exceeds max_herbrand atoms.
SatResult nm_satisfiable(const HybridKB& kb, const ReasonerLimits& limits = {});

/// As above with a grounding of `kb` computed beforehand.
SatResult nm_satisfiable(const HybridKB& kb, DLGrounding grounding, const ReasonerLimits& limits = {});

/// Satisfiability of kb given the grounding of its first `base_rules` rules,
/// without materializing the combined grounding.
bool nm_satisfiable_extending(const HybridKB& kb, const DLGrounding& base, std::size_t base_rules,
                              const ReasonerLimits& limits = {});

/// KB ⊨ α via unsatisfiability of KB plus the denial `:- α`.
bool entails_ground(const HybridKB& kb, const Atom& alpha, const ReasonerLimits& limits = {});

/// KB ⊨ a1 ∧ ... ∧ an via one denial over the whole conjunction.
bool entails_conjunction(const HybridKB& kb, const std::vector<Atom>& atoms,
                         const ReasonerLimits& limits = {});

/// KB plus the denial whose body is exactly the given atoms.
HybridKB with_denial(const HybridKB& kb, const std::vector<Atom>& atoms);

/// Moves every `not u` into the head as the disjunct `u`.
/// Throws ValidationError when a moved atom breaks weak DL-safeness.
HybridKB rewrite_fol(const HybridKB& kb);

}  // namespace hkb
