// Learning view definitions by sequential covering and discovering integrity
// theories by breadth-first search, both on top of the hybrid reasoner.
#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "hkb/bias.hpp"
#include "hkb/core.hpp"
#include "hkb/reasoner.hpp"
#include "hkb/refinement.hpp"

namespace hkb {

/// The input KB has no NM-model, so nothing can be learned from it.
class InconsistentInputError : public Error {
public:
    using Error::Error;
};

struct Score {
    int pos_covered = 0;
    int neg_covered = 0;
    int body_len = 0;
    bool operator==(const Score&) const = default;
};

/// B plus R entails o.
bool covers_view(const Rule& r, const Atom& o, const HybridKB& b, const ReasonerLimits& limits = {});

/// K plus R has an NM-model and entails every fact of `facts`.
bool covers_theory(const Rule& r, const std::vector<Atom>& facts, const HybridKB& k,
                   const ReasonerLimits& limits = {});

Score score(const Rule& r, const ExampleSet& ex, const HybridKB& b, const ReasonerLimits& limits = {});

struct Provenance {
    std::size_t iteration = 0;       // outer-loop round, or BFS depth for discovery
    std::set<RefinementOp> ops;      // operators that produced the accepted rule
    std::vector<Rule> path;          // refinement chain from the root, root first
};

struct Theory {
    std::vector<Rule> rules;
    std::vector<Provenance> provenance;  // aligned with rules
};

struct ScoredCandidate {
    Rule rule;
    Score score;
};

struct InnerStep {
    Rule refined;                              // the rule whose refinements were scored
    std::vector<ScoredCandidate> candidates;   // in refinement order
    std::size_t chosen = 0;                    // index into candidates
};

struct LearnRound {
    std::vector<Atom> positives_left;  // E+ at the start of the round
    std::vector<InnerStep> steps;
};

struct LearnReport {
    Theory theory;
    std::vector<LearnRound> rounds;
    std::vector<std::string> warnings;
    std::vector<Atom> uncovered;  // positives left when the run stopped
};

struct LearnOptions {
    ReasonerLimits limits;
    std::size_t max_rounds = 64;
};

/// Sequential covering over the view language of `bias`. Stops with a
/// warning when no rule consistent with the negatives covers a positive.
LearnReport nmlearn(const HybridKB& b, const LanguageBias& bias, const ExampleSet& ex,
                    const LearnOptions& opts = {});

enum class Acceptance {
    /// R holds under every NM-model for each grounding of its positive body
    /// over the data (the default).
    satisfied_by_data,
    /// K ∪ Π_F ∪ H ∪ {R} merely has an NM-model.
    nm_satisfiable,
};

struct DiscoverOptions {
    Acceptance acceptance = Acceptance::satisfied_by_data;
    ReasonerLimits limits;
    std::size_t max_examined = 200000;  // ResourceError beyond this many rules
};

struct DiscoverReport {
    Theory theory;
    std::size_t examined = 0;
    bool final_check = false;  // nm_satisfiable(K ∪ Π_F ∪ H)
};

/// Acceptance test for one rule against K ∪ Π_F ∪ H, given as one KB.
bool accepts(const HybridKB& kb_with_theory, const Rule& r, Acceptance mode, const ReasonerLimits& limits = {});

/// As above, reusing a grounding of kb_with_theory.
bool accepts(const HybridKB& kb_with_theory, const DLGrounding& grounding, const Rule& r, Acceptance mode,
             const ReasonerLimits& limits = {});

/// Throws InconsistentInputError when K ∪ Π_F has no NM-model.
DiscoverReport nmdisc(const HybridKB& k, const std::vector<Atom>& facts, const LanguageBias& bias,
                      const DiscoverOptions& opts = {});

/// kb ⊨ R, decided by Skolemizing R and refuting its negation.
bool entails_rule(const HybridKB& kb, const Rule& r, const ReasonerLimits& limits = {});

/// Drops, in acceptance order, every rule entailed by K ∪ Π_F and the rules
/// still kept.
Theory minimize_theory(const Theory& h, const HybridKB& k, const std::vector<Atom>& facts,
                       const ReasonerLimits& limits = {});

}  // namespace hkb
