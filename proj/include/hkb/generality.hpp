// Generality orders between rules, decided by refutation with the NMSAT
// reasoner after Skolemizing the less general rule.
#pragma once

#include <map>
#include <set>
#include <string>

#include "hkb/core.hpp"
#include "hkb/reasoner.hpp"

namespace hkb {

struct SkolemContext {
    std::map<std::string, std::string> sigma;  // variable -> fresh constant
    std::set<std::string> reserved;
};

struct Skolemized {
    SkolemContext context;
    Rule rule;
};

/// Replaces every variable by sk0, sk1, ... in first-occurrence order,
/// skipping names in `reserved`.
Skolemized skolemize(const Rule& rule, const std::set<std::string>& reserved);

/// Turns `not p(t)` into the positive Datalog atom `not_p(t)`.
Rule rename_naf(const Rule& r);

/// R1 is at least as general as R2 with respect to the TBox and the rules of
/// `kb` (its facts and ABox are not consulted). Both rules are single-headed
/// view rules; different head predicates give false.
bool more_general_ggs(const Rule& r1, const Rule& r2, const HybridKB& kb, const ReasonerLimits& limits = {});
bool strictly_more_general_ggs(const Rule& r1, const Rule& r2, const HybridKB& kb,
                               const ReasonerLimits& limits = {});
bool equivalent_ggs(const Rule& r1, const Rule& r2, const HybridKB& kb, const ReasonerLimits& limits = {});

/// Relative subsumption of constraint rules with respect to the TBox, ABox
/// and rules of `kb` (its facts are not consulted).
bool more_general_rel(const Rule& r1, const Rule& r2, const HybridKB& kb, const ReasonerLimits& limits = {});
bool strictly_more_general_rel(const Rule& r1, const Rule& r2, const HybridKB& kb,
                               const ReasonerLimits& limits = {});

}  // namespace hkb
