// Downward refinement of view rules and of constraint rules under a
// declarative language bias.
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hkb/bias.hpp"
#include "hkb/core.hpp"

namespace hkb {

enum class RefinementOp {
    add_data_lit_body_pos,
    add_data_lit_body_neg,
    add_onto_lit_body,
    spec_onto_lit_body,
    add_data_lit_head,
    add_onto_lit_head,
    gen_onto_lit_head,
};

/// "AddDataLit_B+", "SpecOntoLit_B", ...
std::string to_string(RefinementOp op);

/// A rule together with how far each of its DL literals has been moved
/// along the told hierarchy, and the operators that produced it.
struct Candidate {
    Rule rule;
    std::map<Atom, int> onto_steps;  // missing entries count as zero
    std::set<RefinementOp> ops;      // empty for a root rule

    int steps(const Atom& a) const;
};

/// Size of a literal: symbol occurrences minus distinct variables.
int literal_size(const Atom& a);

bool within_bias(const Rule& r, const LanguageBias& bias);
bool within_bias(const Candidate& c, const LanguageBias& bias);

/// One-step refinements of a view rule (single head matching the target).
/// Returns an empty set and fills `diagnostic` when R is outside the bias.
std::vector<Candidate> rho_view(const Candidate& r, const LanguageBias& bias, const TBox& tbox,
                                std::string* diagnostic = nullptr);
std::vector<Candidate> rho_view(const Rule& r, const LanguageBias& bias, const TBox& tbox,
                                std::string* diagnostic = nullptr);

/// One-step refinements of a constraint rule (any head, denials included).
std::vector<Candidate> rho_constraint(const Candidate& r, const LanguageBias& bias, const TBox& tbox,
                                      std::string* diagnostic = nullptr);
std::vector<Candidate> rho_constraint(const Rule& r, const LanguageBias& bias, const TBox& tbox,
                                      std::string* diagnostic = nullptr);

/// `target(X1, ..., Xn) :-` with the target's fixed slots kept as constants.
Rule most_general_view(const LanguageBias& bias);

}  // namespace hkb
