// Ground disjunctive Datalog with negation as failure under the stable model
// semantics.
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hkb/core.hpp"

namespace hkb {

using Interpretation = std::set<Atom>;

/// A ground rule over atom ids of its owning GroundProgram.
struct GroundRule {
    std::vector<int> head;
    std::vector<int> pos;
    std::vector<int> naf;

    auto operator<=>(const GroundRule&) const = default;
};

class GroundProgram {
public:
    int intern(const Atom& a);
    std::optional<int> find(const Atom& a) const;
    const Atom& atom(int id) const { return atoms_[static_cast<std::size_t>(id)]; }
    std::size_t num_atoms() const { return atoms_.size(); }

    /// Adds a rule unless an identical one is present. Atoms must be ground
    /// Datalog atoms.
    void add_rule(const Rule& r);
    void add_rule(GroundRule r);
    void add_fact(const Atom& a);

    const std::vector<GroundRule>& rules() const { return rules_; }
    const std::vector<Atom>& atoms() const { return atoms_; }

    Rule to_rule(const GroundRule& g) const;
    std::vector<Rule> to_rules() const;

private:
    std::vector<Atom> atoms_;
    std::map<Atom, int> index_;
    std::vector<GroundRule> rules_;
    std::set<GroundRule> seen_;
};

std::string to_string(const GroundProgram& p);

/// Every instance of every rule over the pool, each included once.
/// Throws ValidationError for DL atoms and when the pool is empty but
/// some rule has variables.
GroundProgram ground(const std::vector<Rule>& rules, const std::set<std::string>& pool);

/// Gelfond-Lifschitz reduct with respect to I.
GroundProgram reduct(const GroundProgram& program, const Interpretation& I);

/// I is a (subset-)minimal model of reduct(program, I).
bool is_stable_model(const Interpretation& I, const GroundProgram& program);

struct SolverLimits {
    std::size_t max_herbrand = 24;
};

struct StableModelResult {
    bool satisfiable = false;
    Interpretation witness;
};

/// Depth-first search with propagation. The witness is the least stable
/// model in the order that compares atoms by their printed form, false
/// before true. Throws ResourceError when the Herbrand base exceeds the cap.
StableModelResult has_stable_model(const GroundProgram& program, const SolverLimits& limits = {});

/// All stable models in the same order, up to `max_models`.
std::vector<Interpretation> stable_models(const GroundProgram& program,
                                          const SolverLimits& limits = {},
                                          std::size_t max_models = SIZE_MAX);

}  // namespace hkb
