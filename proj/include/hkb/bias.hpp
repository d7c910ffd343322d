// Language bias and example sets shared by the parser, the refinement
// operators and the learners.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hkb/core.hpp"

namespace hkb {

/// An atom shape such as `enrolled(_,c1)`: each slot is either open
/// (std::nullopt) or fixed to a constant.
struct AtomTemplate {
    Predicate pred;
    std::vector<std::optional<std::string>> slots;

    static AtomTemplate open(Predicate p);

    /// True when the atom has this predicate and agrees on every fixed slot.
    bool matches(const Atom& a) const;

    bool operator==(const AtomTemplate&) const = default;
};

std::string to_string(const AtomTemplate& t);

struct LanguageBias {
    std::optional<AtomTemplate> target;  // absent for constraint discovery
    std::vector<AtomTemplate> d_pos;     // predicates allowed in positive literals
    std::vector<AtomTemplate> d_neg;     // predicates allowed under NAF
    std::vector<Predicate> concepts;
    std::vector<Predicate> roles;
    int max_body_literals = 4;
    int max_literal_size = 4;
    int max_onto_steps = 2;

    bool operator==(const LanguageBias&) const = default;
};

/// Throws ValidationError when a template names a predicate that the
/// signature lacks, uses a known name with another arity, or when a bound
/// is below one. Also rejects a target that appears among the NAF templates.
void check_bias(const LanguageBias& bias, const Signature& sig);

/// Structural checks that need no signature.
void check_bias_shape(const LanguageBias& bias);

struct ExampleSet {
    std::vector<Atom> positives;
    std::vector<Atom> negatives;

    bool operator==(const ExampleSet&) const = default;
};

}  // namespace hkb
