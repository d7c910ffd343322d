#include "hkb/bias.hpp"

#include <algorithm>

namespace hkb {

AtomTemplate AtomTemplate::open(Predicate p) {
    AtomTemplate t;
    t.slots.assign(p.arity, std::nullopt);
    t.pred = std::move(p);
    return t;
}

bool AtomTemplate::matches(const Atom& a) const {
    if (!(a.pred == pred)) return false;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (!slots[i]) continue;
        if (!a.args[i].is_const() || a.args[i].name != *slots[i]) return false;
    }
    return true;
}

std::string to_string(const AtomTemplate& t) {
    bool all_open = std::all_of(t.slots.begin(), t.slots.end(), [](const auto& s) { return !s; });
    if (all_open) return t.pred.name + "/" + std::to_string(t.pred.arity);
    std::string s = t.pred.name + "(";
    for (std::size_t i = 0; i < t.slots.size(); ++i) {
        if (i) s += ',';
        s += t.slots[i] ? *t.slots[i] : "_";
    }
    return s + ")";
}

void check_bias_shape(const LanguageBias& bias) {
    if (bias.max_body_literals < 1 || bias.max_literal_size < 1 || bias.max_onto_steps < 1)
        throw ValidationError("bias bounds must be at least 1");
    if (bias.target) {
        if (bias.target->pred.is_dl())
            throw ValidationError("target must be a Datalog predicate: " + bias.target->pred.name);
        for (const AtomTemplate& t : bias.d_neg)
            if (t.pred == bias.target->pred)
                throw ValidationError("target predicate " + bias.target->pred.name +
                                      " declared among the negative-literal predicates");
    }
    for (const auto* list : {&bias.d_pos, &bias.d_neg})
        for (const AtomTemplate& t : *list)
            if (t.pred.is_dl())
                throw ValidationError("DL predicate " + t.pred.name + " listed as a Datalog template");
    for (const Predicate& c : bias.concepts)
        if (c.kind != PredKind::concept_)
            throw ValidationError("'" + c.name + "/" + std::to_string(c.arity) +
                                  "' listed among concepts is not a concept name");
    for (const Predicate& r : bias.roles)
        if (r.kind != PredKind::role)
            throw ValidationError("'" + r.name + "/" + std::to_string(r.arity) +
                                  "' listed among roles is not a role name");
}

void check_bias(const LanguageBias& bias, const Signature& sig) {
    check_bias_shape(bias);
    auto resolve = [&](const Predicate& p) {
        if (sig.find(p.name, p.arity)) return;
        for (const Predicate& q : sig.all())
            if (q.name == p.name)
                throw ValidationError("arity mismatch for '" + p.name + "': bias uses " +
                                      std::to_string(p.arity) + ", KB uses " +
                                      std::to_string(q.arity));
        throw ValidationError("unknown predicate in bias: " + p.name + "/" +
                              std::to_string(p.arity));
    };
    // The target is usually absent from the background KB, so it is not resolved.
    for (const auto* list : {&bias.d_pos, &bias.d_neg})
        for (const AtomTemplate& t : *list) resolve(t.pred);
    for (const Predicate& c : bias.concepts) resolve(c);
    for (const Predicate& r : bias.roles) resolve(r);
}

}  // namespace hkb
