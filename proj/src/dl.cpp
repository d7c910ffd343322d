#include "hkb/dl.hpp"

#include <algorithm>
#include <functional>

namespace hkb {

std::string to_string(const BooleanCQ& q) {
    std::string s = "{";
    for (std::size_t i = 0; i < q.atoms.size(); ++i) s += (i ? ", " : "") + to_string(q.atoms[i]);
    return s + "}";
}

bool is_null(const Term& t) { return t.is_const() && t.name.rfind(kNullPrefix, 0) == 0; }

namespace {

// Live indexes over an instance while the chase runs.
class ChaseState {
public:
    ChaseState(CanonicalInstance& inst, int bound) : inst_(inst), bound_(bound) {
        for (const Atom& a : inst.atoms) index(a);
    }

    bool add(const Atom& a) {
        if (!inst_.atoms.insert(a).second) return false;
        index(a);
        return true;
    }

    bool has_concept(const std::string& elem, const std::string& c) const {
        auto it = concepts_.find(elem);
        return it != concepts_.end() && it->second.count(c) > 0;
    }

    // Successors of `elem` along role (or its inverse).
    std::vector<std::string> neighbours(const std::string& elem, const RoleRef& r) const {
        std::vector<std::string> out;
        const auto& m = r.inverse ? in_ : out_;
        if (auto it = m.find({r.name, elem}); it != m.end()) out.assign(it->second.begin(), it->second.end());
        return out;
    }

    std::vector<std::string> elements() const { return {elements_.begin(), elements_.end()}; }

    std::vector<Atom> role_atoms(const std::string& role) const {
        std::vector<Atom> out;
        for (const Atom& a : inst_.atoms)
            if (a.pred.kind == PredKind::role && a.pred.name == role) out.push_back(a);
        return out;
    }

    int depth(const std::string& elem) const {
        auto it = inst_.depth.find(elem);
        return it == inst_.depth.end() ? 0 : it->second;
    }

    std::string fresh_null(const std::string& parent) {
        std::string n = std::string(kNullPrefix) + std::to_string(++inst_.next_null);
        inst_.depth[n] = depth(parent) + 1;
        return n;
    }

    int bound() const { return bound_; }
    CanonicalInstance& inst() { return inst_; }

private:
    CanonicalInstance& inst_;
    int bound_;
    std::map<std::string, std::set<std::string>> concepts_;
    std::map<std::pair<std::string, std::string>, std::set<std::string>> out_, in_;
    std::set<std::string> elements_;

    void index(const Atom& a) {
        for (const Term& t : a.args) elements_.insert(t.name);
        if (a.pred.kind == PredKind::concept_) {
            concepts_[a.args[0].name].insert(a.pred.name);
        } else if (a.pred.kind == PredKind::role) {
            out_[{a.pred.name, a.args[0].name}].insert(a.args[1].name);
            in_[{a.pred.name, a.args[1].name}].insert(a.args[0].name);
        }
    }
};

Atom concept_atom(const std::string& c, const std::string& x) {
    return Atom{{c, 1, PredKind::concept_}, {cst(x)}};
}

Atom role_atom(const RoleRef& r, const std::string& x, const std::string& y) {
    // r(x, y) read through the inverse flag
    return r.inverse ? Atom{{r.name, 2, PredKind::role}, {cst(y), cst(x)}}
                     : Atom{{r.name, 2, PredKind::role}, {cst(x), cst(y)}};
}

bool step(ChaseState& st, const TBox& tbox) {
    bool changed = false;
    for (const TBoxAxiom& ax : tbox) {
        if (const auto* ri = std::get_if<RoleInclusion>(&ax)) {
            for (const Atom& a : st.role_atoms(ri->sub.name)) {
                const std::string& x = ri->sub.inverse ? a.args[1].name : a.args[0].name;
                const std::string& y = ri->sub.inverse ? a.args[0].name : a.args[1].name;
                changed |= st.add(role_atom(ri->sup, x, y));
            }
            continue;
        }
        const auto& ci = std::get<ConceptInclusion>(ax);
        for (const std::string& x : st.elements()) {
            bool fires = std::all_of(ci.lhs.begin(), ci.lhs.end(),
                                     [&](const std::string& c) { return st.has_concept(x, c); });
            if (!fires) continue;
            switch (ci.rhs) {
                case ConceptInclusion::Rhs::atomic:
                    changed |= st.add(concept_atom(ci.rhs_concept, x));
                    break;
                case ConceptInclusion::Rhs::negated:
                    if (st.has_concept(x, ci.rhs_concept) && !st.inst().clash) {
                        st.inst().clash = true;
                        st.inst().clash_detail =
                            x + " is both " + ci.rhs_concept + " and " + to_string(ax);
                        changed = true;
                    }
                    break;
                case ConceptInclusion::Rhs::exists: {
                    auto ys = st.neighbours(x, ci.role);
                    bool witnessed = std::any_of(ys.begin(), ys.end(), [&](const std::string& y) {
                        return ci.rhs_concept.empty() || st.has_concept(y, ci.rhs_concept);
                    });
                    if (witnessed || st.depth(x) >= st.bound()) break;
                    std::string n = st.fresh_null(x);
                    st.add(role_atom(ci.role, x, n));
                    if (!ci.rhs_concept.empty()) st.add(concept_atom(ci.rhs_concept, n));
                    changed = true;
                    break;
                }
            }
        }
    }
    return changed;
}

}  // namespace

void extend(CanonicalInstance& inst, const std::vector<Atom>& atoms, const TBox& tbox, int depth_bound) {
    ChaseState st(inst, depth_bound);
    for (const Atom& a : atoms) {
        if (!a.is_dl()) throw ValidationError("chase seed must contain DL atoms only: " + to_string(a));
        if (!a.is_ground()) throw ValidationError("chase seed must be ground: " + to_string(a));
        st.add(a);
    }
    while (step(st, tbox)) {
    }
}

CanonicalInstance chase(const std::vector<Atom>& seed, const TBox& tbox, int depth_bound) {
    CanonicalInstance inst;
    extend(inst, seed, tbox, depth_bound);
    return inst;
}

int clash_depth(const TBox& tbox) {
    // Concepts never travel along roles in this fragment, so a null's labels
    // depend only on its filler. Every filler is reached within one level
    // per existential axiom.
    int n = 0;
    for (const TBoxAxiom& ax : tbox)
        if (const auto* ci = std::get_if<ConceptInclusion>(&ax); ci && ci->rhs == ConceptInclusion::Rhs::exists)
            ++n;
    return n + 1;
}

bool is_abox_consistent(const TBox& tbox, const std::vector<Atom>& abox) {
    return !chase(abox, tbox, clash_depth(tbox)).clash;
}

bool has_homomorphism(const BooleanCQ& q, const CanonicalInstance& inst) {
    if (q.atoms.empty()) return true;
    std::map<Predicate, std::vector<const Atom*>> by_pred;
    for (const Atom& a : inst.atoms) by_pred[a.pred].push_back(&a);

    std::vector<bool> done(q.atoms.size(), false);
    std::map<std::string, std::string> binding;

    auto matches = [&](const Atom& pattern, const Atom& target) {
        for (std::size_t i = 0; i < pattern.args.size(); ++i) {
            const Term& t = pattern.args[i];
            const std::string& v = target.args[i].name;
            if (t.is_const()) {
                if (t.name != v) return false;
            } else if (auto it = binding.find(t.name); it != binding.end() && it->second != v) {
                return false;
            }
        }
        // repeated unbound variable inside one atom
        for (std::size_t i = 0; i < pattern.args.size(); ++i)
            for (std::size_t j = i + 1; j < pattern.args.size(); ++j)
                if (pattern.args[i].is_var() && pattern.args[i] == pattern.args[j] &&
                    target.args[i].name != target.args[j].name)
                    return false;
        return true;
    };

    auto candidates = [&](const Atom& pattern) {
        std::vector<const Atom*> out;
        auto it = by_pred.find(pattern.pred);
        if (it == by_pred.end()) return out;
        for (const Atom* a : it->second)
            if (matches(pattern, *a)) out.push_back(a);
        return out;
    };

    std::function<bool(std::size_t)> solve = [&](std::size_t remaining) -> bool {
        if (remaining == 0) return true;
        std::size_t best = q.atoms.size();
        std::vector<const Atom*> best_cands;
        for (std::size_t i = 0; i < q.atoms.size(); ++i) {
            if (done[i]) continue;
            auto c = candidates(q.atoms[i]);
            if (best == q.atoms.size() || c.size() < best_cands.size()) {
                best = i;
                best_cands = std::move(c);
                if (best_cands.empty()) return false;
            }
        }
        done[best] = true;
        for (const Atom* target : best_cands) {
            std::vector<std::string> bound_here;
            for (std::size_t k = 0; k < target->args.size(); ++k) {
                const Term& t = q.atoms[best].args[k];
                if (t.is_var() && binding.emplace(t.name, target->args[k].name).second)
                    bound_here.push_back(t.name);
            }
            if (solve(remaining - 1)) return true;
            for (const std::string& v : bound_here) binding.erase(v);
        }
        done[best] = false;
        return false;
    };
    return solve(q.atoms.size());
}

std::vector<Atom> freeze(const BooleanCQ& q, const std::string& suffix) {
    std::vector<Atom> out;
    for (Atom a : q.atoms) {
        for (Term& t : a.args)
            if (t.is_var()) t = cst(std::string(kFrozenPrefix) + t.name + suffix);
        out.push_back(std::move(a));
    }
    return out;
}

int default_depth_bound(const BooleanUCQ& q2) {
    std::size_t m = 1;
    for (const BooleanCQ& d : q2.disjuncts) m = std::max(m, d.atoms.size());
    return static_cast<int>(m);
}

bool cq_ucq_containment(const TBox& tbox, const BooleanCQ& q1, const BooleanUCQ& q2,
                        std::optional<int> depth_bound) {
    const int bound = depth_bound ? *depth_bound : std::max(default_depth_bound(q2), clash_depth(tbox));
    CanonicalInstance inst = chase(freeze(q1), tbox, bound);
    if (inst.clash) return true;
    return std::any_of(q2.disjuncts.begin(), q2.disjuncts.end(),
                       [&](const BooleanCQ& d) { return has_homomorphism(d, inst); });
}

}  // namespace hkb
