#include "hkb/reasoner.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace hkb {

std::vector<std::size_t> Partition::g_pos() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < positive.size(); ++i)
        if (positive[i]) out.push_back(i);
    return out;
}

std::vector<std::size_t> Partition::g_neg() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < positive.size(); ++i)
        if (!positive[i]) out.push_back(i);
    return out;
}

namespace {

std::set<std::string> vars_in(const std::vector<Atom>& atoms) {
    std::set<std::string> out;
    for (const Atom& a : atoms)
        for (const Term& t : a.args)
            if (t.is_var()) out.insert(t.name);
    return out;
}

struct RuleShape {
    std::vector<std::string> enumerated;   // bound, but absent from the positive body
    std::set<std::string> existential;     // DL-only variables
};

RuleShape shape_of(const Rule& r) {
    RuleShape s;
    const auto pos = vars_in(r.body_pos);
    const auto head = vars_in(r.head);
    const auto naf = vars_in(r.body_naf);
    for (const std::string& v : variables_of(r)) {
        if (pos.count(v)) continue;
        if (head.count(v) || naf.count(v))
            s.enumerated.push_back(v);
        else
            s.existential.insert(v);
    }
    return s;
}

// Substitutions that map the positive body into the indexed atoms, extended over
// the pool for the remaining bound variables.
std::vector<Substitution> bindings(const Rule& r, const RuleShape& shape,
                                   const std::map<Predicate, std::vector<const Atom*>>& by_pred,
                                   const std::vector<std::string>& pool) {
    std::vector<Substitution> joined;
    Substitution cur;
    std::function<void(std::size_t)> join = [&](std::size_t k) {
        if (k == r.body_pos.size()) {
            joined.push_back(cur);
            return;
        }
        const Atom& pat = r.body_pos[k];
        auto it = by_pred.find(pat.pred);
        if (it == by_pred.end()) return;
        for (const Atom* fact : it->second) {
            Substitution saved = cur;
            bool ok = true;
            for (std::size_t i = 0; ok && i < pat.args.size(); ++i) {
                const Term& t = pat.args[i];
                const Term& f = fact->args[i];
                if (t.is_const()) {
                    ok = t == f;
                } else if (auto b = cur.find(t.name); b != cur.end()) {
                    ok = b->second == f;
                } else {
                    cur[t.name] = f;
                }
            }
            if (ok) join(k + 1);
            cur = std::move(saved);
        }
    };
    join(0);

    if (shape.enumerated.empty()) return joined;
    if (pool.empty()) return {};
    std::vector<Substitution> out;
    for (const Substitution& base : joined) {
        std::vector<std::size_t> idx(shape.enumerated.size(), 0);
        for (;;) {
            Substitution s = base;
            for (std::size_t i = 0; i < idx.size(); ++i) s[shape.enumerated[i]] = cst(pool[idx[i]]);
            out.push_back(std::move(s));
            std::size_t k = 0;
            while (k < idx.size() && ++idx[k] == pool.size()) idx[k++] = 0;
            if (k == idx.size()) break;
        }
    }
    return out;
}

std::string cq_key(const std::vector<Atom>& atoms) {
    Rule tmp;
    tmp.body_dl = atoms;
    return to_string(canonical(tmp));
}

}  // namespace

namespace {

using AtomIndex = std::map<Predicate, std::vector<const Atom*>>;

AtomIndex index_atoms(const std::set<Atom>& atoms) {
    AtomIndex out;
    for (const Atom& a : atoms) out[a.pred].push_back(&a);
    return out;
}

// Least fixpoint of the Datalog heads of `rules` over `seed`, reading DL and
// NAF literals as true.
std::set<Atom> derivable_fixpoint(const std::vector<Rule>& rules, std::size_t from, std::set<Atom> derivable,
                                  const std::vector<std::string>& pool) {
    std::vector<std::pair<const Rule*, RuleShape>> producers;  // rules with a Datalog head atom
    for (std::size_t i = from; i < rules.size(); ++i)
        if (std::any_of(rules[i].head.begin(), rules[i].head.end(), [](const Atom& h) { return !h.is_dl(); }))
            producers.emplace_back(&rules[i], shape_of(rules[i]));
    AtomIndex by_pred = index_atoms(derivable);
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<Atom> fresh;
        for (const auto& [r, shape] : producers)
            for (const Substitution& s : bindings(*r, shape, by_pred, pool))
                for (const Atom& h : r->head)
                    if (!h.is_dl()) {
                        Atom g = substitute(h, s);
                        if (!derivable.count(g)) fresh.push_back(std::move(g));
                    }
        for (Atom& a : fresh) changed |= derivable.insert(std::move(a)).second;
        if (changed) by_pred = index_atoms(derivable);
    }
    return derivable;
}

}  // namespace

namespace {

// Collects instances with their units keyed by canonical text; units are
// numbered only at the end, in key order.
class GroundingBuilder {
public:
    void add(std::size_t rule, Rule instance) {
        Pending p;
        p.inst.rule = rule;
        p.inst.instance = std::move(instance);
        const Rule& g = p.inst.instance;
        if (!g.body_dl.empty()) {
            const std::string& key = key_of(g.body_dl);
            if (!units_.count(key)) units_.emplace(key, GroundingUnit{GroundingUnit::Kind::body_cq, BooleanCQ{g.body_dl}, key});
            p.body_key = key;
        }
        for (const Atom& h : g.head) {
            if (!h.is_dl()) continue;
            const std::string& key = key_of({h});
            if (!units_.count(key)) units_.emplace(key, GroundingUnit{GroundingUnit::Kind::head_atom, BooleanCQ{{h}}, key});
            p.head_keys.push_back(key);
        }
        pending_.push_back(std::move(p));
    }

    void finish(DLGrounding& gr) {
        gr.units.clear();
        gr.instances.clear();
        std::map<std::string, std::size_t> index;
        for (auto& [key, u] : units_) {
            index[key] = gr.units.size();
            gr.units.push_back(std::move(u));
        }
        for (Pending& p : pending_) {
            if (p.body_key) p.inst.body_unit = index.at(*p.body_key);
            for (const std::string& k : p.head_keys) p.inst.head_units.push_back(index.at(k));
            gr.instances.push_back(std::move(p.inst));
        }
    }

private:
    struct Pending {
        RuleInstance inst;
        std::optional<std::string> body_key;
        std::vector<std::string> head_keys;
    };
    std::map<std::string, GroundingUnit> units_;
    std::vector<Pending> pending_;
    std::map<std::vector<Atom>, std::string> key_cache_;

    const std::string& key_of(const std::vector<Atom>& atoms) {
        auto it = key_cache_.find(atoms);
        if (it == key_cache_.end()) it = key_cache_.emplace(atoms, cq_key(atoms)).first;
        return it->second;
    }
};

// Instantiates rules [from, end) of kb, skipping any rule equal to an earlier one.
void instantiate(const HybridKB& kb, std::size_t from, const std::set<Atom>& derivable,
                 const std::vector<std::string>& pool, GroundingBuilder& out) {
    const AtomIndex by_pred = index_atoms(derivable);
    std::set<Rule> distinct;
    for (std::size_t i = from; i < kb.rules.size(); ++i) {
        const Rule& r = kb.rules[i];
        if (!distinct.insert(r).second) continue;
        if (from > 0 && std::find(kb.rules.begin(), kb.rules.begin() + static_cast<std::ptrdiff_t>(from), r) !=
                            kb.rules.begin() + static_cast<std::ptrdiff_t>(from))
            continue;
        for (const Substitution& s : bindings(r, shape_of(r), by_pred, pool)) out.add(i, substitute(r, s));
    }
}

}  // namespace

DLGrounding dl_grounding(const HybridKB& kb) {
    DLGrounding gr;
    gr.constants = kb.constants();
    const std::vector<std::string> pool(gr.constants.begin(), gr.constants.end());
    gr.derivable = derivable_fixpoint(kb.rules, 0, {kb.facts.begin(), kb.facts.end()}, pool);
    GroundingBuilder b;
    instantiate(kb, 0, gr.derivable, pool, b);
    b.finish(gr);
    return gr;
}

namespace {

// Instances of rules [base_rules, end) of kb on top of `base`, or nothing
// when the new rules derive atoms that an earlier rule could use (or bring
// new constants), in which case only a full regrounding is exact.
std::optional<DLGrounding> ground_additions(const DLGrounding& base, const HybridKB& kb, std::size_t base_rules) {
    if (base_rules > kb.rules.size()) return std::nullopt;
    for (std::size_t i = base_rules; i < kb.rules.size(); ++i)
        for (const std::string& c : constants_of(kb.rules[i]))
            if (!base.constants.count(c)) return std::nullopt;
    const std::vector<std::string> pool(base.constants.begin(), base.constants.end());
    std::set<Atom> derivable = derivable_fixpoint(kb.rules, base_rules, base.derivable, pool);
    if (derivable.size() != base.derivable.size()) {
        std::set<Predicate> fresh;
        for (const Atom& a : derivable)
            if (!base.derivable.count(a)) fresh.insert(a.pred);
        for (std::size_t i = 0; i < base_rules; ++i)
            for (const Atom& a : kb.rules[i].body_pos)
                if (fresh.count(a.pred)) return std::nullopt;
    }
    GroundingBuilder b;
    instantiate(kb, base_rules, derivable, pool, b);
    DLGrounding added;
    b.finish(added);
    added.constants = base.constants;
    added.derivable = std::move(derivable);
    return added;
}

}  // namespace

void extend_grounding(DLGrounding& gr, const HybridKB& kb, std::size_t base_rules) {
    std::optional<DLGrounding> added = ground_additions(gr, kb, base_rules);
    if (!added) {
        gr = dl_grounding(kb);
        return;
    }
    // Merge the two sorted unit lists and renumber.
    std::vector<GroundingUnit> units;
    std::vector<std::size_t> from_base(gr.units.size()), from_added(added->units.size());
    std::size_t i = 0, j = 0;
    while (i < gr.units.size() || j < added->units.size()) {
        const bool take_base = j == added->units.size() ||
                               (i < gr.units.size() && gr.units[i].key <= added->units[j].key);
        const bool take_added = i == gr.units.size() ||
                                (j < added->units.size() && added->units[j].key <= gr.units[i].key);
        if (take_base) from_base[i] = units.size();
        if (take_added) from_added[j] = units.size();
        units.push_back(take_base ? std::move(gr.units[i]) : std::move(added->units[j]));
        i += take_base;
        j += take_added;
    }
    auto renumber = [](RuleInstance& ri, const std::vector<std::size_t>& map) {
        if (ri.body_unit) ri.body_unit = map[*ri.body_unit];
        for (std::size_t& u : ri.head_units) u = map[u];
    };
    gr.units = std::move(units);
    for (RuleInstance& ri : gr.instances) renumber(ri, from_base);
    for (RuleInstance& ri : added->instances) {
        renumber(ri, from_added);
        gr.instances.push_back(std::move(ri));
    }
    gr.derivable = std::move(added->derivable);
}

std::set<Atom> datalog_upper_bound(const HybridKB& kb) {
    const std::set<std::string> consts = kb.constants();
    return derivable_fixpoint(kb.rules, 0, {kb.facts.begin(), kb.facts.end()},
                              std::vector<std::string>(consts.begin(), consts.end()));
}

std::vector<Substitution> match_body(const std::vector<Atom>& pattern, const std::set<Atom>& atoms) {
    std::map<Predicate, std::vector<const Atom*>> by_pred;
    for (const Atom& a : atoms) by_pred[a.pred].push_back(&a);
    Rule r;
    r.body_pos = pattern;
    return bindings(r, RuleShape{}, by_pred, {});
}

GroundProgram residual_program(const HybridKB& kb, const DLGrounding& gr, const Partition& p) {
    GroundProgram out;
    for (const RuleInstance& ri : gr.instances) {
        if (ri.body_unit && !p.positive[*ri.body_unit]) continue;
        if (std::any_of(ri.head_units.begin(), ri.head_units.end(),
                        [&](std::size_t u) { return p.positive[u]; }))
            continue;
        Rule r;
        for (const Atom& h : ri.instance.head)
            if (!h.is_dl()) r.head.push_back(h);
        r.body_pos = ri.instance.body_pos;
        r.body_naf = ri.instance.body_naf;
        out.add_rule(r);
    }
    for (const Atom& f : kb.facts) out.add_fact(f);
    return out;
}

namespace {

int search_bound(const HybridKB& kb, const DLGrounding& gr) {
    std::size_t m = 1;
    for (const GroundingUnit& u : gr.units) m = std::max(m, u.cq.atoms.size());
    return std::max(static_cast<int>(m), clash_depth(kb.tbox));
}

std::string unit_suffix(std::size_t i) { return "_u" + std::to_string(i); }

// The Datalog part of every instance, interned once so that each guess only
// filters and renumbers integer rules.
class CompiledGrounding {
public:
    CompiledGrounding(const HybridKB& kb, const std::vector<const RuleInstance*>& instances) {
        std::set<Entry> seen;
        for (const RuleInstance* rip : instances) {
            const RuleInstance& ri = *rip;
            Entry e;
            for (const Atom& h : ri.instance.head)
                if (!h.is_dl()) e.rule.head.push_back(table_.intern(h));
            for (const Atom& a : ri.instance.body_pos) e.rule.pos.push_back(table_.intern(a));
            for (const Atom& a : ri.instance.body_naf) e.rule.naf.push_back(table_.intern(a));
            for (auto* ids : {&e.rule.head, &e.rule.pos, &e.rule.naf}) std::sort(ids->begin(), ids->end());
            e.body_unit = ri.body_unit;
            e.head_units = ri.head_units;
            std::sort(e.head_units.begin(), e.head_units.end());
            // instances that differ only in DL-only variables reduce alike
            if (seen.insert(e).second) entries_.push_back(std::move(e));
        }
        for (const Atom& f : kb.facts) facts_.push_back(table_.intern(f));
    }

    GroundProgram residual(const Partition& p) const {
        GroundProgram out;
        std::vector<int> remap(table_.num_atoms(), -1);
        auto id = [&](int old) {
            int& slot = remap[static_cast<std::size_t>(old)];
            if (slot < 0) slot = out.intern(table_.atom(old));
            return slot;
        };
        for (const Entry& e : entries_) {
            if (e.body_unit && !p.positive[*e.body_unit]) continue;
            if (std::any_of(e.head_units.begin(), e.head_units.end(), [&](std::size_t u) { return p.positive[u]; }))
                continue;
            GroundRule g;
            g.head.reserve(e.rule.head.size());
            g.pos.reserve(e.rule.pos.size());
            g.naf.reserve(e.rule.naf.size());
            for (int h : e.rule.head) g.head.push_back(id(h));
            for (int a : e.rule.pos) g.pos.push_back(id(a));
            for (int a : e.rule.naf) g.naf.push_back(id(a));
            out.add_rule(std::move(g));
        }
        for (int f : facts_) out.add_rule(GroundRule{{id(f)}, {}, {}});
        return out;
    }

private:
    struct Entry {
        GroundRule rule;
        std::optional<std::size_t> body_unit;
        std::vector<std::size_t> head_units;
        auto operator<=>(const Entry&) const = default;
    };
    GroundProgram table_;
    std::vector<Entry> entries_;
    std::vector<int> facts_;
};

}  // namespace

bool dl_guess_consistent(const HybridKB& kb, const DLGrounding& gr, const Partition& p) {
    BooleanCQ q1{kb.abox};
    for (std::size_t i : p.g_pos()) {
        // rename existential variables apart before conjoining
        Substitution s;
        for (const std::string& v : vars_in(gr.units[i].cq.atoms)) s[v] = var(v + unit_suffix(i));
        for (const Atom& a : gr.units[i].cq.atoms) q1.atoms.push_back(substitute(a, s));
    }
    BooleanUCQ q2;
    for (std::size_t i : p.g_neg()) q2.disjuncts.push_back(gr.units[i].cq);
    return !cq_ucq_containment(kb.tbox, q1, q2, search_bound(kb, gr));
}

namespace {

// Units and instances of a grounding, possibly drawn from two groundings.
struct GroundingView {
    std::vector<const GroundingUnit*> units;
    std::vector<const RuleInstance*> instances;
};

GroundingView view_of(const DLGrounding& gr) {
    GroundingView v;
    for (const GroundingUnit& u : gr.units) v.units.push_back(&u);
    for (const RuleInstance& ri : gr.instances) v.instances.push_back(&ri);
    return v;
}

struct Search {
    bool satisfiable = false;
    Partition partition;
    Interpretation model;
    std::size_t tested = 0;
};

Search search_partitions(const HybridKB& kb, const GroundingView& gr, const ReasonerLimits& limits) {
    Search res;
    const std::size_t n = gr.units.size();
    if (n >= 63 || (std::size_t{1} << n) > limits.max_partitions)
        throw ResourceError("DL-grounding has " + std::to_string(n) + " units; 2^" + std::to_string(n) +
                            " partitions exceed the limit of " + std::to_string(limits.max_partitions));

    int bound = clash_depth(kb.tbox);
    for (const GroundingUnit* u : gr.units) bound = std::max(bound, static_cast<int>(u->cq.atoms.size()));
    CanonicalInstance base = chase(kb.abox, kb.tbox, bound);
    if (base.clash) return res;

    Partition& part = res.partition;
    part.positive.assign(n, false);
    std::vector<std::size_t> negatives;
    const SolverLimits solver{limits.max_herbrand};
    const CompiledGrounding compiled(kb, gr.instances);

    // Units are decided from the highest index down, G_N first, which visits
    // complete guesses in increasing binary-counter order.
    std::function<bool(std::size_t, const CanonicalInstance&)> dfs =
        [&](std::size_t remaining, const CanonicalInstance& inst) -> bool {
        if (remaining == 0) {
            ++res.tested;
            StableModelResult sm = has_stable_model(compiled.residual(part), solver);
            if (!sm.satisfiable) return false;
            res.satisfiable = true;
            res.model = std::move(sm.witness);
            return true;
        }
        const std::size_t i = remaining - 1;
        const BooleanCQ& q = gr.units[i]->cq;

        if (!has_homomorphism(q, inst)) {
            part.positive[i] = false;
            negatives.push_back(i);
            if (dfs(i, inst)) return true;
            negatives.pop_back();
        }

        CanonicalInstance grown = inst;
        extend(grown, freeze(q, unit_suffix(i)), kb.tbox, bound);
        if (grown.clash) return false;
        for (std::size_t j : negatives)
            if (has_homomorphism(gr.units[j]->cq, grown)) return false;
        part.positive[i] = true;
        if (dfs(i, grown)) return true;
        part.positive[i] = false;
        return false;
    };
    dfs(n, base);
    return res;
}

}  // namespace

SatResult nm_satisfiable(const HybridKB& kb, const ReasonerLimits& limits) {
    return nm_satisfiable(kb, dl_grounding(kb), limits);
}

SatResult nm_satisfiable(const HybridKB& kb, DLGrounding grounding, const ReasonerLimits& limits) {
    SatResult res;
    res.grounding = std::move(grounding);
    Search s = search_partitions(kb, view_of(res.grounding), limits);
    res.satisfiable = s.satisfiable;
    res.partitions_tested = s.tested;
    if (s.satisfiable) {
        res.partition = std::move(s.partition);
        res.model = std::move(s.model);
    }
    return res;
}

bool nm_satisfiable_extending(const HybridKB& kb, const DLGrounding& base, std::size_t base_rules,
                              const ReasonerLimits& limits) {
    std::optional<DLGrounding> added = ground_additions(base, kb, base_rules);
    if (!added) return nm_satisfiable(kb, limits).satisfiable;
    GroundingView v = view_of(base);
    std::vector<std::size_t> index(added->units.size());
    for (std::size_t j = 0; j < added->units.size(); ++j) {
        auto it = std::lower_bound(base.units.begin(), base.units.end(), added->units[j].key,
                                   [](const GroundingUnit& u, const std::string& k) { return u.key < k; });
        if (it != base.units.end() && it->key == added->units[j].key) {
            index[j] = static_cast<std::size_t>(it - base.units.begin());
        } else {
            index[j] = v.units.size();
            v.units.push_back(&added->units[j]);
        }
    }
    for (RuleInstance& ri : added->instances) {
        if (ri.body_unit) ri.body_unit = index[*ri.body_unit];
        for (std::size_t& u : ri.head_units) u = index[u];
        v.instances.push_back(&ri);
    }
    return search_partitions(kb, v, limits).satisfiable;
}

HybridKB with_denial(const HybridKB& kb, const std::vector<Atom>& atoms) {
    HybridKB out = kb;
    Rule d;
    for (const Atom& a : atoms) (a.is_dl() ? d.body_dl : d.body_pos).push_back(a);
    out.rules.push_back(std::move(d));
    return out;
}

bool entails_ground(const HybridKB& kb, const Atom& alpha, const ReasonerLimits& limits) {
    if (!alpha.is_ground()) throw ValidationError("query atom must be ground: " + to_string(alpha));
    return !nm_satisfiable(with_denial(kb, {alpha}), limits).satisfiable;
}

bool entails_conjunction(const HybridKB& kb, const std::vector<Atom>& atoms, const ReasonerLimits& limits) {
    for (const Atom& a : atoms) {
        if (!a.is_ground()) throw ValidationError("conjunct must be ground: " + to_string(a));
        if (a.is_dl()) throw ValidationError("conjunct must be a Datalog atom: " + to_string(a));
    }
    return !nm_satisfiable(with_denial(kb, atoms), limits).satisfiable;
}

HybridKB rewrite_fol(const HybridKB& kb) {
    HybridKB out = kb;
    for (Rule& r : out.rules) {
        if (r.body_naf.empty()) continue;
        const auto pos = vars_in(r.body_pos);
        for (const Atom& u : r.body_naf)
            for (const Term& t : u.args)
                if (t.is_var() && !pos.count(t.name))
                    throw ValidationError("moving not " + to_string(u) + " into the head of " + to_string(r) +
                                          " breaks weak DL-safeness (" + t.name +
                                          " is not bound by a positive Datalog atom)");
        r.head.insert(r.head.end(), r.body_naf.begin(), r.body_naf.end());
        r.body_naf.clear();
    }
    return out;
}

}  // namespace hkb
