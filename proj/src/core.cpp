#include "hkb/core.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace hkb {

std::string_view to_string(PredKind k) {
    switch (k) {
        case PredKind::concept_: return "concept";
        case PredKind::role: return "role";
        case PredKind::datalog: return "datalog";
    }
    return "?";
}

PredKind kind_for(std::string_view name, std::size_t arity) {
    if (name.empty()) throw ValidationError("empty predicate name");
    if (!std::isupper(static_cast<unsigned char>(name.front()))) return PredKind::datalog;
    if (arity == 1) return PredKind::concept_;
    if (arity == 2) return PredKind::role;
    throw ValidationError("DL name '" + std::string(name) + "' used with arity " +
                          std::to_string(arity) + " (concepts are unary, roles binary)");
}

bool Atom::is_ground() const {
    return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.is_var(); });
}

Atom make_atom(std::string name, std::vector<Term> args) {
    Atom a;
    a.pred.kind = kind_for(name, args.size());
    a.pred.arity = args.size();
    a.pred.name = std::move(name);
    a.args = std::move(args);
    return a;
}

Atom substitute(const Atom& a, const Substitution& s) {
    Atom out = a;
    for (Term& t : out.args) {
        if (!t.is_var()) continue;
        if (auto it = s.find(t.name); it != s.end()) t = it->second;
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

void collect_vars(const std::vector<Atom>& atoms, std::vector<std::string>& out,
                  std::set<std::string>& seen) {
    for (const Atom& a : atoms)
        for (const Term& t : a.args)
            if (t.is_var() && seen.insert(t.name).second) out.push_back(t.name);
}

std::vector<Atom> subst_all(const std::vector<Atom>& atoms, const Substitution& s) {
    std::vector<Atom> out;
    out.reserve(atoms.size());
    for (const Atom& a : atoms) out.push_back(substitute(a, s));
    return out;
}

Rule rename_by_occurrence(const Rule& r) {
    Substitution s;
    std::size_t n = 0;
    for (const std::string& v : variables_of(r)) s[v] = var("V" + std::to_string(n++));
    return substitute(r, s);
}

void sort_unique(std::vector<Atom>& atoms) {
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
}

}  // namespace

std::vector<std::string> variables_of(const Rule& r) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    collect_vars(r.head, out, seen);
    collect_vars(r.body_pos, out, seen);
    collect_vars(r.body_dl, out, seen);
    collect_vars(r.body_naf, out, seen);
    return out;
}

void collect_constants(const std::vector<Atom>& atoms, std::set<std::string>& out) {
    for (const Atom& a : atoms)
        for (const Term& t : a.args)
            if (t.is_const()) out.insert(t.name);
}

std::set<std::string> constants_of(const Rule& r) {
    std::set<std::string> out;
    collect_constants(r.head, out);
    collect_constants(r.body_pos, out);
    collect_constants(r.body_dl, out);
    collect_constants(r.body_naf, out);
    return out;
}

Rule substitute(const Rule& r, const Substitution& s) {
    return Rule{subst_all(r.head, s), subst_all(r.body_pos, s), subst_all(r.body_dl, s),
                subst_all(r.body_naf, s)};
}

Rule canonical(const Rule& r) {
    Rule cur = rename_by_occurrence(r);
    // Sorting depends on the names chosen by the previous renaming; a few
    // rounds reach a fixpoint for every rule shape we generate.
    for (int round = 0; round < 4; ++round) {
        Rule next = cur;
        sort_unique(next.head);
        sort_unique(next.body_pos);
        sort_unique(next.body_dl);
        sort_unique(next.body_naf);
        next = rename_by_occurrence(next);
        if (next == cur) break;
        cur = std::move(next);
    }
    sort_unique(cur.head);
    sort_unique(cur.body_pos);
    sort_unique(cur.body_dl);
    sort_unique(cur.body_naf);
    return cur;
}

bool same_rule(const Rule& a, const Rule& b) { return canonical(a) == canonical(b); }

std::string to_string(const Term& t) { return t.name; }

std::string to_string(const Atom& a) {
    std::string s = a.pred.name;
    if (a.args.empty()) return s;
    s += '(';
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) s += ',';
        s += a.args[i].name;
    }
    s += ')';
    return s;
}

std::string to_string(const Rule& r) {
    std::string s;
    for (std::size_t i = 0; i < r.head.size(); ++i) {
        if (i) s += " v ";
        s += to_string(r.head[i]);
    }
    if (r.body_size() == 0) return s + (r.head.empty() ? ":- ." : ".");
    s += r.head.empty() ? ":- " : " :- ";
    bool first = true;
    auto emit = [&](const Atom& a, bool naf) {
        if (!first) s += ", ";
        first = false;
        if (naf) s += "not ";
        s += to_string(a);
    };
    for (const Atom& a : r.body_pos) emit(a, false);
    for (const Atom& a : r.body_dl) emit(a, false);
    for (const Atom& a : r.body_naf) emit(a, true);
    return s + ".";
}

// ---------------------------------------------------------------------------

namespace {

std::string role_string(const RoleRef& r) {
    return r.inverse ? "inv(" + r.name + ")" : r.name;
}

}  // namespace

std::string to_string(const TBoxAxiom& ax) {
    if (const auto* ci = std::get_if<ConceptInclusion>(&ax)) {
        std::string s;
        for (std::size_t i = 0; i < ci->lhs.size(); ++i) {
            if (i) s += " and ";
            s += ci->lhs[i];
        }
        s += " subClassOf ";
        switch (ci->rhs) {
            case ConceptInclusion::Rhs::atomic: s += ci->rhs_concept; break;
            case ConceptInclusion::Rhs::negated: s += "not " + ci->rhs_concept; break;
            case ConceptInclusion::Rhs::exists:
                s += "some " + role_string(ci->role) + " " +
                     (ci->rhs_concept.empty() ? std::string("Top") : ci->rhs_concept);
                break;
        }
        return s + ".";
    }
    const auto& ri = std::get<RoleInclusion>(ax);
    return role_string(ri.sub) + " subRoleOf " + role_string(ri.sup) + ".";
}

ToldHierarchy::ToldHierarchy(const TBox& tbox) {
    for (const TBoxAxiom& ax : tbox) {
        if (const auto* ci = std::get_if<ConceptInclusion>(&ax)) {
            if (ci->lhs.size() == 1 && ci->rhs == ConceptInclusion::Rhs::atomic) {
                up_[ci->lhs.front()].insert(ci->rhs_concept);
                down_[ci->rhs_concept].insert(ci->lhs.front());
            }
        } else {
            const auto& ri = std::get<RoleInclusion>(ax);
            if (ri.sub.inverse == ri.sup.inverse) {
                up_[ri.sub.name].insert(ri.sup.name);
                down_[ri.sup.name].insert(ri.sub.name);
            }
        }
    }
    std::set<std::string> names;
    for (const auto& [k, v] : up_) {
        names.insert(k);
        names.insert(v.begin(), v.end());
    }
    for (const std::string& n : names) {
        std::set<std::string>& reach = closure_[n];
        std::vector<std::string> stack{n};
        while (!stack.empty()) {
            std::string cur = stack.back();
            stack.pop_back();
            if (!reach.insert(cur).second) continue;
            if (auto it = up_.find(cur); it != up_.end())
                for (const std::string& s : it->second) stack.push_back(s);
        }
    }
}

bool ToldHierarchy::subsumes(const std::string& sub, const std::string& sup) const {
    if (sub == sup) return true;
    auto it = closure_.find(sub);
    return it != closure_.end() && it->second.count(sup) > 0;
}

const std::set<std::string>& ToldHierarchy::direct_supers(const std::string& name) const {
    static const std::set<std::string> none;
    auto it = up_.find(name);
    return it == up_.end() ? none : it->second;
}

const std::set<std::string>& ToldHierarchy::direct_subs(const std::string& name) const {
    static const std::set<std::string> none;
    auto it = down_.find(name);
    return it == down_.end() ? none : it->second;
}

bool told_subsumption(const Predicate& p, const Predicate& q, const TBox& tbox) {
    if (!p.is_dl() || !q.is_dl())
        throw ValidationError("told subsumption needs DL predicates");
    if (p.kind != q.kind)
        throw ValidationError("told subsumption between a concept and a role: " + p.name +
                              " vs " + q.name);
    return ToldHierarchy(tbox).subsumes(p.name, q.name);
}

// ---------------------------------------------------------------------------

void Signature::declare(const Predicate& p) {
    if (p.is_dl()) {
        auto [it, fresh] = dl_arity_.emplace(p.name, p.arity);
        if (!fresh && it->second != p.arity)
            throw ValidationError("kind clash: '" + p.name + "' used both as a concept and as a role");
    }
    preds_.emplace(std::make_pair(p.name, p.arity), p);
}

void Signature::declare_atoms(const std::vector<Atom>& atoms) {
    for (const Atom& a : atoms) declare(a.pred);
}

std::optional<Predicate> Signature::find(const std::string& name, std::size_t arity) const {
    auto it = preds_.find({name, arity});
    if (it == preds_.end()) return std::nullopt;
    return it->second;
}

std::vector<Predicate> Signature::predicates(PredKind kind) const {
    std::vector<Predicate> out;
    for (const auto& [k, p] : preds_)
        if (p.kind == kind) out.push_back(p);
    return out;
}

std::vector<Predicate> Signature::all() const {
    std::vector<Predicate> out;
    for (const auto& [k, p] : preds_) out.push_back(p);
    return out;
}

ValidationReport validate_rule(const Rule& rule, const Signature& sig) {
    auto resolve = [&](const Atom& a) {
        if (sig.find(a.pred.name, a.args.size())) return;
        for (const Predicate& p : sig.all())
            if (p.name == a.pred.name)
                throw ValidationError("arity mismatch for '" + a.pred.name + "': expected " +
                                      std::to_string(p.arity) + ", got " +
                                      std::to_string(a.args.size()));
        throw ValidationError("unknown predicate '" + a.pred.name + "/" +
                              std::to_string(a.args.size()) + "'");
    };
    for (const auto* part : {&rule.head, &rule.body_pos, &rule.body_dl, &rule.body_naf})
        for (const Atom& a : *part) resolve(a);

    ValidationReport rep;
    for (const Atom& a : rule.body_pos)
        if (a.is_dl())
            rep.violations.push_back({Violation::Kind::body_part_kind, "",
                                      "DL atom " + to_string(a) + " in the Datalog body part"});
    for (const Atom& a : rule.body_dl)
        if (!a.is_dl())
            rep.violations.push_back({Violation::Kind::body_part_kind, "",
                                      "Datalog atom " + to_string(a) + " in the DL body part"});
    for (const Atom& a : rule.body_naf)
        if (a.is_dl())
            rep.violations.push_back({Violation::Kind::naf_on_dl, "",
                                      "negation as failure applied to DL atom " + to_string(a)});

    std::set<std::string> in_pos, in_dl;
    for (const Atom& a : rule.body_pos)
        for (const Term& t : a.args)
            if (t.is_var()) in_pos.insert(t.name);
    for (const Atom& a : rule.body_dl)
        for (const Term& t : a.args)
            if (t.is_var()) in_dl.insert(t.name);

    std::set<std::string> head_vars;
    for (const Atom& a : rule.head)
        for (const Term& t : a.args)
            if (t.is_var()) head_vars.insert(t.name);

    for (const std::string& v : variables_of(rule)) {
        if (!in_pos.count(v) && !in_dl.count(v))
            rep.violations.push_back({Violation::Kind::datalog_safeness, v,
                                      "variable " + v + " occurs in no positive body atom"});
        if (head_vars.count(v) && !in_pos.count(v))
            rep.violations.push_back({Violation::Kind::weak_dl_safeness, v,
                                      "head variable " + v +
                                          " occurs in no positive Datalog body atom"});
        if (!in_pos.count(v) && in_dl.count(v)) rep.weakly_safe_only.push_back(v);
    }
    return rep;
}

// ---------------------------------------------------------------------------

Signature HybridKB::signature() const {
    Signature sig;
    for (const TBoxAxiom& ax : tbox) {
        if (const auto* ci = std::get_if<ConceptInclusion>(&ax)) {
            for (const std::string& c : ci->lhs) sig.declare({c, 1, PredKind::concept_});
            if (!ci->rhs_concept.empty()) sig.declare({ci->rhs_concept, 1, PredKind::concept_});
            if (ci->rhs == ConceptInclusion::Rhs::exists)
                sig.declare({ci->role.name, 2, PredKind::role});
        } else {
            const auto& ri = std::get<RoleInclusion>(ax);
            sig.declare({ri.sub.name, 2, PredKind::role});
            sig.declare({ri.sup.name, 2, PredKind::role});
        }
    }
    sig.declare_atoms(abox);
    for (const Rule& r : rules) {
        sig.declare_atoms(r.head);
        sig.declare_atoms(r.body_pos);
        sig.declare_atoms(r.body_dl);
        sig.declare_atoms(r.body_naf);
    }
    sig.declare_atoms(facts);
    return sig;
}

std::set<std::string> HybridKB::constants() const {
    std::set<std::string> out;
    for (const Rule& r : rules) {
        auto c = constants_of(r);
        out.insert(c.begin(), c.end());
    }
    collect_constants(facts, out);
    collect_constants(abox, out);
    return out;
}

std::set<std::string> constants_of(const HybridKB& kb) { return kb.constants(); }

void HybridKB::validate() const {
    Signature sig = signature();
    for (const Atom& a : abox) {
        if (!a.is_dl()) throw ValidationError("ABox assertion over Datalog predicate: " + to_string(a));
        if (!a.is_ground()) throw ValidationError("non-ground ABox assertion: " + to_string(a));
    }
    for (const Atom& a : facts) {
        if (a.is_dl()) throw ValidationError("fact over DL predicate: " + to_string(a));
        if (!a.is_ground()) throw ValidationError("non-ground fact: " + to_string(a));
    }
    for (const Rule& r : rules) {
        ValidationReport rep = validate_rule(r, sig);
        if (!rep.ok())
            throw ValidationError("rule " + to_string(r) + ": " + rep.violations.front().message);
    }
}

}  // namespace hkb
