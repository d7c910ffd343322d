#include "hkb/generality.hpp"

#include <functional>

namespace hkb {

Skolemized skolemize(const Rule& rule, const std::set<std::string>& reserved) {
    Skolemized out;
    out.context.reserved = reserved;
    Substitution s;
    std::size_t n = 0;
    for (const std::string& v : variables_of(rule)) {
        while (reserved.count("sk" + std::to_string(n))) ++n;
        std::string c = "sk" + std::to_string(n++);
        out.context.sigma[v] = c;
        s[v] = cst(c);
    }
    out.rule = substitute(rule, s);
    return out;
}

Rule rename_naf(const Rule& r) {
    Rule out = r;
    for (Atom a : r.body_naf) {
        a.pred.name = "not_" + a.pred.name;
        out.body_pos.push_back(std::move(a));
    }
    out.body_naf.clear();
    return out;
}

namespace {

// Ground substitutions for the variables of `r` that can make its positive
// body hold somewhere in `kb`. `kb` must already contain `r` so that
// recursive rules count towards derivability.
std::vector<Substitution> candidate_thetas(const HybridKB& kb, const Rule& r, const std::set<std::string>& pool) {
    const std::vector<Substitution> joined = match_body(r.body_pos, datalog_upper_bound(kb));

    const std::vector<std::string> consts(pool.begin(), pool.end());
    std::vector<Substitution> out;
    for (const Substitution& base : joined) {
        std::vector<std::string> rest;
        for (const std::string& v : variables_of(r))
            if (!base.count(v)) rest.push_back(v);
        if (rest.empty()) {
            out.push_back(base);
            continue;
        }
        if (consts.empty()) continue;
        std::vector<std::size_t> idx(rest.size(), 0);
        for (;;) {
            Substitution s = base;
            for (std::size_t i = 0; i < rest.size(); ++i) s[rest[i]] = cst(consts[idx[i]]);
            out.push_back(std::move(s));
            std::size_t k = 0;
            while (k < idx.size() && ++idx[k] == consts.size()) idx[k++] = 0;
            if (k == idx.size()) break;
        }
    }
    return out;
}

// Some grounding of `r` makes `base` plus that grounding unsatisfiable.
bool refutable_with(const HybridKB& base, const Rule& r, const std::set<std::string>& pool,
                    const ReasonerLimits& limits) {
    if (!nm_satisfiable(base, limits).satisfiable) return true;
    HybridKB probe = base;
    probe.rules.push_back(r);
    for (const Substitution& theta : candidate_thetas(probe, r, pool)) {
        probe.rules.back() = substitute(r, theta);
        if (!nm_satisfiable(probe, limits).satisfiable) return true;
    }
    return false;
}

std::set<std::string> rule_constants(const std::vector<Rule>& rules) {
    std::set<std::string> out;
    for (const Rule& r : rules) {
        auto c = constants_of(r);
        out.insert(c.begin(), c.end());
    }
    return out;
}

}  // namespace

bool more_general_ggs(const Rule& r1, const Rule& r2, const HybridKB& kb, const ReasonerLimits& limits) {
    if (r1.head.size() != r2.head.size()) return false;
    const Rule a = rename_naf(r1);
    const Rule b = rename_naf(r2);

    HybridKB reduced;
    reduced.tbox = kb.tbox;
    for (const Rule& r : kb.rules) reduced.rules.push_back(rename_naf(r));

    std::set<std::string> reserved = rule_constants(reduced.rules);
    std::set<std::string> pool = reserved;
    for (const Rule* r : {&a, &b}) {
        auto c = constants_of(*r);
        reserved.insert(c.begin(), c.end());
    }
    const Skolemized sk = skolemize(b, reserved);
    for (const auto& [v, c] : sk.context.sigma) pool.insert(c);

    // head(R1)θ = head(R2)σ fixes θ on the head variables
    Substitution theta;
    for (std::size_t i = 0; i < a.head.size(); ++i) {
        const Atom& h1 = a.head[i];
        const Atom& h2 = sk.rule.head[i];
        if (h1.pred != h2.pred) return false;
        for (std::size_t k = 0; k < h1.args.size(); ++k) {
            const Term& t = h1.args[k];
            if (t.is_const()) {
                if (t != h2.args[k]) return false;
            } else if (auto it = theta.find(t.name); it != theta.end()) {
                if (it->second != h2.args[k]) return false;
            } else {
                theta[t.name] = h2.args[k];
            }
        }
    }

    reduced.facts = sk.rule.body_pos;
    reduced.abox = sk.rule.body_dl;
    Rule denial;
    denial.body_pos = a.body_pos;
    denial.body_dl = a.body_dl;
    return refutable_with(reduced, substitute(denial, theta), pool, limits);
}

bool strictly_more_general_ggs(const Rule& r1, const Rule& r2, const HybridKB& kb, const ReasonerLimits& limits) {
    return more_general_ggs(r1, r2, kb, limits) && !more_general_ggs(r2, r1, kb, limits);
}

bool equivalent_ggs(const Rule& r1, const Rule& r2, const HybridKB& kb, const ReasonerLimits& limits) {
    return more_general_ggs(r1, r2, kb, limits) && more_general_ggs(r2, r1, kb, limits);
}

bool more_general_rel(const Rule& r1, const Rule& r2, const HybridKB& kb, const ReasonerLimits& limits) {
    HybridKB reduced;
    reduced.tbox = kb.tbox;
    reduced.abox = kb.abox;
    reduced.rules = kb.rules;

    std::set<std::string> pool = rule_constants(kb.rules);
    collect_constants(kb.abox, pool);
    std::set<std::string> reserved = pool;
    collect_constants(kb.facts, reserved);
    for (const Rule* r : {&r1, &r2}) {
        auto c = constants_of(*r);
        reserved.insert(c.begin(), c.end());
    }
    const Skolemized sk = skolemize(r2, reserved);
    for (const auto& [v, c] : sk.context.sigma) pool.insert(c);

    // the negation of R2σ: its body holds and neither a head atom nor a
    // negated atom does
    reduced.facts = sk.rule.body_pos;
    reduced.abox.insert(reduced.abox.end(), sk.rule.body_dl.begin(), sk.rule.body_dl.end());
    for (const auto* part : {&sk.rule.head, &sk.rule.body_naf})
        for (const Atom& a : *part) reduced.rules.push_back(with_denial(HybridKB{}, {a}).rules.front());

    return refutable_with(reduced, r1, pool, limits);
}

bool strictly_more_general_rel(const Rule& r1, const Rule& r2, const HybridKB& kb, const ReasonerLimits& limits) {
    return more_general_rel(r1, r2, kb, limits) && !more_general_rel(r2, r1, kb, limits);
}

}  // namespace hkb
