#include "hkb/refinement.hpp"

#include <algorithm>

namespace hkb {

std::string to_string(RefinementOp op) {
    switch (op) {
        case RefinementOp::add_data_lit_body_pos: return "AddDataLit_B+";
        case RefinementOp::add_data_lit_body_neg: return "AddDataLit_B-";
        case RefinementOp::add_onto_lit_body: return "AddOntoLit_B";
        case RefinementOp::spec_onto_lit_body: return "SpecOntoLit_B";
        case RefinementOp::add_data_lit_head: return "AddDataLit_H";
        case RefinementOp::add_onto_lit_head: return "AddOntoLit_H";
        case RefinementOp::gen_onto_lit_head: return "GenOntoLit_H";
    }
    return "?";
}

int Candidate::steps(const Atom& a) const {
    auto it = onto_steps.find(a);
    return it == onto_steps.end() ? 0 : it->second;
}

int literal_size(const Atom& a) {
    std::set<std::string> vars;
    for (const Term& t : a.args)
        if (t.is_var()) vars.insert(t.name);
    return static_cast<int>(1 + a.args.size() - vars.size());
}

namespace {

bool same_pred(const Predicate& a, const Predicate& b) { return a.name == b.name && a.arity == b.arity; }

bool in_dl_alphabet(const Atom& a, const LanguageBias& bias) {
    const auto& list = a.pred.kind == PredKind::concept_ ? bias.concepts : bias.roles;
    return std::any_of(list.begin(), list.end(), [&](const Predicate& p) { return same_pred(p, a.pred); });
}

bool matches_any(const Atom& a, const std::vector<AtomTemplate>& ts) {
    return std::any_of(ts.begin(), ts.end(), [&](const AtomTemplate& t) { return t.matches(a); });
}

std::string why_outside(const Rule& r, const LanguageBias& bias) {
    if (static_cast<int>(r.body_size()) > bias.max_body_literals)
        return "body has " + std::to_string(r.body_size()) + " literals, bound is " +
               std::to_string(bias.max_body_literals);
    for (const auto* part : {&r.head, &r.body_pos, &r.body_dl, &r.body_naf})
        for (const Atom& a : *part)
            if (literal_size(a) > bias.max_literal_size)
                return "literal " + to_string(a) + " exceeds size bound " + std::to_string(bias.max_literal_size);
    for (const Atom& a : r.body_pos)
        if (!matches_any(a, bias.d_pos)) return to_string(a) + " is not an allowed positive literal";
    for (const Atom& a : r.body_naf)
        if (!matches_any(a, bias.d_neg)) return to_string(a) + " is not an allowed negated literal";
    for (const Atom& a : r.body_dl)
        if (!in_dl_alphabet(a, bias)) return to_string(a) + " is outside the DL alphabet";
    if (bias.target) {
        if (r.head.size() != 1 || !bias.target->matches(r.head[0]))
            return "head must be a single " + to_string(*bias.target) + " atom";
        return "";
    }
    for (const Atom& a : r.head) {
        if (a.is_dl() ? !in_dl_alphabet(a, bias) : !matches_any(a, bias.d_pos))
            return "head literal " + to_string(a) + " is outside the bias";
    }
    return "";
}

std::string fresh_variable(const std::vector<std::string>& used) {
    auto taken = [&](const std::string& v) { return std::find(used.begin(), used.end(), v) != used.end(); };
    for (const char* v : {"X", "Y", "Z", "W", "U", "V"})
        if (!taken(v)) return v;
    for (int i = 0;; ++i)
        if (!taken("V" + std::to_string(i))) return "V" + std::to_string(i);
}

// Every way to fill the open slots of `pred` from `vars`, plus (when
// `fresh` is nonempty) one new variable. A filling must reuse at least one
// of `vars` unless there are none.
std::vector<Atom> fillings(const Predicate& pred, const std::vector<std::optional<std::string>>& slots,
                           const std::vector<std::string>& vars, const std::string& fresh) {
    std::vector<std::string> choices = vars;
    if (!fresh.empty()) choices.push_back(fresh);
    std::vector<Atom> out;
    if (choices.empty()) {
        if (std::all_of(slots.begin(), slots.end(), [](const auto& s) { return s.has_value(); })) {
            Atom a{pred, {}};
            for (const auto& s : slots) a.args.push_back(cst(*s));
            out.push_back(a);
        }
        return out;
    }
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < slots.size(); ++i)
        if (!slots[i]) open.push_back(i);
    std::vector<std::size_t> idx(open.size(), 0);
    for (;;) {
        Atom a{pred, std::vector<Term>(slots.size())};
        bool reuses = vars.empty();
        for (std::size_t i = 0; i < slots.size(); ++i)
            if (slots[i]) a.args[i] = cst(*slots[i]);
        for (std::size_t k = 0; k < open.size(); ++k) {
            a.args[open[k]] = var(choices[idx[k]]);
            reuses |= idx[k] < vars.size();
        }
        if (reuses) out.push_back(std::move(a));
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == choices.size()) idx[k++] = 0;
        if (k == idx.size()) break;
    }
    return out;
}

std::vector<std::optional<std::string>> open_slots(const Predicate& p) {
    return std::vector<std::optional<std::string>>(p.arity);
}

std::vector<std::string> positive_vars(const Rule& r) {
    std::vector<std::string> out;
    for (const Atom& a : r.body_pos)
        for (const Term& t : a.args)
            if (t.is_var() && std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
    return out;
}

bool contains(const std::vector<Atom>& v, const Atom& a) { return std::find(v.begin(), v.end(), a) != v.end(); }

bool told_below(const Predicate& sub, const Predicate& sup, const ToldHierarchy& h) {
    return sub.kind == sup.kind && sub.arity == sup.arity && h.subsumes(sub.name, sup.name);
}

class Refiner {
public:
    Refiner(const Candidate& from, const LanguageBias& bias, const TBox& tbox)
        : from_(from), bias_(bias), hier_(tbox), parent_key_(to_string(canonical(from.rule))) {
        for (const AtomTemplate& t : bias.d_pos) sig_.declare(t.pred);
        for (const AtomTemplate& t : bias.d_neg) sig_.declare(t.pred);
        for (const Predicate& p : bias.concepts) sig_.declare(p);
        for (const Predicate& p : bias.roles) sig_.declare(p);
        if (bias.target) sig_.declare(bias.target->pred);
    }

    void body_additions(bool with_negation, bool with_onto) {
        const Rule& r = from_.rule;
        if (static_cast<int>(r.body_size()) >= bias_.max_body_literals) return;
        const std::vector<std::string> vars = variables_of(r);
        const std::string fresh = fresh_variable(vars);

        for (const AtomTemplate& t : bias_.d_pos)
            for (const Atom& a : fillings(t.pred, t.slots, vars, fresh)) {
                if (contains(r.body_pos, a)) continue;
                Candidate c = from_;
                c.rule.body_pos.push_back(a);
                offer(std::move(c), RefinementOp::add_data_lit_body_pos);
            }
        if (with_negation)
            for (const AtomTemplate& t : bias_.d_neg)
                for (const Atom& a : fillings(t.pred, t.slots, vars, fresh)) {
                    if (contains(r.body_naf, a)) continue;
                    Candidate c = from_;
                    c.rule.body_naf.push_back(a);
                    offer(std::move(c), RefinementOp::add_data_lit_body_neg);
                }
        if (!with_onto) return;
        for (const Predicate& s : dl_alphabet()) {
            const bool blocked = std::any_of(r.body_dl.begin(), r.body_dl.end(),
                                             [&](const Atom& l) { return told_below(s, l.pred, hier_); });
            if (blocked) continue;
            for (const Atom& a : fillings(s, open_slots(s), vars, fresh)) {
                Candidate c = from_;
                c.rule.body_dl.push_back(a);
                offer(std::move(c), RefinementOp::add_onto_lit_body);
            }
        }
    }

    void body_specialisations() {
        const Rule& r = from_.rule;
        for (std::size_t i = 0; i < r.body_dl.size(); ++i) {
            const Atom& old = r.body_dl[i];
            const int steps = from_.steps(old) + 1;
            if (steps > bias_.max_onto_steps) continue;
            for (const Predicate& s : dl_alphabet()) {
                if (same_pred(s, old.pred) || !told_below(s, old.pred, hier_)) continue;
                Atom moved{s, old.args};
                if (contains(r.body_dl, moved)) continue;
                Candidate c = from_;
                c.rule.body_dl[i] = moved;
                c.onto_steps.erase(old);
                c.onto_steps[moved] = steps;
                offer(std::move(c), RefinementOp::spec_onto_lit_body);
            }
        }
    }

    void head_moves() {
        const Rule& r = from_.rule;
        const std::vector<std::string> vars = positive_vars(r);
        for (const AtomTemplate& t : bias_.d_pos)
            for (const Atom& a : fillings(t.pred, t.slots, vars, "")) {
                if (contains(r.head, a)) continue;
                Candidate c = from_;
                c.rule.head.push_back(a);
                offer(std::move(c), RefinementOp::add_data_lit_head);
            }
        for (const Predicate& s : dl_alphabet()) {
            const bool blocked = std::any_of(r.head.begin(), r.head.end(), [&](const Atom& h) {
                return h.is_dl() && told_below(s, h.pred, hier_);
            });
            if (blocked) continue;
            for (const Atom& a : fillings(s, open_slots(s), vars, "")) {
                Candidate c = from_;
                c.rule.head.push_back(a);
                offer(std::move(c), RefinementOp::add_onto_lit_head);
            }
        }
        for (std::size_t i = 0; i < r.head.size(); ++i) {
            const Atom& old = r.head[i];
            if (!old.is_dl()) continue;
            const int steps = from_.steps(old) + 1;
            if (steps > bias_.max_onto_steps) continue;
            for (const Predicate& s : dl_alphabet()) {
                if (same_pred(s, old.pred) || !told_below(old.pred, s, hier_)) continue;
                Atom moved{s, old.args};
                if (contains(r.head, moved)) continue;
                Candidate c = from_;
                c.rule.head[i] = moved;
                c.onto_steps.erase(old);
                c.onto_steps[moved] = steps;
                offer(std::move(c), RefinementOp::gen_onto_lit_head);
            }
        }
    }

    std::vector<Candidate> take() {
        std::vector<Candidate> out;
        for (auto& [key, c] : found_) out.push_back(std::move(c));
        return out;
    }

private:
    const Candidate& from_;
    const LanguageBias& bias_;
    ToldHierarchy hier_;
    Signature sig_;
    std::string parent_key_;
    std::map<std::string, Candidate> found_;  // canonical text -> candidate

    std::vector<Predicate> dl_alphabet() const {
        std::vector<Predicate> out = bias_.concepts;
        out.insert(out.end(), bias_.roles.begin(), bias_.roles.end());
        return out;
    }

    void offer(Candidate c, RefinementOp op) {
        const Rule& r = c.rule;
        if (r.body_pos.empty()) return;
        for (const Atom& h : r.head)
            if (contains(r.body_pos, h) || contains(r.body_dl, h)) return;  // tautology
        for (const Atom& u : r.body_naf)
            if (contains(r.body_pos, u)) return;  // body can never hold
        if (!within_bias(c, bias_)) return;
        Signature sig = sig_;
        for (const auto* part : {&r.head, &r.body_pos, &r.body_dl, &r.body_naf}) sig.declare_atoms(*part);
        if (!validate_rule(r, sig).ok()) return;

        std::string key = to_string(canonical(r));
        if (key == parent_key_) return;
        c.ops = {op};
        auto [it, inserted] = found_.try_emplace(key, c);
        if (inserted) return;
        it->second.ops.insert(op);
        for (const auto& [atom, steps] : c.onto_steps) {
            auto cur = it->second.onto_steps.find(atom);
            if (cur != it->second.onto_steps.end() && steps < cur->second) cur->second = steps;
        }
    }
};

}  // namespace

bool within_bias(const Rule& r, const LanguageBias& bias) { return why_outside(r, bias).empty(); }

bool within_bias(const Candidate& c, const LanguageBias& bias) {
    if (!within_bias(c.rule, bias)) return false;
    return std::all_of(c.onto_steps.begin(), c.onto_steps.end(),
                       [&](const auto& kv) { return kv.second <= bias.max_onto_steps; });
}

std::vector<Candidate> rho_view(const Candidate& r, const LanguageBias& bias, const TBox& tbox,
                                std::string* diagnostic) {
    std::string why = bias.target ? why_outside(r.rule, bias) : "the bias has no target predicate";
    if (why.empty() && !within_bias(r, bias)) why = "a DL literal exceeds the specialisation-step bound";
    if (!why.empty()) {
        if (diagnostic) *diagnostic = why;
        return {};
    }
    Refiner ref(r, bias, tbox);
    ref.body_additions(true, true);
    ref.body_specialisations();
    return ref.take();
}

std::vector<Candidate> rho_view(const Rule& r, const LanguageBias& bias, const TBox& tbox, std::string* diagnostic) {
    return rho_view(Candidate{r, {}, {}}, bias, tbox, diagnostic);
}

std::vector<Candidate> rho_constraint(const Candidate& r, const LanguageBias& bias, const TBox& tbox,
                                      std::string* diagnostic) {
    LanguageBias open = bias;
    open.target.reset();
    std::string why = why_outside(r.rule, open);
    if (why.empty() && !within_bias(r, open)) why = "a DL literal exceeds the generalisation-step bound";
    if (!why.empty()) {
        if (diagnostic) *diagnostic = why;
        return {};
    }
    Refiner ref(r, open, tbox);
    ref.body_additions(true, true);
    ref.body_specialisations();
    ref.head_moves();
    return ref.take();
}

std::vector<Candidate> rho_constraint(const Rule& r, const LanguageBias& bias, const TBox& tbox,
                                      std::string* diagnostic) {
    return rho_constraint(Candidate{r, {}, {}}, bias, tbox, diagnostic);
}

Rule most_general_view(const LanguageBias& bias) {
    if (!bias.target) throw ValidationError("the bias has no target predicate");
    Rule r;
    Atom h{bias.target->pred, {}};
    for (std::size_t i = 0; i < bias.target->slots.size(); ++i) {
        const auto& s = bias.target->slots[i];
        h.args.push_back(s ? cst(*s) : var(i == 0 ? "X" : "X" + std::to_string(i)));
    }
    r.head.push_back(h);
    return r;
}

}  // namespace hkb
