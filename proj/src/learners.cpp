#include "hkb/learners.hpp"

#include <algorithm>
#include <deque>

#include "hkb/generality.hpp"

namespace hkb {

bool covers_view(const Rule& r, const Atom& o, const HybridKB& b, const ReasonerLimits& limits) {
    HybridKB kb = b;
    kb.rules.push_back(r);
    return entails_ground(kb, o, limits);
}

bool covers_theory(const Rule& r, const std::vector<Atom>& facts, const HybridKB& k, const ReasonerLimits& limits) {
    HybridKB kb = k;
    kb.rules.push_back(r);
    // an inconsistent K ∪ {R} would entail the facts vacuously
    return nm_satisfiable(kb, limits).satisfiable && entails_conjunction(kb, facts, limits);
}

Score score(const Rule& r, const ExampleSet& ex, const HybridKB& b, const ReasonerLimits& limits) {
    Score s;
    s.body_len = static_cast<int>(r.body_size());
    for (const Atom& o : ex.positives) s.pos_covered += covers_view(r, o, b, limits);
    for (const Atom& o : ex.negatives) s.neg_covered += covers_view(r, o, b, limits);
    return s;
}

namespace {

void check_examples(const LanguageBias& bias, const ExampleSet& ex) {
    if (!bias.target) throw ValidationError("view learning needs a target in the bias");
    std::set<Atom> pos;
    for (const Atom& a : ex.positives) {
        if (!a.is_ground()) throw ValidationError("example " + to_string(a) + " is not ground");
        if (!bias.target->matches(a))
            throw ValidationError("example " + to_string(a) + " does not match target " + to_string(*bias.target));
        pos.insert(a);
    }
    for (const Atom& a : ex.negatives) {
        if (!a.is_ground()) throw ValidationError("example " + to_string(a) + " is not ground");
        if (!bias.target->matches(a))
            throw ValidationError("example " + to_string(a) + " does not match target " + to_string(*bias.target));
        if (pos.count(a)) throw ValidationError("example " + to_string(a) + " is both positive and negative");
    }
}

std::string list(const std::vector<Atom>& atoms) {
    std::string out;
    for (const Atom& a : atoms) out += (out.empty() ? "" : ", ") + to_string(a);
    return out;
}

// Fewest negatives, most positives, then a candidate that no other tied one
// strictly generalizes, then the shortest body, then canonical text.
std::size_t best_of(const std::vector<ScoredCandidate>& q, const HybridKB& b, const ReasonerLimits& limits) {
    std::vector<std::size_t> tied;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (tied.empty()) {
            tied.push_back(i);
            continue;
        }
        const Score& s = q[i].score;
        const Score& t = q[tied.front()].score;
        if (s.neg_covered < t.neg_covered || (s.neg_covered == t.neg_covered && s.pos_covered > t.pos_covered))
            tied.assign(1, i);
        else if (s.neg_covered == t.neg_covered && s.pos_covered == t.pos_covered)
            tied.push_back(i);
    }
    std::vector<std::size_t> maximal;
    for (std::size_t i : tied) {
        bool dominated = false;
        for (std::size_t j : tied)
            if (j != i && strictly_more_general_ggs(q[j].rule, q[i].rule, b, limits)) {
                dominated = true;
                break;
            }
        if (!dominated) maximal.push_back(i);
    }
    if (maximal.empty()) maximal = tied;  // only reachable if ggs were not a quasi-order
    return *std::min_element(maximal.begin(), maximal.end(), [&](std::size_t x, std::size_t y) {
        if (q[x].score.body_len != q[y].score.body_len) return q[x].score.body_len < q[y].score.body_len;
        return to_string(canonical(q[x].rule)) < to_string(canonical(q[y].rule));
    });
}

}  // namespace

LearnReport nmlearn(const HybridKB& b, const LanguageBias& bias, const ExampleSet& ex, const LearnOptions& opts) {
    check_examples(bias, ex);
    if (!nm_satisfiable(b, opts.limits).satisfiable)
        throw InconsistentInputError("the background KB has no NM-model");
    LearnReport rep;
    std::vector<Atom> pos_left = ex.positives;

    while (!pos_left.empty()) {
        if (rep.rounds.size() >= opts.max_rounds)
            throw ResourceError("covering did not finish within " + std::to_string(opts.max_rounds) + " rounds");
        LearnRound round;
        round.positives_left = pos_left;

        // The root has an unsafe head and is never evaluated; it is taken to
        // cover every negative.
        Candidate cur{most_general_view(bias), {}, {}};
        std::vector<Rule> path{cur.rule};
        std::vector<Atom> neg_left = ex.negatives;
        Score cur_score{static_cast<int>(pos_left.size()), static_cast<int>(neg_left.size()), 0};
        bool stalled = false;

        while (!neg_left.empty()) {
            const std::vector<Candidate> q = rho_view(cur, bias, b.tbox);
            if (q.empty()) {
                rep.warnings.push_back("no refinement of " + to_string(cur.rule) + " is left while it still covers " +
                                       list(neg_left) + "; stopping with " + list(pos_left) + " uncovered");
                stalled = true;
                break;
            }
            InnerStep step;
            step.refined = cur.rule;
            const ExampleSet local{pos_left, neg_left};
            for (const Candidate& c : q) step.candidates.push_back({c.rule, score(c.rule, local, b, opts.limits)});
            step.chosen = best_of(step.candidates, b, opts.limits);
            cur = q[step.chosen];
            cur_score = step.candidates[step.chosen].score;
            path.push_back(cur.rule);
            round.steps.push_back(std::move(step));

            std::vector<Atom> still;
            for (const Atom& e : neg_left)
                if (covers_view(cur.rule, e, b, opts.limits)) still.push_back(e);
            neg_left = std::move(still);
        }
        rep.rounds.push_back(std::move(round));
        if (stalled) break;

        if (cur_score.pos_covered == 0) {
            rep.warnings.push_back("the best rule excluding every negative, " + to_string(cur.rule) + ", covers none of " +
                                   list(pos_left) + "; stopping");
            break;
        }
        std::vector<Atom> rest;
        for (const Atom& o : pos_left)
            if (!covers_view(cur.rule, o, b, opts.limits)) rest.push_back(o);
        pos_left = std::move(rest);
        rep.theory.rules.push_back(cur.rule);
        rep.theory.provenance.push_back({rep.rounds.size(), cur.ops, std::move(path)});
    }
    rep.uncovered = pos_left;
    return rep;
}

namespace {

// A name prefix that no predicate of kb starts with.
std::string fresh_prefix(const HybridKB& kb) {
    std::set<std::string> names;
    for (const Rule& r : kb.rules)
        for (const auto* part : {&r.head, &r.body_pos, &r.body_dl, &r.body_naf})
            for (const Atom& a : *part) names.insert(a.pred.name);
    for (const Atom& a : kb.facts) names.insert(a.pred.name);
    std::string prefix = "hkb_probe_";
    auto clashes = [&] {
        auto it = names.lower_bound(prefix);
        return it != names.end() && it->compare(0, prefix.size(), prefix) == 0;
    };
    while (clashes()) prefix += "_";
    return prefix;
}

}  // namespace

bool accepts(const HybridKB& kb, const Rule& r, Acceptance mode, const ReasonerLimits& limits) {
    return accepts(kb, dl_grounding(kb), r, mode, limits);
}

bool accepts(const HybridKB& kb, const DLGrounding& gr, const Rule& r, Acceptance mode,
             const ReasonerLimits& limits) {
    HybridKB probe = kb;
    if (mode == Acceptance::nm_satisfiable) {
        probe.rules.push_back(r);
        return nm_satisfiable_extending(probe, gr, kb.rules.size(), limits);
    }
    // R fails when some NM-model makes a grounding of its body true and all
    // of its head atoms false. A disjunctive fact picks one grounding; its
    // flag marks the body, and denials keep only the models where the picked
    // grounding is violated. The new atoms never occur in the KB, so every
    // model of the probe extends a model of the KB.
    const std::vector<Substitution> thetas = match_body(r.body_pos, gr.derivable);
    if (thetas.empty()) return true;
    const std::string prefix = fresh_prefix(kb);
    Rule pick;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const Atom chosen = make_atom(prefix + "pick" + std::to_string(i), {});
        const Atom marked = make_atom(prefix + "violated" + std::to_string(i), {});
        pick.head.push_back(chosen);
        const Rule g = substitute(r, thetas[i]);
        Rule mark;
        mark.head = {marked};
        mark.body_pos = g.body_pos;
        mark.body_dl = g.body_dl;
        mark.body_naf = g.body_naf;
        probe.rules.push_back(std::move(mark));
        Rule need;
        need.body_pos = {chosen};
        need.body_naf = {marked};
        probe.rules.push_back(std::move(need));
        for (const Atom& h : g.head) {
            Rule deny;
            deny.body_pos = {chosen};
            (h.is_dl() ? deny.body_dl : deny.body_pos).push_back(h);
            probe.rules.push_back(std::move(deny));
        }
    }
    probe.rules.push_back(std::move(pick));
    return !nm_satisfiable_extending(probe, gr, kb.rules.size(), limits);
}

DiscoverReport nmdisc(const HybridKB& k, const std::vector<Atom>& facts, const LanguageBias& bias,
                      const DiscoverOptions& opts) {
    HybridKB base = k;
    for (const Atom& f : facts) {
        if (!f.is_ground() || f.is_dl()) throw ValidationError("observation " + to_string(f) + " must be a ground Datalog fact");
        if (std::find(base.facts.begin(), base.facts.end(), f) == base.facts.end()) base.facts.push_back(f);
    }
    base.validate();
    if (!nm_satisfiable(base, opts.limits).satisfiable)
        throw InconsistentInputError("the KB together with the observations has no NM-model");

    struct Item {
        Candidate cand;
        std::size_t depth;
        std::vector<Rule> path;
    };
    DiscoverReport rep;
    std::deque<Item> queue;
    std::set<Rule> seen;
    queue.push_back({Candidate{}, 0, {Rule{}}});
    seen.insert(Rule{});
    HybridKB with_h = base;
    DLGrounding gr_h = dl_grounding(with_h);

    while (!queue.empty()) {
        Item it = std::move(queue.front());
        queue.pop_front();
        if (++rep.examined > opts.max_examined)
            throw ResourceError("discovery examined more than " + std::to_string(opts.max_examined) + " rules");
        if (accepts(with_h, gr_h, it.cand.rule, opts.acceptance, opts.limits)) {
            with_h.rules.push_back(it.cand.rule);
            extend_grounding(gr_h, with_h, with_h.rules.size() - 1);
            rep.theory.rules.push_back(it.cand.rule);
            rep.theory.provenance.push_back({it.depth, it.cand.ops, it.path});
            continue;
        }
        for (Candidate& c : rho_constraint(it.cand, bias, k.tbox)) {
            if (!seen.insert(canonical(c.rule)).second) continue;
            std::vector<Rule> path = it.path;
            path.push_back(c.rule);
            queue.push_back({std::move(c), it.depth + 1, std::move(path)});
        }
    }
    rep.final_check = nm_satisfiable(with_h, opts.limits).satisfiable;
    return rep;
}

bool entails_rule(const HybridKB& kb, const Rule& r, const ReasonerLimits& limits) {
    std::set<std::string> reserved = kb.constants();
    for (const std::string& c : constants_of(r)) reserved.insert(c);
    const Rule g = skolemize(r, reserved).rule;
    HybridKB probe = kb;
    for (const Atom& a : g.body_pos) probe.facts.push_back(a);
    for (const Atom& a : g.body_dl) probe.abox.push_back(a);
    for (const Atom& u : g.body_naf) probe = with_denial(probe, {u});
    for (const Atom& h : g.head) probe = with_denial(probe, {h});
    return !nm_satisfiable(probe, limits).satisfiable;
}

Theory minimize_theory(const Theory& h, const HybridKB& k, const std::vector<Atom>& facts,
                       const ReasonerLimits& limits) {
    HybridKB base = k;
    for (const Atom& f : facts)
        if (std::find(base.facts.begin(), base.facts.end(), f) == base.facts.end()) base.facts.push_back(f);
    Theory out = h;
    out.provenance.resize(out.rules.size());
    for (std::size_t i = 0; i < out.rules.size();) {
        HybridKB probe = base;
        for (std::size_t j = 0; j < out.rules.size(); ++j)
            if (j != i) probe.rules.push_back(out.rules[j]);
        if (entails_rule(probe, out.rules[i], limits)) {
            out.rules.erase(out.rules.begin() + static_cast<std::ptrdiff_t>(i));
            out.provenance.erase(out.provenance.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
    return out;
}

}  // namespace hkb
