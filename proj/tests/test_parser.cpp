#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "hkb/parser.hpp"
#include "support.hpp"

using namespace hkb;

namespace {

// Random valid KBs over a small alphabet. Rules are made safe by construction:
// every head and NAF variable is drawn from the variables of the positive
// Datalog body.
class KbGen {
public:
    explicit KbGen(unsigned seed) : rng_(seed) {}

    HybridKB kb() {
        HybridKB out;
        for (int i = pick(0, 4); i > 0; --i) out.tbox.push_back(axiom());
        for (int i = pick(0, 4); i > 0; --i) out.abox.push_back(dl_fact());
        for (int i = pick(0, 5); i > 0; --i) out.rules.push_back(rule());
        for (int i = pick(0, 6); i > 0; --i) out.facts.push_back(datalog_atom(false));
        return out;
    }

private:
    std::mt19937 rng_;

    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    std::string concept_name() { return "C" + std::to_string(pick(0, 3)); }
    std::string role_name() { return "R" + std::to_string(pick(0, 1)); }
    Term constant() { return cst("k" + std::to_string(pick(0, 3))); }

    RoleRef role_ref() { return RoleRef{role_name(), pick(0, 1) == 1}; }

    TBoxAxiom axiom() {
        if (pick(0, 4) == 0) return RoleInclusion{role_ref(), role_ref()};
        ConceptInclusion ci;
        for (int i = pick(1, 2); i > 0; --i) ci.lhs.push_back(concept_name());
        switch (pick(0, 2)) {
            case 0: ci.rhs = ConceptInclusion::Rhs::atomic; ci.rhs_concept = concept_name(); break;
            case 1: ci.rhs = ConceptInclusion::Rhs::negated; ci.rhs_concept = concept_name(); break;
            default:
                ci.rhs = ConceptInclusion::Rhs::exists;
                ci.role = role_ref();
                ci.rhs_concept = pick(0, 1) ? concept_name() : "";
        }
        return ci;
    }

    Atom dl_fact() {
        if (pick(0, 1)) return make_atom(concept_name(), {constant()});
        return make_atom(role_name(), {constant(), constant()});
    }

    // Datalog predicates p0/1, p1/2, q/1.
    Atom datalog_atom(bool allow_vars, const std::vector<std::string>& vars = {"X", "Y", "Z"}) {
        auto term = [&] {
            if (allow_vars && pick(0, 2) > 0) return var(vars[pick(0, static_cast<int>(vars.size()) - 1)]);
            return constant();
        };
        switch (pick(0, 2)) {
            case 0: return make_atom("p0", {term()});
            case 1: return make_atom("p1", {term(), term()});
            default: return make_atom("q", {term()});
        }
    }

    Rule rule() {
        Rule r;
        for (int i = pick(1, 2); i > 0; --i) r.body_pos.push_back(datalog_atom(true));
        std::vector<std::string> bound;
        for (const Atom& a : r.body_pos)
            for (const Term& t : a.args)
                if (t.is_var()) bound.push_back(t.name);
        if (bound.empty()) bound.push_back("");  // ground rule: heads use constants only
        auto bound_term = [&] {
            const std::string& v = bound[pick(0, static_cast<int>(bound.size()) - 1)];
            return v.empty() ? constant() : var(v);
        };
        for (int i = pick(0, 2); i > 0; --i) {
            if (pick(0, 2) == 0)
                r.head.push_back(make_atom(concept_name(), {bound_term()}));
            else
                r.head.push_back(make_atom("q", {bound_term()}));
        }
        for (int i = pick(0, 1); i > 0; --i) {
            // DL atoms may introduce fresh variables (weakly safe only)
            std::vector<Term> args{bound_term()};
            if (pick(0, 1)) {
                args.push_back(pick(0, 1) ? var("W") : bound_term());
                r.body_dl.push_back(make_atom(role_name(), args));
            } else {
                r.body_dl.push_back(make_atom(concept_name(), args));
            }
        }
        for (int i = pick(0, 1); i > 0; --i) r.body_naf.push_back(make_atom("p0", {bound_term()}));
        return r;
    }
};

void check_same_kb(const HybridKB& a, const HybridKB& b) {
    CHECK(a.tbox == b.tbox);
    CHECK(a.abox == b.abox);
    CHECK(a.facts == b.facts);
    REQUIRE(a.rules.size() == b.rules.size());
    for (std::size_t i = 0; i < a.rules.size(); ++i) CHECK(same_rule(a.rules[i], b.rules[i]));
}

SourceSpan error_span(const std::string& text) {
    try {
        parse_document(text, "t.hkb");
    } catch (const ParseError& e) {
        return e.span();
    }
    FAIL("expected a ParseError for: " << text);
    return {};
}

}  // namespace

TEST_CASE("parse the persons and students KB") {
    const SourceDocument doc = parse_document(read_data("students.hkb"), "students.hkb");
    CHECK(doc.kb.tbox.size() == 4);
    CHECK(doc.kb.abox.size() == 4);
    CHECK(doc.kb.rules.size() == 6);
    CHECK(doc.kb.facts.size() == 5);
    CHECK(doc.rule_spans.size() == 6);
    CHECK(doc.rule_spans[0].line == 15);
    CHECK(doc.blocks.size() == 4);
    CHECK(doc.blocks[0].first == BlockKind::tbox);
    CHECK(to_string(doc.kb.rules[2]) == "boy(X) v girl(X) :- enrolled(X,c3,ft), PERSON(X).");
    CHECK(to_string(doc.kb.tbox[0]) == "PERSON subClassOf some inv(FATHER) MALE.");
}

TEST_CASE("empty input") {
    const HybridKB kb = parse_kb("");
    CHECK(kb.empty());
    CHECK(parse_kb("% only a comment\n").empty());
}

TEST_CASE("parse errors carry a position") {
    const SourceSpan unsafe = error_span("rules {\n  p(X) :- .\n}\n");
    CHECK(unsafe.line == 2);
    CHECK(unsafe.file == "t.hkb");

    CHECK(error_span("rules {\n  p(X) :- q(Y).\n}\n").line == 2);
    CHECK(error_span("facts { p(a) }").line == 1);           // missing dot
    CHECK(error_span("facts {\n p(a).\n q(#).\n}").line == 3); // lexical error
    CHECK(error_span("tbox { A subClassOf. }").line == 1);
    CHECK(error_span("facts { p(a). } facts { q(b). }").line == 1);  // duplicate block
    CHECK(error_span("abox { A(x). A(x,y). }").column > 0);          // concept vs role clash
    CHECK(error_span("facts { p(X). }").line == 1);                   // non-ground fact
    CHECK(error_span("rules { q(X) :- r(X), not MALE(X). }").line == 1);
    CHECK(error_span("abox { A(x).").line >= 1);
}

TEST_CASE("parse_bias") {
    const Signature sig = parse_kb(read_data("students5.hkb")).signature();
    const LanguageBias b = parse_bias(read_data("students5.bias"), &sig);
    CHECK_FALSE(b.target.has_value());
    CHECK(b.d_pos.size() == 5);
    CHECK(to_string(b.d_pos[2]) == "enrolled(_,c1)");
    CHECK(b.d_neg.size() == 2);
    CHECK(b.concepts.size() == 3);
    CHECK(b.roles.empty());
    CHECK(b.max_body_literals == 2);

    const LanguageBias d = parse_bias("bias { datalog_pos: p/1. }");
    CHECK(d.max_body_literals == 4);
    CHECK(d.max_literal_size == 4);
    CHECK(d.max_onto_steps == 2);

    CHECK_THROWS_AS(parse_bias("bias { datalog_pos: enrolled(_,c1,_). }", &sig), ParseError);
    CHECK_THROWS_AS(parse_bias("bias { datalog_pos: zork/1. }", &sig), ParseError);
    CHECK_THROWS_AS(parse_bias("bias { target: boy/1. datalog_neg: boy/1. }", &sig), ParseError);
    CHECK_THROWS_AS(parse_bias("bias { concepts: MALE/2. }", &sig), ParseError);
}

TEST_CASE("parse_examples") {
    const ExampleSet ex = parse_examples(read_data("happy.ex"));
    CHECK(ex.positives == std::vector<Atom>{parse_atom("happy(mary)"), parse_atom("happy(joe)")});
    CHECK(ex.negatives == std::vector<Atom>{parse_atom("happy(paul)")});
    CHECK_THROWS_AS(parse_examples("examples { pos: happy(X). }"), ParseError);
    CHECK(parse_examples("examples { }") == ExampleSet{});
    try {
        parse_examples("examples {\n  pos: happy(a).\n  neg: happy(a).\n}\n");
        FAIL("overlapping examples accepted");
    } catch (const ParseError& e) {
        CHECK(e.span().line == 2);
    }
}

TEST_CASE("round trip of the bundled files") {
    for (const char* name : {"students.hkb", "students5.hkb", "happy.hkb"}) {
        CAPTURE(name);
        const HybridKB kb = parse_kb(read_data(name));
        check_same_kb(parse_kb(serialize(kb)), kb);
    }
    const Signature sig = parse_kb(read_data("happy.hkb")).signature();
    const LanguageBias bias = parse_bias(read_data("happy.bias"), &sig);
    CHECK(parse_bias(serialize(bias), &sig) == bias);
    const ExampleSet ex = parse_examples(read_data("happy.ex"));
    CHECK(parse_examples(serialize(ex)) == ex);
}

TEST_CASE("theory serialization") {
    CHECK(serialize_theory({}) == "rules {\n}\n");
    const std::vector<Rule> theory{parse_rule("PERSON(X) :- enrolled(X,c1)."),
                                   parse_rule("boy(X) v girl(X) :- enrolled(X,c1)."),
                                   parse_rule(":- enrolled(X,c2), not girl(X).")};
    const HybridKB back = parse_kb(serialize_theory(theory));
    REQUIRE(back.rules.size() == theory.size());
    for (std::size_t i = 0; i < theory.size(); ++i) CHECK(same_rule(back.rules[i], theory[i]));
}

TEST_CASE("round trip on random KBs") {
    KbGen gen(20241014);
    int nonempty = 0;
    for (int i = 0; i < 600; ++i) {
        const HybridKB kb = gen.kb();
        REQUIRE_NOTHROW(kb.validate());
        const std::string text = serialize(kb);
        CAPTURE(text);
        HybridKB back;
        REQUIRE_NOTHROW(back = parse_kb(text));
        check_same_kb(back, kb);
        CHECK(serialize(back) == text);
        nonempty += !kb.rules.empty();
    }
    CHECK(nonempty > 300);
}

TEST_CASE("arbitrary bytes never crash the parser") {
    std::mt19937 rng(99);
    const std::string seedtext = read_data("students.hkb") + read_data("students5.bias") + read_data("happy.ex");
    int errors = 0;
    for (int i = 0; i < 3000; ++i) {
        std::string text;
        if (i % 2 == 0) {
            const std::size_t n = rng() % 200;
            for (std::size_t j = 0; j < n; ++j) text.push_back(static_cast<char>(rng() % 256));
        } else {
            // mutate real input so that deeper parser states are reached
            text = seedtext;
            for (int m = 0; m < 1 + static_cast<int>(rng() % 6); ++m) {
                const std::size_t pos = rng() % text.size();
                switch (rng() % 3) {
                    case 0: text[pos] = static_cast<char>(rng() % 256); break;
                    case 1: text.erase(pos, 1 + rng() % 8); break;
                    default: text.insert(pos, 1, "(){},.:-_% vnot\n"[rng() % 16]);
                }
                if (text.empty()) text = "x";
            }
        }
        try {
            parse_document(text);
        } catch (const ParseError& e) {
            ++errors;
            CHECK(e.span().line >= 1);
            CHECK(e.span().column >= 1);
        } catch (const Error&) {
            ++errors;
        }
    }
    CHECK(errors > 1500);
}
