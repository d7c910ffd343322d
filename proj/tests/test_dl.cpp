#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "hkb/dl.hpp"
#include "hkb/parser.hpp"
#include "support.hpp"

using namespace hkb;

namespace {

TBox tbox(const std::string& text) { return parse_kb("tbox {" + text + "}").tbox; }

// "A(x), R(x,Y)" -> CQ; uppercase arguments are existential variables.
BooleanCQ cq(const std::string& atoms) {
    if (atoms.empty()) return {};
    Rule r = parse_kb("rules { :- " + atoms + ". }").rules.at(0);
    return BooleanCQ{r.body_dl};
}

BooleanUCQ ucq(std::initializer_list<const char*> ds) {
    BooleanUCQ q;
    for (const char* d : ds) q.disjuncts.push_back(cq(d));
    return q;
}

const char* kHappy =
    "RICH and UNMARRIED subClassOf some inv(WANTS_TO_MARRY) Top. WANTS_TO_MARRY subRoleOf LOVES.";
const char* kStudents =
    "PERSON subClassOf some inv(FATHER) MALE. MALE subClassOf PERSON. FEMALE subClassOf PERSON."
    " FEMALE subClassOf not MALE.";
const char* kRoles = "R subRoleOf S. inv(S) subRoleOf T.";
const char* kExists = "A subClassOf some R B. B subClassOf C.";

}  // namespace

TEST_CASE("chase: conjunctive existential forces an inverse witness, then the role hierarchy") {
    CanonicalInstance inst = chase(cq("RICH(m), UNMARRIED(m)").atoms, tbox(kHappy), 1);
    CHECK_FALSE(inst.clash);
    bool wtm = false, loves = false;
    for (const Atom& a : inst.atoms) {
        if (a.args.size() == 2 && is_null(a.args[0]) && a.args[1].name == "m") {
            wtm |= a.pred.name == "WANTS_TO_MARRY";
            loves |= a.pred.name == "LOVES";
        }
    }
    CHECK(wtm);
    CHECK(loves);
}

TEST_CASE("chase: disjointness clash") {
    CHECK(chase(cq("FEMALE(x), MALE(x)").atoms, tbox(kStudents), 1).clash);
    CHECK_FALSE(chase(cq("FEMALE(x), PERSON(x)").atoms, tbox(kStudents), 1).clash);
}

TEST_CASE("chase: empty TBox is the identity") {
    auto seed = cq("A(a), R(a,b)").atoms;
    CanonicalInstance inst = chase(seed, {}, 3);
    CHECK(inst.atoms == std::set<Atom>(seed.begin(), seed.end()));
}

TEST_CASE("chase: depth bound stops the infinite father chain") {
    for (int d = 0; d <= 3; ++d) {
        CanonicalInstance inst = chase(cq("PERSON(p)").atoms, tbox(kStudents), d);
        CHECK(static_cast<int>(inst.depth.size()) == d);
        for (const auto& [n, depth] : inst.depth) CHECK(depth <= d);
    }
}

TEST_CASE("ABox consistency") {
    HybridKB kb = parse_kb(read_data("students.hkb"));
    CHECK(is_abox_consistent(kb.tbox, kb.abox));
    auto more = kb.abox;
    more.push_back(parse_atom("FEMALE(bob)"));
    CHECK_FALSE(is_abox_consistent(kb.tbox, more));
    CHECK(is_abox_consistent(kb.tbox, {}));
}

TEST_CASE("ABox consistency sees clashes below the first null") {
    TBox t = tbox("A subClassOf some R B. B subClassOf some R C. C subClassOf D. C subClassOf not D.");
    CHECK_FALSE(is_abox_consistent(t, cq("A(a)").atoms));
    CHECK(is_abox_consistent(t, cq("D(a)").atoms));
}

TEST_CASE("containment examples") {
    CHECK(cq_ucq_containment(tbox("WANTS_TO_MARRY subRoleOf LOVES."), cq("WANTS_TO_MARRY(b,a)"),
                             ucq({"LOVES(Y,a)"})));
    BooleanCQ q = cq("A(a), R(a,X)");
    CHECK(cq_ucq_containment({}, q, BooleanUCQ{{cq("B(b)"), q}}));
    CHECK_FALSE(cq_ucq_containment({}, cq("C(a)"), ucq({"D(a)"})));
}

TEST_CASE("containment in the empty UCQ holds only through a clash") {
    CHECK_FALSE(cq_ucq_containment(tbox(kStudents), cq("MALE(a)"), BooleanUCQ{}));
    CHECK(cq_ucq_containment(tbox(kStudents), cq("MALE(a), FEMALE(a)"), BooleanUCQ{}));
    CHECK_FALSE(cq_ucq_containment({}, BooleanCQ{}, BooleanUCQ{}));
    CHECK(cq_ucq_containment({}, BooleanCQ{}, BooleanUCQ{{BooleanCQ{}}}));
}

TEST_CASE("curated containment table") {
    struct Row {
        const char* tbox;
        const char* q1;
        std::vector<const char*> q2;
        bool expected;
    };
    // Each row was traced by hand against the axioms.
    const std::vector<Row> rows{
        {kHappy, "WANTS_TO_MARRY(b,a)", {"LOVES(Y,a)"}, true},
        {kHappy, "RICH(m), UNMARRIED(m)", {"WANTS_TO_MARRY(Y,m)"}, true},
        {kHappy, "RICH(m), UNMARRIED(m)", {"LOVES(Y,m)"}, true},
        {kHappy, "RICH(m)", {"LOVES(Y,m)"}, false},
        {kHappy, "RICH(m), UNMARRIED(m)", {"LOVES(m,Y)"}, false},
        {kHappy, "LOVES(b,a)", {"WANTS_TO_MARRY(b,a)"}, false},
        {kStudents, "MALE(x)", {"PERSON(x)"}, true},
        {kStudents, "FEMALE(x), MALE(x)", {"FATHER(x,x)"}, true},
        {kStudents, "FEMALE(x)", {"FATHER(Y,x), MALE(Y)"}, true},
        {kStudents, "PERSON(x)", {"MALE(x)"}, false},
        {kStudents, "PERSON(x)", {"FATHER(Y,x), FATHER(Z,Y)"}, true},
        {kStudents, "PERSON(x)", {"FATHER(x,Y)"}, false},
        {kStudents, "MALE(x)", {"FEMALE(x)"}, false},
        {kStudents, "PERSON(x)", {"MALE(x)", "FEMALE(x)"}, false},
        {"", "C(a)", {"D(a)"}, false},
        {"", "C(a), R(a,b)", {"R(a,X), C(a)"}, true},
        {kRoles, "R(a,b)", {"T(b,a)"}, true},
        {kRoles, "R(a,b)", {"T(a,b)"}, false},
        {kExists, "A(a)", {"R(a,Y), C(Y)"}, true},
        {kExists, "A(a)", {"R(Y,a)"}, false},
        {kStudents, "MALE(X)", {"PERSON(Z)"}, true},
        {kStudents, "MALE(X)", {"FEMALE(Z)", "PERSON(X)"}, true},
    };
    int i = 0;
    for (const Row& r : rows) {
        BooleanUCQ q2;
        for (const char* d : r.q2) q2.disjuncts.push_back(cq(d));
        INFO("row " << i << ": " << r.q1);
        CHECK(cq_ucq_containment(tbox(r.tbox), cq(r.q1), q2) == r.expected);
        ++i;
    }
}

// ---------------------------------------------------------------------------
// Randomised properties
// ---------------------------------------------------------------------------

namespace {

struct Gen {
    std::mt19937 rng;
    explicit Gen(unsigned seed) : rng(seed) {}

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

    std::string concept_name() { return std::string(1, "ABCD"[pick(4)]); }
    std::string role_name() { return std::string(1, "RS"[pick(2)]) + "R"; }

    TBox random_tbox() {
        std::string text;
        int n = pick(5);
        for (int i = 0; i < n; ++i) {
            switch (pick(5)) {
                case 0: text += concept_name() + " subClassOf " + concept_name() + ". "; break;
                case 1: text += concept_name() + " and " + concept_name() + " subClassOf " + concept_name() + ". "; break;
                case 2: text += concept_name() + " subClassOf not " + concept_name() + ". "; break;
                case 3:
                    text += concept_name() + " subClassOf some " + (pick(2) ? "inv(" + role_name() + ")" : role_name()) +
                            " " + (pick(2) ? concept_name() : std::string("Top")) + ". ";
                    break;
                case 4:
                    text += (pick(2) ? "inv(" + role_name() + ")" : role_name()) + " subRoleOf " +
                            (pick(2) ? "inv(" + role_name() + ")" : role_name()) + ". ";
                    break;
            }
        }
        return tbox(text);
    }

    Term term() {
        static const char* names[] = {"a", "b", "X", "Y"};
        std::string n = names[pick(4)];
        return std::isupper(static_cast<unsigned char>(n[0])) ? var(n) : cst(n);
    }

    Atom atom() {
        if (pick(2)) return make_atom(concept_name(), {term()});
        return make_atom(role_name(), {term(), term()});
    }

    BooleanCQ random_cq(int max_atoms) {
        BooleanCQ q;
        int n = 1 + pick(max_atoms);
        for (int i = 0; i < n; ++i) q.atoms.push_back(atom());
        return q;
    }
};

}  // namespace

TEST_CASE("property: containment is reflexive (500 cases)") {
    Gen g(1);
    int failures = 0;
    for (int t = 0; t < 500; ++t) {
        TBox T = g.random_tbox();
        BooleanCQ q = g.random_cq(3);
        if (!cq_ucq_containment(T, q, BooleanUCQ{{q}})) ++failures;
    }
    CHECK(failures == 0);
}

TEST_CASE("property: containment is monotone in q2 and in q1 (500 cases each)") {
    Gen g(2);
    int q2_flips = 0, q1_flips = 0, positives = 0;
    for (int t = 0; t < 500; ++t) {
        TBox T = g.random_tbox();
        BooleanCQ q1 = g.random_cq(3);
        BooleanUCQ q2{{g.random_cq(2)}};
        const bool before = cq_ucq_containment(T, q1, q2);
        positives += before;
        BooleanUCQ wider = q2;
        wider.disjuncts.push_back(g.random_cq(2));
        if (before && !cq_ucq_containment(T, q1, wider)) ++q2_flips;
        BooleanCQ stronger = q1;
        stronger.atoms.push_back(g.atom());
        if (before && !cq_ucq_containment(T, stronger, q2)) ++q1_flips;
    }
    CHECK(q2_flips == 0);
    CHECK(q1_flips == 0);
    CHECK(positives > 20);
}

TEST_CASE("property: chase is idempotent at equal depth (500 cases)") {
    Gen g(3);
    int changed = 0;
    for (int t = 0; t < 500; ++t) {
        TBox T = g.random_tbox();
        const int d = 1 + g.pick(3);
        CanonicalInstance inst = chase(freeze(g.random_cq(4)), T, d);
        CanonicalInstance again = inst;
        extend(again, {}, T, d);
        std::vector<Atom> all(inst.atoms.begin(), inst.atoms.end());
        extend(again, all, T, d);
        if (again.atoms != inst.atoms || again.clash != inst.clash) ++changed;
    }
    CHECK(changed == 0);
}
