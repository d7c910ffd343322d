#include "hkb/parser.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

namespace hkb {

ParseError::ParseError(SourceSpan span, const std::string& message)
    : Error(span.file + ":" + std::to_string(span.line) + ":" + std::to_string(span.column) +
            ": " + message),
      span_(std::move(span)),
      detail_(message) {}

std::string_view to_string(BlockKind k) {
    switch (k) {
        case BlockKind::tbox: return "tbox";
        case BlockKind::abox: return "abox";
        case BlockKind::rules: return "rules";
        case BlockKind::facts: return "facts";
        case BlockKind::bias: return "bias";
        case BlockKind::examples: return "examples";
    }
    return "?";
}

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok { ident, lparen, rparen, comma, dot, colon, turnstile, lbrace, rbrace, pipe, slash, end };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int column;
};

bool ident_start(unsigned char c) { return std::isalnum(c) || c == '_'; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_'; }

std::vector<Token> lex(std::string_view src, const std::string& file) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        unsigned char c = static_cast<unsigned char>(src[i]);
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '%') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        const int tl = line, tc = col;
        auto single = [&](Tok k) {
            out.push_back({k, std::string(1, static_cast<char>(c)), tl, tc});
            advance(1);
        };
        switch (c) {
            case '(': single(Tok::lparen); continue;
            case ')': single(Tok::rparen); continue;
            case ',': single(Tok::comma); continue;
            case '.': single(Tok::dot); continue;
            case '{': single(Tok::lbrace); continue;
            case '}': single(Tok::rbrace); continue;
            case '|': single(Tok::pipe); continue;
            case '/': single(Tok::slash); continue;
            case ':':
                if (i + 1 < src.size() && src[i + 1] == '-') {
                    out.push_back({Tok::turnstile, ":-", tl, tc});
                    advance(2);
                } else {
                    single(Tok::colon);
                }
                continue;
            default: break;
        }
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < src.size()) {
                unsigned char d = static_cast<unsigned char>(src[j]);
                if (ident_char(d)) {
                    ++j;
                } else if (d == '-' && j + 1 < src.size() &&
                           std::isalnum(static_cast<unsigned char>(src[j + 1]))) {
                    j += 2;  // hyphenated DL names such as WANTS-TO-MARRY
                } else {
                    break;
                }
            }
            out.push_back({Tok::ident, std::string(src.substr(i, j - i)), tl, tc});
            advance(j - i);
            continue;
        }
        static const char* hex = "0123456789abcdef";
        std::string shown = std::isprint(c) ? std::string(1, static_cast<char>(c))
                                            : std::string("byte 0x") + hex[c >> 4] + hex[c & 15];
        throw ParseError({file, tl, tc}, "unexpected character '" + shown + "'");
    }
    out.push_back({Tok::end, "", line, col});
    return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

bool upper_initial(const std::string& s) {
    return !s.empty() && std::isupper(static_cast<unsigned char>(s.front()));
}

class Parser {
public:
    Parser(std::string_view text, std::string file) : file_(std::move(file)), toks_(lex(text, file_)) {}

    SourceDocument document() {
        SourceDocument doc;
        std::set<BlockKind> seen;
        while (!at(Tok::end)) {
            const Token& kw = expect(Tok::ident, "block name");
            BlockKind kind = block_kind(kw);
            SourceSpan span = span_of(kw);
            if (!seen.insert(kind).second)
                throw ParseError(span, "duplicate " + std::string(to_string(kind)) + " block");
            doc.blocks.emplace_back(kind, span);
            expect(Tok::lbrace, "'{'");
            switch (kind) {
                case BlockKind::tbox: tbox_block(doc); break;
                case BlockKind::abox: abox_block(doc); break;
                case BlockKind::rules: rules_block(doc); break;
                case BlockKind::facts: facts_block(doc); break;
                case BlockKind::bias: doc.bias = bias_block(); break;
                case BlockKind::examples: doc.examples = examples_block(); break;
            }
            expect(Tok::rbrace, "'}'");
        }
        validate_rules(doc);
        return doc;
    }

    Atom lone_atom() {
        Atom a = atom();
        if (at(Tok::dot)) next();
        expect(Tok::end, "end of input");
        return a;
    }

    Rule lone_rule() {
        SourceSpan span = span_of(peek());
        Rule r = rule();
        expect(Tok::end, "end of input");
        declare_rule(r, span);
        ValidationReport rep = validate_rule(r, sig_);
        if (!rep.ok()) throw ParseError(span, rep.violations.front().message);
        return r;
    }

private:
    std::string file_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    Signature sig_;

    const Token& peek(std::size_t k = 0) const {
        return toks_[std::min(pos_ + k, toks_.size() - 1)];
    }
    bool at(Tok k) const { return peek().kind == k; }
    bool at_word(std::string_view w, std::size_t k = 0) const {
        return peek(k).kind == Tok::ident && peek(k).text == w;
    }
    const Token& next() {
        const Token& t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }
    SourceSpan span_of(const Token& t) const { return {file_, t.line, t.column}; }

    [[noreturn]] void fail(const Token& t, const std::string& msg) const {
        throw ParseError(span_of(t), msg);
    }

    static std::string describe(const Token& t) {
        return t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
    }

    const Token& expect(Tok k, const std::string& what) {
        if (!at(k)) fail(peek(), "expected " + what + ", found " + describe(peek()));
        return next();
    }

    void expect_word(std::string_view w) {
        if (!at_word(w)) fail(peek(), "expected '" + std::string(w) + "', found " + describe(peek()));
        next();
    }

    BlockKind block_kind(const Token& t) const {
        static const std::map<std::string, BlockKind> names{
            {"tbox", BlockKind::tbox},   {"abox", BlockKind::abox}, {"rules", BlockKind::rules},
            {"facts", BlockKind::facts}, {"bias", BlockKind::bias}, {"examples", BlockKind::examples}};
        auto it = names.find(t.text);
        if (it == names.end()) fail(t, "unknown block '" + t.text + "'");
        return it->second;
    }

    void declare(const Predicate& p, const SourceSpan& span) {
        try {
            sig_.declare(p);
        } catch (const ValidationError& e) {
            throw ParseError(span, e.what());
        }
    }

    void declare_rule(const Rule& r, const SourceSpan& span) {
        for (const auto* part : {&r.head, &r.body_pos, &r.body_dl, &r.body_naf})
            for (const Atom& a : *part) declare(a.pred, span);
    }

    // --- terms and atoms -------------------------------------------------

    Term term() {
        const Token& t = expect(Tok::ident, "term");
        if (t.text.front() == '_') fail(t, "'_' is only allowed in bias templates");
        return upper_initial(t.text) ? var(t.text) : cst(t.text);
    }

    Atom atom() {
        const Token& name = expect(Tok::ident, "predicate name");
        if (name.text.front() == '_' || std::isdigit(static_cast<unsigned char>(name.text.front())))
            fail(name, "invalid predicate name '" + name.text + "'");
        std::vector<Term> args;
        if (at(Tok::lparen)) {
            next();
            args.push_back(term());
            while (at(Tok::comma)) {
                next();
                args.push_back(term());
            }
            expect(Tok::rparen, "')' or ','");
        }
        try {
            return make_atom(name.text, std::move(args));
        } catch (const ValidationError& e) {
            fail(name, e.what());
        }
    }

    Rule rule() {
        Rule r;
        if (!at(Tok::turnstile)) {
            r.head.push_back(atom());
            while (at(Tok::pipe) || at_word("v")) {
                next();
                r.head.push_back(atom());
            }
        }
        if (at(Tok::turnstile)) {
            next();
            if (!at(Tok::dot)) {
                body_literal(r);
                while (at(Tok::comma)) {
                    next();
                    body_literal(r);
                }
            }
        }
        expect(Tok::dot, "'.' at end of rule");
        return r;
    }

    void body_literal(Rule& r) {
        if (at_word("not") && peek(1).kind == Tok::ident) {
            const Token& kw = next();
            Atom a = atom();
            if (a.is_dl()) fail(kw, "negation as failure applied to DL atom " + to_string(a));
            r.body_naf.push_back(std::move(a));
            return;
        }
        Atom a = atom();
        (a.is_dl() ? r.body_dl : r.body_pos).push_back(std::move(a));
    }

    // --- blocks -----------------------------------------------------------

    void rules_block(SourceDocument& doc) {
        while (!at(Tok::rbrace) && !at(Tok::end)) {
            SourceSpan span = span_of(peek());
            Rule r = rule();
            declare_rule(r, span);
            doc.kb.rules.push_back(std::move(r));
            doc.rule_spans.push_back(span);
        }
    }

    void facts_block(SourceDocument& doc) {
        while (!at(Tok::rbrace) && !at(Tok::end)) {
            const Token& start = peek();
            SourceSpan span = span_of(start);
            Atom a = atom();
            expect(Tok::dot, "'.' after fact");
            if (a.is_dl()) fail(start, "DL assertion " + to_string(a) + " belongs in the abox block");
            if (!a.is_ground()) fail(start, "fact " + to_string(a) + " is not ground");
            declare(a.pred, span);
            doc.kb.facts.push_back(std::move(a));
            doc.fact_spans.push_back(span);
        }
    }

    void abox_block(SourceDocument& doc) {
        while (!at(Tok::rbrace) && !at(Tok::end)) {
            const Token& start = peek();
            SourceSpan span = span_of(start);
            Atom a = atom();
            expect(Tok::dot, "'.' after assertion");
            if (!a.is_dl()) fail(start, "Datalog atom " + to_string(a) + " belongs in the facts block");
            if (!a.is_ground()) fail(start, "assertion " + to_string(a) + " is not ground");
            declare(a.pred, span);
            doc.kb.abox.push_back(std::move(a));
            doc.abox_spans.push_back(span);
        }
    }

    std::string dl_name(const char* what) {
        const Token& t = expect(Tok::ident, what);
        if (!upper_initial(t.text)) fail(t, std::string(what) + " must start with an uppercase letter");
        return t.text;
    }

    RoleRef role_ref(const SourceSpan& span) {
        RoleRef r;
        if (at_word("inv") && peek(1).kind == Tok::lparen) {
            next();
            next();
            r.name = dl_name("role name");
            r.inverse = true;
            expect(Tok::rparen, "')'");
        } else {
            r.name = dl_name("role name");
        }
        declare({r.name, 2, PredKind::role}, span);
        return r;
    }

    void tbox_block(SourceDocument& doc) {
        while (!at(Tok::rbrace) && !at(Tok::end)) {
            SourceSpan span = span_of(peek());
            bool role_axiom = (at_word("inv") && peek(1).kind == Tok::lparen) || at_word("subRoleOf", 1);
            if (role_axiom) {
                RoleInclusion ri;
                ri.sub = role_ref(span);
                expect_word("subRoleOf");
                ri.sup = role_ref(span);
                doc.kb.tbox.emplace_back(ri);
            } else {
                ConceptInclusion ci;
                ci.lhs.push_back(dl_name("concept name"));
                while (at_word("and")) {
                    next();
                    ci.lhs.push_back(dl_name("concept name"));
                }
                for (const std::string& c : ci.lhs) declare({c, 1, PredKind::concept_}, span);
                expect_word("subClassOf");
                if (at_word("not")) {
                    next();
                    ci.rhs = ConceptInclusion::Rhs::negated;
                    ci.rhs_concept = dl_name("concept name");
                } else if (at_word("some")) {
                    next();
                    ci.rhs = ConceptInclusion::Rhs::exists;
                    ci.role = role_ref(span);
                    std::string filler = dl_name("filler concept or Top");
                    ci.rhs_concept = filler == "Top" ? "" : filler;
                } else {
                    ci.rhs_concept = dl_name("concept name");
                }
                if (ci.rhs_concept == "Top") fail(peek(), "Top is only allowed as an existential filler");
                if (!ci.rhs_concept.empty()) declare({ci.rhs_concept, 1, PredKind::concept_}, span);
                doc.kb.tbox.emplace_back(ci);
            }
            expect(Tok::dot, "'.' after axiom");
            doc.tbox_spans.push_back(span);
        }
    }

    int integer() {
        const Token& t = expect(Tok::ident, "integer");
        int v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || p != t.text.data() + t.text.size())
            fail(t, "expected an integer, found '" + t.text + "'");
        return v;
    }

    // `name/arity`, `name(_, c1)` or, for DL names, a bare `Name`.
    AtomTemplate atom_template(bool allow_bare) {
        const Token& name = expect(Tok::ident, "predicate name");
        AtomTemplate t;
        std::size_t arity = 0;
        if (at(Tok::slash)) {
            next();
            int n = integer();
            if (n < 0) fail(name, "negative arity");
            arity = static_cast<std::size_t>(n);
            t.slots.assign(arity, std::nullopt);
        } else if (at(Tok::lparen)) {
            next();
            for (;;) {
                const Token& s = expect(Tok::ident, "'_' or constant");
                if (s.text == "_") {
                    t.slots.push_back(std::nullopt);
                } else if (upper_initial(s.text) || s.text.front() == '_') {
                    fail(s, "template slots are '_' or constants");
                } else {
                    t.slots.push_back(s.text);
                }
                if (!at(Tok::comma)) break;
                next();
            }
            expect(Tok::rparen, "')'");
            arity = t.slots.size();
        } else if (allow_bare && upper_initial(name.text)) {
            arity = 1;
            t.slots.assign(1, std::nullopt);
        } else {
            fail(name, "expected '/arity' or an argument template after '" + name.text + "'");
        }
        try {
            t.pred = {name.text, arity, kind_for(name.text, arity)};
        } catch (const ValidationError& e) {
            fail(name, e.what());
        }
        return t;
    }

    std::vector<AtomTemplate> template_list(bool allow_bare) {
        std::vector<AtomTemplate> out;
        if (at(Tok::dot)) return out;
        out.push_back(atom_template(allow_bare));
        while (at(Tok::comma)) {
            next();
            out.push_back(atom_template(allow_bare));
        }
        return out;
    }

    LanguageBias bias_block() {
        LanguageBias b;
        std::set<std::string> fields;
        const Token& open = peek();
        while (!at(Tok::rbrace) && !at(Tok::end)) {
            const Token& field = expect(Tok::ident, "bias field");
            if (!fields.insert(field.text).second) fail(field, "duplicate bias field '" + field.text + "'");
            expect(Tok::colon, "':'");
            const std::string& f = field.text;
            if (f == "target") {
                b.target = atom_template(false);
            } else if (f == "datalog_pos") {
                b.d_pos = template_list(false);
            } else if (f == "datalog_neg") {
                b.d_neg = template_list(false);
            } else if (f == "concepts" || f == "roles") {
                for (const AtomTemplate& t : template_list(true)) {
                    if (std::any_of(t.slots.begin(), t.slots.end(), [](const auto& s) { return s.has_value(); }))
                        fail(field, "DL templates cannot fix constants");
                    (f == "concepts" ? b.concepts : b.roles).push_back(t.pred);
                }
            } else if (f == "max_body_literals") {
                b.max_body_literals = integer();
            } else if (f == "max_literal_size") {
                b.max_literal_size = integer();
            } else if (f == "max_onto_steps") {
                b.max_onto_steps = integer();
            } else {
                fail(field, "unknown bias field '" + f + "'");
            }
            expect(Tok::dot, "'.' after bias field");
        }
        try {
            check_bias_shape(b);
        } catch (const ValidationError& e) {
            fail(open, e.what());
        }
        return b;
    }

    std::vector<Atom> ground_atom_list() {
        std::vector<Atom> out;
        if (at(Tok::dot)) return out;
        for (;;) {
            const Token& start = peek();
            Atom a = atom();
            if (!a.is_ground()) fail(start, "example " + to_string(a) + " is not ground");
            out.push_back(std::move(a));
            if (!at(Tok::comma)) break;
            next();
        }
        return out;
    }

    ExampleSet examples_block() {
        ExampleSet ex;
        std::set<std::string> fields;
        const SourceSpan open = span_of(peek());
        while (!at(Tok::rbrace) && !at(Tok::end)) {
            const Token& field = expect(Tok::ident, "'pos' or 'neg'");
            if (field.text != "pos" && field.text != "neg") fail(field, "expected 'pos' or 'neg'");
            if (!fields.insert(field.text).second) fail(field, "duplicate '" + field.text + "' list");
            expect(Tok::colon, "':'");
            (field.text == "pos" ? ex.positives : ex.negatives) = ground_atom_list();
            expect(Tok::dot, "'.' after example list");
        }
        for (const Atom& p : ex.positives)
            for (const Atom& n : ex.negatives)
                if (p == n) throw ParseError(open, "example " + to_string(p) + " is both positive and negative");
        return ex;
    }

    void validate_rules(const SourceDocument& doc) {
        for (std::size_t i = 0; i < doc.kb.rules.size(); ++i) {
            ValidationReport rep;
            try {
                rep = validate_rule(doc.kb.rules[i], sig_);
            } catch (const ValidationError& e) {
                throw ParseError(doc.rule_spans[i], e.what());
            }
            if (!rep.ok())
                throw ParseError(doc.rule_spans[i], "unsafe rule " + to_string(doc.kb.rules[i]) + ": " +
                                                        rep.violations.front().message);
        }
    }
};

}  // namespace

SourceDocument parse_document(std::string_view text, const std::string& file) {
    return Parser(text, file).document();
}

HybridKB parse_kb(std::string_view text, const std::string& file) {
    return parse_document(text, file).kb;
}

LanguageBias parse_bias(std::string_view text, const Signature* sig, const std::string& file) {
    SourceDocument doc = parse_document(text, file);
    if (!doc.bias) throw ParseError({file, 1, 1}, "no bias block found");
    if (sig) {
        SourceSpan span;
        for (const auto& [k, s] : doc.blocks)
            if (k == BlockKind::bias) span = s;
        try {
            check_bias(*doc.bias, *sig);
        } catch (const ValidationError& e) {
            throw ParseError(span, e.what());
        }
    }
    return *doc.bias;
}

ExampleSet parse_examples(std::string_view text, const std::string& file) {
    SourceDocument doc = parse_document(text, file);
    if (!doc.examples) throw ParseError({file, 1, 1}, "no examples block found");
    return *doc.examples;
}

Atom parse_atom(std::string_view text) { return Parser(text, "<atom>").lone_atom(); }

Rule parse_rule(std::string_view text) { return Parser(text, "<rule>").lone_rule(); }

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

template <class Items, class Fn>
void emit_block(std::ostringstream& os, const char* name, const Items& items, Fn&& line) {
    if (items.empty()) return;
    os << name << " {\n";
    for (const auto& it : items) os << "  " << line(it) << "\n";
    os << "}\n";
}

std::string join_templates(const std::vector<AtomTemplate>& ts) {
    std::string s;
    for (std::size_t i = 0; i < ts.size(); ++i) s += (i ? ", " : "") + to_string(ts[i]);
    return s;
}

std::string join_preds(const std::vector<Predicate>& ps) {
    std::string s;
    for (std::size_t i = 0; i < ps.size(); ++i)
        s += (i ? ", " : "") + ps[i].name + "/" + std::to_string(ps[i].arity);
    return s;
}

std::string join_atoms(const std::vector<Atom>& as) {
    std::string s;
    for (std::size_t i = 0; i < as.size(); ++i) s += (i ? ", " : "") + to_string(as[i]);
    return s;
}

}  // namespace

std::string serialize(const HybridKB& kb) {
    std::ostringstream os;
    emit_block(os, "tbox", kb.tbox, [](const TBoxAxiom& ax) { return to_string(ax); });
    emit_block(os, "abox", kb.abox, [](const Atom& a) { return to_string(a) + "."; });
    emit_block(os, "rules", kb.rules, [](const Rule& r) { return to_string(r); });
    emit_block(os, "facts", kb.facts, [](const Atom& a) { return to_string(a) + "."; });
    return os.str();
}

std::string serialize(const LanguageBias& b) {
    std::ostringstream os;
    os << "bias {\n";
    if (b.target) os << "  target: " << to_string(*b.target) << ".\n";
    os << "  datalog_pos: " << join_templates(b.d_pos) << ".\n";
    os << "  datalog_neg: " << join_templates(b.d_neg) << ".\n";
    os << "  concepts: " << join_preds(b.concepts) << ".\n";
    os << "  roles: " << join_preds(b.roles) << ".\n";
    os << "  max_body_literals: " << b.max_body_literals << ".\n";
    os << "  max_literal_size: " << b.max_literal_size << ".\n";
    os << "  max_onto_steps: " << b.max_onto_steps << ".\n";
    os << "}\n";
    return os.str();
}

std::string serialize(const ExampleSet& ex) {
    std::ostringstream os;
    os << "examples {\n";
    os << "  pos: " << join_atoms(ex.positives) << ".\n";
    os << "  neg: " << join_atoms(ex.negatives) << ".\n";
    os << "}\n";
    return os.str();
}

std::string serialize_theory(const std::vector<Rule>& rules) {
    std::ostringstream os;
    os << "rules {\n";
    for (const Rule& r : rules) os << "  " << to_string(r) << "\n";
    os << "}\n";
    return os.str();
}

}  // namespace hkb
