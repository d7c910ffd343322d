// Domain model for hybrid knowledge bases: a DL-Lite style ontology paired
// with a disjunctive Datalog program with negation as failure.
#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hkb {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Structural problems with a rule or KB (unknown predicate, arity clash, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A configured search or size limit was exceeded.
class ResourceError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Terms, predicates, atoms
// ---------------------------------------------------------------------------

enum class TermKind { variable, constant };

struct Term {
    TermKind kind = TermKind::constant;
    std::string name;

    bool is_var() const { return kind == TermKind::variable; }
    bool is_const() const { return kind == TermKind::constant; }

    auto operator<=>(const Term&) const = default;
};

inline Term var(std::string name) { return {TermKind::variable, std::move(name)}; }
inline Term cst(std::string name) { return {TermKind::constant, std::move(name)}; }

enum class PredKind { concept_, role, datalog };

std::string_view to_string(PredKind k);

struct Predicate {
    std::string name;
    std::size_t arity = 0;
    PredKind kind = PredKind::datalog;

    bool is_dl() const { return kind != PredKind::datalog; }

    // Kind is a function of (name, arity) inside one signature.
    bool operator==(const Predicate& o) const { return name == o.name && arity == o.arity; }
    std::strong_ordering operator<=>(const Predicate& o) const {
        if (auto c = name <=> o.name; c != 0) return c;
        return arity <=> o.arity;
    }
};

/// Kind by naming convention: an uppercase initial marks a DL name (concept
/// when unary, role when binary); anything else is a Datalog predicate.
/// Throws ValidationError for uppercase names of arity other than 1 or 2.
PredKind kind_for(std::string_view name, std::size_t arity);

struct Atom {
    Predicate pred;
    std::vector<Term> args;

    bool is_dl() const { return pred.is_dl(); }
    bool is_ground() const;

    auto operator<=>(const Atom&) const = default;
};

/// Builds an atom whose predicate kind follows the naming convention.
Atom make_atom(std::string name, std::vector<Term> args);

using Substitution = std::map<std::string, Term>;

Atom substitute(const Atom& a, const Substitution& s);

// ---------------------------------------------------------------------------
// Rules
// ---------------------------------------------------------------------------

/// `p1 v ... v pn :- r1, ..., rm, s1, ..., sk, not u1, ..., not uh.`
/// An empty head is a denial.
struct Rule {
    std::vector<Atom> head;
    std::vector<Atom> body_pos;  // positive Datalog atoms
    std::vector<Atom> body_dl;   // DL atoms
    std::vector<Atom> body_naf;  // Datalog atoms under negation as failure

    bool is_denial() const { return head.empty(); }
    std::size_t body_size() const { return body_pos.size() + body_dl.size() + body_naf.size(); }

    auto operator<=>(const Rule&) const = default;
};

/// Variables in first-occurrence order: head, positive body, DL body, NAF body.
std::vector<std::string> variables_of(const Rule& r);
std::set<std::string> constants_of(const Rule& r);

Rule substitute(const Rule& r, const Substitution& s);

/// Canonical form: body parts treated as sets (sorted, deduplicated), head
/// sorted, variables renamed V0, V1, ... by first occurrence.
Rule canonical(const Rule& r);

/// Equality modulo canonical renaming.
bool same_rule(const Rule& a, const Rule& b);

std::string to_string(const Term& t);
std::string to_string(const Atom& a);
std::string to_string(const Rule& r);

// ---------------------------------------------------------------------------
// Ontology
// ---------------------------------------------------------------------------

struct RoleRef {
    std::string name;
    bool inverse = false;

    auto operator<=>(const RoleRef&) const = default;
};

/// `A1 and ... and An subClassOf rhs` where rhs is `B`, `not B`, or
/// `some R B` / `some inv(R) B` (an empty filler stands for Top).
struct ConceptInclusion {
    enum class Rhs { atomic, negated, exists };

    std::vector<std::string> lhs;
    Rhs rhs = Rhs::atomic;
    std::string rhs_concept;  // target of atomic/negated; filler of exists ("" = Top)
    RoleRef role;         // exists only

    auto operator<=>(const ConceptInclusion&) const = default;
};

struct RoleInclusion {
    RoleRef sub;
    RoleRef sup;

    auto operator<=>(const RoleInclusion&) const = default;
};

using TBoxAxiom = std::variant<ConceptInclusion, RoleInclusion>;
using TBox = std::vector<TBoxAxiom>;

std::string to_string(const TBoxAxiom& ax);

/// Reflexive-transitive closure of the asserted atomic inclusions
/// (`A subClassOf B`, `R subRoleOf S`, `inv(R) subRoleOf inv(S)`).
class ToldHierarchy {
public:
    ToldHierarchy() = default;
    explicit ToldHierarchy(const TBox& tbox);

    bool subsumes(const std::string& sub, const std::string& sup) const;
    /// Names with an asserted inclusion `sub ⊑ name` (one edge).
    const std::set<std::string>& direct_supers(const std::string& name) const;
    const std::set<std::string>& direct_subs(const std::string& name) const;

private:
    std::map<std::string, std::set<std::string>> up_;
    std::map<std::string, std::set<std::string>> down_;
    std::map<std::string, std::set<std::string>> closure_;
};

/// Told subsumption between two DL predicates of the same kind.
/// Throws ValidationError on kind mismatch or non-DL predicates.
bool told_subsumption(const Predicate& p, const Predicate& q, const TBox& tbox);

// ---------------------------------------------------------------------------
// Signature and validation
// ---------------------------------------------------------------------------

class Signature {
public:
    /// Registers a predicate; throws ValidationError when a DL name is used
    /// with two different arities (concept vs role clash).
    void declare(const Predicate& p);
    void declare_atoms(const std::vector<Atom>& atoms);

    /// Looks a predicate up by name and arity.
    std::optional<Predicate> find(const std::string& name, std::size_t arity) const;
    bool contains(const Predicate& p) const { return find(p.name, p.arity).has_value(); }

    std::vector<Predicate> predicates(PredKind kind) const;
    std::vector<Predicate> all() const;

private:
    std::map<std::pair<std::string, std::size_t>, Predicate> preds_;
    std::map<std::string, std::size_t> dl_arity_;
};

struct Violation {
    enum class Kind { datalog_safeness, weak_dl_safeness, naf_on_dl, body_part_kind };
    Kind kind;
    std::string variable;  // empty when not variable-specific
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    /// Variables bound only by DL body atoms (weakly-safe, not DL-safe).
    std::vector<std::string> weakly_safe_only;

    bool ok() const { return violations.empty(); }
};

/// Checks Datalog-safeness and weak DL-safeness. Throws ValidationError for
/// predicates missing from the signature or used with a different arity.
ValidationReport validate_rule(const Rule& rule, const Signature& sig);

// ---------------------------------------------------------------------------
// Hybrid KB
// ---------------------------------------------------------------------------

struct HybridKB {
    TBox tbox;
    std::vector<Atom> abox;   // ground concept/role assertions
    std::vector<Rule> rules;  // intensional program
    std::vector<Atom> facts;  // ground Datalog facts

    Signature signature() const;

    /// All constants of the program and the ontology. Constants seen only in
    /// the ontology are included so that the closure assumption holds.
    std::set<std::string> constants() const;

    /// Throws ValidationError describing the first problem found.
    void validate() const;

    bool empty() const { return tbox.empty() && abox.empty() && rules.empty() && facts.empty(); }
};

std::set<std::string> constants_of(const HybridKB& kb);

/// Constants mentioned in a TBox-free list of atoms.
void collect_constants(const std::vector<Atom>& atoms, std::set<std::string>& out);

}  // namespace hkb
