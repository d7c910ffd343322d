#include "hkb/datalog.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace hkb {

int GroundProgram::intern(const Atom& a) {
    if (auto it = index_.find(a); it != index_.end()) return it->second;
    if (!a.is_ground()) throw ValidationError("non-ground atom in ground program: " + to_string(a));
    if (a.is_dl()) throw ValidationError("DL atom in Datalog program: " + to_string(a));
    int id = static_cast<int>(atoms_.size());
    atoms_.push_back(a);
    index_.emplace(a, id);
    return id;
}

std::optional<int> GroundProgram::find(const Atom& a) const {
    auto it = index_.find(a);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

namespace {

void sort_ids(std::vector<int>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

void GroundProgram::add_rule(GroundRule r) {
    sort_ids(r.head);
    sort_ids(r.pos);
    sort_ids(r.naf);
    if (seen_.insert(r).second) rules_.push_back(std::move(r));
}

void GroundProgram::add_rule(const Rule& r) {
    if (!r.body_dl.empty()) throw ValidationError("DL atom in Datalog rule: " + to_string(r));
    GroundRule g;
    for (const Atom& a : r.head) g.head.push_back(intern(a));
    for (const Atom& a : r.body_pos) g.pos.push_back(intern(a));
    for (const Atom& a : r.body_naf) g.naf.push_back(intern(a));
    add_rule(std::move(g));
}

void GroundProgram::add_fact(const Atom& a) { add_rule(GroundRule{{intern(a)}, {}, {}}); }

Rule GroundProgram::to_rule(const GroundRule& g) const {
    Rule r;
    for (int id : g.head) r.head.push_back(atom(id));
    for (int id : g.pos) r.body_pos.push_back(atom(id));
    for (int id : g.naf) r.body_naf.push_back(atom(id));
    return r;
}

std::vector<Rule> GroundProgram::to_rules() const {
    std::vector<Rule> out;
    for (const GroundRule& g : rules_) out.push_back(to_rule(g));
    return out;
}

std::string to_string(const GroundProgram& p) {
    std::ostringstream os;
    for (const GroundRule& g : p.rules()) os << to_string(p.to_rule(g)) << "\n";
    return os.str();
}

GroundProgram ground(const std::vector<Rule>& rules, const std::set<std::string>& pool) {
    GroundProgram out;
    const std::vector<std::string> consts(pool.begin(), pool.end());
    for (const Rule& r : rules) {
        if (!r.body_dl.empty()) throw ValidationError("DL atom in Datalog rule: " + to_string(r));
        for (const auto* part : {&r.head, &r.body_naf})
            for (const Atom& a : *part)
                if (a.is_dl()) throw ValidationError("DL atom in Datalog rule: " + to_string(r));
        const std::vector<std::string> vars = variables_of(r);
        if (vars.empty()) {
            out.add_rule(r);
            continue;
        }
        if (consts.empty())
            throw ValidationError("cannot ground " + to_string(r) + " over an empty constant pool");
        std::vector<std::size_t> idx(vars.size(), 0);
        for (;;) {
            Substitution s;
            for (std::size_t i = 0; i < vars.size(); ++i) s[vars[i]] = cst(consts[idx[i]]);
            out.add_rule(substitute(r, s));
            std::size_t k = 0;
            while (k < idx.size() && ++idx[k] == consts.size()) idx[k++] = 0;
            if (k == idx.size()) break;
        }
    }
    return out;
}

GroundProgram reduct(const GroundProgram& program, const Interpretation& I) {
    GroundProgram out;
    for (const Atom& a : program.atoms()) out.intern(a);  // keep ids aligned
    for (const GroundRule& g : program.rules()) {
        bool blocked = std::any_of(g.naf.begin(), g.naf.end(),
                                   [&](int id) { return I.count(program.atom(id)) > 0; });
        if (!blocked) out.add_rule(GroundRule{g.head, g.pos, {}});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Minimality check: search for a model J of a positive program with J ⊊ I.
// ---------------------------------------------------------------------------

namespace {

// Clauses over variables 0..n-1; a literal is (var, sign) with sign=true
// meaning the positive literal.
struct Clause {
    std::vector<std::pair<int, bool>> lits;
};

bool dpll(std::vector<signed char>& val, const std::vector<Clause>& clauses) {
    // unit propagation to fixpoint
    std::vector<int> trail;
    auto undo = [&] {
        for (int v : trail) val[static_cast<std::size_t>(v)] = -1;
    };
    for (bool changed = true; changed;) {
        changed = false;
        for (const Clause& c : clauses) {
            int unassigned = 0;
            std::pair<int, bool> last{-1, false};
            bool sat = false;
            for (const auto& [v, sign] : c.lits) {
                signed char x = val[static_cast<std::size_t>(v)];
                if (x < 0) {
                    ++unassigned;
                    last = {v, sign};
                } else if ((x == 1) == sign) {
                    sat = true;
                    break;
                }
            }
            if (sat) continue;
            if (unassigned == 0) {
                undo();
                return false;
            }
            if (unassigned == 1) {
                val[static_cast<std::size_t>(last.first)] = last.second ? 1 : 0;
                trail.push_back(last.first);
                changed = true;
            }
        }
    }
    auto it = std::find(val.begin(), val.end(), static_cast<signed char>(-1));
    if (it == val.end()) return true;
    const auto v = static_cast<std::size_t>(it - val.begin());
    for (signed char choice : {static_cast<signed char>(0), static_cast<signed char>(1)}) {
        val[v] = choice;
        if (dpll(val, clauses)) return true;
        val[v] = -1;
    }
    undo();
    return false;
}

}  // namespace

bool is_stable_model(const Interpretation& I, const GroundProgram& program) {
    for (const Atom& a : I)
        if (!program.find(a)) return false;  // outside the Herbrand base
    const GroundProgram red = reduct(program, I);
    auto in_I = [&](int id) { return I.count(red.atom(id)) > 0; };

    // I must be a model of the reduct.
    for (const GroundRule& g : red.rules()) {
        if (!std::all_of(g.pos.begin(), g.pos.end(), in_I)) continue;
        if (!std::any_of(g.head.begin(), g.head.end(), in_I)) return false;
    }
    if (I.empty()) return true;

    // Variables: the atoms of I. Atoms outside I are false in every J ⊆ I.
    std::map<int, int> var_of;
    for (const Atom& a : I) var_of.emplace(*red.find(a), static_cast<int>(var_of.size()));
    std::vector<Clause> clauses;
    for (const GroundRule& g : red.rules()) {
        if (!std::all_of(g.pos.begin(), g.pos.end(), in_I)) continue;  // body false in every J
        Clause c;
        for (int h : g.head)
            if (auto it = var_of.find(h); it != var_of.end()) c.lits.emplace_back(it->second, true);
        for (int p : g.pos) c.lits.emplace_back(var_of.at(p), false);
        clauses.push_back(std::move(c));
    }
    Clause proper;  // J differs from I
    for (const auto& [id, v] : var_of) proper.lits.emplace_back(v, false);
    clauses.push_back(std::move(proper));

    std::vector<signed char> val(var_of.size(), -1);
    return !dpll(val, clauses);
}

// ---------------------------------------------------------------------------
// Stable model search
// ---------------------------------------------------------------------------

namespace {

class StableSearch {
public:
    StableSearch(const GroundProgram& p, std::size_t max_models)
        : p_(p), max_models_(max_models), val_(p.num_atoms(), -1), head_of_(p.num_atoms()) {
        order_.resize(p.num_atoms());
        std::iota(order_.begin(), order_.end(), 0);
        std::vector<std::string> names;
        for (const Atom& a : p.atoms()) names.push_back(to_string(a));
        std::sort(order_.begin(), order_.end(), [&](int a, int b) {
            return names[static_cast<std::size_t>(a)] < names[static_cast<std::size_t>(b)];
        });
        for (std::size_t r = 0; r < p.rules().size(); ++r)
            for (int h : p.rules()[r].head) head_of_[static_cast<std::size_t>(h)].push_back(r);
    }

    std::vector<Interpretation> run() {
        search();
        return std::move(found_);
    }

private:
    const GroundProgram& p_;
    std::size_t max_models_;
    std::vector<signed char> val_;
    std::vector<std::vector<std::size_t>> head_of_;
    std::vector<int> order_;
    std::vector<int> trail_;
    std::vector<Interpretation> found_;

    signed char v(int id) const { return val_[static_cast<std::size_t>(id)]; }

    void assign(int id, signed char x) {
        val_[static_cast<std::size_t>(id)] = x;
        trail_.push_back(id);
    }

    void backtrack(std::size_t mark) {
        while (trail_.size() > mark) {
            val_[static_cast<std::size_t>(trail_.back())] = -1;
            trail_.pop_back();
        }
    }

    // Returns false on conflict.
    bool propagate() {
        for (bool changed = true; changed;) {
            changed = false;
            // Every rule as a clause: head ∨ ¬pos ∨ naf.
            for (const GroundRule& g : p_.rules()) {
                int unassigned = 0;
                int unit = -1;
                signed char unit_val = 0;
                bool sat = false;
                auto consider = [&](int id, bool positive) {
                    signed char x = v(id);
                    if (x < 0) {
                        ++unassigned;
                        unit = id;
                        unit_val = positive ? 1 : 0;
                    } else if ((x == 1) == positive) {
                        sat = true;
                    }
                };
                for (int h : g.head) consider(h, true);
                for (int b : g.pos) consider(b, false);
                for (int u : g.naf) consider(u, true);
                if (sat) continue;
                if (unassigned == 0) return false;
                if (unassigned == 1) {
                    assign(unit, unit_val);
                    changed = true;
                }
            }
            // Support: a true atom needs a rule whose body can hold and where
            // it is the only true head atom.
            for (std::size_t a = 0; a < val_.size(); ++a) {
                if (val_[a] == 0) continue;
                bool supported = false;
                for (std::size_t r : head_of_[a]) {
                    const GroundRule& g = p_.rules()[r];
                    bool ok = std::none_of(g.pos.begin(), g.pos.end(), [&](int b) { return v(b) == 0; }) &&
                              std::none_of(g.naf.begin(), g.naf.end(), [&](int u) { return v(u) == 1; }) &&
                              std::none_of(g.head.begin(), g.head.end(), [&](int h) {
                                  return static_cast<std::size_t>(h) != a && v(h) == 1;
                              });
                    if (ok) {
                        supported = true;
                        break;
                    }
                }
                if (supported) continue;
                if (val_[a] == 1) return false;
                assign(static_cast<int>(a), 0);
                changed = true;
            }
        }
        return true;
    }

    void search() {
        if (found_.size() >= max_models_) return;
        const std::size_t mark = trail_.size();
        if (!propagate()) {
            backtrack(mark);
            return;
        }
        auto next = std::find_if(order_.begin(), order_.end(), [&](int id) { return v(id) < 0; });
        if (next == order_.end()) {
            Interpretation I;
            for (std::size_t a = 0; a < val_.size(); ++a)
                if (val_[a] == 1) I.insert(p_.atom(static_cast<int>(a)));
            if (is_stable_model(I, p_)) found_.push_back(std::move(I));
            backtrack(mark);
            return;
        }
        for (signed char choice : {static_cast<signed char>(0), static_cast<signed char>(1)}) {
            const std::size_t inner = trail_.size();
            assign(*next, choice);
            search();
            backtrack(inner);
            if (found_.size() >= max_models_) break;
        }
        backtrack(mark);
    }
};

void check_cap(const GroundProgram& p, const SolverLimits& limits) {
    if (p.num_atoms() > limits.max_herbrand)
        throw ResourceError("Herbrand base of " + std::to_string(p.num_atoms()) +
                            " atoms exceeds the limit of " + std::to_string(limits.max_herbrand));
}

}  // namespace

StableModelResult has_stable_model(const GroundProgram& program, const SolverLimits& limits) {
    check_cap(program, limits);
    auto models = StableSearch(program, 1).run();
    if (models.empty()) return {};
    return {true, std::move(models.front())};
}

std::vector<Interpretation> stable_models(const GroundProgram& program, const SolverLimits& limits,
                                          std::size_t max_models) {
    check_cap(program, limits);
    return StableSearch(program, max_models).run();
}

}  // namespace hkb
