#include "cli.hpp"

#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "hkb/learners.hpp"
#include "hkb/parser.hpp"
#include "hkb/reasoner.hpp"
#include "json.hpp"

namespace hkb::cli {
namespace {

using Json = nlohmann::ordered_json;

enum class Format { text, json };

struct RunConfig {
    std::string kb_path;
    std::string bias_path;
    std::string examples_path;
    std::string out_path;
    std::string query;
    std::size_t max_partitions = std::size_t{1} << 16;
    std::size_t max_herbrand = 24;
    Format format = Format::text;
    bool trace = false;
    bool minimize = false;

    ReasonerLimits limits() const { return {max_partitions, max_herbrand}; }
};

class InputError : public Error {
public:
    using Error::Error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> strings(const std::vector<Atom>& atoms) {
    std::vector<std::string> out;
    for (const Atom& a : atoms) out.push_back(to_string(a));
    return out;
}

std::vector<std::string> strings(const std::vector<Rule>& rules) {
    std::vector<std::string> out;
    for (const Rule& r : rules) out.push_back(to_string(r));
    return out;
}

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
    return out;
}

// Everything the learners need, with the bias and examples taken from their
// own files when given and from the KB document otherwise.
struct Inputs {
    SourceDocument doc;
    std::optional<LanguageBias> bias;
    std::optional<ExampleSet> examples;
};

Inputs load(const RunConfig& cfg, bool want_bias, bool want_examples) {
    Inputs in;
    in.doc = parse_document(read_file(cfg.kb_path), cfg.kb_path);
    const Signature sig = in.doc.kb.signature();
    if (want_bias) {
        if (!cfg.bias_path.empty())
            in.bias = parse_bias(read_file(cfg.bias_path), &sig, cfg.bias_path);
        else if (in.doc.bias)
            in.bias = parse_bias(serialize(*in.doc.bias), &sig, cfg.kb_path);
        else
            throw InputError("a language bias is required (--bias)");
    }
    if (want_examples) {
        if (!cfg.examples_path.empty())
            in.examples = parse_examples(read_file(cfg.examples_path), cfg.examples_path);
        else if (in.doc.examples)
            in.examples = in.doc.examples;
        else
            throw InputError("an example set is required (--examples)");
    }
    return in;
}

void write_theory(const RunConfig& cfg, const std::vector<Rule>& rules, std::ostream& out) {
    const std::string text = serialize_theory(rules);
    if (cfg.out_path.empty()) {
        if (cfg.format == Format::text) out << text;
        return;
    }
    std::ofstream f(cfg.out_path, std::ios::binary);
    if (!f) throw InputError("cannot write " + cfg.out_path);
    f << text;
}

// A grounding unit key is the canonical text of a denial; show only its body.
std::string unit_text(const GroundingUnit& u) {
    std::string s = u.key;
    if (s.rfind(":- ", 0) == 0) s.erase(0, 3);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

// ---------------------------------------------------------------------------

int cmd_check_sat(const RunConfig& cfg, std::ostream& out) {
    const HybridKB kb = parse_kb(read_file(cfg.kb_path), cfg.kb_path);
    const SatResult res = nm_satisfiable(kb, cfg.limits());

    std::vector<std::string> pos, neg;
    if (res.partition) {
        for (std::size_t i : res.partition->g_pos()) pos.push_back(unit_text(res.grounding.units[i]));
        for (std::size_t i : res.partition->g_neg()) neg.push_back(unit_text(res.grounding.units[i]));
    }
    const std::vector<std::string> model = strings(std::vector<Atom>(res.model.begin(), res.model.end()));

    if (cfg.format == Format::json) {
        Json j{{"command", "check-sat"}, {"verdict", res.satisfiable ? "SAT" : "UNSAT"},
               {"units", res.grounding.units.size()}, {"partitions_tested", res.partitions_tested}};
        if (res.satisfiable) j["witness"] = Json{{"g_pos", pos}, {"g_neg", neg}, {"model", model}};
        out << j.dump(2) << "\n";
        return exit_ok;
    }
    out << (res.satisfiable ? "SAT" : "UNSAT") << "\n";
    if (cfg.trace) {
        out << "units: " << res.grounding.units.size() << "\n";
        out << "partitions tested: " << res.partitions_tested << "\n";
        if (res.satisfiable) {
            out << "G_P: {" << join(pos, "; ") << "}\n";
            out << "G_N: {" << join(neg, "; ") << "}\n";
            out << "model: {" << join(model, ", ") << "}\n";
        }
    }
    return exit_ok;
}

int cmd_query(const RunConfig& cfg, std::ostream& out) {
    const HybridKB kb = parse_kb(read_file(cfg.kb_path), cfg.kb_path);
    const Atom alpha = parse_atom(cfg.query);
    if (!alpha.is_ground()) throw InputError("query atom " + to_string(alpha) + " is not ground");
    const bool yes = entails_ground(kb, alpha, cfg.limits());
    const char* verdict = yes ? "entailed" : "not entailed";
    if (cfg.format == Format::json)
        out << Json{{"command", "query"}, {"query", to_string(alpha)}, {"verdict", verdict}}.dump(2) << "\n";
    else
        out << verdict << "\n";
    return exit_ok;
}

Json provenance_json(const Provenance& p) {
    std::vector<std::string> ops;
    for (RefinementOp op : p.ops) ops.push_back(to_string(op));
    return Json{{"iteration", p.iteration}, {"ops", ops}, {"path", strings(p.path)}};
}

int cmd_learn_view(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Inputs in = load(cfg, true, true);
    LearnOptions opts;
    opts.limits = cfg.limits();
    const LearnReport rep = nmlearn(in.doc.kb, *in.bias, *in.examples, opts);
    write_theory(cfg, rep.theory.rules, out);

    if (cfg.format == Format::json) {
        Json j{{"command", "learn-view"},
               {"theory", strings(rep.theory.rules)},
               {"warnings", rep.warnings},
               {"uncovered", strings(rep.uncovered)}};
        if (cfg.trace) {
            Json rounds = Json::array();
            for (const LearnRound& round : rep.rounds) {
                Json steps = Json::array();
                for (const InnerStep& s : round.steps) {
                    Json cands = Json::array();
                    for (const ScoredCandidate& c : s.candidates)
                        cands.push_back({{"rule", to_string(c.rule)},
                                         {"pos", c.score.pos_covered},
                                         {"neg", c.score.neg_covered},
                                         {"body_len", c.score.body_len}});
                    steps.push_back({{"refined", to_string(s.refined)}, {"candidates", cands}, {"chosen", s.chosen}});
                }
                rounds.push_back({{"positives_left", strings(round.positives_left)}, {"steps", steps}});
            }
            j["rounds"] = rounds;
            Json prov = Json::array();
            for (const Provenance& p : rep.theory.provenance) prov.push_back(provenance_json(p));
            j["provenance"] = prov;
        }
        out << j.dump(2) << "\n";
        return exit_ok;
    }

    for (const std::string& w : rep.warnings) err << "warning: " << w << "\n";
    if (cfg.trace) {
        for (std::size_t r = 0; r < rep.rounds.size(); ++r) {
            const LearnRound& round = rep.rounds[r];
            err << "round " << r + 1 << ": E+ = {" << join(strings(round.positives_left), ", ") << "}\n";
            for (const InnerStep& s : round.steps) {
                err << "  refining " << to_string(s.refined) << "\n";
                for (std::size_t i = 0; i < s.candidates.size(); ++i) {
                    const ScoredCandidate& c = s.candidates[i];
                    err << "    " << (i == s.chosen ? '*' : ' ') << " pos " << c.score.pos_covered << " neg "
                        << c.score.neg_covered << " len " << c.score.body_len << "  " << to_string(c.rule) << "\n";
                }
            }
        }
    }
    return exit_ok;
}

int cmd_discover(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Inputs in = load(cfg, true, false);
    HybridKB k = in.doc.kb;
    const std::vector<Atom> facts = std::move(k.facts);
    k.facts.clear();

    DiscoverOptions opts;
    opts.limits = cfg.limits();
    const DiscoverReport rep = nmdisc(k, facts, *in.bias, opts);
    Theory theory = rep.theory;
    if (cfg.minimize) theory = minimize_theory(rep.theory, k, facts, opts.limits);
    write_theory(cfg, theory.rules, out);

    if (cfg.format == Format::json) {
        Json j{{"command", "discover"},
               {"theory", strings(theory.rules)},
               {"examined", rep.examined},
               {"accepted", rep.theory.rules.size()},
               {"minimized", cfg.minimize},
               {"final_check", rep.final_check}};
        if (cfg.trace) {
            Json prov = Json::array();
            for (const Provenance& p : theory.provenance) prov.push_back(provenance_json(p));
            j["provenance"] = prov;
        }
        out << j.dump(2) << "\n";
        return exit_ok;
    }

    if (cfg.trace) {
        err << "examined " << rep.examined << " rules, accepted " << rep.theory.rules.size();
        if (cfg.minimize) err << ", kept " << theory.rules.size() << " after minimization";
        err << "\n";
        for (std::size_t i = 0; i < theory.rules.size(); ++i) {
            std::vector<std::string> ops;
            for (RefinementOp op : theory.provenance[i].ops) ops.push_back(to_string(op));
            err << "  depth " << theory.provenance[i].iteration << " [" << join(ops, ",") << "] "
                << to_string(theory.rules[i]) << "\n";
        }
    }
    if (!rep.final_check) err << "warning: the final theory failed the satisfiability re-check\n";
    return exit_ok;
}

std::string error_kind(int code) {
    switch (code) {
        case exit_resource: return "resource";
        case exit_inconsistent: return "inconsistent";
        default: return "input";
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Reasoning and rule induction over hybrid DL + Datalog knowledge bases", "hkb"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--kb", cfg.kb_path, "knowledge base file")->required();
        sub->add_option("--format", cfg.format, "output format")
            ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"text", Format::text},
                                                                              {"json", Format::json}}));
        sub->add_flag("--trace", cfg.trace, "print the reasoning trace");
        sub->add_option("--max-partitions", cfg.max_partitions, "cap on 2^|units|")->check(CLI::PositiveNumber);
        sub->add_option("--max-herbrand", cfg.max_herbrand, "cap on residual program atoms")
            ->check(CLI::PositiveNumber);
    };

    CLI::App* sat = app.add_subcommand("check-sat", "decide NM-satisfiability");
    common(sat);
    CLI::App* query = app.add_subcommand("query", "decide entailment of a ground atom");
    common(query);
    query->add_option("atom", cfg.query, "ground atom, e.g. FEMALE(mary)")->required();
    CLI::App* learn = app.add_subcommand("learn-view", "learn a view definition from examples");
    common(learn);
    learn->add_option("--bias", cfg.bias_path, "language bias file");
    learn->add_option("--examples", cfg.examples_path, "example file");
    learn->add_option("--out", cfg.out_path, "write the theory here instead of stdout");
    CLI::App* disc = app.add_subcommand("discover", "discover an integrity theory from the facts");
    common(disc);
    disc->add_option("--bias", cfg.bias_path, "language bias file");
    disc->add_flag("--minimize", cfg.minimize, "drop rules entailed by the others");
    disc->add_option("--out", cfg.out_path, "write the theory here instead of stdout");

    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_input;
    }

    std::string command = "hkb";
    for (CLI::App* sub : {sat, query, learn, disc})
        if (sub->parsed()) command = sub->get_name();

    int code = exit_ok;
    std::string message;
    try {
        if (sat->parsed()) return cmd_check_sat(cfg, out);
        if (query->parsed()) return cmd_query(cfg, out);
        if (learn->parsed()) return cmd_learn_view(cfg, out, err);
        return cmd_discover(cfg, out, err);
    } catch (const InconsistentInputError& e) {
        code = exit_inconsistent;
        message = e.what();
    } catch (const ResourceError& e) {
        code = exit_resource;
        message = e.what();
    } catch (const Error& e) {
        code = exit_input;
        message = e.what();
    }
    if (cfg.format == Format::json)
        out << Json{{"command", command}, {"error", {{"kind", error_kind(code)}, {"message", message}}}}.dump(2)
            << "\n";
    err << "error: " << message << "\n";
    return code;
}

}  // namespace hkb::cli
