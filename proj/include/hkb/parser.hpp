// Surface syntax for knowledge bases, language biases and example sets.
// The grammar is documented in docs/grammar.ebnf.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hkb/bias.hpp"
#include "hkb/core.hpp"

namespace hkb {

struct SourceSpan {
    std::string file;
    int line = 0;
    int column = 0;
};

class ParseError : public Error {
public:
    ParseError(SourceSpan span, const std::string& message);
    const SourceSpan& span() const { return span_; }
    const std::string& detail() const { return detail_; }

private:
    SourceSpan span_;
    std::string detail_;
};

enum class BlockKind { tbox, abox, rules, facts, bias, examples };

std::string_view to_string(BlockKind k);

struct SourceDocument {
    HybridKB kb;
    std::optional<LanguageBias> bias;
    std::optional<ExampleSet> examples;

    // Block order as written, with the span of each block keyword.
    std::vector<std::pair<BlockKind, SourceSpan>> blocks;
    // Spans aligned with kb.tbox, kb.abox, kb.rules and kb.facts.
    std::vector<SourceSpan> tbox_spans, abox_spans, rule_spans, fact_spans;
};

/// Parses every block and validates the KB part (safeness, kinds, ground
/// facts). Bias and examples are only checked structurally.
SourceDocument parse_document(std::string_view text, const std::string& file = "<input>");

HybridKB parse_kb(std::string_view text, const std::string& file = "<input>");

/// Expects a `bias { ... }` block. When `sig` is given the templates are
/// resolved against it.
LanguageBias parse_bias(std::string_view text, const Signature* sig = nullptr,
                        const std::string& file = "<input>");

/// Expects an `examples { pos: ... . neg: ... . }` block.
ExampleSet parse_examples(std::string_view text, const std::string& file = "<input>");

Atom parse_atom(std::string_view text);
Rule parse_rule(std::string_view text);

std::string serialize(const HybridKB& kb);
std::string serialize(const LanguageBias& bias);
std::string serialize(const ExampleSet& ex);
/// A theory is written as a `rules` block.
std::string serialize_theory(const std::vector<Rule>& rules);

}  // namespace hkb
