#include "streamforge/aspkit.hpp"

#include <algorithm>

namespace streamforge::asp {

std::string_view to_string(SnippetKind kind) {
    switch (kind) {
    case SnippetKind::ConstraintOnly: return "constraint-only";
    case SnippetKind::RulesAndConstraints: return "rules-and-constraints";
    case SnippetKind::CommentOnly: return "comment-only";
    case SnippetKind::Unparseable: return "unparseable";
    }
    return "unparseable";
}

Snippet classify_snippet(std::string_view text, std::string id) {
    Snippet s;
    s.id = std::move(id);
    s.raw_text = std::string(text);
    auto parsed = parse_program(text);
    s.rules = std::move(parsed.rules);
    s.errors = std::move(parsed.errors);
    if (!s.errors.empty()) {
        s.kind = SnippetKind::Unparseable;
    } else if (s.rules.empty()) {
        s.kind = SnippetKind::CommentOnly;
    } else if (std::all_of(s.rules.begin(), s.rules.end(), [](const Rule& r) { return r.is_constraint(); })) {
        s.kind = SnippetKind::ConstraintOnly;
    } else {
        s.kind = SnippetKind::RulesAndConstraints;
    }
    return s;
}

std::string compose(std::string_view encoding, std::span<const Snippet> snippets) {
    auto parsed = parse_program(encoding);
    if (!parsed.ok()) {
        const auto& e = parsed.errors.front();
        throw CompositionError("encoding does not parse: " + std::to_string(e.line) + ":" +
                               std::to_string(e.column) + ": " + e.message);
    }
    std::string out(encoding);
    if (out.empty() || out.back() != '\n') out += '\n';
    for (std::size_t i = 0; i < snippets.size(); ++i) {
        const auto& s = snippets[i];
        out += "% --- streamliner ";
        out += s.id.empty() ? std::to_string(i + 1) : s.id;
        out += " ---\n";
        out += s.raw_text;
        if (out.back() != '\n') out += '\n';
    }
    return out;
}

}  // namespace streamforge::asp
