#include "streamforge/llm_gateway.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>

#include <json.hpp>

namespace streamforge::llm {

namespace {

using nlohmann::json;

// Contents of each ``` fenced block, in order of appearance.
std::vector<std::string_view> fenced_blocks(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    for (;;) {
        auto open = text.find("```", pos);
        if (open == std::string_view::npos) break;
        auto body = text.find('\n', open);
        if (body == std::string_view::npos) break;
        auto close = text.find("```", body);
        if (close == std::string_view::npos) break;
        out.push_back(text.substr(body + 1, close - body - 1));
        pos = close + 3;
    }
    return out;
}

std::optional<std::size_t> balanced_end(std::string_view text, std::size_t open) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{') ++depth;
        else if (c == '}' && --depth == 0) return i;
    }
    return std::nullopt;
}

// Models sometimes put raw line breaks inside JSON strings.
std::string escape_controls_in_strings(std::string_view text) {
    std::string out;
    bool in_string = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_string && c == '\\' && i + 1 < text.size()) {
            out += c;
            out += text[++i];
            continue;
        }
        if (c == '"') in_string = !in_string;
        if (in_string && c == '\n') out += "\\n";
        else if (in_string && c == '\r') out += "\\r";
        else if (in_string && c == '\t') out += "\\t";
        else out += c;
    }
    return out;
}

std::optional<json> first_object(std::string_view text) {
    for (std::size_t pos = text.find('{'); pos != std::string_view::npos; pos = text.find('{', pos + 1)) {
        auto end = balanced_end(text, pos);
        if (!end) continue;
        auto candidate = text.substr(pos, *end - pos + 1);
        for (const auto& attempt : {std::string(candidate), escape_controls_in_strings(candidate)}) {
            json parsed = json::parse(attempt, nullptr, false);
            if (!parsed.is_discarded() && parsed.is_object()) return parsed;
        }
    }
    return std::nullopt;
}

std::optional<unsigned long> constraint_index(const std::string& key) {
    static constexpr std::string_view prefix = "constraint_";
    if (key.size() <= prefix.size() || key.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
    auto digits = std::string_view(key).substr(prefix.size());
    if (!std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c) != 0; })) {
        return std::nullopt;
    }
    if (digits.size() > 9) return std::nullopt;
    return std::stoul(std::string(digits));
}

}  // namespace

std::vector<std::string> extract_snippets(std::string_view raw_text) {
    std::optional<json> obj;
    for (auto block : fenced_blocks(raw_text)) {
        if ((obj = first_object(block))) break;
    }
    if (!obj) obj = first_object(raw_text);
    if (!obj) throw ExtractionError("no JSON object found in model output");

    std::multimap<unsigned long, std::string> ordered;
    for (auto it = obj->begin(); it != obj->end(); ++it) {
        auto n = constraint_index(it.key());
        if (!n || !it.value().is_string()) continue;
        ordered.emplace(*n, it.value().get<std::string>());
    }
    std::vector<std::string> out;
    for (auto& [n, value] : ordered) {
        bool blank = std::all_of(value.begin(), value.end(), [](unsigned char c) { return std::isspace(c) != 0; });
        if (!blank) out.push_back(std::move(value));
    }
    if (out.empty()) throw ExtractionError("model output contains no constraint_<N> entries");
    return out;
}

}  // namespace streamforge::llm
