#include "streamforge/llm_gateway.hpp"

#include <algorithm>
#include <cctype>

namespace streamforge::llm {

namespace {

constexpr std::string_view kTemplate =
#include "prompt_template.inc"
    ;

}  // namespace

std::string_view prompt_template() { return kTemplate; }

std::vector<ChatMessage> build_prompt(std::string_view encoding_text) {
    bool blank = std::all_of(encoding_text.begin(), encoding_text.end(),
                             [](unsigned char c) { return std::isspace(c) != 0; });
    if (blank) throw PromptError("encoding text is empty");

    std::string content(kTemplate);
    if (!content.empty() && content.back() != '\n') content += '\n';
    content += "\nASP encoding:\n```\n";
    content += encoding_text;
    if (encoding_text.back() != '\n') content += '\n';
    content += "```\n";
    return {ChatMessage{"user", std::move(content)}};
}

}  // namespace streamforge::llm
