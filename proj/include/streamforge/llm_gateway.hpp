#pragma once

// Prompt construction, model roster, chat-completion providers and
// extraction of constraint snippets from model replies.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace streamforge::llm {

class PromptError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ExtractionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ProviderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Credential rejected by the endpoint; never retried.
class AuthError : public ProviderError {
public:
    using ProviderError::ProviderError;
};

// The provider has no further responses (replay directory consumed).
class ProviderExhausted : public ProviderError {
public:
    using ProviderError::ProviderError;
};

struct ChatMessage {
    std::string role;
    std::string content;
};

std::string_view prompt_template();

// One user message: the template, then the encoding in a fenced block.
std::vector<ChatMessage> build_prompt(std::string_view encoding_text);

class ModelRoster {
public:
    ModelRoster(std::vector<std::string> models, std::uint64_t seed);

    const std::vector<std::string>& models() const { return models_; }
    std::uint64_t seed() const { return seed_; }

private:
    std::vector<std::string> models_;
    std::uint64_t seed_;
};

// Uniform choice, a pure function of (seed, iteration).
const std::string& pick_model(const ModelRoster& roster, std::uint64_t iteration);

// Values of the `constraint_<N>` keys (ascending N) of the first JSON object
// in the reply; markdown fences and surrounding prose are tolerated.
std::vector<std::string> extract_snippets(std::string_view raw_text);

struct LlmResponse {
    std::string model_id;
    std::string raw_text;
    std::int64_t request_timestamp = 0;   // unix seconds
    double latency_seconds = 0.0;
};

struct GenerationParams {
    double temperature = 1.0;
};

class Provider {
public:
    virtual ~Provider() = default;
    // `iteration` lets replaying providers serve responses by position.
    virtual std::string complete(const std::vector<ChatMessage>& messages, const std::string& model,
                                 std::uint64_t iteration) = 0;
    virtual std::string name() const = 0;
};

// Serves `resp_<iteration>.txt` from a directory.
class ReplayProvider final : public Provider {
public:
    explicit ReplayProvider(std::filesystem::path directory);

    std::string complete(const std::vector<ChatMessage>& messages, const std::string& model,
                         std::uint64_t iteration) override;
    std::string name() const override { return "replay"; }

private:
    std::filesystem::path dir_;
};

struct HttpProviderOptions {
    std::string endpoint;            // full URL of the chat-completions route
    std::string api_key;
    GenerationParams params;
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{500};
    std::chrono::seconds request_timeout{300};
};

// OpenAI-compatible chat-completions client.
class HttpProvider final : public Provider {
public:
    explicit HttpProvider(HttpProviderOptions options);

    std::string complete(const std::vector<ChatMessage>& messages, const std::string& model,
                         std::uint64_t iteration) override;
    std::string name() const override { return "http"; }

    // Number of retries spent by the most recent call.
    int last_retry_count() const { return last_retries_; }

    static std::string request_body(const std::vector<ChatMessage>& messages, const std::string& model,
                                    const GenerationParams& params);
    static std::string parse_response_body(std::string_view body);

private:
    HttpProviderOptions options_;
    int last_retries_ = 0;
};

using WallClock = std::function<std::int64_t()>;

LlmResponse request_candidates(Provider& provider, std::string_view encoding_text, const std::string& model_id,
                               std::uint64_t iteration, const WallClock& now = {});

}  // namespace streamforge::llm
