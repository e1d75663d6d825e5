#include "streamforge/llm_gateway.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace streamforge::llm {

using nlohmann::json;

ReplayProvider::ReplayProvider(std::filesystem::path directory) : dir_(std::move(directory)) {
    if (!std::filesystem::is_directory(dir_)) {
        throw ProviderError("replay directory does not exist: " + dir_.string());
    }
}

std::string ReplayProvider::complete(const std::vector<ChatMessage>&, const std::string&, std::uint64_t iteration) {
    auto path = dir_ / ("resp_" + std::to_string(iteration) + ".txt");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ProviderExhausted("no replay response " + path.filename().string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

HttpProvider::HttpProvider(HttpProviderOptions options) : options_(std::move(options)) {
    if (options_.endpoint.empty()) throw ProviderError("no endpoint configured");
    if (options_.max_retries < 0) options_.max_retries = 0;
}

std::string HttpProvider::request_body(const std::vector<ChatMessage>& messages, const std::string& model,
                                       const GenerationParams& params) {
    json msgs = json::array();
    for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    json body = {{"model", model}, {"messages", msgs}, {"temperature", params.temperature}};
    return body.dump();
}

std::string HttpProvider::parse_response_body(std::string_view body) {
    json parsed = json::parse(body, nullptr, false);
    if (parsed.is_discarded()) throw ProviderError("response is not JSON");
    try {
        return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw ProviderError("response has no choices[0].message.content");
    }
}

namespace {

struct Endpoint {
    std::string origin;   // scheme://host[:port]
    std::string path;
};

Endpoint split_endpoint(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ProviderError("endpoint must be an absolute URL: " + url);
    auto slash = url.find('/', scheme_end + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

bool transient(int status) { return status == 429 || status >= 500; }

}  // namespace

std::string HttpProvider::complete(const std::vector<ChatMessage>& messages, const std::string& model, std::uint64_t) {
    const auto endpoint = split_endpoint(options_.endpoint);
    const auto body = request_body(messages, model, options_.params);

    httplib::Client client(endpoint.origin);
    client.set_connection_timeout(std::chrono::seconds(30));
    client.set_read_timeout(options_.request_timeout);
    client.set_write_timeout(std::chrono::seconds(60));
    httplib::Headers headers;
    if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

    last_retries_ = 0;
    auto backoff = options_.initial_backoff;
    std::string last_error;
    for (int attempt = 0;; ++attempt) {
        auto res = client.Post(endpoint.path, headers, body, "application/json");
        if (res) {
            if (res->status == 401 || res->status == 403) {
                throw AuthError("credential rejected (HTTP " + std::to_string(res->status) + ")");
            }
            if (res->status >= 200 && res->status < 300) return parse_response_body(res->body);
            if (!transient(res->status)) {
                throw ProviderError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500));
            }
            last_error = "HTTP " + std::to_string(res->status);
        } else {
            last_error = httplib::to_string(res.error());
        }
        if (attempt >= options_.max_retries) break;
        ++last_retries_;
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
    }
    throw ProviderError("request failed after " + std::to_string(last_retries_) + " retries: " + last_error);
}

LlmResponse request_candidates(Provider& provider, std::string_view encoding_text, const std::string& model_id,
                               std::uint64_t iteration, const WallClock& now) {
    auto messages = build_prompt(encoding_text);
    LlmResponse out;
    out.model_id = model_id;
    out.request_timestamp = now ? now()
                                : std::chrono::duration_cast<std::chrono::seconds>(
                                      std::chrono::system_clock::now().time_since_epoch())
                                      .count();
    const auto start = std::chrono::steady_clock::now();
    out.raw_text = provider.complete(messages, model_id, iteration);
    out.latency_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace streamforge::llm
