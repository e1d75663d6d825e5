#include "streamforge/pipeline.hpp"

#include <fstream>
#include <sstream>

namespace streamforge::pipeline {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<json> parse_lines(std::string_view text, const std::string& origin) {
    std::vector<json> out;
    std::size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) break;   // incomplete trailing record
        auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (line.empty()) continue;
        json event = json::parse(line, nullptr, false);
        if (event.is_discarded() || !event.is_object()) {
            throw LedgerError(origin + ":" + std::to_string(line_no) + ": malformed record");
        }
        if (event.value("v", 0) != kLedgerVersion) {
            throw LedgerError(origin + ":" + std::to_string(line_no) + ": unsupported ledger version");
        }
        if (event.value("seq", std::int64_t{-1}) != static_cast<std::int64_t>(out.size())) {
            throw LedgerError(origin + ":" + std::to_string(line_no) + ": sequence gap");
        }
        out.push_back(std::move(event));
    }
    return out;
}

}  // namespace

std::vector<json> Ledger::read(const std::filesystem::path& path) {
    return parse_lines(read_file(path), path.string());
}

Ledger::Ledger(std::filesystem::path path) : path_(std::move(path)) {
    if (!std::filesystem::exists(*path_)) {
        std::ofstream create(*path_, std::ios::binary);
        if (!create) throw LedgerError("cannot create ledger " + path_->string());
        return;
    }
    auto text = read_file(*path_);
    events_ = parse_lines(text, path_->string());
    auto complete = text.rfind('\n');
    auto keep = complete == std::string::npos ? 0 : complete + 1;
    if (keep != text.size()) std::filesystem::resize_file(*path_, keep);
}

const json& Ledger::append(json event) {
    event["v"] = kLedgerVersion;
    event["seq"] = events_.size();
    if (path_) {
        std::ofstream out(*path_, std::ios::binary | std::ios::app);
        out << event.dump() << '\n';
        out.flush();
        if (!out) throw LedgerError("cannot append to " + path_->string());
    }
    events_.push_back(std::move(event));
    return events_.back();
}

std::vector<Instance> load_instances(const std::vector<std::filesystem::path>& paths) {
    std::vector<Instance> out;
    for (const auto& p : paths) out.push_back(Instance{p.stem().string(), read_file(p)});
    return out;
}

std::string instance_program(std::string_view composed, const Instance& instance) {
    std::string program(composed);
    if (!program.empty() && program.back() != '\n') program += '\n';
    program += "% --- instance " + instance.id + " ---\n";
    program += instance.text;
    if (!program.empty() && program.back() != '\n') program += '\n';
    return program;
}

}  // namespace streamforge::pipeline
