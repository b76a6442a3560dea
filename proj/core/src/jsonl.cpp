#include "intentfill/jsonl.hpp"

#include <fstream>
#include <sstream>

namespace intentfill {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::vector<nlohmann::json> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::parse_error& e) {
            throw ContractViolation(path.string(), lineno, std::string("invalid JSON: ") + e.what());
        }
    }
    return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& records) {
    std::string buf;
    for (const auto& r : records) {
        buf += r.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
        buf += '\n';
    }
    write_file(path, buf);
}

}  // namespace intentfill
