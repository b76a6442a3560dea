#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "intentfill/error.hpp"

namespace intentfill {

/// A record in a JSONL stream broke its schema contract.
class ContractViolation : public Error {
public:
    ContractViolation(const std::string& file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what), file_(file), line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

/// Current version stamped on every emitted record.
inline constexpr int kSchemaVersion = 1;

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& records);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

/// Parses each line of `path` with `decode`; any exception is rethrown as a
/// ContractViolation pointing at the offending line.
template <typename T, typename Decode>
std::vector<T> read_records(const std::filesystem::path& path, Decode&& decode) {
    auto rows = read_jsonl(path);
    std::vector<T> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        try {
            out.push_back(decode(rows[i]));
        } catch (const ContractViolation&) {
            throw;
        } catch (const std::exception& e) {
            throw ContractViolation(path.string(), i + 1, e.what());
        }
    }
    return out;
}

}  // namespace intentfill
