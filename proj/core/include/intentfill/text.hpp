#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace intentfill::text {

/// Byte span of one whitespace-delimited token.
struct WordSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

std::string_view trim(std::string_view s);
std::string_view rtrim(std::string_view s);
std::string_view ltrim(std::string_view s);

std::string to_lower(std::string_view s);
bool icontains(std::string_view haystack, std::string_view needle);

/// Physical newline-delimited lines after stripping trailing whitespace from
/// the whole string. Empty (or all-whitespace) input has zero lines.
std::size_t count_lines(std::string_view s);

/// Splits on '\n'. A trailing newline does not produce an extra empty line.
std::vector<std::string_view> split_lines(std::string_view s);

std::vector<std::string_view> split_words(std::string_view s);
std::vector<WordSpan> word_spans(std::string_view s);

/// Removes the longest common leading whitespace of all non-blank lines.
std::string dedent(std::string_view s);

/// Strips trailing whitespace on every line and turns CRLF/CR into LF.
std::string normalize_lines(std::string_view s);

/// Decodes UTF-8; invalid bytes decode to themselves (Latin-1 fallback).
std::u32string utf8_decode(std::string_view s);
bool is_valid_utf8(std::string_view s);

std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// ceil(chars / 4); the fallback token estimate when no tokenizer is available.
std::size_t estimate_tokens(std::string_view s);

}  // namespace intentfill::text
