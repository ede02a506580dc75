#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace utilrank {

/// Lowercased word tokens. Any character that is not a letter or digit
/// separates tokens; scripts without case (CJK etc.) pass through unchanged,
/// so "营收 增长" yields two tokens.
std::vector<std::string> tokenize(std::string_view text);

bool contains_digit(std::string_view text);

/// Fixed 50-word English stopword list.
const std::vector<std::string_view>& stopwords();
bool is_stopword(std::string_view token);

/// tokenize() minus stopwords, deduplicated and sorted.
std::vector<std::string> content_terms(std::string_view text);

bool is_valid_utf8(std::string_view text);

/// Number of code points. Invalid bytes count as one each.
std::size_t utf8_length(std::string_view text);

/// Longest prefix holding at most max_chars code points.
std::string_view utf8_prefix(std::string_view text, std::size_t max_chars);

bool is_blank(std::string_view text);
std::string_view trim(std::string_view text);

}  // namespace utilrank
