#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace factcheck::text {

/// ASCII case fold. Non-ASCII bytes pass through unchanged.
std::string to_lower(std::string_view s);

std::string_view trim(std::string_view s);

/// Case-folds, replaces punctuation with spaces and collapses whitespace.
/// "Albert  Einstein!" -> "albert einstein"
std::string normalize(std::string_view s);

/// Lower-cased alphanumeric runs.
std::vector<std::string> tokenize(std::string_view s);

/// tokenize() minus English stop words.
std::vector<std::string> content_tokens(std::string_view s);

bool is_stop_word(std::string_view lower_word);

/// Set of character trigrams of normalize(s). Strings shorter than three
/// characters contribute themselves as a single gram.
std::set<std::string> trigrams(std::string_view s);

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

/// Cosine similarity between term-frequency vectors of the content tokens.
/// Returns 0 when either side has no content tokens.
double tf_cosine(std::string_view a, std::string_view b);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::vector<std::string> split(std::string_view s, char sep);

/// RFC 3986 percent-encoding of everything outside the unreserved set.
std::string url_encode(std::string_view s);

}  // namespace factcheck::text
