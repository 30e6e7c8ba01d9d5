#include "factcheck/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <unordered_set>

namespace factcheck::text {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

const std::unordered_set<std::string_view>& stop_words() {
    static const std::unordered_set<std::string_view> words = {
        "a",     "an",    "and",   "are",   "as",    "at",    "be",    "been",  "but",
        "by",    "did",   "do",    "does",  "for",   "from",  "had",   "has",   "have",
        "he",    "her",   "his",   "i",     "if",    "in",    "into",  "is",    "it",
        "its",   "of",    "on",    "or",    "our",   "she",   "so",    "that",  "the",
        "their", "them",  "then",  "there", "these", "they",  "this",  "those", "to",
        "too",   "very",  "was",   "we",    "were",  "what",  "when",  "where", "which",
        "while", "who",   "whom",  "why",   "will",  "with",  "would", "you",   "your"};
    return words;
}

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(c < 0x80 ? std::tolower(c) : c);
    });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string normalize(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        auto u = static_cast<unsigned char>(c);
        if (u >= 0x80 || is_alnum(c)) {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(u < 0x80 ? std::tolower(u) : u));
        } else {
            pending_space = true;
        }
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (is_alnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

bool is_stop_word(std::string_view lower_word) { return stop_words().count(lower_word) > 0; }

std::vector<std::string> content_tokens(std::string_view s) {
    auto toks = tokenize(s);
    std::erase_if(toks, [](const std::string& t) { return is_stop_word(t); });
    return toks;
}

std::set<std::string> trigrams(std::string_view s) {
    const std::string n = normalize(s);
    std::set<std::string> grams;
    if (n.empty()) return grams;
    if (n.size() < 3) {
        grams.insert(n);
        return grams;
    }
    for (std::size_t i = 0; i + 3 <= n.size(); ++i) grams.insert(n.substr(i, 3));
    return grams;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t inter = 0;
    for (const auto& g : a) inter += b.count(g);
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double tf_cosine(std::string_view a, std::string_view b) {
    std::map<std::string, double> ta, tb;
    for (auto& t : content_tokens(a)) ta[t] += 1.0;
    for (auto& t : content_tokens(b)) tb[t] += 1.0;
    if (ta.empty() || tb.empty()) return 0.0;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [t, f] : ta) {
        na += f * f;
        if (auto it = tb.find(t); it != tb.end()) dot += f * it->second;
    }
    for (const auto& [t, f] : tb) nb += f * f;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.append(sep);
        out.append(parts[i]);
    }
    return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            break;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string url_encode(std::string_view s) {
    static constexpr std::array<char, 16> hex = {'0', '1', '2', '3', '4', '5', '6', '7',
                                                 '8', '9', 'A', 'B', 'C', 'D', 'E', 'F'};
    std::string out;
    for (char c : s) {
        auto u = static_cast<unsigned char>(c);
        if (is_alnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(c);
        } else {
            out.push_back('%');
            out.push_back(hex[u >> 4]);
            out.push_back(hex[u & 0xF]);
        }
    }
    return out;
}

}  // namespace factcheck::text
