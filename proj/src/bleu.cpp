#include "factcheck/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace factcheck {

namespace {

std::vector<std::string> words(std::string_view s) {
    std::istringstream in{std::string(s)};
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

std::map<std::vector<std::string>, int> ngrams(const std::vector<std::string>& toks, std::size_t n) {
    std::map<std::vector<std::string>, int> out;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) ++out[{toks.begin() + i, toks.begin() + i + n}];
    return out;
}

}  // namespace

double bleu4(std::string_view candidate, std::string_view reference) {
    const auto cand = words(candidate);
    const auto ref = words(reference);
    if (cand.empty()) return 0.0;

    double log_sum = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto c = ngrams(cand, n);
        const auto r = ngrams(ref, n);
        int clipped = 0, total = 0;
        for (const auto& [g, k] : c) {
            total += k;
            auto it = r.find(g);
            if (it != r.end()) clipped += std::min(k, it->second);
        }
        if (clipped == 0 || total == 0) return 0.0;
        log_sum += 0.25 * std::log(static_cast<double>(clipped) / total);
    }
    const double c = static_cast<double>(cand.size()), r = static_cast<double>(ref.size());
    const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
    return bp * std::exp(log_sum);
}

}  // namespace factcheck
