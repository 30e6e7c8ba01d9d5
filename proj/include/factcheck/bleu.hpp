#pragma once

#include <string_view>

namespace factcheck {

/// Sentence BLEU with uniform weights over 1..4-grams of whitespace tokens,
/// clipped counts, no smoothing and the usual brevity penalty. Any zero
/// n-gram precision (including a candidate shorter than four tokens) gives 0.
double bleu4(std::string_view candidate, std::string_view reference);

}  // namespace factcheck
