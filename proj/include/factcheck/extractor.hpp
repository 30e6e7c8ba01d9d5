#pragma once

#include <filesystem>
#include <istream>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/alias_table.hpp"
#include "factcheck/claim.hpp"

namespace factcheck {

/// A normalized relation label and the verbs that express it.
struct PredicateSpec {
    std::string label;
    std::vector<std::string> surface_verbs;
    /// Multi-valued predicates ("published", "won") may hold several true
    /// objects at once; substitution then lists all of them.
    bool multi_valued = false;
};

/// Closed predicate vocabulary.
///
/// File format, one mapping per line:
///   published = published, publishes, put out [multi]
/// The optional trailing "[multi]" marks the predicate multi-valued.
struct ExtractorConfig {
    std::vector<PredicateSpec> predicates;
    double link_threshold = kDefaultLinkThreshold;

    static ExtractorConfig defaults();
    static ExtractorConfig load(const std::filesystem::path& path);
    static ExtractorConfig parse(std::istream& in, std::string_view origin = "<stream>");

    const PredicateSpec* find(std::string_view label) const;
    bool is_multi_valued(std::string_view label) const;
};

/// Label used for verbs outside the vocabulary.
inline constexpr std::string_view kUnknownPredicate = "related_to";
/// Label used for "X is Y" copular claims.
inline constexpr std::string_view kCopulaPredicate = "is";
/// Label used for "X has N <unit>" claims.
inline constexpr std::string_view kPossessionPredicate = "has";

class Extractor {
  public:
    virtual ~Extractor() = default;
    /// Claims in span order, ids unique within the response.
    virtual std::vector<Claim> extract(std::string_view response_text) const = 0;
    /// Whether a predicate may hold several true objects at once.
    virtual bool is_multi_valued(std::string_view predicate) const {
        (void)predicate;
        return false;
    }
};

/// Deterministic sentence-level pattern grammar:
///   copular      "X is/was Y", "X is N <unit> tall"
///   verb-object  "X published Y in Z" (Z a date, a quantity or an entity)
///   quantity     "X has N <unit>"
/// At most one claim per sentence. Sentences opening with a pronoun are
/// skipped (no coreference).
class PatternExtractor final : public Extractor {
  public:
    PatternExtractor(ExtractorConfig config, std::shared_ptr<const AliasTable> aliases);

    std::vector<Claim> extract(std::string_view response_text) const override;
    bool is_multi_valued(std::string_view predicate) const override { return config_.is_multi_valued(predicate); }

    const ExtractorConfig& config() const { return config_; }
    const AliasTable& aliases() const { return *aliases_; }

  private:
    ExtractorConfig config_;
    std::shared_ptr<const AliasTable> aliases_;
};

std::vector<Claim> extract_claims(std::string_view response_text, const ExtractorConfig& config,
                                  const AliasTable& aliases);

/// Sentence spans (terminal punctuation and surrounding whitespace excluded).
std::vector<Span> split_sentences(std::string_view text);

}  // namespace factcheck
