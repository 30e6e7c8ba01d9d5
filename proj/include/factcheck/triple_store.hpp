#pragma once

#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "factcheck/alias_table.hpp"
#include "factcheck/claim.hpp"
#include "factcheck/evidence.hpp"

namespace factcheck {

struct Triple {
    std::string subject_id;
    std::string predicate;
    ClaimValue object;
    std::optional<int> valid_from;
    std::optional<int> valid_to;
    double asserted_confidence = 1.0;
    /// Optional label of the object in context, e.g. "special relativity".
    std::string label;

    bool valid_at(int year) const {
        return (!valid_from || *valid_from <= year) && (!valid_to || year <= *valid_to);
    }
};

/// In-process temporal triple index keyed on (subject, predicate).
/// Immutable once loaded.
///
/// File format (TSV, empty fields allowed for open intervals):
///   subject_id  predicate  object_type  object_value  valid_from  valid_to  confidence  [label]
class TripleStore {
  public:
    static TripleStore load(const std::filesystem::path& path, const AliasTable* aliases = nullptr);
    static TripleStore parse(std::istream& in, const AliasTable* aliases = nullptr,
                             std::string_view origin = "<stream>");

    /// Throws std::invalid_argument when valid_from > valid_to or the
    /// confidence is outside [0,1].
    void add(Triple t);

    /// Triples for subject+predicate whose validity interval contains
    /// `as_of`, or all of them when `as_of` is empty. Unknown subjects yield
    /// an empty list.
    std::vector<Triple> lookup(std::string_view subject_id, std::string_view predicate,
                               std::optional<int> as_of = std::nullopt) const;

    std::size_t size() const { return size_; }
    const std::vector<Triple>& all() const { return all_; }

  private:
    static std::string key(std::string_view s, std::string_view p);

    std::vector<Triple> all_;
    std::unordered_map<std::string, std::vector<std::size_t>> index_;
    std::size_t size_ = 0;
};

/// Knowledge-graph source over a TripleStore.
class TripleStoreSource final : public KnowledgeSource {
  public:
    TripleStoreSource(SourceProfile profile, std::shared_ptr<const TripleStore> store,
                      std::shared_ptr<const AliasTable> aliases, ScoringContext ctx,
                      bool default_to_reference_year = false);

    const SourceProfile& profile() const override { return profile_; }
    Evidence query(const Claim& claim) const override;

  private:
    SourceProfile profile_;
    std::shared_ptr<const TripleStore> store_;
    std::shared_ptr<const AliasTable> aliases_;
    ScoringContext ctx_;
    bool default_to_reference_year_;
};

}  // namespace factcheck
