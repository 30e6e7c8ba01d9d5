#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/claim.hpp"

namespace factcheck {

/// Canonical entity ids and their aliases. Read-only after loading.
///
/// File format: UTF-8 TSV, one alias per line:
///   canonical_id<TAB>kind<TAB>alias
/// The first alias listed for an id is its display name. Lines starting
/// with '#' and blank lines are ignored.
class AliasTable {
  public:
    struct Alias {
        std::string canonical_id;
        EntityKind kind;
        std::string alias;
        std::string normalized;
        std::set<std::string> grams;
    };

    static AliasTable load(const std::filesystem::path& path);
    static AliasTable parse(std::istream& in, std::string_view origin = "<stream>");

    void add(std::string canonical_id, EntityKind kind, std::string alias);

    const std::vector<Alias>& aliases() const { return aliases_; }
    bool empty() const { return aliases_.empty(); }

    /// Display name of an id (its first alias); empty when unknown.
    std::string display_name(std::string_view canonical_id) const;
    std::optional<EntityKind> kind_of(std::string_view canonical_id) const;

    /// Aliases whose normalized form equals `normalized`.
    std::vector<const Alias*> exact(std::string_view normalized) const;

  private:
    std::vector<Alias> aliases_;
    std::multimap<std::string, std::size_t, std::less<>> by_normalized_;
    std::map<std::string, std::size_t, std::less<>> first_by_id_;
};

inline constexpr double kDefaultLinkThreshold = 0.6;

/// Resolves a surface form: exact normalized match scores 1.0; otherwise the
/// best character-trigram Jaccard match at or above `threshold`; otherwise an
/// unlinked reference. Ties go to the smaller canonical id.
EntityRef link_entity(std::string_view surface_form, const AliasTable& table,
                      double threshold = kDefaultLinkThreshold);

}  // namespace factcheck
