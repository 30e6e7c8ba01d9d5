#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace factcheck {

class AliasTable;

enum class EntityKind { Person, Org, Place, Work, Theory, Other };

std::string_view to_string(EntityKind k);
EntityKind parse_entity_kind(std::string_view s);

/// A mention resolved (or not) against the alias table. An unlinked
/// reference has an empty canonical_id and link_score 0.
struct EntityRef {
    std::string canonical_id;
    std::string surface_form;
    EntityKind kind = EntityKind::Other;
    double link_score = 0.0;

    bool linked() const { return !canonical_id.empty(); }
    /// Identity used for equality: the canonical id when linked, otherwise
    /// the normalized surface form.
    std::string identity() const;
};

struct Date {
    int year = 0;
    std::optional<int> month;
    std::optional<int> day;
};

struct Quantity {
    double value = 0.0;
    std::string unit;
};

struct Text {
    std::string text;
};

class InvalidValue : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Typed object of a claim. Ordering is total: first by alternative, then
/// chronologically / numerically / by identity within an alternative.
class ClaimValue {
  public:
    using Storage = std::variant<Date, Quantity, EntityRef, Text>;

    ClaimValue() : v_(Text{}) {}
    ClaimValue(Date d);
    ClaimValue(Quantity q);
    ClaimValue(EntityRef e) : v_(std::move(e)) {}
    ClaimValue(Text t) : v_(std::move(t)) {}

    static ClaimValue year(int y) { return ClaimValue(Date{y, {}, {}}); }

    const Storage& storage() const { return v_; }
    template <class T>
    const T* get_if() const { return std::get_if<T>(&v_); }

    bool is_date() const { return std::holds_alternative<Date>(v_); }
    bool is_quantity() const { return std::holds_alternative<Quantity>(v_); }
    bool is_entity() const { return std::holds_alternative<EntityRef>(v_); }
    bool is_text() const { return std::holds_alternative<Text>(v_); }

    /// "date" | "number" | "entity" | "text"
    std::string_view type_name() const;

    /// Canonical, order-free key, e.g. "date:1905", "number:300|meters".
    std::string key() const;

    /// Human-readable rendering used in corrected text.
    std::string display() const;

    friend std::strong_ordering operator<=>(const ClaimValue& a, const ClaimValue& b);
    friend bool operator==(const ClaimValue& a, const ClaimValue& b) {
        return (a <=> b) == std::strong_ordering::equal;
    }

  private:
    Storage v_;
};

/// Parses the (type, value) pairs used by the triple file and the HTTP hit
/// format. Entity values are canonical ids; when an alias table is given the
/// surface form is filled from it.
ClaimValue parse_claim_value(std::string_view type, std::string_view value,
                             const AliasTable* aliases = nullptr);

struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t length() const { return end - begin; }
    bool operator==(const Span&) const = default;
};

struct YearRange {
    int from = 0;
    int to = 0;
    bool operator==(const YearRange&) const = default;
};

/// One verifiable subject/predicate/object assertion located in a response.
struct Claim {
    std::string id;
    EntityRef subject;
    std::string predicate;
    ClaimValue object;
    /// Further conjunctive objects ("in 1905 and 1915").
    std::vector<ClaimValue> extra_objects;
    std::optional<YearRange> temporal_qualifier;
    Span span;
    std::string raw_text;

    /// Slot holding the object value(s); replaced by substitution.
    Span object_span;
    /// The "Y" of "X published Y in Z", when present.
    std::optional<Span> complement_span;
    std::string complement;

    std::vector<ClaimValue> asserted_values() const;
    bool asserts(const ClaimValue& v) const;
};

/// Stable 64-bit FNV-1a hash of (subject, predicate, object(s), qualifier).
std::uint64_t fingerprint(const Claim& c);

}  // namespace factcheck
