#include "factcheck/claim.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "factcheck/alias_table.hpp"
#include "factcheck/text.hpp"

namespace factcheck {

namespace {

constexpr std::array<std::string_view, 6> kKindNames = {"PERSON", "ORG", "PLACE", "WORK", "THEORY", "OTHER"};
constexpr std::array<std::string_view, 12> kMonths = {"January", "February", "March",     "April",
                                                      "May",     "June",     "July",      "August",
                                                      "September", "October", "November", "December"};

std::optional<int> parse_int(std::string_view s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string format_number(double v) { return fmt::format("{:.10g}", v); }

}  // namespace

std::string_view to_string(EntityKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

EntityKind parse_entity_kind(std::string_view s) {
    const std::string up = [&] {
        std::string u(s);
        for (auto& c : u) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return u;
    }();
    for (std::size_t i = 0; i < kKindNames.size(); ++i)
        if (up == kKindNames[i]) return static_cast<EntityKind>(i);
    if (up == "DATE" || up.empty()) return EntityKind::Other;
    throw InvalidValue(fmt::format("unknown entity kind '{}'", s));
}

std::string EntityRef::identity() const {
    return linked() ? canonical_id : "~" + text::normalize(surface_form);
}

ClaimValue::ClaimValue(Date d) : v_(d) {
    if (d.year < -9999 || d.year > 9999) throw InvalidValue(fmt::format("year {} out of range", d.year));
    if (d.month && (*d.month < 1 || *d.month > 12)) throw InvalidValue("month out of range");
    if (d.day && (*d.day < 1 || *d.day > 31 || !d.month)) throw InvalidValue("day out of range");
}

ClaimValue::ClaimValue(Quantity q) : v_(q) {
    if (!std::isfinite(q.value)) throw InvalidValue("quantity must be finite");
    std::get<Quantity>(v_).unit = text::to_lower(text::trim(q.unit));
}

std::string_view ClaimValue::type_name() const {
    static constexpr std::array<std::string_view, 4> names = {"date", "number", "entity", "text"};
    return names[v_.index()];
}

std::string ClaimValue::key() const {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Date>) {
                std::string k = fmt::format("date:{}", v.year);
                if (v.month) k += fmt::format("-{:02}", *v.month);
                if (v.day) k += fmt::format("-{:02}", *v.day);
                return k;
            } else if constexpr (std::is_same_v<T, Quantity>) {
                return fmt::format("number:{}|{}", format_number(v.value), v.unit);
            } else if constexpr (std::is_same_v<T, EntityRef>) {
                return "entity:" + v.identity();
            } else {
                return "text:" + text::normalize(v.text);
            }
        },
        v_);
}

std::string ClaimValue::display() const {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Date>) {
                if (v.day) return fmt::format("{} {} {}", *v.day, kMonths[*v.month - 1], v.year);
                if (v.month) return fmt::format("{} {}", kMonths[*v.month - 1], v.year);
                return std::to_string(v.year);
            } else if constexpr (std::is_same_v<T, Quantity>) {
                return v.unit.empty() ? format_number(v.value) : format_number(v.value) + " " + v.unit;
            } else if constexpr (std::is_same_v<T, EntityRef>) {
                return v.surface_form.empty() ? v.canonical_id : v.surface_form;
            } else {
                return v.text;
            }
        },
        v_);
}

std::strong_ordering operator<=>(const ClaimValue& a, const ClaimValue& b) {
    if (auto c = a.v_.index() <=> b.v_.index(); c != 0) return c;
    return std::visit(
        [&](const auto& x) -> std::strong_ordering {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.v_);
            if constexpr (std::is_same_v<T, Date>) {
                if (auto c = x.year <=> y.year; c != 0) return c;
                if (auto c = x.month.value_or(0) <=> y.month.value_or(0); c != 0) return c;
                return x.day.value_or(0) <=> y.day.value_or(0);
            } else if constexpr (std::is_same_v<T, Quantity>) {
                if (auto c = x.unit <=> y.unit; c != 0) return c;
                if (x.value < y.value) return std::strong_ordering::less;
                if (x.value > y.value) return std::strong_ordering::greater;
                return std::strong_ordering::equal;
            } else if constexpr (std::is_same_v<T, EntityRef>) {
                return x.identity() <=> y.identity();
            } else {
                return text::normalize(x.text) <=> text::normalize(y.text);
            }
        },
        a.v_);
}

ClaimValue parse_claim_value(std::string_view type, std::string_view value, const AliasTable* aliases) {
    const std::string t = text::to_lower(text::trim(type));
    value = text::trim(value);
    if (t == "date" || t == "year") {
        auto parts = text::split(value, '-');
        bool negative = false;
        if (!parts.empty() && parts[0].empty() && parts.size() > 1) {  // leading minus
            negative = true;
            parts.erase(parts.begin());
        }
        if (parts.empty() || parts.size() > 3) throw InvalidValue(fmt::format("bad date '{}'", value));
        Date d;
        auto y = parse_int(parts[0]);
        if (!y) throw InvalidValue(fmt::format("bad date '{}'", value));
        d.year = negative ? -*y : *y;
        if (parts.size() > 1) {
            d.month = parse_int(parts[1]);
            if (!d.month) throw InvalidValue(fmt::format("bad date '{}'", value));
        }
        if (parts.size() > 2) {
            d.day = parse_int(parts[2]);
            if (!d.day) throw InvalidValue(fmt::format("bad date '{}'", value));
        }
        return ClaimValue(d);
    }
    if (t == "number" || t == "quantity") {
        const auto space = value.find(' ');
        const std::string num(value.substr(0, space));
        Quantity q;
        try {
            std::size_t used = 0;
            q.value = std::stod(num, &used);
            if (used != num.size()) throw InvalidValue("trailing characters");
        } catch (const std::exception&) {
            throw InvalidValue(fmt::format("bad number '{}'", value));
        }
        if (space != std::string_view::npos) q.unit = std::string(text::trim(value.substr(space + 1)));
        return ClaimValue(q);
    }
    if (t == "entity") {
        EntityRef e;
        e.canonical_id = std::string(value);
        e.link_score = e.canonical_id.empty() ? 0.0 : 1.0;
        if (aliases) {
            e.surface_form = aliases->display_name(value);
            if (auto k = aliases->kind_of(value)) e.kind = *k;
        }
        if (e.surface_form.empty()) e.surface_form = e.canonical_id;
        return ClaimValue(std::move(e));
    }
    if (t == "text" || t == "string") return ClaimValue(Text{std::string(value)});
    throw InvalidValue(fmt::format("unknown value type '{}'", type));
}

std::vector<ClaimValue> Claim::asserted_values() const {
    std::vector<ClaimValue> out;
    out.reserve(1 + extra_objects.size());
    out.push_back(object);
    out.insert(out.end(), extra_objects.begin(), extra_objects.end());
    return out;
}

bool Claim::asserts(const ClaimValue& v) const {
    if (object == v) return true;
    for (const auto& e : extra_objects)
        if (e == v) return true;
    return false;
}

std::uint64_t fingerprint(const Claim& c) {
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](std::string_view s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 1099511628211ULL;
        }
        h ^= 0x1F;  // field separator
        h *= 1099511628211ULL;
    };
    mix(c.subject.identity());
    mix(c.predicate);
    for (const auto& v : c.asserted_values()) mix(v.key());
    if (c.temporal_qualifier)
        mix(fmt::format("{}..{}", c.temporal_qualifier->from, c.temporal_qualifier->to));
    return h;
}

}  // namespace factcheck
