#include "factcheck/alias_table.hpp"

#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "factcheck/text.hpp"

namespace factcheck {

AliasTable AliasTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(fmt::format("cannot open alias table {}", path.string()));
    return parse(in, path.string());
}

AliasTable AliasTable::parse(std::istream& in, std::string_view origin) {
    AliasTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty() || line.front() == '#') continue;
        auto cols = text::split(line, '\t');
        if (cols.size() != 3)
            throw std::runtime_error(
                fmt::format("{}:{}: expected 3 tab-separated columns, got {}", origin, lineno, cols.size()));
        table.add(std::string(text::trim(cols[0])), parse_entity_kind(text::trim(cols[1])),
                  std::string(text::trim(cols[2])));
    }
    return table;
}

void AliasTable::add(std::string canonical_id, EntityKind kind, std::string alias) {
    Alias a{std::move(canonical_id), kind, std::move(alias), {}, {}};
    a.normalized = text::normalize(a.alias);
    a.grams = text::trigrams(a.alias);
    const std::size_t idx = aliases_.size();
    by_normalized_.emplace(a.normalized, idx);
    first_by_id_.try_emplace(a.canonical_id, idx);
    aliases_.push_back(std::move(a));
}

std::string AliasTable::display_name(std::string_view canonical_id) const {
    auto it = first_by_id_.find(canonical_id);
    return it == first_by_id_.end() ? std::string{} : aliases_[it->second].alias;
}

std::optional<EntityKind> AliasTable::kind_of(std::string_view canonical_id) const {
    auto it = first_by_id_.find(canonical_id);
    if (it == first_by_id_.end()) return std::nullopt;
    return aliases_[it->second].kind;
}

std::vector<const AliasTable::Alias*> AliasTable::exact(std::string_view normalized) const {
    std::vector<const Alias*> out;
    auto [lo, hi] = by_normalized_.equal_range(normalized);
    for (auto it = lo; it != hi; ++it) out.push_back(&aliases_[it->second]);
    return out;
}

EntityRef link_entity(std::string_view surface_form, const AliasTable& table, double threshold) {
    EntityRef ref;
    ref.surface_form = std::string(text::trim(surface_form));
    const std::string norm = text::normalize(surface_form);
    if (norm.empty()) return ref;

    const AliasTable::Alias* best = nullptr;
    double best_score = 0.0;
    for (const auto* a : table.exact(norm)) {
        if (!best || a->canonical_id < best->canonical_id) best = a;
        best_score = 1.0;
    }
    if (!best) {
        const auto grams = text::trigrams(surface_form);
        for (const auto& a : table.aliases()) {
            const double s = text::jaccard(grams, a.grams);
            if (s < threshold) continue;
            if (!best || s > best_score || (s == best_score && a.canonical_id < best->canonical_id)) {
                best = &a;
                best_score = s;
            }
        }
    }
    if (best) {
        ref.canonical_id = best->canonical_id;
        ref.kind = best->kind;
        ref.link_score = best_score;
    }
    return ref;
}

}  // namespace factcheck
