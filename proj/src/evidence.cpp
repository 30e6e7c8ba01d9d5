#include "factcheck/evidence.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "factcheck/text.hpp"

namespace factcheck {

std::string_view to_string(Stance s) {
    switch (s) {
        case Stance::Supports: return "SUPPORTS";
        case Stance::Refutes: return "REFUTES";
        case Stance::Insufficient: return "INSUFFICIENT";
    }
    return "INSUFFICIENT";
}

std::string_view to_string(SourceKind k) {
    switch (k) {
        case SourceKind::KnowledgeGraph: return "KNOWLEDGE_GRAPH";
        case SourceKind::WebSearch: return "WEB_SEARCH";
        case SourceKind::DomainDb: return "DOMAIN_DB";
    }
    return "KNOWLEDGE_GRAPH";
}

SourceKind parse_source_kind(std::string_view s) {
    const std::string l = text::to_lower(s);
    if (l == "knowledge_graph" || l == "kg") return SourceKind::KnowledgeGraph;
    if (l == "web_search" || l == "web") return SourceKind::WebSearch;
    if (l == "domain_db" || l == "db") return SourceKind::DomainDb;
    throw std::invalid_argument(fmt::format("unknown source kind '{}'", s));
}

void SourceProfile::validate() const {
    auto field = [&](std::string_view name) { return fmt::format("sources.{}.{}", source_id, name); };
    if (source_id.empty()) throw std::invalid_argument("sources[].id: must not be empty");
    if (!(base_reliability >= 0.0 && base_reliability <= 1.0))
        throw std::invalid_argument(field("reliability") + ": must be in [0,1]");
    if (!(fusion_weight >= 0.0 && fusion_weight <= 1.0))
        throw std::invalid_argument(field("weight") + ": must be in [0,1]");
    if (timeout.count() <= 0) throw std::invalid_argument(field("timeout_ms") + ": must be > 0");
    if (max_results < 1) throw std::invalid_argument(field("max_results") + ": must be >= 1");
}

Evidence insufficient_evidence(const SourceProfile& profile, const Claim& claim, std::chrono::milliseconds latency) {
    Evidence e;
    e.source_id = profile.source_id;
    e.claim_id = claim.id;
    e.stance = Stance::Insufficient;
    e.reliability = profile.base_reliability;
    e.latency = latency;
    return e;
}

double recency_score(const Date& published, const Date& reference, double half_life_days) {
    using namespace std::chrono;
    auto to_days = [](const Date& d) {
        const year_month_day ymd{year{d.year}, month{static_cast<unsigned>(d.month.value_or(1))},
                                 day{static_cast<unsigned>(d.day.value_or(1))}};
        return sys_days{ymd}.time_since_epoch().count();
    };
    const double age = static_cast<double>(to_days(reference) - to_days(published));
    if (age <= 0.0) return 1.0;
    return std::exp(-age / half_life_days);
}

double citation_norm(std::uint64_t count, std::uint64_t reference) {
    if (reference == 0) return 0.0;
    return std::min(1.0, std::log1p(static_cast<double>(count)) / std::log1p(static_cast<double>(reference)));
}

Stance decide_stance(const Claim& claim, const ValueDistribution& dist, double margin) {
    if (dist.empty()) return Stance::Insufficient;
    double top = 0.0;
    for (const auto& [v, p] : dist) top = std::max(top, p);
    for (const auto& v : claim.asserted_values()) {
        auto it = dist.find(v);
        if (it != dist.end() && it->second >= top - margin) return Stance::Supports;
    }
    return Stance::Refutes;
}

ValueDistribution normalized(const ValueDistribution& raw) {
    double z = 0.0;
    for (const auto& [v, p] : raw)
        if (p > 0.0) z += p;
    ValueDistribution out;
    if (z <= 0.0) return out;
    for (const auto& [v, p] : raw)
        if (p > 0.0) out.emplace(v, p / z);
    return out;
}

ValueDistribution hit_distribution(std::span<const Hit> hits, HitWeighting weighting) {
    ValueDistribution raw;
    for (const auto& h : hits) raw[h.value] += weighting == HitWeighting::Count ? 1.0 : h.authority;
    return normalized(raw);
}

Evidence aggregate_hits(const Claim& claim, const SourceProfile& profile, std::span<const Hit> hits,
                        const ScoringContext& ctx, std::uint64_t citation_reference, HitWeighting weighting) {
    std::vector<Hit> usable;
    for (const auto& h : hits)
        if (h.value.storage().index() == claim.object.storage().index()) usable.push_back(h);

    Evidence e = insufficient_evidence(profile, claim);
    e.value_distribution = hit_distribution(usable, weighting);
    e.stance = decide_stance(claim, e.value_distribution, ctx.stance_margin);
    if (!e.responded()) {
        e.value_distribution.clear();
        return e;
    }

    double auth = 0.0;
    std::uint64_t max_cit = 0;
    std::vector<std::string> snippets;
    for (const auto& h : usable) {
        auth += h.authority;
        max_cit = std::max(max_cit, h.citations);
        if (h.published && (!e.recency || ClaimValue(*h.published) > ClaimValue(*e.recency))) e.recency = h.published;
        if (!h.snippet.empty()) snippets.push_back(h.snippet);
        if (h.label && !h.label->empty()) e.value_labels.try_emplace(h.value, *h.label);
    }
    e.authority = std::clamp(auth / static_cast<double>(usable.size()), 0.0, 1.0);
    e.citation_count = max_cit;
    std::uint64_t ref = citation_reference;
    if (ref == 0)
        for (const auto& h : usable) ref = std::max(ref, h.citations);
    e.citation_norm = citation_norm(max_cit, ref);
    e.recency_score = e.recency ? recency_score(*e.recency, ctx.reference_date, ctx.recency_half_life_days) : 0.0;
    e.snippet = text::join(snippets, " ");
    return e;
}

}  // namespace factcheck
