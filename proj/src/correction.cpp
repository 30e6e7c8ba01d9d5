#include "factcheck/correction.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <fmt/format.h>

#include "factcheck/text.hpp"

namespace factcheck {

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::Substitute: return "SUBSTITUTE";
        case Strategy::Hedge: return "HEDGE";
        case Strategy::Attribute: return "ATTRIBUTE";
    }
    return "?";
}

std::string CorrectionConfig::label_for(std::string_view source_id) const {
    auto it = source_labels.find(std::string(source_id));
    return it == source_labels.end() ? std::string(source_id) : it->second;
}

const std::string& CorrectionConfig::template_for(std::string_view predicate) const {
    auto it = templates.find(std::string(predicate));
    return it == templates.end() ? default_template : it->second;
}

void CorrectionConfig::validate() const {
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(substitution_threshold)) throw std::invalid_argument("correction.substitution_threshold: must be in [0,1]");
    if (!unit(tie_margin)) throw std::invalid_argument("correction.tie_margin: must be in [0,1]");
    if (!unit(multi_value_min_mass)) throw std::invalid_argument("correction.multi_value_min_mass: must be in [0,1]");
    if (hedge_phrase.empty()) throw std::invalid_argument("correction.hedge_phrase: must not be empty");
    auto check_template = [](const std::string& t, const std::string& field) {
        if (t.find("{value}") == std::string::npos)
            throw std::invalid_argument(fmt::format("{}: template lacks {{value}}", field));
    };
    check_template(default_template, "correction.default_template");
    for (const auto& [pred, t] : templates) check_template(t, "correction.templates." + pred);
}

bool is_flagged(const ConsistencyReport& report, const ConfidenceBreakdown& confidence, double tau) {
    return confidence.combined <= tau || report.contradiction;
}

StrategyChoice select_strategy(const Claim& claim, const ConsistencyReport& report,
                               const ConfidenceBreakdown& confidence, double tau, const CorrectionConfig& cfg,
                               bool multi_valued) {
    if (!is_flagged(report, confidence, tau))
        throw NotFlagged(fmt::format("claim {} passed the gate and is not eligible for correction", claim.id));

    StrategyChoice out;
    const auto& post = report.fused_posterior;
    if (post.empty()) return out;

    double top = 0.0;
    for (const auto& [v, p] : post) top = std::max(top, p);

    // std::map iteration keeps the candidate values in value order.
    for (const auto& [v, p] : post) {
        const bool take = multi_valued ? p >= cfg.multi_value_min_mass : top - p < cfg.tie_margin - 1e-12;
        if (take) {
            out.values.push_back(v);
            out.posterior_mass += p;
        }
    }

    const auto asserted = claim.asserted_values();
    const std::set<ClaimValue> asserted_set(asserted.begin(), asserted.end());
    const std::set<ClaimValue> candidate_set(out.values.begin(), out.values.end());

    if (out.posterior_mass >= cfg.substitution_threshold && candidate_set != asserted_set) {
        out.strategy = Strategy::Substitute;
        return out;
    }
    out.strategy = Strategy::Attribute;
    out.values.clear();
    out.posterior_mass = top;
    return out;
}

std::string join_conjunctive(const std::vector<std::string>& parts) {
    if (parts.empty()) return {};
    if (parts.size() == 1) return parts[0];
    std::string out;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (i > 0) out += ", ";
        out += parts[i];
    }
    return out + " and " + parts.back();
}

namespace {

void check_span(std::string_view text, const Claim& claim) {
    if (claim.span.end > text.size() || claim.span.begin > claim.span.end ||
        text.substr(claim.span.begin, claim.span.length()) != claim.raw_text)
        throw SpanMismatch(fmt::format("claim {} no longer matches its span [{}, {})", claim.id, claim.span.begin,
                                       claim.span.end));
}

std::string render_template(std::string tmpl, std::string_view label, std::string_view value) {
    auto replace = [&](std::string_view key, std::string_view with) {
        for (auto pos = tmpl.find(key); pos != std::string::npos; pos = tmpl.find(key, pos + with.size()))
            tmpl.replace(pos, key.size(), with);
    };
    replace("{label}", label);
    replace("{value}", value);
    return tmpl;
}

bool starts_with_function_word(std::string_view s) {
    static const std::set<std::string, std::less<>> kWords = {"the",   "a",     "an",    "this", "that", "these",
                                                              "those", "some",  "many",  "most", "all",  "it",
                                                              "its",   "there", "their", "our",  "my",   "his",
                                                              "her"};
    std::size_t n = 0;
    while (n < s.size() && std::isalpha(static_cast<unsigned char>(s[n]))) ++n;
    return kWords.count(text::to_lower(s.substr(0, n))) > 0;
}

std::string substitute(const Claim& claim, const StrategyChoice& choice, const ConsistencyReport& report,
                       const CorrectionConfig& cfg) {
    const bool labelled =
        claim.complement_span.has_value() &&
        std::all_of(choice.values.begin(), choice.values.end(),
                    [&](const ClaimValue& v) { return report.value_labels.count(v) > 0; });

    std::vector<std::string> pieces;
    for (const auto& v : choice.values)
        pieces.push_back(labelled ? render_template(cfg.template_for(claim.predicate), report.value_labels.at(v), v.display())
                                  : v.display());

    const Span region = labelled ? Span{claim.complement_span->begin, claim.object_span.end} : claim.object_span;
    if (region.begin < claim.span.begin || region.end > claim.span.end || region.begin > region.end)
        throw SpanMismatch(fmt::format("claim {} has an object slot outside its span", claim.id));

    std::string out = claim.raw_text;
    out.replace(region.begin - claim.span.begin, region.length(), join_conjunctive(pieces));
    return out;
}

}  // namespace

Correction build_correction(std::string_view response_text, const Claim& claim, const StrategyChoice& choice,
                            const ConsistencyReport& report, const CorrectionConfig& cfg) {
    check_span(response_text, claim);
    Correction c;
    c.claim_id = claim.id;
    c.strategy = choice.strategy;
    c.original_span = claim.span;
    c.original_text = claim.raw_text;
    c.posterior_mass_used = choice.posterior_mass;

    switch (choice.strategy) {
        case Strategy::Substitute:
            if (choice.values.empty()) throw std::invalid_argument("substitution without values");
            c.replacement_text = substitute(claim, choice, report, cfg);
            c.substituted_values = choice.values;
            c.cited_sources = report.contributing_sources;
            break;
        case Strategy::Hedge: {
            std::string body = claim.raw_text;
            if (!body.empty() && starts_with_function_word(body))
                body[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(body[0])));
            c.replacement_text = cfg.hedge_phrase + body;
            break;
        }
        case Strategy::Attribute: {
            if (report.contributing_sources.empty())
                throw std::invalid_argument(fmt::format("claim {}: attribution without sources", claim.id));
            std::vector<std::string> labels;
            for (const auto& s : report.contributing_sources) labels.push_back(cfg.label_for(s));
            c.cited_sources = report.contributing_sources;
            c.replacement_text = claim.raw_text + " (according to " + text::join(labels, ", ") + ")";
            break;
        }
    }
    return c;
}

std::string apply_correction(std::string_view response_text, const Claim& claim, const Correction& correction) {
    check_span(response_text, claim);
    std::string out(response_text);
    out.replace(claim.span.begin, claim.span.length(), correction.replacement_text);
    return out;
}

std::string apply_corrections(std::string_view response_text, std::span<const Claim> claims,
                              std::span<const Correction> corrections) {
    std::vector<std::pair<const Claim*, const Correction*>> todo;
    for (const auto& c : corrections) {
        auto it = std::find_if(claims.begin(), claims.end(), [&](const Claim& cl) { return cl.id == c.claim_id; });
        if (it == claims.end()) throw std::invalid_argument(fmt::format("no claim with id {}", c.claim_id));
        todo.emplace_back(&*it, &c);
    }
    std::sort(todo.begin(), todo.end(),
              [](const auto& a, const auto& b) { return a.first->span.begin > b.first->span.begin; });
    for (std::size_t i = 1; i < todo.size(); ++i)
        if (todo[i].first->span.end > todo[i - 1].first->span.begin)
            throw std::invalid_argument("overlapping claim spans");

    std::string out(response_text);
    for (const auto& [claim, corr] : todo) {
        check_span(out, *claim);
        out.replace(claim->span.begin, claim->span.length(), corr->replacement_text);
    }
    return out;
}

}  // namespace factcheck
