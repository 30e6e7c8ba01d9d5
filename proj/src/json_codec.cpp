#include "factcheck/json_codec.hpp"

#include <cmath>

#include <fmt/format.h>

namespace factcheck {

double round6(double v) {
    if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;
    return std::stod(fmt::format("{:.6g}", v));
}

ojson to_json(const ClaimValue& v) {
    ojson j;
    j["type"] = v.type_name();
    j["value"] = v.display();
    if (const auto* e = v.get_if<EntityRef>(); e && e->linked()) j["id"] = e->canonical_id;
    return j;
}

ojson to_json(const Claim& c) {
    ojson j;
    j["id"] = c.id;
    ojson subj;
    subj["surface"] = c.subject.surface_form;
    if (c.subject.linked()) {
        subj["id"] = c.subject.canonical_id;
        subj["link_score"] = round6(c.subject.link_score);
    }
    j["subject"] = subj;
    j["predicate"] = c.predicate;
    ojson objs = ojson::array();
    for (const auto& v : c.asserted_values()) objs.push_back(to_json(v));
    j["objects"] = objs;
    if (!c.complement.empty()) j["complement"] = c.complement;
    if (c.temporal_qualifier) j["as_of"] = {c.temporal_qualifier->from, c.temporal_qualifier->to};
    j["span"] = {c.span.begin, c.span.end};
    j["text"] = c.raw_text;
    return j;
}

ojson to_json(const ValueDistribution& d) {
    ojson arr = ojson::array();
    for (const auto& [v, p] : d) {
        auto e = to_json(v);
        e["mass"] = round6(p);
        arr.push_back(e);
    }
    return arr;
}

ojson to_json(const Correction& c) {
    ojson j;
    j["claim_id"] = c.claim_id;
    j["strategy"] = to_string(c.strategy);
    j["original_span"] = {c.original_span.begin, c.original_span.end};
    j["original_text"] = c.original_text;
    j["replacement_text"] = c.replacement_text;
    j["cited_sources"] = c.cited_sources;
    j["posterior_mass_used"] = round6(c.posterior_mass_used);
    j["rolled_back"] = c.rolled_back;
    return j;
}

ojson to_json(const StageTimings& t) {
    ojson j;
    j["extract_ms"] = round6(t.extract);
    j["evidence_ms"] = round6(t.evidence);
    j["fusion_ms"] = round6(t.fusion);
    j["confidence_ms"] = round6(t.confidence);
    j["correction_ms"] = round6(t.correction);
    j["reverify_ms"] = round6(t.reverify);
    j["total_ms"] = round6(t.total);
    return j;
}

namespace {

ojson evidence_json(const Evidence& e, bool diagnostics) {
    ojson j;
    j["source_id"] = e.source_id;
    j["stance"] = to_string(e.stance);
    j["distribution"] = to_json(e.value_distribution);
    j["authority"] = round6(e.authority);
    j["reliability"] = round6(e.reliability);
    j["recency_score"] = round6(e.recency_score);
    j["citation_count"] = e.citation_count;
    j["citation_norm"] = round6(e.citation_norm);
    if (!e.snippet.empty()) j["snippet"] = e.snippet;
    if (diagnostics) j["latency_ms"] = e.latency.count();
    return j;
}

}  // namespace

ojson to_json(const VerifiedResponse& r, bool diagnostics) {
    ojson j;
    j["original_text"] = r.original_text;
    j["final_text"] = r.final_text;
    j["e_score"] = round6(r.e_score);
    j["initial_e_score"] = round6(r.initial_e_score);
    j["unverified"] = r.unverified;
    if (!r.annotation.empty()) j["annotation"] = r.annotation;
    j["degraded_sources"] = r.degraded_sources;

    ojson verdicts = ojson::array();
    for (const auto& v : r.verdicts) {
        ojson vj;
        vj["claim"] = to_json(v.claim);
        vj["gate"] = to_string(v.gate);
        vj["consistency"] = round6(v.report.consistency);
        vj["strength"] = round6(v.report.strength);
        vj["contradiction"] = v.report.contradiction;
        vj["posterior"] = to_json(v.report.fused_posterior);
        ojson conf;
        conf["intrinsic"] = round6(v.confidence.intrinsic);
        conf["external"] = round6(v.confidence.external);
        conf["coherence"] = round6(v.confidence.coherence);
        conf["combined"] = round6(v.confidence.combined);
        conf["intrinsic_fallback"] = v.confidence.intrinsic_fallback;
        vj["confidence"] = conf;
        ojson ev = ojson::array();
        for (const auto& e : v.evidence) ev.push_back(evidence_json(e, diagnostics));
        vj["evidence"] = ev;
        if (diagnostics) vj["cached"] = v.cached;
        verdicts.push_back(vj);
    }
    j["verdicts"] = verdicts;

    ojson corrections = ojson::array();
    for (const auto& c : r.corrections) corrections.push_back(to_json(c));
    j["corrections"] = corrections;

    if (r.reverification) {
        ojson rv;
        rv["e_score"] = round6(r.reverification->e_score);
        ojson claims = ojson::array();
        for (std::size_t i = 0; i < r.reverification->claims.size(); ++i) {
            ojson cj;
            cj["text"] = r.reverification->claims[i].raw_text;
            cj["consistency"] = round6(r.reverification->reports[i].consistency);
            cj["strength"] = round6(r.reverification->reports[i].strength);
            claims.push_back(cj);
        }
        rv["claims"] = claims;
        j["reverification"] = rv;
    }
    if (diagnostics) j["timings"] = to_json(r.timings);
    return j;
}

ojson to_json(const std::vector<SourceStatus>& health) {
    ojson j;
    bool all_up = true;
    ojson sources = ojson::array();
    for (const auto& s : health) {
        all_up = all_up && s.up;
        ojson sj;
        sj["id"] = s.source_id;
        sj["kind"] = to_string(s.kind);
        sj["status"] = s.up ? "up" : "down";
        if (!s.detail.empty()) sj["detail"] = s.detail;
        sources.push_back(sj);
    }
    j["status"] = all_up ? "ok" : "degraded";
    j["sources"] = sources;
    return j;
}

ojson to_json(const AppConfig& c) {
    ojson j;
    j["reference_date"] = fmt::format("{:04d}-{:02d}-{:02d}", c.reference_date.year, c.reference_date.month.value_or(1),
                                      c.reference_date.day.value_or(1));
    j["extractor"] = {{"vocabulary", c.vocabulary.string()},
                      {"aliases", c.aliases.string()},
                      {"link_threshold", c.link_threshold}};
    ojson sources = ojson::array();
    for (const auto& s : c.sources) {
        ojson sj;
        sj["id"] = s.id;
        sj["kind"] = to_string(s.kind);
        sj["backend"] = s.backend == Backend::Triples ? "triples" : s.backend == Backend::Corpus ? "corpus" : "http";
        if (!s.path.empty()) sj["path"] = s.path.string();
        if (!s.endpoint.empty()) sj["endpoint"] = s.endpoint;
        if (!s.mock_fixture.empty()) sj["mock_fixture"] = s.mock_fixture.string();
        sj["reliability"] = s.reliability;
        sj["weight"] = s.weight;
        sj["timeout_ms"] = s.timeout_ms;
        sj["max_results"] = s.max_results;
        if (!s.label.empty()) sj["label"] = s.label;
        sources.push_back(sj);
    }
    j["sources"] = sources;
    j["enabled_sources"] = c.enabled_sources;
    j["fusion"] = {{"tau_consistency", c.tau_consistency},
                   {"stance_margin", c.stance_margin},
                   {"recency_half_life_days", c.recency_half_life_days},
                   {"strength",
                    {{"authority", c.strength.authority},
                     {"recency", c.strength.recency},
                     {"citations", c.strength.citations}}}};
    const char* provider = c.intrinsic == IntrinsicKind::Constant   ? "constant"
                           : c.intrinsic == IntrinsicKind::Supplied ? "supplied"
                                                                    : "sample_agreement";
    j["confidence"] = {{"tau", c.tau},
                       {"weights", {{"alpha", c.weights.alpha}, {"beta", c.weights.beta}, {"gamma", c.weights.gamma}}},
                       {"intrinsic", {{"provider", provider}, {"value", c.intrinsic_value}}}};
    j["correction"] = {{"substitution_threshold", c.correction.substitution_threshold},
                       {"tie_margin", c.correction.tie_margin},
                       {"multi_value_min_mass", c.correction.multi_value_min_mass},
                       {"hedge_phrase", c.correction.hedge_phrase},
                       {"default_template", c.correction.default_template},
                       {"templates", c.correction.templates}};
    j["cache"] = {{"ttl_s", c.cache_ttl.count()}, {"capacity", c.cache_capacity}};
    j["service"] = {{"bind", c.bind},
                    {"max_concurrent", c.max_concurrent},
                    {"evidence_budget_ms", c.evidence_budget.count()}};
    return j;
}

std::string server_timing_header(const StageTimings& t) {
    return fmt::format("extract;dur={:.3f}, evidence;dur={:.3f}, fusion;dur={:.3f}, confidence;dur={:.3f}, "
                       "correction;dur={:.3f}, reverify;dur={:.3f}, total;dur={:.3f}",
                       t.extract, t.evidence, t.fusion, t.confidence, t.correction, t.reverify, t.total);
}

VerifyRequest verify_request_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw RequestInvalid("invalid_request", "request body must be a JSON object");
    VerifyRequest r;
    if (!j.contains("text") || !j["text"].is_string())
        throw RequestInvalid("invalid_request", "field 'text' is required and must be a string");
    r.text = j["text"].get<std::string>();
    if (j.contains("context")) {
        if (!j["context"].is_string()) throw RequestInvalid("invalid_request", "field 'context' must be a string");
        r.context = j["context"].get<std::string>();
    }
    if (j.contains("intrinsic_confidences")) {
        const auto& m = j["intrinsic_confidences"];
        if (!m.is_object())
            throw RequestInvalid("invalid_request", "field 'intrinsic_confidences' must be an object");
        for (const auto& [k, v] : m.items()) {
            if (!v.is_number() || v.get<double>() < 0.0 || v.get<double>() > 1.0)
                throw RequestInvalid("invalid_request",
                                     fmt::format("intrinsic_confidences['{}'] must be a number in [0,1]", k));
            r.request.intrinsic_confidences[k] = v.get<double>();
        }
    }
    if (j.contains("samples")) {
        const auto& s = j["samples"];
        if (!s.is_array()) throw RequestInvalid("invalid_request", "field 'samples' must be an array of strings");
        for (const auto& x : s) {
            if (!x.is_string()) throw RequestInvalid("invalid_request", "field 'samples' must be an array of strings");
            r.request.sample_texts.push_back(x.get<std::string>());
        }
    }
    if (j.contains("timings")) {
        if (!j["timings"].is_boolean()) throw RequestInvalid("invalid_request", "field 'timings' must be a boolean");
        r.diagnostics = j["timings"].get<bool>();
    }
    return r;
}

VerifyRequest parse_verify_request(std::string_view body) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw RequestInvalid("malformed_json", e.what());
    }
    return verify_request_from_json(j);
}

ojson error_envelope(std::string_view code, std::string_view message) {
    ojson j;
    j["error"] = {{"code", code}, {"message", message}};
    return j;
}

}  // namespace factcheck
