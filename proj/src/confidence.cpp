#include "factcheck/confidence.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "factcheck/text.hpp"

namespace factcheck {

void ConfidenceWeights::validate() const {
    if (alpha < 0.0 || beta < 0.0 || gamma < 0.0)
        throw WeightsOffSimplex(fmt::format("confidence weights ({}, {}, {}) must be non-negative", alpha, beta, gamma));
    if (std::abs(alpha + beta + gamma - 1.0) > 1e-9)
        throw WeightsOffSimplex(fmt::format("confidence weights ({}, {}, {}) must sum to 1", alpha, beta, gamma));
}

ConstantIntrinsic::ConstantIntrinsic(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) throw std::invalid_argument("constant intrinsic confidence must be in [0,1]");
}

double SuppliedIntrinsic::score(const Claim& claim, const RequestContext& ctx) const {
    auto it = ctx.intrinsic_confidences.find(claim.id);
    if (it == ctx.intrinsic_confidences.end()) it = ctx.intrinsic_confidences.find(claim.raw_text);
    if (it == ctx.intrinsic_confidences.end())
        throw ProviderUnavailable(fmt::format("no supplied confidence for claim {}", claim.id));
    if (!(it->second >= 0.0 && it->second <= 1.0))
        throw ProviderUnavailable(fmt::format("supplied confidence for claim {} is outside [0,1]", claim.id));
    return it->second;
}

SampleAgreementIntrinsic::SampleAgreementIntrinsic(std::shared_ptr<const Extractor> extractor)
    : extractor_(std::move(extractor)) {}

double SampleAgreementIntrinsic::score(const Claim& claim, const RequestContext& ctx) const {
    if (ctx.sample_texts.empty()) return 0.5;
    std::size_t agree = 0;
    const std::string subject = claim.subject.identity();
    for (const auto& sample : ctx.sample_texts) {
        for (const auto& alt : extractor_->extract(sample)) {
            if (alt.subject.identity() != subject || alt.predicate != claim.predicate) continue;
            const auto vals = claim.asserted_values();
            if (std::any_of(vals.begin(), vals.end(), [&](const ClaimValue& v) { return alt.asserts(v); })) ++agree;
            break;  // first matching claim of each sample decides
        }
    }
    return static_cast<double>(agree) / static_cast<double>(ctx.sample_texts.size());
}

IntrinsicResult intrinsic_confidence(const Claim& claim, const IntrinsicProvider& provider, const RequestContext& ctx) {
    try {
        return {std::clamp(provider.score(claim, ctx), 0.0, 1.0), false};
    } catch (const ProviderUnavailable&) {
        return {0.5, true};
    }
}

double external_confidence(const ConsistencyReport& report) {
    return std::clamp(report.consistency * report.strength, 0.0, 1.0);
}

double TfCosineSimilarity::similarity(std::string_view a, std::string_view b) const { return text::tf_cosine(a, b); }

double coherence_score(const Claim& claim, std::span<const Evidence> evidence, const SimilarityProvider& provider) {
    std::vector<std::string> snippets;
    for (const auto& e : evidence)
        if (e.responded() && !e.snippet.empty()) snippets.push_back(e.snippet);
    if (snippets.empty()) return 0.5;
    return std::clamp(provider.similarity(claim.raw_text, text::join(snippets, " ")), 0.0, 1.0);
}

double combine_confidence(double intrinsic, double external, double coherence, const ConfidenceWeights& w) {
    w.validate();
    return w.alpha * intrinsic + w.beta * external + w.gamma * coherence;
}

ConfidenceBreakdown confidence_breakdown(const Claim& claim, const ConsistencyReport& report,
                                         std::span<const Evidence> evidence, const IntrinsicProvider& provider,
                                         const RequestContext& ctx, const ConfidenceWeights& weights,
                                         const SimilarityProvider& similarity) {
    ConfidenceBreakdown b;
    const auto intr = intrinsic_confidence(claim, provider, ctx);
    b.intrinsic = intr.value;
    b.intrinsic_fallback = intr.fallback;
    b.external = external_confidence(report);
    b.coherence = coherence_score(claim, evidence, similarity);
    b.combined = combine_confidence(b.intrinsic, b.external, b.coherence, weights);
    b.weights_used = weights;
    return b;
}

}  // namespace factcheck
