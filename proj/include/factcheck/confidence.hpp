#pragma once

#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/claim.hpp"
#include "factcheck/evidence.hpp"
#include "factcheck/extractor.hpp"
#include "factcheck/fusion.hpp"

namespace factcheck {

class WeightsOffSimplex : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// (alpha, beta, gamma) of the confidence ensemble; must lie on the simplex.
struct ConfidenceWeights {
    double alpha = 0.3;
    double beta = 0.5;
    double gamma = 0.2;

    /// Throws WeightsOffSimplex.
    void validate() const;
    bool operator==(const ConfidenceWeights&) const = default;
};

struct ConfidenceBreakdown {
    double intrinsic = 0.5;
    double external = 0.0;
    double coherence = 0.5;
    double combined = 0.0;
    ConfidenceWeights weights_used;
    /// Set when the intrinsic provider failed and 0.5 was used instead.
    bool intrinsic_fallback = false;
};

/// Per-request inputs that intrinsic providers may read.
struct RequestContext {
    /// Claim id or claim text -> model-reported confidence in [0,1].
    std::map<std::string, double> intrinsic_confidences;
    /// Alternative generations of the same answer.
    std::vector<std::string> sample_texts;
};

class ProviderUnavailable : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Model-side confidence for a claim. Throws ProviderUnavailable.
class IntrinsicProvider {
  public:
    virtual ~IntrinsicProvider() = default;
    virtual double score(const Claim& claim, const RequestContext& ctx) const = 0;
    virtual std::string_view name() const = 0;
};

class ConstantIntrinsic final : public IntrinsicProvider {
  public:
    explicit ConstantIntrinsic(double value);
    double score(const Claim&, const RequestContext&) const override { return value_; }
    std::string_view name() const override { return "constant"; }

  private:
    double value_;
};

/// Reads the per-claim confidence supplied with the request, keyed by claim
/// id or by the claim's text.
class SuppliedIntrinsic final : public IntrinsicProvider {
  public:
    double score(const Claim& claim, const RequestContext& ctx) const override;
    std::string_view name() const override { return "supplied"; }
};

/// Fraction of alternative generations whose claim for the same subject and
/// predicate asserts the same value. 0.5 when no alternatives are given.
class SampleAgreementIntrinsic final : public IntrinsicProvider {
  public:
    explicit SampleAgreementIntrinsic(std::shared_ptr<const Extractor> extractor);
    double score(const Claim& claim, const RequestContext& ctx) const override;
    std::string_view name() const override { return "sample_agreement"; }

  private:
    std::shared_ptr<const Extractor> extractor_;
};

struct IntrinsicResult {
    double value = 0.5;
    bool fallback = false;
};

/// Provider score clamped to [0,1]; 0.5 with fallback=true when the provider
/// is unavailable.
IntrinsicResult intrinsic_confidence(const Claim& claim, const IntrinsicProvider& provider, const RequestContext& ctx);

/// consistency x strength, clipped to [0,1].
double external_confidence(const ConsistencyReport& report);

class SimilarityProvider {
  public:
    virtual ~SimilarityProvider() = default;
    virtual double similarity(std::string_view a, std::string_view b) const = 0;
};

/// Cosine of term-frequency vectors after case folding and stop-word removal.
class TfCosineSimilarity final : public SimilarityProvider {
  public:
    double similarity(std::string_view a, std::string_view b) const override;
};

/// Similarity between the claim text and the concatenated snippets of the
/// responding evidence; 0.5 when there are no snippets.
double coherence_score(const Claim& claim, std::span<const Evidence> evidence,
                       const SimilarityProvider& provider = TfCosineSimilarity{});

/// alpha*intrinsic + beta*external + gamma*coherence. Throws
/// WeightsOffSimplex.
double combine_confidence(double intrinsic, double external, double coherence, const ConfidenceWeights& w);

ConfidenceBreakdown confidence_breakdown(const Claim& claim, const ConsistencyReport& report,
                                         std::span<const Evidence> evidence, const IntrinsicProvider& provider,
                                         const RequestContext& ctx, const ConfidenceWeights& weights,
                                         const SimilarityProvider& similarity = TfCosineSimilarity{});

}  // namespace factcheck
