#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/claim.hpp"
#include "factcheck/confidence.hpp"
#include "factcheck/fusion.hpp"

namespace factcheck {

enum class Strategy { Substitute, Hedge, Attribute };

std::string_view to_string(Strategy s);

class NotFlagged : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

class SpanMismatch : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct CorrectionConfig {
    /// Posterior mass the substituted value(s) must carry.
    double substitution_threshold = 0.6;
    /// Functional predicates: values within this of the top mass are summed.
    double tie_margin = 0.05;
    /// Multi-valued predicates: every value at or above this mass is used.
    double multi_value_min_mass = 0.2;
    std::string hedge_phrase = "It is uncertain whether ";
    /// source_id -> label shown in attributions; the id itself otherwise.
    std::map<std::string, std::string> source_labels;
    /// predicate -> template for one labelled value, with {label} and
    /// {value} placeholders. Used when every substituted value carries a
    /// label and the claim has a complement ("published relativity in ...").
    std::map<std::string, std::string> templates;
    std::string default_template = "{label} in {value}";

    std::string label_for(std::string_view source_id) const;
    const std::string& template_for(std::string_view predicate) const;
    /// Throws std::invalid_argument naming the field.
    void validate() const;
};

struct StrategyChoice {
    Strategy strategy = Strategy::Hedge;
    /// Values to substitute, in value order; empty unless SUBSTITUTE.
    std::vector<ClaimValue> values;
    double posterior_mass = 0.0;
};

/// A claim is flagged when its combined confidence is at most tau or its
/// consistency report marks a contradiction.
bool is_flagged(const ConsistencyReport& report, const ConfidenceBreakdown& confidence, double tau);

/// Empty posterior: HEDGE. Otherwise the candidate set is every value with
/// mass >= multi_value_min_mass (multi-valued predicates) or every value
/// within tie_margin of the top (functional predicates); SUBSTITUTE when its
/// mass reaches substitution_threshold and it differs from what the claim
/// already asserts, ATTRIBUTE otherwise. Throws NotFlagged.
StrategyChoice select_strategy(const Claim& claim, const ConsistencyReport& report,
                               const ConfidenceBreakdown& confidence, double tau, const CorrectionConfig& cfg,
                               bool multi_valued);

struct Correction {
    std::string claim_id;
    Strategy strategy = Strategy::Hedge;
    /// The whole claim span; replacement_text takes its place.
    Span original_span;
    std::string original_text;
    std::string replacement_text;
    std::vector<std::string> cited_sources;
    double posterior_mass_used = 0.0;
    std::vector<ClaimValue> substituted_values;
    bool rolled_back = false;
};

/// Renders the replacement for one claim. Throws SpanMismatch when the claim
/// text is no longer at its span in `response_text`.
Correction build_correction(std::string_view response_text, const Claim& claim, const StrategyChoice& choice,
                            const ConsistencyReport& report, const CorrectionConfig& cfg);

/// Replaces the claim span. Throws SpanMismatch.
std::string apply_correction(std::string_view response_text, const Claim& claim, const Correction& correction);

/// Applies non-overlapping corrections right to left. `claims` must contain
/// each corrected claim id. Throws SpanMismatch or std::invalid_argument.
std::string apply_corrections(std::string_view response_text, std::span<const Claim> claims,
                              std::span<const Correction> corrections);

/// "a", "a and b", "a, b and c".
std::string join_conjunctive(const std::vector<std::string>& parts);

}  // namespace factcheck
