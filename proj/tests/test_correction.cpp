#include <gtest/gtest.h>

#include "factcheck/correction.hpp"
#include "factcheck/extractor.hpp"
#include "support.hpp"

using namespace factcheck;
using testing_support::Rng;
using testing_support::years;

namespace {

AliasTable aliases() {
    AliasTable t;
    t.add("Q937", EntityKind::Person, "Einstein");
    t.add("Q7186", EntityKind::Person, "Marie Curie");
    return t;
}

Claim einstein_claim(const std::string& text) { return extract_claims(text, ExtractorConfig::defaults(), aliases()).at(0); }

ConfidenceBreakdown failing() {
    ConfidenceBreakdown c;
    c.combined = 0.3;
    return c;
}

ConsistencyReport figure_report() {
    ConsistencyReport r;
    r.consistency = 0.0;
    r.contradiction = true;
    r.fused_posterior = years({{1905, 0.5875}, {1915, 0.4125}});
    r.contributing_sources = {"db", "kg", "web"};
    return r;
}

}  // namespace

TEST(SelectStrategy, MultiValuedPredicateSubstitutesBothYears) {
    const auto claim = einstein_claim("Einstein published relativity in 1920.");
    const auto s = select_strategy(claim, figure_report(), failing(), 0.7, {}, true);
    EXPECT_EQ(s.strategy, Strategy::Substitute);
    EXPECT_EQ(s.values, (std::vector<ClaimValue>{ClaimValue::year(1905), ClaimValue::year(1915)}));
    EXPECT_NEAR(s.posterior_mass, 1.0, 1e-12);
}

TEST(SelectStrategy, FunctionalPredicateKeepsTopOnly) {
    // 0.5875 - 0.4125 exceeds the tie margin, so only 1905 is a candidate and
    // its mass is below the substitution threshold.
    const auto claim = einstein_claim("Einstein published relativity in 1920.");
    const auto s = select_strategy(claim, figure_report(), failing(), 0.7, {}, false);
    EXPECT_EQ(s.strategy, Strategy::Attribute);
    EXPECT_NEAR(s.posterior_mass, 0.5875, 1e-12);
}

TEST(SelectStrategy, SpreadPosteriorAttributesAndEmptyHedges) {
    auto claim = einstein_claim("Einstein published relativity in 1920.");
    claim.predicate = "born";
    auto r = figure_report();
    r.fused_posterior = years({{1, 0.4}, {2, 0.35}, {3, 0.25}});
    EXPECT_EQ(select_strategy(claim, r, failing(), 0.7, {}, false).strategy, Strategy::Attribute);
    r.fused_posterior.clear();
    EXPECT_EQ(select_strategy(claim, r, failing(), 0.7, {}, false).strategy, Strategy::Hedge);
}

TEST(SelectStrategy, PassingClaimIsRejected) {
    const auto claim = einstein_claim("Einstein published relativity in 1920.");
    auto r = figure_report();
    r.contradiction = false;
    ConfidenceBreakdown passing;
    passing.combined = 0.9;
    EXPECT_THROW(select_strategy(claim, r, passing, 0.7, {}, true), NotFlagged);
    // At exactly tau the claim is flagged.
    passing.combined = 0.7;
    EXPECT_NO_THROW(select_strategy(claim, r, passing, 0.7, {}, true));
}

TEST(SelectStrategy, AlreadyCorrectClaimIsAttributed) {
    const auto claim = einstein_claim("Einstein published special relativity in 1905 and general relativity in 1915.");
    const auto s = select_strategy(claim, figure_report(), failing(), 0.7, {}, true);
    EXPECT_EQ(s.strategy, Strategy::Attribute);
}

TEST(BuildCorrection, SubstituteWithAndWithoutLabels) {
    const std::string text = "Einstein published relativity in 1920.";
    const auto claim = einstein_claim(text);
    auto report = figure_report();
    const auto choice = select_strategy(claim, report, failing(), 0.7, {}, true);

    auto plain = build_correction(text, claim, choice, report, {});
    EXPECT_EQ(apply_correction(text, claim, plain), "Einstein published relativity in 1905 and 1915.");

    report.value_labels = {{ClaimValue::year(1905), "special relativity"}, {ClaimValue::year(1915), "general relativity"}};
    auto labelled = build_correction(text, claim, choice, report, {});
    EXPECT_EQ(apply_correction(text, claim, labelled),
              "Einstein published special relativity in 1905 and general relativity in 1915.");
    EXPECT_EQ(labelled.strategy, Strategy::Substitute);
    EXPECT_EQ(labelled.cited_sources, report.contributing_sources);
    EXPECT_EQ(labelled.original_text, claim.raw_text);
}

TEST(BuildCorrection, HedgeLowercasesFunctionWordHead) {
    const std::string text = "The drug cures X.";
    Claim claim;
    claim.id = "c0";
    claim.span = {0, 16};
    claim.raw_text = "The drug cures X";
    claim.object_span = {15, 16};
    StrategyChoice hedge;
    const auto c = build_correction(text, claim, hedge, ConsistencyReport{}, {});
    EXPECT_EQ(apply_correction(text, claim, c), "It is uncertain whether the drug cures X.");

    const std::string named = "Einstein published relativity in 1920.";
    const auto c2 = build_correction(named, einstein_claim(named), hedge, ConsistencyReport{}, {});
    EXPECT_EQ(c2.replacement_text, "It is uncertain whether Einstein published relativity in 1920");
}

TEST(BuildCorrection, AttributeUsesConfiguredLabel) {
    const std::string text = "Einstein published relativity in 1920.";
    const auto claim = einstein_claim(text);
    ConsistencyReport r;
    r.fused_posterior = years({{1905, 1.0}});
    r.contributing_sources = {"kg"};
    CorrectionConfig cfg;
    cfg.source_labels["kg"] = "kg-main";
    StrategyChoice attribute;
    attribute.strategy = Strategy::Attribute;
    const auto c = build_correction(text, claim, attribute, r, cfg);
    EXPECT_EQ(apply_correction(text, claim, c), "Einstein published relativity in 1920 (according to kg-main).");
    EXPECT_EQ(c.cited_sources, std::vector<std::string>{"kg"});
    r.contributing_sources.clear();
    EXPECT_THROW(build_correction(text, claim, attribute, r, cfg), std::invalid_argument);
}

TEST(BuildCorrection, MutatedTextIsSpanMismatch) {
    const std::string text = "Einstein published relativity in 1920.";
    const auto claim = einstein_claim(text);
    StrategyChoice hedge;
    EXPECT_THROW(build_correction("Einstein wrote relativity in 1920.", claim, hedge, {}, {}), SpanMismatch);
    const auto c = build_correction(text, claim, hedge, {}, {});
    EXPECT_THROW(apply_correction("short", claim, c), SpanMismatch);
}

TEST(CorrectionConfig, Validation) {
    CorrectionConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.templates["published"] = "{label} only";
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg.templates.clear();
    cfg.hedge_phrase.clear();
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(JoinConjunctive, Forms) {
    EXPECT_EQ(join_conjunctive({}), "");
    EXPECT_EQ(join_conjunctive({"a"}), "a");
    EXPECT_EQ(join_conjunctive({"a", "b"}), "a and b");
    EXPECT_EQ(join_conjunctive({"a", "b", "c"}), "a, b and c");
}

TEST(ApplyCorrections, RightToLeftAndOverlap) {
    const std::string text = "Einstein published relativity in 1920. Marie Curie won the prize in 1950.";
    const auto claims = extract_claims(text, ExtractorConfig::defaults(), aliases());
    ASSERT_EQ(claims.size(), 2u);
    StrategyChoice hedge;
    std::vector<Correction> cs = {build_correction(text, claims[0], hedge, {}, {}),
                                  build_correction(text, claims[1], hedge, {}, {})};
    EXPECT_EQ(apply_corrections(text, claims, cs),
              "It is uncertain whether Einstein published relativity in 1920. "
              "It is uncertain whether Marie Curie won the prize in 1950.");
    auto overlapping = claims;
    overlapping[1].span.begin = overlapping[0].span.end - 2;
    EXPECT_THROW(apply_corrections(text, overlapping, cs), std::invalid_argument);
}

namespace {

const char* kSentences[] = {
    "Einstein published relativity in 1920.", "Marie Curie won the prize in 1911.", "Hello there!",
    "Einstein wrote letters in 1930.",        "It rained all day.",                 "Marie Curie founded an institute in 1920."};

}  // namespace

TEST(CorrectionProperty, BytesOutsideClaimSpansAreUntouched) {
    Rng rng(83);
    const auto table = aliases();
    const auto cfg = ExtractorConfig::defaults();
    int corrections = 0;
    while (corrections < 1000) {
        std::string text;
        for (int i = 0, n = rng.between(1, 5); i < n; ++i) text += (i ? " " : "") + std::string(kSentences[rng.between(0, 5)]);
        const auto claims = extract_claims(text, cfg, table);
        if (claims.empty()) continue;

        std::vector<Correction> cs;
        std::vector<const Claim*> chosen;
        for (const auto& claim : claims) {
            if (!rng.coin(0.7)) continue;
            ConsistencyReport r;
            r.contributing_sources = {"kg"};
            StrategyChoice choice;
            switch (rng.between(0, 2)) {
                case 0:
                    choice.strategy = Strategy::Substitute;
                    choice.values = {ClaimValue::year(rng.between(1800, 2000))};
                    break;
                case 1: choice.strategy = Strategy::Hedge; break;
                default: choice.strategy = Strategy::Attribute; break;
            }
            cs.push_back(build_correction(text, claim, choice, r, {}));
            chosen.push_back(&claim);
        }
        const std::string out = apply_corrections(text, claims, cs);

        // Rebuild independently: copy gaps verbatim, splice replacements.
        std::string expect;
        std::size_t pos = 0;
        for (std::size_t i = 0; i < chosen.size(); ++i) {
            expect += text.substr(pos, chosen[i]->span.begin - pos);
            expect += cs[i].replacement_text;
            pos = chosen[i]->span.end;
        }
        expect += text.substr(pos);
        ASSERT_EQ(out, expect) << text;
        ASSERT_EQ(out.substr(0, chosen.empty() ? out.size() : chosen[0]->span.begin),
                  text.substr(0, chosen.empty() ? text.size() : chosen[0]->span.begin));
        corrections += static_cast<int>(cs.size());
    }
}
