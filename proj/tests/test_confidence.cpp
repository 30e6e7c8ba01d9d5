#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "factcheck/calibration.hpp"
#include "factcheck/confidence.hpp"
#include "support.hpp"

using namespace factcheck;
using testing_support::Rng;

namespace {

std::shared_ptr<const Extractor> einstein_extractor() {
    auto aliases = std::make_shared<AliasTable>();
    aliases->add("Q937", EntityKind::Person, "Einstein");
    return std::make_shared<PatternExtractor>(ExtractorConfig::defaults(), aliases);
}

class BrokenProvider final : public IntrinsicProvider {
  public:
    double score(const Claim&, const RequestContext&) const override { throw ProviderUnavailable("offline"); }
    std::string_view name() const override { return "broken"; }
};

// Ten predictions, hand-binned. With 10 or 15 equal bins they group the same way:
//   conf .05 (wrong)            |.05 - 0|  * 1/10 = .005
//   conf .15 (right), .15 (wrong) |.15 - .5| * 2/10 = .070
//   conf .35 (right)            |.35 - 1|  * 1/10 = .065
//   conf .45 (wrong)            |.45 - 0|  * 1/10 = .045
//   conf .55 (right)            .045;  .65 (right) .035;  .75 (right) .025
//   conf .95, 1.0 (right)       |.975 - 1| * 2/10 = .005
//   ECE = 0.295
const std::vector<Prediction> kGolden = {{0.05, false}, {0.15, true}, {0.15, false}, {0.35, true}, {0.45, false},
                                         {0.55, true},  {0.65, true}, {0.75, true},  {0.95, true}, {1.0, true}};

}  // namespace

TEST(Intrinsic, ConstantSuppliedAndFallback) {
    const auto c = testing_support::year_claim("c0", 1920);
    RequestContext ctx;
    EXPECT_DOUBLE_EQ(intrinsic_confidence(c, ConstantIntrinsic(0.9), ctx).value, 0.9);
    ctx.intrinsic_confidences["c0"] = 0.42;
    EXPECT_DOUBLE_EQ(intrinsic_confidence(c, SuppliedIntrinsic{}, ctx).value, 0.42);
    const auto fb = intrinsic_confidence(c, BrokenProvider{}, ctx);
    EXPECT_DOUBLE_EQ(fb.value, 0.5);
    EXPECT_TRUE(fb.fallback);
    EXPECT_THROW(ConstantIntrinsic(1.5), std::invalid_argument);
}

TEST(Intrinsic, SampleAgreementCounts) {
    auto ex = einstein_extractor();
    const auto claim = ex->extract("Einstein published relativity in 1905.").at(0);
    SampleAgreementIntrinsic provider(ex);
    RequestContext ctx;
    EXPECT_DOUBLE_EQ(provider.score(claim, ctx), 0.5);
    ctx.sample_texts = {"Einstein published relativity in 1905.", "Einstein published relativity in 1905.",
                        "Einstein published relativity in 1905.", "Einstein published relativity in 1915."};
    EXPECT_DOUBLE_EQ(provider.score(claim, ctx), 0.75);
}

TEST(External, ProductOfConsistencyAndStrength) {
    ConsistencyReport r;
    r.consistency = 0.0, r.strength = 0.7;
    EXPECT_DOUBLE_EQ(external_confidence(r), 0.0);
    r.consistency = 1.0, r.strength = 1.0;
    EXPECT_DOUBLE_EQ(external_confidence(r), 1.0);
    r.consistency = 1.8 / 2.1, r.strength = 0.8575;
    EXPECT_NEAR(external_confidence(r), 0.735, 1e-12);
}

TEST(Coherence, SnippetSimilarity) {
    auto claim = testing_support::year_claim("c", 1920);
    claim.raw_text = "Einstein published relativity in 1920";
    auto e = testing_support::evidence("kg", Stance::Refutes, testing_support::years({{1905, 1}}));
    e.snippet = claim.raw_text;
    EXPECT_NEAR(coherence_score(claim, std::vector<Evidence>{e}), 1.0, 1e-12);
    e.snippet = "Einstein published the theory of special relativity in 1905";
    EXPECT_NEAR(coherence_score(claim, std::vector<Evidence>{e}), 3.0 / (2.0 * std::sqrt(6.0)), 1e-12);
    e.snippet = "unrelated whales";
    EXPECT_DOUBLE_EQ(coherence_score(claim, std::vector<Evidence>{e}), 0.0);
    EXPECT_DOUBLE_EQ(coherence_score(claim, std::vector<Evidence>{}), 0.5);
}

TEST(Combine, Examples) {
    EXPECT_NEAR(combine_confidence(0.5, 0.5, 0.5, {0.2, 0.3, 0.5}), 0.5, 1e-15);
    EXPECT_DOUBLE_EQ(combine_confidence(1, 0, 0, {1, 0, 0}), 1.0);
    EXPECT_NEAR(combine_confidence(0.75, 0.0, 0.31, {}), 0.287, 1e-12);
    EXPECT_THROW(combine_confidence(0.5, 0.5, 0.5, {0.5, 0.5, 0.5}), WeightsOffSimplex);
    EXPECT_THROW(combine_confidence(0.5, 0.5, 0.5, {-0.1, 0.6, 0.5}), WeightsOffSimplex);
}

TEST(CombineProperty, MonotoneAndOrderPreservingUnderScaling) {
    Rng rng(61);
    const auto grid = simplex_grid(0.05);
    for (int i = 0; i < 5000; ++i) {
        const auto& w = grid[rng.next() % grid.size()];
        const double a[3] = {rng.uniform(), rng.uniform(), rng.uniform()};
        const double b[3] = {rng.uniform(), rng.uniform(), rng.uniform()};
        const double base = combine_confidence(a[0], a[1], a[2], w);
        EXPECT_LE(base, combine_confidence(std::min(1.0, a[0] + 0.1), a[1], a[2], w) + 1e-15);
        const double s = rng.uniform(0.01, 1.0);
        const double cb = combine_confidence(b[0], b[1], b[2], w);
        const double sa = combine_confidence(s * a[0], s * a[1], s * a[2], w);
        const double sb = combine_confidence(s * b[0], s * b[1], s * b[2], w);
        if (std::abs(base - cb) > 1e-12) EXPECT_EQ(base < cb, sa < sb);
    }
}

TEST(Ece, GoldenTenSamples) {
    EXPECT_NEAR(expected_calibration_error(kGolden, 10).ece, 0.295, 1e-12);
    const auto r = expected_calibration_error(kGolden);
    EXPECT_NEAR(r.ece, 0.295, 1e-12);
    EXPECT_EQ(r.bin_edges.size(), 16u);
    std::size_t total = 0;
    for (const auto& b : r.bins) total += b.count;
    EXPECT_EQ(total, 10u);
    EXPECT_EQ(r.bins.back().count, 2u);  // 0.95 and the closed right edge
}

TEST(Ece, TrivialCases) {
    const std::vector<Prediction> perfect(20, {1.0, true});
    EXPECT_DOUBLE_EQ(expected_calibration_error(perfect).ece, 0.0);
    // One bin: |mean confidence - accuracy| = |0.6 - 0.5|
    const std::vector<Prediction> two = {{0.4, true}, {0.8, false}};
    EXPECT_NEAR(expected_calibration_error(two, 1).ece, 0.1, 1e-12);
    EXPECT_THROW(expected_calibration_error(std::vector<Prediction>{}), EmptyInput);
    EXPECT_THROW(expected_calibration_error(two, 0), std::invalid_argument);
    const std::vector<Prediction> bad = {{1.2, true}};
    EXPECT_THROW(expected_calibration_error(bad), std::invalid_argument);
}

TEST(Ece, ReliabilityCsv) {
    std::ostringstream out;
    expected_calibration_error(kGolden, 10).write_reliability_csv(out);
    const std::string csv = out.str();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "bin_mid,mean_conf,accuracy,count");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);  // header + 8 non-empty bins
}

TEST(EceProperty, PermutationInvariantAndCalibratedGenerator) {
    Rng rng(67);
    std::vector<Prediction> preds;
    for (int i = 0; i < 100000; ++i) {
        const double p = rng.uniform();
        preds.push_back({p, rng.uniform() < p});
    }
    const double ece = expected_calibration_error(preds).ece;
    EXPECT_LT(ece, 0.02);
    for (int k = 0; k < 5; ++k) {
        rng.shuffle(preds);
        EXPECT_NEAR(expected_calibration_error(preds).ece, ece, 1e-12);
    }
}

TEST(SimplexGrid, HalfStepEnumeration) {
    const auto g = simplex_grid(0.5);
    const std::vector<ConfidenceWeights> expect = {{0, 0, 1}, {0, 0.5, 0.5}, {0, 1, 0},
                                                   {0.5, 0, 0.5}, {0.5, 0.5, 0}, {1, 0, 0}};
    EXPECT_EQ(g, expect);
    EXPECT_EQ(simplex_grid(0.05).size(), 231u);
    EXPECT_THROW(simplex_grid(0.3), std::invalid_argument);
}

TEST(LearnWeights, DegenerateTieGoesToSmallestWeights) {
    const std::vector<ComponentSample> one = {{1, 1, 1, true}};
    EXPECT_EQ(learn_weights(one), (ConfidenceWeights{0, 0, 1}));
    EXPECT_THROW(learn_weights(std::vector<ComponentSample>{}), EmptyInput);
}

namespace {

// correct == (external > 0.5); external sits within 0.05 of its label and the
// other components are uniform noise. With a wider external spread a
// noise-heavy mix can reach a lower ECE than the informative component.
std::vector<ComponentSample> external_driven_set(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    std::vector<ComponentSample> v;
    for (std::size_t i = 0; i < n; ++i) {
        const bool hi = rng.coin();
        const double ext = hi ? 1.0 - rng.uniform(0.0, 0.05) : rng.uniform(0.0, 0.05);
        v.push_back({rng.uniform(), ext, rng.uniform(), ext > 0.5});
    }
    return v;
}

}  // namespace

TEST(LearnWeights, ExternalSignalWins) {
    const auto data = external_driven_set(71, 2000);
    const auto w = learn_weights(data);
    EXPECT_GE(w.beta, std::max(w.alpha, w.gamma));
    EXPECT_NO_THROW(w.validate());
}

TEST(LearnWeights, ThreadCountDoesNotChangeResult) {
    const auto data = external_driven_set(73, 500);
    WeightSearchOptions one, many;
    many.threads = 4;
    const auto a = learn_weights(data, one);
    const auto b = learn_weights(data, many);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, learn_weights(data, one));
    const auto report = calibrate(data, one);
    ASSERT_TRUE(report.learned_weights.has_value());
    EXPECT_EQ(*report.learned_weights, a);
}

TEST(CalibrationSet, ParsesJsonLines) {
    std::istringstream in(R"({"intrinsic":0.1,"external":0.9,"coherence":0.5,"correct":true}

{"intrinsic":0.2,"external":0.1,"coherence":0.4,"correct":false}
)");
    const auto rows = parse_calibration_set(in);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_TRUE(rows[0].correct);
    std::istringstream bad(R"({"intrinsic":2,"external":0.9,"coherence":0.5,"correct":true})");
    EXPECT_THROW(parse_calibration_set(bad), std::exception);
}

TEST(Temperature, FitsOverconfidentScores) {
    EXPECT_NEAR(apply_temperature(0.5, 3.0), 0.5, 1e-12);
    Rng rng(79);
    std::vector<Prediction> preds;
    for (int i = 0; i < 5000; ++i) {
        // True probability p; reported confidence sharpened with T = 0.5.
        const double p = rng.uniform(0.05, 0.95);
        preds.push_back({apply_temperature(p, 0.5), rng.uniform() < p});
    }
    const double t = fit_temperature(preds);
    EXPECT_NEAR(t, 2.0, 0.3);
    EXPECT_THROW(fit_temperature(std::vector<Prediction>{}), EmptyInput);
}
