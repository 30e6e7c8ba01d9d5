#include <gtest/gtest.h>

#include <cmath>

#include "factcheck/fusion.hpp"
#include "support.hpp"

using namespace factcheck;
using testing_support::evidence;
using testing_support::Rng;
using testing_support::years;

namespace {

const std::map<std::string, double> kFigureWeights = {{"kg", 0.4}, {"web", 0.35}, {"db", 0.25}};

std::vector<Evidence> figure_evidence() {
    return {evidence("kg", Stance::Refutes, years({{1905, 0.5}, {1915, 0.5}}), 0.94),
            evidence("web", Stance::Refutes, years({{1905, 0.75}, {1915, 0.25}}), 0.88),
            evidence("db", Stance::Refutes, years({{1905, 0.5}, {1915, 0.5}}), 0.92)};
}

double mass(const ValueDistribution& d, int year) {
    auto it = d.find(ClaimValue::year(year));
    return it == d.end() ? 0.0 : it->second;
}

}  // namespace

TEST(FusePosterior, ThreeSourceExample) {
    // 0.4*0.5 + 0.35*0.75 + 0.25*0.5 = 0.5875
    const auto post = fuse_posterior(figure_evidence(), kFigureWeights);
    EXPECT_NEAR(mass(post, 1905), 0.5875, 1e-12);
    EXPECT_NEAR(mass(post, 1915), 0.4125, 1e-12);
    EXPECT_EQ(mass(post, 1920), 0.0);
}

TEST(FusePosterior, SingleSourceAndSilence) {
    auto ev = figure_evidence();
    ev[0].stance = ev[2].stance = Stance::Insufficient;
    ev[0].value_distribution.clear();
    ev[2].value_distribution.clear();
    EXPECT_EQ(fuse_posterior(ev, kFigureWeights), ev[1].value_distribution);
    ev[1].stance = Stance::Insufficient;
    ev[1].value_distribution.clear();
    EXPECT_TRUE(fuse_posterior(ev, kFigureWeights).empty());
}

TEST(FusePosterior, RejectsNegativeAndMissingWeights) {
    EXPECT_THROW(fuse_posterior(figure_evidence(), {{"kg", -0.1}, {"web", 0.5}, {"db", 0.6}}), NegativeWeight);
    EXPECT_THROW(fuse_posterior(figure_evidence(), {{"kg", 0.5}}), std::invalid_argument);
}

TEST(CheckConsistency, Examples) {
    const auto c = testing_support::year_claim("c", 1920);
    EXPECT_DOUBLE_EQ(check_consistency(c, figure_evidence()), 0.0);

    std::vector<Evidence> mixed = {evidence("a", Stance::Supports, years({{1920, 1}}), 0.9),
                                   evidence("b", Stance::Supports, years({{1920, 1}}), 0.9),
                                   evidence("c", Stance::Refutes, years({{1905, 1}}), 0.3)};
    EXPECT_NEAR(check_consistency(c, mixed), 1.8 / 2.1, 1e-12);
    mixed[2].stance = Stance::Supports;
    EXPECT_DOUBLE_EQ(check_consistency(c, mixed), 1.0);

    std::vector<Evidence> silent = {evidence("a", Stance::Insufficient, {}, 0.9)};
    EXPECT_DOUBLE_EQ(check_consistency(c, silent), 0.5);
}

TEST(WeightEvidence, Examples) {
    std::vector<Evidence> one = {evidence("a", Stance::Supports, years({{1, 1}}), 1, 1, 1, 1)};
    EXPECT_DOUBLE_EQ(weight_evidence(one), 1.0);
    EXPECT_DOUBLE_EQ(weight_evidence(std::vector<Evidence>{}), 0.0);
    // 0.5*0.91 + 0.3*0.8 + 0.2*0.4 = 0.775 and 0.5*0.94 + 0.3*0.9 + 0.2*1.0 = 0.94
    std::vector<Evidence> pair = {evidence("a", Stance::Supports, years({{1, 1}}), 1, 0.91, 0.8, 0.4),
                                  evidence("b", Stance::Refutes, years({{2, 1}}), 1, 0.94, 0.9, 1.0),
                                  evidence("c", Stance::Insufficient, {}, 1, 0.1, 0.1, 0.1)};
    EXPECT_NEAR(weight_evidence(pair), 0.8575, 1e-12);
}

TEST(ValidateResponse, Examples) {
    FusionConfig cfg;
    cfg.weights = kFigureWeights;
    const std::vector<Claim> one = {testing_support::year_claim("c0", 1920)};
    const auto r = validate_response(one, {figure_evidence()}, cfg);
    EXPECT_DOUBLE_EQ(r.e_score, 0.0);
    EXPECT_EQ(r.flagged, std::vector<std::string>{"c0"});
    EXPECT_TRUE(r.reports[0].contradiction);

    const auto none = validate_response({}, {}, cfg);
    EXPECT_DOUBLE_EQ(none.e_score, 1.0);
    EXPECT_TRUE(none.flagged.empty());

    // (1*0.8 + 0.5*0.5 + 0*0.9) / 3 = 0.35
    std::vector<ConsistencyReport> reports(3);
    reports[0].consistency = 1.0, reports[0].strength = 0.8;
    reports[1].consistency = 0.5, reports[1].strength = 0.5;
    reports[2].consistency = 0.0, reports[2].strength = 0.9;
    EXPECT_NEAR(evidence_score(reports), 0.35, 1e-12);
}

TEST(ValidateResponse, MisalignedInputThrows) {
    const std::vector<Claim> one = {testing_support::year_claim("c0", 1920)};
    EXPECT_THROW(validate_response(one, {}, FusionConfig{}), std::invalid_argument);
}

TEST(FusionConfig, ValidatesCoefficients) {
    FusionConfig cfg;
    cfg.strength = {0.5, 0.5, 0.5};
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg.strength = {};
    cfg.tau_consistency = 1.5;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

// Random instances for the property suites below.
namespace {

struct Instance {
    std::vector<Claim> claims;
    std::vector<std::vector<Evidence>> evidence;
    std::map<std::string, double> weights;
};

ValueDistribution random_distribution(Rng& rng, int values) {
    ValueDistribution d;
    double total = 0;
    for (int v = 0; v < values; ++v) {
        if (rng.coin(0.3) && v > 0) continue;
        const double m = rng.uniform(0.01, 1.0);
        d[ClaimValue::year(2000 + v)] = m;
        total += m;
    }
    for (auto& [v, p] : d) p /= total;
    return d;
}

Instance random_instance(Rng& rng) {
    Instance in;
    const int sources = rng.between(1, 4);
    const int values = rng.between(1, 6);
    for (int s = 0; s < sources; ++s) in.weights["s" + std::to_string(s)] = rng.uniform(0.0, 1.0);
    for (int c = 0, n = rng.between(0, 5); c < n; ++c) {
        in.claims.push_back(testing_support::year_claim("c" + std::to_string(c), 2000 + rng.between(0, values - 1)));
        std::vector<Evidence> ev;
        for (int s = 0; s < sources; ++s) {
            const auto roll = rng.between(0, 2);
            const Stance stance = roll == 0 ? Stance::Insufficient : roll == 1 ? Stance::Supports : Stance::Refutes;
            ev.push_back(evidence("s" + std::to_string(s), stance,
                                  stance == Stance::Insufficient ? ValueDistribution{} : random_distribution(rng, values),
                                  rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()));
        }
        in.evidence.push_back(std::move(ev));
    }
    return in;
}

// Independent restatement of the evidence score.
double brute_force_e_score(const Instance& in) {
    if (in.claims.empty()) return 1.0;
    double total = 0;
    for (const auto& ev : in.evidence) {
        double rel = 0, sup = 0, quality = 0;
        int responders = 0;
        for (const auto& e : ev) {
            if (e.stance == Stance::Insufficient) continue;
            ++responders;
            rel += e.reliability;
            if (e.stance == Stance::Supports) sup += e.reliability;
            quality += 0.5 * e.authority + 0.3 * e.recency_score + 0.2 * e.citation_norm;
        }
        const double consistency = responders == 0 ? 0.5 : (rel > 0 ? sup / rel : 0.0);
        const double strength = responders == 0 ? 0.0 : quality / responders;
        total += consistency * strength;
    }
    return total / static_cast<double>(in.claims.size());
}

}  // namespace

TEST(FusionProperty, EvidenceScoreMatchesBruteForce) {
    Rng rng(41);
    FusionConfig cfg;
    for (int i = 0; i < 1000; ++i) {
        const auto in = random_instance(rng);
        cfg.weights = in.weights;
        const auto r = validate_response(in.claims, in.evidence, cfg);
        ASSERT_NEAR(r.e_score, brute_force_e_score(in), 1e-9) << "case " << i;
    }
}

TEST(FusionProperty, NormalizedDominantAndScaleInvariant) {
    Rng rng(43);
    for (int i = 0; i < 10000; ++i) {
        const int values = rng.between(1, 6);
        const int sources = rng.between(1, 4);
        std::vector<Evidence> ev;
        std::map<std::string, double> w, scaled;
        const double k = rng.uniform(0.01, 100.0);
        const bool unanimous = rng.coin();
        const int winner = rng.between(0, values - 1);
        for (int s = 0; s < sources; ++s) {
            const std::string id = "s" + std::to_string(s);
            auto d = random_distribution(rng, values);
            if (unanimous) {
                // Give `winner` a strict majority in every source.
                for (auto& [v, p] : d) p *= 0.4;
                d[ClaimValue::year(2000 + winner)] += 0.6;
            }
            ev.push_back(evidence(id, Stance::Refutes, d));
            w[id] = rng.uniform(0.05, 1.0);
            scaled[id] = w[id] * k;
        }
        const auto post = fuse_posterior(ev, w);
        double sum = 0;
        for (const auto& [v, p] : post) sum += p;
        ASSERT_NEAR(sum, 1.0, 1e-9);
        const auto post_scaled = fuse_posterior(ev, scaled);
        for (const auto& [v, p] : post) ASSERT_NEAR(post_scaled.at(v), p, 1e-12);
        if (unanimous) {
            const auto top = std::max_element(post.begin(), post.end(),
                                              [](const auto& a, const auto& b) { return a.second < b.second; });
            ASSERT_EQ(top->first, ClaimValue::year(2000 + winner));
        }
    }
}

TEST(FusionProperty, PoolIsLinearInEachSource) {
    Rng rng(47);
    for (int i = 0; i < 2000; ++i) {
        const std::map<std::string, double> w = {{"a", rng.uniform(0.1, 1)}, {"b", rng.uniform(0.1, 1)}};
        const auto p = random_distribution(rng, 4), q = random_distribution(rng, 4), other = random_distribution(rng, 4);
        const double lambda = rng.uniform();
        ValueDistribution mix;
        for (const auto& [v, m] : p) mix[v] += lambda * m;
        for (const auto& [v, m] : q) mix[v] += (1 - lambda) * m;
        auto pool = [&](const ValueDistribution& d) {
            return fuse_posterior(std::vector<Evidence>{evidence("a", Stance::Refutes, d), evidence("b", Stance::Refutes, other)}, w);
        };
        const auto lhs = pool(mix), fp = pool(p), fq = pool(q);
        for (const auto& [v, m] : lhs) {
            const double expect = lambda * (fp.count(v) ? fp.at(v) : 0) + (1 - lambda) * (fq.count(v) ? fq.at(v) : 0);
            ASSERT_NEAR(m, expect, 1e-12);
        }
    }
}

TEST(FusionProperty, UnanimousSupportNeverFlagged) {
    Rng rng(53);
    for (int i = 0; i < 1000; ++i) {
        const auto claim = testing_support::year_claim("c", 2000);
        std::vector<Evidence> ev;
        for (int s = 0, n = rng.between(1, 4); s < n; ++s)
            ev.push_back(evidence("s" + std::to_string(s), Stance::Supports, years({{2000, 1.0}}), rng.uniform(0.01, 1)));
        FusionConfig cfg;
        cfg.tau_consistency = rng.uniform();
        const auto r = assess_claim(claim, ev, cfg);
        ASSERT_DOUBLE_EQ(r.consistency, 1.0);
        ASSERT_FALSE(r.contradiction);
    }
}
