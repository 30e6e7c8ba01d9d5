// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <fmt/core.h>
#include <httplib.h>
#include <json.hpp>

#include "factcheck/calibration.hpp"
#include "factcheck/config.hpp"
#include "factcheck/corpus_generator.hpp"
#include "factcheck/correction.hpp"
#include "factcheck/eval.hpp"
#include "factcheck/extractor.hpp"
#include "factcheck/fusion.hpp"
#include "factcheck/http_source.hpp"
#include "factcheck/mock_search_server.hpp"
#include "factcheck/pipeline.hpp"
#include "factcheck/service.hpp"
#include "support.hpp"

using namespace factcheck;
using namespace std::chrono_literals;
using testing_support::evidence;
using testing_support::fixture;
using testing_support::Rng;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) { return std::chrono::duration<double, std::milli>(Clock::now() - t0).count(); }

std::shared_ptr<Runtime> einstein_runtime() { return Runtime::build(load_config(fixture("einstein/config.yaml"), no_env())); }

double mass(const ValueDistribution& d, int y) {
    auto it = d.find(ClaimValue::year(y));
    return it == d.end() ? 0.0 : it->second;
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("factcheck-acceptance-" + name + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

// ---------------------------------------------------------------------------

void einstein_end_to_end() {
    const auto rt = einstein_runtime();
    const auto t0 = Clock::now();
    const auto r = rt->pipeline()->verify("Einstein published relativity in 1920");
    const double elapsed = ms_since(t0);
    require(r.verdicts.size() == 1, fmt::format("{} claims extracted", r.verdicts.size()));
    const auto& post = r.verdicts[0].report.fused_posterior;
    require(mass(post, 1920) == 0.0, "posterior has mass on 1920");
    require(std::abs(mass(post, 1905) + mass(post, 1915) - 1.0) <= 1e-9, "posterior mass on {1905, 1915} is not 1");
    require(r.verdicts[0].confidence.combined <= 0.7, "confidence gate passed");
    require(r.verdicts[0].gate != GateDecision::Pass, "gate decision is PASS");
    require(r.corrections.size() == 1 && r.corrections[0].strategy == Strategy::Substitute, "no SUBSTITUTE correction");
    require(r.final_text.find("1905") != std::string::npos && r.final_text.find("1915") != std::string::npos,
            "final text lacks 1905 or 1915: " + r.final_text);
    require(elapsed < 1000.0, fmt::format("took {:.0f} ms", elapsed));
}

// Random E_s instances checked against a direct restatement of the score.
struct Instance {
    std::vector<Claim> claims;
    std::vector<std::vector<Evidence>> evidence;
    std::map<std::string, double> weights;
};

ValueDistribution random_distribution(Rng& rng, int values) {
    ValueDistribution d;
    double total = 0;
    for (int v = 0; v < values; ++v) {
        if (v > 0 && rng.coin(0.3)) continue;
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
    for (int s = 0; s < sources; ++s) in.weights["s" + std::to_string(s)] = rng.uniform();
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

void e_score_oracle() {
    const auto t0 = Clock::now();
    Rng rng(1001);
    FusionConfig cfg;
    for (int i = 0; i < 1000; ++i) {
        const auto in = random_instance(rng);
        cfg.weights = in.weights;
        const double got = validate_response(in.claims, in.evidence, cfg).e_score;
        const double want = brute_force_e_score(in);
        require(std::abs(got - want) <= 1e-9, fmt::format("case {}: {} vs {}", i, got, want));
    }
    require(ms_since(t0) < 10000.0, "took longer than 10 s");
}

void fusion_properties() {
    Rng rng(1003);
    for (int i = 0; i < 10000; ++i) {
        const int values = rng.between(1, 6);
        const int sources = rng.between(1, 4);
        const int winner = rng.between(0, values - 1);
        const double k = rng.uniform(0.01, 100.0);
        std::vector<Evidence> ev;
        std::map<std::string, double> w, scaled;
        for (int s = 0; s < sources; ++s) {
            const std::string id = "s" + std::to_string(s);
            auto d = random_distribution(rng, values);
            // Every source puts a strict majority on `winner`.
            for (auto& [v, p] : d) p *= 0.4;
            d[ClaimValue::year(2000 + winner)] += 0.6;
            ev.push_back(evidence(id, Stance::Refutes, d));
            w[id] = rng.uniform(0.05, 1.0);
            scaled[id] = w[id] * k;
        }
        const auto post = fuse_posterior(ev, w);
        double sum = 0;
        for (const auto& [v, p] : post) sum += p;
        require(std::abs(sum - 1.0) <= 1e-9, fmt::format("case {}: posterior sums to {}", i, sum));
        const auto top = std::max_element(post.begin(), post.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
        require(top->first == ClaimValue::year(2000 + winner), fmt::format("case {}: argmax moved", i));
        const auto post_scaled = fuse_posterior(ev, scaled);
        for (const auto& [v, p] : post)
            require(std::abs(post_scaled.at(v) - p) <= 1e-12, fmt::format("case {}: rescaling changed the posterior", i));
    }
}

nlohmann::json einstein_hits() {
    return {{"routes",
             nlohmann::json::array({{{"match", {"einstein"}},
                                     {"hits", nlohmann::json::array({{{"snippet", "Einstein published relativity in 1905."},
                                                                      {"value", "1905"},
                                                                      {"value_type", "date"},
                                                                      {"authority", 0.9},
                                                                      {"published", "2023-01-01"},
                                                                      {"citations", 10}}})}}})}};
}

// Evidence-stage wall time for one Einstein claim against mock servers with the given delays.
VerifiedResponse run_against_mocks(const std::vector<std::chrono::milliseconds>& delays) {
    std::vector<std::unique_ptr<MockSearchServer>> servers;
    PipelineParts parts;
    auto aliases = std::make_shared<AliasTable>();
    aliases->add("Q937", EntityKind::Person, "Einstein");
    parts.extractor = std::make_shared<PatternExtractor>(ExtractorConfig::defaults(), aliases);
    parts.intrinsic = std::make_shared<ConstantIntrinsic>(0.9);
    parts.similarity = std::make_shared<TfCosineSimilarity>();
    for (std::size_t i = 0; i < delays.size(); ++i) {
        servers.push_back(std::make_unique<MockSearchServer>(einstein_hits()));
        servers.back()->start();
        servers.back()->set_delay(delays[i]);
        SourceProfile p;
        p.source_id = "web" + std::to_string(i);
        p.kind = SourceKind::WebSearch;
        p.base_reliability = 0.9;
        p.timeout = 2000ms;
        parts.sources.push_back(std::make_shared<HttpSearchSource>(p, HttpEndpoint::parse(servers.back()->url()), ScoringContext{}));
    }
    PipelineConfig cfg;
    cfg.evidence_budget = 800ms;
    Pipeline pipeline(cfg, std::move(parts));
    return pipeline.verify("Einstein published relativity in 1920.");
}

void parallelism_contract() {
    const auto fast = run_against_mocks({200ms, 200ms, 200ms});
    require(fast.degraded_sources.empty(), "a 200 ms source was marked degraded");
    require(fast.timings.evidence < 450.0, fmt::format("three 200 ms sources took {:.0f} ms", fast.timings.evidence));
    const auto slow = run_against_mocks({200ms, 200ms, 1500ms});
    require(slow.timings.evidence <= 900.0, fmt::format("budget overrun: {:.0f} ms", slow.timings.evidence));
    require(slow.degraded_sources == std::vector<std::string>{"web2"}, "slow source not listed as degraded");
}

void ece_correctness() {
    const std::vector<Prediction> golden = {{0.05, false}, {0.15, true}, {0.15, false}, {0.35, true}, {0.45, false},
                                            {0.55, true},  {0.65, true}, {0.75, true},  {0.95, true}, {1.0, true}};
    const double g = expected_calibration_error(golden).ece;
    require(std::abs(g - 0.295) <= 1e-12, fmt::format("golden ECE {}", g));
    Rng rng(1005);
    std::vector<Prediction> preds;
    for (int i = 0; i < 100000; ++i) {
        const double p = rng.uniform();
        preds.push_back({p, rng.uniform() < p});
    }
    const double ece = expected_calibration_error(preds).ece;
    require(ece < 0.02, fmt::format("calibrated generator ECE {}", ece));
    for (int k = 0; k < 5; ++k) {
        rng.shuffle(preds);
        require(std::abs(expected_calibration_error(preds).ece - ece) <= 1e-12, "ECE changed under permutation");
    }
}

void weight_learning() {
    for (std::uint64_t seed : {1007u, 1009u, 1011u}) {
        // correct == (external > 0.5); intrinsic and coherence are uniform noise.
        Rng rng(seed);
        std::vector<ComponentSample> data;
        for (int i = 0; i < 1000; ++i) {
            const bool hi = rng.coin();
            const double ext = hi ? 1.0 - rng.uniform(0.0, 0.05) : rng.uniform(0.0, 0.05);
            data.push_back({rng.uniform(), ext, rng.uniform(), ext > 0.5});
        }
        const auto w = learn_weights(data);
        require(w.beta >= std::max(w.alpha, w.gamma),
                fmt::format("seed {}: weights ({}, {}, {})", seed, w.alpha, w.beta, w.gamma));
        require(w.alpha >= 0 && w.beta >= 0 && w.gamma >= 0 && std::abs(w.alpha + w.beta + w.gamma - 1.0) <= 1e-9,
                "weights off the simplex");
        WeightSearchOptions threaded;
        threaded.threads = 3;
        require(learn_weights(data) == w && learn_weights(data, threaded) == w, "weight search is not deterministic");
    }
}

void correction_safety() {
    AliasTable table;
    table.add("Q937", EntityKind::Person, "Einstein");
    table.add("Q7186", EntityKind::Person, "Marie Curie");
    const char* sentences[] = {"Einstein published relativity in 1920.", "Marie Curie won the prize in 1911.", "Hello there!",
                               "Einstein wrote letters in 1930.",        "It rained all day.",
                               "Marie Curie founded an institute in 1920."};
    Rng rng(1013);
    int corrections = 0;
    while (corrections < 1000) {
        std::string text;
        for (int i = 0, n = rng.between(1, 5); i < n; ++i) text += (i ? " " : "") + std::string(sentences[rng.between(0, 5)]);
        const auto claims = extract_claims(text, ExtractorConfig::defaults(), table);
        std::vector<Correction> cs;
        std::vector<const Claim*> chosen;
        for (const auto& claim : claims) {
            if (!rng.coin(0.7)) continue;
            ConsistencyReport report;
            report.contributing_sources = {"kg"};
            StrategyChoice choice;
            const int roll = rng.between(0, 2);
            choice.strategy = roll == 0 ? Strategy::Substitute : roll == 1 ? Strategy::Hedge : Strategy::Attribute;
            if (roll == 0) choice.values = {ClaimValue::year(rng.between(1800, 2000))};
            cs.push_back(build_correction(text, claim, choice, report, {}));
            chosen.push_back(&claim);
        }
        const std::string out = apply_corrections(text, claims, cs);
        std::string expect;
        std::size_t pos = 0;
        for (std::size_t i = 0; i < chosen.size(); ++i) {
            expect += text.substr(pos, chosen[i]->span.begin - pos) + cs[i].replacement_text;
            pos = chosen[i]->span.end;
        }
        expect += text.substr(pos);
        require(out == expect, "bytes outside claim spans changed in: " + text);
        corrections += static_cast<int>(cs.size());
    }

    // Improvement or rollback over every fixture request and a generated corpus.
    const auto rt = einstein_runtime();
    std::ifstream requests(fixture("einstein/requests.jsonl"));
    std::string line;
    while (std::getline(requests, line)) {
        const auto r = rt->pipeline()->verify(nlohmann::json::parse(line).at("text").get<std::string>());
        require(r.e_score >= r.initial_e_score, "E_s dropped on: " + r.original_text);
    }
    const auto dir = scratch("safety");
    GeneratorOptions o;
    o.examples = 100;
    o.staleness = 0.2;
    const auto files = generate_corpus(o, dir);
    const auto gen = Runtime::build(load_config(files.config, no_env()));
    for (const auto& ex : load_corpus(files.corpus)) {
        const auto r = gen->pipeline()->verify(ex.input_text);
        require(r.e_score >= r.initial_e_score, "E_s dropped on: " + ex.input_text);
    }
    std::filesystem::remove_all(dir);
}

void ablation_harness() {
    const auto t0 = Clock::now();
    const auto dir = scratch("ablation");
    const auto files = generate_corpus(GeneratorOptions{}, dir);
    const auto rt = Runtime::build(load_config(files.config, no_env()));
    const auto corpus = load_corpus(files.corpus);
    const std::vector<std::string> singles = {"kg", "web", "db"}, pairs = {"kg+web", "kg+db", "web+db"};
    std::vector<std::string> subsets = singles;
    subsets.insert(subsets.end(), pairs.begin(), pairs.end());
    subsets.push_back("all");
    const auto rows = ablate(*rt, corpus, subsets);
    std::ostringstream csv;
    write_ablation_csv(csv, rows);
    const std::string table = csv.str();
    require(table.rfind("Configuration,Acc.,Halluc. Red.,Latency\n", 0) == 0, "unexpected CSV header");
    require(std::count(table.begin(), table.end(), '\n') == 8, "CSV does not have seven rows");
    double best_single = 0, worst_pair = 1, best_pair = 0;
    for (std::size_t i = 0; i < 3; ++i) best_single = std::max(best_single, rows[i].accuracy);
    for (std::size_t i = 3; i < 6; ++i) {
        worst_pair = std::min(worst_pair, rows[i].accuracy);
        best_pair = std::max(best_pair, rows[i].accuracy);
    }
    const auto& all = rows[6];
    require(all.accuracy >= best_pair, fmt::format("all {} < pair {}", all.accuracy, best_pair));
    require(worst_pair >= best_single, fmt::format("pair {} < single {}", worst_pair, best_single));
    require(all.hallucination_reduction >= 0.6, fmt::format("reduction {}", all.hallucination_reduction));
    std::filesystem::remove_all(dir);
    require(ms_since(t0) < 60000.0, "took longer than 60 s");
}

std::string post_once(int port, const std::string& body, int* status) {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(10s);
    auto res = c.Post("/verify", body, "application/json");
    *status = res ? res->status : -1;
    return res ? res->body : std::string();
}

void service_conformance() {
    const std::string body = R"({"text":"Einstein published relativity in 1920."})";
    std::string first_run;
    for (int run = 0; run < 2; ++run) {
        VerificationService service(einstein_runtime(), einstein_runtime);
        const int port = service.start("127.0.0.1", 0);
        int status = 0;
        const std::string reply = post_once(port, body, &status);
        require(status == 200, fmt::format("round trip status {}", status));
        require(nlohmann::json::parse(reply).at("final_text").get<std::string>().find("1915") != std::string::npos,
                "round trip did not correct the claim");
        if (run == 0) first_run = reply;
        else require(reply == first_run, "JSON differs between runs");

        post_once(port, "{not json", &status);
        require(status == 400, fmt::format("malformed body got {}", status));

        std::vector<int> statuses(100, 0);
        std::vector<std::string> replies(100);
        std::vector<std::thread> threads;
        for (int i = 0; i < 100; ++i) threads.emplace_back([&, i] { replies[i] = post_once(port, body, &statuses[i]); });
        for (auto& t : threads) t.join();
        for (int i = 0; i < 100; ++i) {
            require(statuses[i] == 200, fmt::format("concurrent request {} got {}", i, statuses[i]));
            require(replies[i] == reply, fmt::format("concurrent request {} differs", i));
        }
        service.stop();
    }
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void()>>> criteria = {
        {"einstein end-to-end", einstein_end_to_end},
        {"evidence score oracle (1000 instances)", e_score_oracle},
        {"fusion normalization and dominance (10^4 cases)", fusion_properties},
        {"parallel evidence gathering within budget", parallelism_contract},
        {"expected calibration error", ece_correctness},
        {"confidence weight learning", weight_learning},
        {"correction locality and improvement-or-rollback", correction_safety},
        {"source ablation", ablation_harness},
        {"service conformance", service_conformance},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& [name, run] = criteria[i];
        const auto t0 = Clock::now();
        std::string detail;
        try {
            run();
        } catch (const std::exception& e) {
            detail = e.what();
        }
        const double elapsed = ms_since(t0);
        if (detail.empty())
            std::cout << fmt::format("PASS {} {} ({:.0f} ms)\n", i + 1, name, elapsed);
        else {
            ++failed;
            std::cout << fmt::format("FAIL {} {} ({:.0f} ms): {}\n", i + 1, name, elapsed, detail);
        }
        std::cout.flush();
    }
    std::cout << fmt::format("{}/{} criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
