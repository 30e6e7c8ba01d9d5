#include "factcheck/eval.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <future>
#include <set>

#include <fmt/format.h>

#include "factcheck/bleu.hpp"
#include "factcheck/text.hpp"

namespace factcheck {

std::vector<LabeledExample> load_corpus(const std::filesystem::path& path, const AliasTable* aliases) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(fmt::format("cannot open corpus {}", path.string()));
    return parse_corpus(in, aliases, path.string());
}

std::vector<LabeledExample> parse_corpus(std::istream& in, const AliasTable* aliases, std::string_view origin) {
    std::vector<LabeledExample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            LabeledExample ex;
            ex.id = j.value("id", fmt::format("line{}", lineno));
            ex.input_text = j.at("text").get<std::string>();
            const auto label = j.at("label").get<std::string>();
            if (label == "FACTUAL") ex.label = ExampleLabel::Factual;
            else if (label == "HALLUCINATED") ex.label = ExampleLabel::Hallucinated;
            else throw std::invalid_argument("label must be FACTUAL or HALLUCINATED");
            for (const auto& g : j.at("gold")) {
                ex.gold_claims.push_back({g.at("subject").get<std::string>(), g.at("predicate").get<std::string>(),
                                          parse_claim_value(g.at("type").get<std::string>(),
                                                            g.at("value").get<std::string>(), aliases)});
            }
            if (j.contains("reference")) ex.reference = j["reference"].get<std::string>();
            out.push_back(std::move(ex));
        } catch (const std::exception& e) {
            throw std::runtime_error(fmt::format("{}:{}: {}", origin, lineno, e.what()));
        }
    }
    return out;
}

namespace {

struct ExampleScore {
    std::size_t gold = 0;
    std::size_t unmatched = 0;
    std::size_t pre_correct = 0;
    std::size_t post_correct = 0;
    std::vector<Prediction> predictions;
    double latency_ms = 0.0;
    std::optional<double> bleu;
    std::size_t corrections = 0;
    std::size_t rolled_back = 0;
};

ExampleScore score_example(const Pipeline& pipeline, const LabeledExample& ex) {
    ExampleScore s;
    const auto r = pipeline.verify(ex.input_text);
    s.latency_ms = r.timings.total;
    s.corrections = r.corrections.size();
    for (const auto& c : r.corrections) s.rolled_back += c.rolled_back ? 1 : 0;
    if (ex.reference) s.bleu = bleu4(r.final_text, *ex.reference);

    for (const auto& g : ex.gold_claims) {
        ++s.gold;
        auto v = std::find_if(r.verdicts.begin(), r.verdicts.end(), [&](const ClaimVerdict& cv) {
            return cv.claim.subject.canonical_id == g.subject_id && cv.claim.predicate == g.predicate;
        });
        if (v == r.verdicts.end()) {
            ++s.unmatched;
            continue;
        }
        const bool pre = v->claim.asserts(g.value);
        bool post = pre;
        for (const auto& c : r.corrections) {
            if (c.claim_id != v->claim.id || c.rolled_back || c.strategy != Strategy::Substitute) continue;
            post = std::find(c.substituted_values.begin(), c.substituted_values.end(), g.value) !=
                   c.substituted_values.end();
        }
        s.pre_correct += pre ? 1 : 0;
        s.post_correct += post ? 1 : 0;
        s.predictions.push_back({std::clamp(v->confidence.combined, 0.0, 1.0), pre});
    }
    return s;
}

}  // namespace

EvalReport evaluate(const Pipeline& pipeline, std::span<const LabeledExample> corpus, const EvalOptions& opts) {
    if (corpus.empty()) throw EmptyCorpus("evaluation corpus is empty");
    std::vector<ExampleScore> scores(corpus.size());
    const unsigned threads = std::max(1u, opts.threads);
    if (threads == 1) {
        for (std::size_t i = 0; i < corpus.size(); ++i) scores[i] = score_example(pipeline, corpus[i]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::future<void>> jobs;
        for (unsigned t = 0; t < threads; ++t)
            jobs.push_back(std::async(std::launch::async, [&] {
                for (std::size_t i = next++; i < corpus.size(); i = next++) scores[i] = score_example(pipeline, corpus[i]);
            }));
        for (auto& j : jobs) j.get();
    }

    EvalReport rep;
    rep.configuration = opts.configuration;
    rep.examples = corpus.size();
    std::size_t pre = 0, post = 0, bleu_n = 0;
    double bleu_sum = 0.0;
    std::vector<double> latencies;
    std::vector<Prediction> preds;
    for (const auto& s : scores) {
        rep.gold_claims += s.gold;
        rep.unmatched_gold += s.unmatched;
        pre += s.pre_correct;
        post += s.post_correct;
        latencies.push_back(s.latency_ms);
        preds.insert(preds.end(), s.predictions.begin(), s.predictions.end());
        if (s.bleu) {
            bleu_sum += *s.bleu;
            ++bleu_n;
        }
        rep.corrections += s.corrections;
        rep.rolled_back += s.rolled_back;
    }
    if (rep.gold_claims > 0) {
        rep.pre_accuracy = static_cast<double>(pre) / static_cast<double>(rep.gold_claims);
        rep.accuracy = static_cast<double>(post) / static_cast<double>(rep.gold_claims);
    }
    rep.pre_errors = rep.gold_claims - pre;
    rep.post_errors = rep.gold_claims - post;
    rep.hallucination_reduction =
        rep.pre_errors == 0 ? 0.0
                            : 1.0 - static_cast<double>(rep.post_errors) / static_cast<double>(rep.pre_errors);
    if (!preds.empty()) {
        rep.calibration = expected_calibration_error(preds, opts.ece_bins);
        rep.ece = rep.calibration->ece;
    }
    double lat_sum = 0.0;
    for (double l : latencies) lat_sum += l;
    rep.mean_latency_ms = lat_sum / static_cast<double>(latencies.size());
    rep.p95_latency_ms = percentile(latencies, 95);
    rep.bleu4 = bleu_n == 0 ? 0.0 : bleu_sum / static_cast<double>(bleu_n);
    return rep;
}

std::vector<std::string> parse_subset(const std::string& spec, const AppConfig& config) {
    const auto trimmed = std::string(text::trim(spec));
    if (trimmed.empty()) throw std::invalid_argument("empty source subset");
    std::vector<std::string> ids;
    if (trimmed == "all") {
        for (const auto& s : config.sources) ids.push_back(s.id);
        return ids;
    }
    for (const auto& part : text::split(trimmed, '+')) {
        const auto id = std::string(text::trim(part));
        if (id.empty()) throw std::invalid_argument(fmt::format("empty source name in subset '{}'", spec));
        if (std::none_of(config.sources.begin(), config.sources.end(), [&](const SourceConfig& s) { return s.id == id; }))
            throw UnknownSource(fmt::format("unknown source '{}' in subset '{}'", id, spec));
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
    }
    return ids;
}

std::vector<EvalReport> ablate(const Runtime& runtime, std::span<const LabeledExample> corpus,
                               const std::vector<std::string>& subsets, unsigned threads) {
    if (subsets.empty()) throw std::invalid_argument("no subsets requested");
    // Validate every subset before spending time on any of them.
    std::vector<std::vector<std::string>> parsed;
    for (const auto& s : subsets) parsed.push_back(parse_subset(s, runtime.config()));
    std::vector<EvalReport> rows;
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        const auto pipeline = runtime.make_pipeline(parsed[i]);
        rows.push_back(evaluate(*pipeline, corpus, {subsets[i], threads, kDefaultEceBins}));
    }
    return rows;
}

void write_ablation_csv(std::ostream& out, std::span<const EvalReport> rows) {
    out << "Configuration,Acc.,Halluc. Red.,Latency\n";
    for (const auto& r : rows)
        out << fmt::format("{},{:.4f},{:.4f},{:.1f}ms\n", r.configuration, r.accuracy, r.hallucination_reduction,
                           r.mean_latency_ms);
}

ojson to_json(const EvalReport& r) {
    ojson j;
    j["configuration"] = r.configuration;
    j["examples"] = r.examples;
    j["gold_claims"] = r.gold_claims;
    j["unmatched_gold"] = r.unmatched_gold;
    j["accuracy"] = round6(r.accuracy);
    j["pre_correction_accuracy"] = round6(r.pre_accuracy);
    j["pre_errors"] = r.pre_errors;
    j["post_errors"] = r.post_errors;
    j["hallucination_reduction"] = round6(r.hallucination_reduction);
    j["ece"] = round6(r.ece);
    j["latency_ms"] = {{"mean", round6(r.mean_latency_ms)}, {"p95", round6(r.p95_latency_ms)}};
    j["bleu4"] = round6(r.bleu4);
    j["corrections"] = r.corrections;
    j["rolled_back"] = r.rolled_back;
    return j;
}

}  // namespace factcheck
