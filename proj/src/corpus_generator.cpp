#include "factcheck/corpus_generator.hpp"

#include <array>
#include <fstream>
#include <random>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "factcheck/text.hpp"

namespace factcheck {

namespace {

using nlohmann::ordered_json;

// Fixed block layout; see the header.
constexpr std::array<const char*, 20> kBlock = {
    "kg+web+db", "kg+web+db", "kg+web+db", "kg+web+db", "kg",     "kg",     "kg",
    "kg",        "web",       "web",       "web",       "db",     "db",     "kg+web",
    "kg+web",    "kg+db",     "kg+db",     "web+db",    "web+db", "web+db"};

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    // Modulo keeps the stream identical across standard libraries.
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }
    int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::size_t>(hi - lo + 1))); }

  private:
    std::mt19937_64 gen_;
};

class NameMaker {
  public:
    explicit NameMaker(Rng& rng) : rng_(rng) {}

    // Capitalized pseudo-word that is neither a substring nor a superstring
    // of any earlier word, so fixture routes and BM25 terms never collide.
    std::string word() {
        static constexpr std::string_view kOnset = "bdfgklmnprstvz";
        static constexpr std::string_view kVowel = "aeiou";
        static constexpr std::array<std::string_view, 6> kCoda = {"n", "r", "l", "s", "th", "x"};
        for (;;) {
            std::string w;
            const std::size_t syllables = 2 + rng_.below(2);
            for (std::size_t i = 0; i < syllables; ++i) {
                w += kOnset[rng_.below(kOnset.size())];
                w += kVowel[rng_.below(kVowel.size())];
            }
            w += kCoda[rng_.below(kCoda.size())];
            if (text::is_stop_word(w)) continue;
            bool clash = false;
            for (const auto& u : used_)
                if (u.find(w) != std::string::npos || w.find(u) != std::string::npos) {
                    clash = true;
                    break;
                }
            if (clash) continue;
            used_.insert(w);
            w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
            return w;
        }
    }

  private:
    Rng& rng_;
    std::set<std::string> used_;
};

enum class FactKind { Published, Founded, Height, Located };

struct Fact {
    std::string subject_id;
    std::string subject_name;
    std::string kind;  // alias kind
    FactKind fact;
    std::string work;  // Published only
    int number = 0;    // year or meters
    std::size_t country = 0;
};

std::string sentence(const Fact& f, int number, const std::string& country_name) {
    switch (f.fact) {
        case FactKind::Published: return fmt::format("{} published {} in {}.", f.subject_name, f.work, number);
        case FactKind::Founded: return fmt::format("{} was founded in {}.", f.subject_name, number);
        case FactKind::Height: return fmt::format("{} is {} meters tall.", f.subject_name, number);
        case FactKind::Located: return fmt::format("{} is located in {}.", f.subject_name, country_name);
    }
    return {};
}

const char* predicate(FactKind k) {
    switch (k) {
        case FactKind::Published: return "published";
        case FactKind::Founded: return "founded";
        case FactKind::Height: return "height";
        case FactKind::Located: return "located";
    }
    return "";
}

// (object_type, object_value) as used by the triple file and gold records.
std::pair<std::string, std::string> object_of(const Fact& f, const std::vector<std::string>& country_ids) {
    switch (f.fact) {
        case FactKind::Published:
        case FactKind::Founded: return {"date", std::to_string(f.number)};
        case FactKind::Height: return {"number", fmt::format("{} meters", f.number)};
        case FactKind::Located: return {"entity", country_ids[f.country]};
    }
    return {};
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", p.string()));
    return out;
}

std::string iso(int y, int m, int d) { return fmt::format("{:04d}-{:02d}-{:02d}", y, m, d); }

}  // namespace

std::vector<std::string> coverage_of(std::size_t index) {
    return text::split(kBlock[index % kBlock.size()], '+');
}

GeneratedFiles generate_corpus(const GeneratorOptions& opts, const std::filesystem::path& out_dir) {
    if (opts.hallucination_rate < 0.0 || opts.hallucination_rate > 1.0)
        throw std::invalid_argument("hallucination_rate must be in [0,1]");
    if (opts.staleness < 0.0 || opts.staleness > 1.0) throw std::invalid_argument("staleness must be in [0,1]");
    std::filesystem::create_directories(out_dir);

    Rng rng(opts.seed);
    NameMaker names(rng);

    std::vector<std::string> country_ids, country_names;
    for (int c = 0; c < 12; ++c) {
        country_ids.push_back(fmt::format("C{}", c));
        country_names.push_back(names.word());
    }

    static constexpr std::array<const char*, 4> kOrgNouns = {"Institute", "Society", "Company", "Foundation"};
    static constexpr std::array<const char*, 4> kLandmarkNouns = {"Tower", "Bridge", "Dam", "Spire"};
    static constexpr std::array<const char*, 4> kWorkNouns = {"theorem", "atlas", "treatise", "lexicon"};

    std::vector<Fact> facts;
    for (std::size_t i = 0; i < opts.examples; ++i) {
        Fact f;
        f.subject_id = fmt::format("E{}", i);
        f.fact = static_cast<FactKind>((i + i / kBlock.size()) % 4);
        switch (f.fact) {
            case FactKind::Published: {
                f.subject_name = names.word() + " " + names.word();
                f.kind = "PERSON";
                f.work = fmt::format("the {} {}", names.word(), kWorkNouns[rng.below(kWorkNouns.size())]);
                f.number = rng.between(1700, 1990);
                break;
            }
            case FactKind::Founded:
                f.subject_name = names.word() + " " + kOrgNouns[rng.below(kOrgNouns.size())];
                f.kind = "ORG";
                f.number = rng.between(1600, 1990);
                break;
            case FactKind::Height:
                f.subject_name = names.word() + " " + kLandmarkNouns[rng.below(kLandmarkNouns.size())];
                f.kind = "PLACE";
                f.number = rng.between(40, 900);
                break;
            case FactKind::Located:
                f.subject_name = names.word();
                f.kind = "PLACE";
                f.country = rng.below(country_ids.size());
                break;
        }
        facts.push_back(std::move(f));
    }

    GeneratedFiles files;
    files.corpus = out_dir / "eval.jsonl";
    files.config = out_dir / "config.yaml";
    files.examples = facts.size();

    {
        auto out = open_out(out_dir / "aliases.tsv");
        out << "# canonical_id\tkind\talias\n";
        for (std::size_t c = 0; c < country_ids.size(); ++c)
            out << country_ids[c] << "\tPLACE\t" << country_names[c] << "\n";
        for (const auto& f : facts) out << f.subject_id << '\t' << f.kind << '\t' << f.subject_name << '\n';
    }
    {
        auto out = open_out(out_dir / "vocab.txt");
        out << "published = published, released [multi]\n"
               "founded = founded, established\n"
               "located = located, situated\n";
    }

    auto kg = open_out(out_dir / "kg.tsv");
    kg << "# subject\tpredicate\ttype\tvalue\tvalid_from\tvalid_to\tconfidence\n";
    auto db = open_out(out_dir / "db.jsonl");
    ordered_json routes = ordered_json::array();
    auto corpus = open_out(files.corpus);

    const std::size_t blocks = (facts.size() + kBlock.size() - 1) / kBlock.size();
    std::vector<bool> block_wrong(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        const auto before = static_cast<long long>(static_cast<double>(b) * opts.hallucination_rate + 1e-9);
        const auto after = static_cast<long long>(static_cast<double>(b + 1) * opts.hallucination_rate + 1e-9);
        block_wrong[b] = after > before;
    }

    for (std::size_t i = 0; i < facts.size(); ++i) {
        const auto& f = facts[i];
        const auto cover = coverage_of(i);
        auto has = [&](const char* s) { return std::find(cover.begin(), cover.end(), s) != cover.end(); };
        const auto [otype, ovalue] = object_of(f, country_ids);
        const std::string truth = sentence(f, f.number, country_names[f.country]);

        if (has("kg")) {
            const bool stale = rng.below(1000) < static_cast<std::size_t>(opts.staleness * 1000.0);
            kg << fmt::format("{}\t{}\t{}\t{}\t\t{}\t{:.2f}\n", f.subject_id, predicate(f.fact), otype, ovalue,
                              stale ? std::to_string(opts.reference_date.year - 10) : "",
                              0.90 + 0.01 * static_cast<double>(rng.below(10)));
        }
        if (has("db")) {
            ordered_json d;
            d["doc_id"] = fmt::format("doc-{:04d}", i);
            d["text"] = truth + " It is documented in the registry.";
            d["domain_tag"] = "reference";
            d["authority"] = 0.85 + 0.01 * static_cast<double>(rng.below(10));
            d["published"] = iso(opts.reference_date.year - 1, 1 + static_cast<int>(rng.below(12)), 1);
            d["citation_count"] = 50 + rng.below(500);
            db << d.dump() << '\n';
        }
        if (has("web")) {
            ordered_json hit;
            hit["snippet"] = truth;
            if (f.fact == FactKind::Height) {
                hit["value"] = f.number;
                hit["unit"] = "meters";
            } else {
                hit["value"] = ovalue;
            }
            hit["value_type"] = otype;
            hit["authority"] = 0.8 + 0.01 * static_cast<double>(rng.below(15));
            hit["published"] = iso(opts.reference_date.year - 1, 1 + static_cast<int>(rng.below(12)), 15);
            hit["citations"] = 10 + rng.below(300);
            ordered_json route;
            route["match"] = {text::to_lower(f.subject_name)};
            route["hits"] = ordered_json::array({hit});
            routes.push_back(route);
        }

        const bool wrong = block_wrong[i / kBlock.size()];
        int shown = f.number;
        std::size_t shown_country = f.country;
        if (wrong) {
            ++files.injected_errors;
            switch (f.fact) {
                case FactKind::Published:
                case FactKind::Founded: shown = f.number + (rng.below(2) ? 1 : -1) * rng.between(3, 40); break;
                case FactKind::Height: shown = f.number + rng.between(15, 120); break;
                case FactKind::Located:
                    shown_country = (f.country + 1 + rng.below(country_ids.size() - 1)) % country_ids.size();
                    break;
            }
        }
        ordered_json ex;
        ex["id"] = fmt::format("ex-{:04d}", i);
        ex["text"] = sentence(f, shown, country_names[shown_country]);
        ex["label"] = wrong ? "HALLUCINATED" : "FACTUAL";
        ex["gold"] = ordered_json::array(
            {{{"subject", f.subject_id}, {"predicate", predicate(f.fact)}, {"type", otype}, {"value", ovalue}}});
        ex["reference"] = truth;
        ex["coverage"] = kBlock[i % kBlock.size()];
        corpus << ex.dump() << '\n';
    }

    {
        auto out = open_out(out_dir / "web.json");
        ordered_json fixture;
        fixture["delay_ms"] = 0;
        fixture["routes"] = routes;
        out << fixture.dump(1) << '\n';
    }
    {
        auto out = open_out(files.config);
        out << fmt::format(R"(# Generated evaluation world (seed {seed}).
reference_date: {ref}
extractor:
  vocabulary: vocab.txt
  aliases: aliases.tsv
sources:
  - id: kg
    kind: kg
    backend: triples
    path: kg.tsv
    reliability: 0.94
    weight: 0.4
    timeout_ms: 500
    as_of_reference: true
    label: knowledge graph
  - id: web
    kind: web
    backend: http
    mock_fixture: web.json
    reliability: 0.85
    weight: 0.35
    timeout_ms: 500
    max_results: 5
    label: web search
  - id: db
    kind: db
    backend: corpus
    path: db.jsonl
    reliability: 0.9
    weight: 0.25
    timeout_ms: 500
    max_results: 5
    label: domain database
confidence:
  tau: 0.7
  weights: {{alpha: 0.3, beta: 0.5, gamma: 0.2}}
  intrinsic: {{provider: constant, value: 0.5}}
service:
  evidence_budget_ms: 800
)",
                           fmt::arg("seed", opts.seed),
                           fmt::arg("ref", iso(opts.reference_date.year, opts.reference_date.month.value_or(1),
                                               opts.reference_date.day.value_or(1))));
    }
    return files;
}

}  // namespace factcheck
