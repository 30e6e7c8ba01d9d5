#include "factcheck/corpus_index.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "factcheck/text.hpp"

namespace factcheck {

using json = nlohmann::json;

std::vector<Document> load_documents(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(fmt::format("cannot open corpus {}", path.string()));
    return parse_documents(in, path.string());
}

std::vector<Document> parse_documents(std::istream& in, std::string_view origin) {
    std::vector<Document> docs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
            const json j = json::parse(line);
            Document d;
            d.doc_id = j.at("doc_id").get<std::string>();
            d.text = j.at("text").get<std::string>();
            d.domain_tag = j.value("domain_tag", "");
            d.authority = j.value("authority", 1.0);
            if (!(d.authority >= 0.0 && d.authority <= 1.0)) throw std::invalid_argument("authority must be in [0,1]");
            const auto* date = parse_claim_value("date", j.at("published").get<std::string>()).get_if<Date>();
            d.published = *date;
            d.citation_count = j.value("citation_count", std::uint64_t{0});
            docs.push_back(std::move(d));
        } catch (const std::exception& e) {
            throw std::runtime_error(fmt::format("{}:{}: {}", origin, lineno, e.what()));
        }
    }
    return docs;
}

CorpusIndex::CorpusIndex(std::vector<Document> docs, Bm25Params params) : docs_(std::move(docs)), params_(params) {
    std::size_t total = 0;
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        const auto toks = text::tokenize(docs_[i].text);
        doc_len_.push_back(toks.size());
        total += toks.size();
        std::unordered_map<std::string, std::uint32_t> tf;
        for (const auto& t : toks) ++tf[t];
        for (auto& [t, f] : tf) postings_[t].push_back({i, f});
        max_citations_ = std::max(max_citations_, docs_[i].citation_count);
    }
    avg_len_ = docs_.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(docs_.size());
}

double CorpusIndex::bm25(const std::vector<std::string>& query_terms, std::size_t doc_index) const {
    const double n = static_cast<double>(docs_.size());
    double score = 0.0;
    std::set<std::string> seen;
    for (const auto& raw : query_terms) {
        const std::string term = text::to_lower(raw);
        if (!seen.insert(term).second) continue;
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const double df = static_cast<double>(it->second.size());
        const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
        for (const auto& p : it->second) {
            if (p.doc != doc_index) continue;
            const double tf = p.tf;
            const double norm = 1.0 - params_.b + params_.b * static_cast<double>(doc_len_[p.doc]) / avg_len_;
            score += idf * tf * (params_.k1 + 1.0) / (tf + params_.k1 * norm);
        }
    }
    return score;
}

std::vector<ScoredDocument> CorpusIndex::search(const std::vector<std::string>& query_terms, std::size_t k) const {
    std::set<std::size_t> candidates;
    for (const auto& t : query_terms) {
        auto it = postings_.find(text::to_lower(t));
        if (it == postings_.end()) continue;
        for (const auto& p : it->second) candidates.insert(p.doc);
    }
    std::vector<ScoredDocument> out;
    for (auto d : candidates) out.push_back({&docs_[d], bm25(query_terms, d) * docs_[d].authority});
    std::sort(out.begin(), out.end(), [](const ScoredDocument& a, const ScoredDocument& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc->doc_id < b.doc->doc_id;
    });
    if (out.size() > k) out.resize(k);
    return out;
}

CorpusSource::CorpusSource(SourceProfile profile, std::shared_ptr<const CorpusIndex> index,
                           std::shared_ptr<const PatternExtractor> extractor, ScoringContext ctx)
    : profile_(std::move(profile)), index_(std::move(index)), extractor_(std::move(extractor)), ctx_(ctx) {
    profile_.validate();
    for (const auto& d : index_->documents()) doc_claims_.push_back(extractor_->extract(d.text));
}

std::vector<std::string> CorpusSource::query_terms(const Claim& claim) {
    std::vector<std::string> terms;
    std::set<std::string> seen;
    for (const auto* part : {&claim.subject.surface_form, &claim.complement})
        for (auto& t : text::content_tokens(*part))
            if (seen.insert(t).second) terms.push_back(std::move(t));
    return terms;
}

std::vector<Hit> CorpusSource::hits_for(const Claim& claim) const {
    std::vector<Hit> hits;
    const auto ranked = index_->search(query_terms(claim), static_cast<std::size_t>(profile_.max_results));
    const std::string subject = claim.subject.identity();
    for (const auto& r : ranked) {
        const auto idx = static_cast<std::size_t>(r.doc - index_->documents().data());
        for (const auto& dc : doc_claims_[idx]) {
            if (dc.predicate != claim.predicate || dc.subject.identity() != subject) continue;
            for (const auto& v : dc.asserted_values()) {
                Hit h;
                h.value = v;
                h.authority = r.doc->authority;
                h.published = r.doc->published;
                h.citations = r.doc->citation_count;
                h.snippet = dc.raw_text;
                hits.push_back(std::move(h));
            }
        }
    }
    return hits;
}

Evidence CorpusSource::query(const Claim& claim) const {
    const auto start = std::chrono::steady_clock::now();
    const auto hits = hits_for(claim);
    const std::uint64_t ref = profile_.citation_reference ? profile_.citation_reference : index_->max_citations();
    Evidence e = aggregate_hits(claim, profile_, hits, ctx_, ref);
    e.latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return e;
}

}  // namespace factcheck
