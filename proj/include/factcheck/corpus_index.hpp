#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "factcheck/claim.hpp"
#include "factcheck/evidence.hpp"
#include "factcheck/extractor.hpp"

namespace factcheck {

struct Document {
    std::string doc_id;
    std::string text;
    std::string domain_tag;
    double authority = 1.0;
    Date published;
    std::uint64_t citation_count = 0;
};

/// Reads JSON-lines documents ({doc_id, text, domain_tag, authority,
/// published, citation_count}); dates are ISO-8601.
std::vector<Document> load_documents(const std::filesystem::path& path);
std::vector<Document> parse_documents(std::istream& in, std::string_view origin = "<stream>");

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

struct ScoredDocument {
    const Document* doc;
    double score;
};

/// Inverted index with Okapi BM25 term scoring. Immutable after build.
///
/// idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)), which stays positive for
/// terms present in most documents of a small corpus.
class CorpusIndex {
  public:
    explicit CorpusIndex(std::vector<Document> docs, Bm25Params params = {});

    /// Top-k documents by BM25 x authority; ties by doc_id ascending.
    /// Documents matching no query term are not returned.
    std::vector<ScoredDocument> search(const std::vector<std::string>& query_terms, std::size_t k) const;

    double bm25(const std::vector<std::string>& query_terms, std::size_t doc_index) const;

    const std::vector<Document>& documents() const { return docs_; }
    std::uint64_t max_citations() const { return max_citations_; }

  private:
    struct Posting {
        std::size_t doc;
        std::uint32_t tf;
    };

    std::vector<Document> docs_;
    Bm25Params params_;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::vector<std::size_t> doc_len_;
    double avg_len_ = 0.0;
    std::uint64_t max_citations_ = 0;
};

/// Document-corpus source: ranks documents for the claim's subject and
/// complement terms, reads the value each top document asserts for the same
/// subject and predicate, and pools them weighted by authority.
class CorpusSource final : public KnowledgeSource {
  public:
    CorpusSource(SourceProfile profile, std::shared_ptr<const CorpusIndex> index,
                 std::shared_ptr<const PatternExtractor> extractor, ScoringContext ctx);

    const SourceProfile& profile() const override { return profile_; }
    Evidence query(const Claim& claim) const override;

    /// Matching hits before aggregation (exposed for inspection and tests).
    std::vector<Hit> hits_for(const Claim& claim) const;

    static std::vector<std::string> query_terms(const Claim& claim);

  private:
    SourceProfile profile_;
    std::shared_ptr<const CorpusIndex> index_;
    std::shared_ptr<const PatternExtractor> extractor_;
    ScoringContext ctx_;
    std::vector<std::vector<Claim>> doc_claims_;
};

}  // namespace factcheck
