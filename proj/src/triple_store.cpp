#include "factcheck/triple_store.hpp"

#include <chrono>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "factcheck/text.hpp"

namespace factcheck {

namespace {

std::optional<int> optional_year(std::string_view s, std::string_view origin, std::size_t lineno) {
    s = text::trim(s);
    if (s.empty()) return std::nullopt;
    try {
        std::size_t used = 0;
        int v = std::stoi(std::string(s), &used);
        if (used != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(fmt::format("{}:{}: bad year '{}'", origin, lineno, s));
    }
}

}  // namespace

std::string TripleStore::key(std::string_view s, std::string_view p) {
    std::string k(s);
    k.push_back('\x1f');
    k.append(p);
    return k;
}

TripleStore TripleStore::load(const std::filesystem::path& path, const AliasTable* aliases) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(fmt::format("cannot open triple file {}", path.string()));
    return parse(in, aliases, path.string());
}

TripleStore TripleStore::parse(std::istream& in, const AliasTable* aliases, std::string_view origin) {
    TripleStore store;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty() || line.front() == '#') continue;
        auto cols = text::split(line, '\t');
        if (cols.size() != 7 && cols.size() != 8)
            throw std::runtime_error(
                fmt::format("{}:{}: expected 7 or 8 tab-separated columns, got {}", origin, lineno, cols.size()));
        Triple t;
        t.subject_id = std::string(text::trim(cols[0]));
        t.predicate = text::to_lower(text::trim(cols[1]));
        try {
            t.object = parse_claim_value(cols[2], cols[3], aliases);
        } catch (const InvalidValue& e) {
            throw std::runtime_error(fmt::format("{}:{}: {}", origin, lineno, e.what()));
        }
        t.valid_from = optional_year(cols[4], origin, lineno);
        t.valid_to = optional_year(cols[5], origin, lineno);
        const auto conf = text::trim(cols[6]);
        t.asserted_confidence = conf.empty() ? 1.0 : std::stod(std::string(conf));
        if (cols.size() == 8) t.label = std::string(text::trim(cols[7]));
        try {
            store.add(std::move(t));
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(fmt::format("{}:{}: {}", origin, lineno, e.what()));
        }
    }
    return store;
}

void TripleStore::add(Triple t) {
    if (t.valid_from && t.valid_to && *t.valid_from > *t.valid_to)
        throw std::invalid_argument("valid_from must not exceed valid_to");
    if (!(t.asserted_confidence >= 0.0 && t.asserted_confidence <= 1.0))
        throw std::invalid_argument("confidence must be in [0,1]");
    index_[key(t.subject_id, t.predicate)].push_back(all_.size());
    all_.push_back(std::move(t));
    ++size_;
}

std::vector<Triple> TripleStore::lookup(std::string_view subject_id, std::string_view predicate,
                                        std::optional<int> as_of) const {
    std::vector<Triple> out;
    auto it = index_.find(key(subject_id, predicate));
    if (it == index_.end()) return out;
    for (auto idx : it->second) {
        const Triple& t = all_[idx];
        if (!as_of || t.valid_at(*as_of)) out.push_back(t);
    }
    return out;
}

TripleStoreSource::TripleStoreSource(SourceProfile profile, std::shared_ptr<const TripleStore> store,
                                     std::shared_ptr<const AliasTable> aliases, ScoringContext ctx,
                                     bool default_to_reference_year)
    : profile_(std::move(profile)),
      store_(std::move(store)),
      aliases_(std::move(aliases)),
      ctx_(ctx),
      default_to_reference_year_(default_to_reference_year) {
    profile_.validate();
}

Evidence TripleStoreSource::query(const Claim& claim) const {
    const auto start = std::chrono::steady_clock::now();
    if (!claim.subject.linked()) return insufficient_evidence(profile_, claim);

    std::optional<int> as_of;
    if (claim.temporal_qualifier)
        as_of = claim.temporal_qualifier->from;
    else if (default_to_reference_year_)
        as_of = ctx_.reference_date.year;

    const auto triples = store_->lookup(claim.subject.canonical_id, claim.predicate, as_of);
    std::vector<Hit> hits;
    const std::string subject_name = aliases_ && !aliases_->display_name(claim.subject.canonical_id).empty()
                                         ? aliases_->display_name(claim.subject.canonical_id)
                                         : claim.subject.surface_form;
    std::size_t n = 0;
    for (const auto& t : triples) {
        if (n++ >= static_cast<std::size_t>(profile_.max_results)) break;
        Hit h;
        h.value = t.object;
        h.authority = t.asserted_confidence;
        h.published = ctx_.reference_date;  // curated store: current as of the reference date
        std::string snippet = subject_name + " " + claim.predicate;
        if (!t.label.empty()) {
            snippet += " " + t.label;
            h.label = t.label;
        }
        h.snippet = snippet + " " + t.object.display();
        hits.push_back(std::move(h));
    }
    Evidence e = aggregate_hits(claim, profile_, hits, ctx_, profile_.citation_reference);
    e.latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return e;
}

}  // namespace factcheck
