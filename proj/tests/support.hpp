// Shared helpers for the test binaries: fixture paths, a seeded generator
// and small builders for claims and evidence.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "factcheck/claim.hpp"
#include "factcheck/evidence.hpp"

namespace testing_support {

inline std::filesystem::path fixture(const std::string& rel) { return std::filesystem::path(FIXTURE_DIR) / rel; }

// splitmix64; small, seedable and identical on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : s_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // [lo, hi]
    int between(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
    bool coin(double p = 0.5) { return uniform() < p; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[next() % i]);
    }

  private:
    std::uint64_t s_;
};

inline factcheck::Claim year_claim(const std::string& id, int year, const std::string& subject = "Q937",
                                   const std::string& predicate = "published") {
    factcheck::Claim c;
    c.id = id;
    c.subject.canonical_id = subject;
    c.subject.surface_form = subject;
    c.subject.link_score = 1.0;
    c.predicate = predicate;
    c.object = factcheck::ClaimValue::year(year);
    return c;
}

inline factcheck::Evidence evidence(const std::string& source, factcheck::Stance stance,
                                    factcheck::ValueDistribution dist, double reliability = 1.0,
                                    double authority = 1.0, double recency = 1.0, double citations = 1.0) {
    factcheck::Evidence e;
    e.source_id = source;
    e.stance = stance;
    e.value_distribution = std::move(dist);
    e.reliability = reliability;
    e.authority = authority;
    e.recency_score = recency;
    e.citation_norm = citations;
    return e;
}

inline factcheck::ValueDistribution years(std::initializer_list<std::pair<int, double>> masses) {
    factcheck::ValueDistribution d;
    for (auto [y, p] : masses) d[factcheck::ClaimValue::year(y)] = p;
    return d;
}

}  // namespace testing_support
