#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "factcheck/claim.hpp"
#include "factcheck/evidence.hpp"
#include "factcheck/pipeline.hpp"

namespace factcheck {

class MockSearchServer;

/// Raised for any unusable configuration; the message starts with the
/// dotted path of the offending field.
class ConfigInvalid : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Backend { Triples, Corpus, Http };

struct SourceConfig {
    std::string id;
    SourceKind kind = SourceKind::KnowledgeGraph;
    Backend backend = Backend::Triples;
    std::filesystem::path path;
    std::string endpoint;
    /// Serve this fixture from an embedded mock search server instead of
    /// calling `endpoint`.
    std::filesystem::path mock_fixture;
    std::optional<int> mock_delay_ms;
    double reliability = 1.0;
    double weight = 1.0;
    int timeout_ms = 500;
    int max_results = 10;
    std::uint64_t citation_reference = 0;
    /// Knowledge graph only: query "as of" the reference year when the claim
    /// has no temporal qualifier.
    bool as_of_reference = false;
    std::string label;
};

enum class IntrinsicKind { Constant, Supplied, SampleAgreement };

struct AppConfig {
    Date reference_date{2024, 1, 1};
    std::filesystem::path vocabulary;
    std::filesystem::path aliases;
    double link_threshold = 0.6;
    std::vector<SourceConfig> sources;
    std::vector<std::string> enabled_sources;
    double tau_consistency = 0.5;
    double stance_margin = 0.05;
    double recency_half_life_days = 365.0;
    StrengthCoefficients strength;
    double tau = 0.7;
    ConfidenceWeights weights;
    IntrinsicKind intrinsic = IntrinsicKind::Supplied;
    double intrinsic_value = 0.5;
    CorrectionConfig correction;
    std::chrono::seconds cache_ttl{300};
    std::size_t cache_capacity = 1000;
    std::string bind = "127.0.0.1:8080";
    std::size_t max_concurrent = 128;
    std::chrono::milliseconds evidence_budget{800};
    /// File the config came from; empty for in-memory configs.
    std::filesystem::path origin;

    ScoringContext scoring() const;
    PipelineConfig pipeline_config() const;
    /// Throws ConfigInvalid.
    void validate() const;
};

/// Returns the value of an environment variable, if set.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

EnvLookup process_env();
EnvLookup no_env();

/// Parses YAML. Relative paths resolve against `base_dir`. Scalars may be
/// overridden by VERIFY_<PATH> variables, e.g. VERIFY_CONFIDENCE_TAU or
/// VERIFY_SERVICE_EVIDENCE_BUDGET_MS. Throws ConfigInvalid.
AppConfig parse_config(const std::string& yaml, const std::filesystem::path& base_dir,
                       const EnvLookup& env = no_env());
AppConfig load_config(const std::filesystem::path& path, const EnvLookup& env = process_env());

/// Names of the scalar settings that accept environment overrides.
std::vector<std::string> overridable_keys();

/// Everything built from one config: sources, embedded mock servers and the
/// default pipeline. Mock servers live as long as the runtime.
class Runtime {
  public:
    /// Throws ConfigInvalid, or std::runtime_error when a data file cannot be
    /// loaded or a mock server cannot bind.
    static std::shared_ptr<Runtime> build(const AppConfig& config);
    ~Runtime();

    const AppConfig& config() const { return config_; }
    std::shared_ptr<const Pipeline> pipeline() const { return pipeline_; }

    /// A fresh pipeline (own cache) over a subset of the configured sources.
    /// Throws UnknownSource.
    std::shared_ptr<const Pipeline> make_pipeline(const std::vector<std::string>& enabled) const;

  private:
    Runtime() = default;

    AppConfig config_;
    std::vector<std::unique_ptr<MockSearchServer>> mocks_;
    PipelineParts parts_;
    std::shared_ptr<const Pipeline> pipeline_;
};

}  // namespace factcheck
