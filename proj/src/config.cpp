#include "factcheck/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "factcheck/alias_table.hpp"
#include "factcheck/corpus_index.hpp"
#include "factcheck/extractor.hpp"
#include "factcheck/http_source.hpp"
#include "factcheck/mock_search_server.hpp"
#include "factcheck/text.hpp"
#include "factcheck/triple_store.hpp"

namespace factcheck {

namespace {

template <class T>
std::string_view type_word() {
    if constexpr (std::is_same_v<T, bool>) return "a boolean";
    else if constexpr (std::is_integral_v<T>) return "an integer";
    else if constexpr (std::is_floating_point_v<T>) return "a number";
    else return "a string";
}

template <class T>
T read(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) throw ConfigInvalid(fmt::format("{}: expected {}", path, type_word<T>()));
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigInvalid(fmt::format("{}: expected {}, got '{}'", path, type_word<T>(), n.Scalar()));
    }
}

template <class T>
void read_into(const YAML::Node& parent, const char* key, const std::string& prefix, T& out) {
    if (const auto n = parent[key]; n.IsDefined() && !n.IsNull()) out = read<T>(n, prefix + key);
}

void allow_keys(const YAML::Node& map, const std::string& path, std::initializer_list<std::string_view> keys) {
    if (!map.IsMap()) throw ConfigInvalid(fmt::format("{}: expected a mapping", path.empty() ? "<root>" : path));
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw ConfigInvalid(fmt::format("{}{}: unknown setting", path.empty() ? "" : path + ".", key));
    }
}

Date parse_date(const std::string& s, const std::string& path) {
    try {
        const auto v = parse_claim_value("date", s);
        return *v.get_if<Date>();
    } catch (const std::exception&) {
        throw ConfigInvalid(fmt::format("{}: expected a date YYYY[-MM[-DD]], got '{}'", path, s));
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    if (p.empty()) return {};
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

IntrinsicKind parse_intrinsic(const std::string& s, const std::string& path) {
    if (s == "constant") return IntrinsicKind::Constant;
    if (s == "supplied") return IntrinsicKind::Supplied;
    if (s == "sample_agreement") return IntrinsicKind::SampleAgreement;
    throw ConfigInvalid(fmt::format("{}: expected constant, supplied or sample_agreement, got '{}'", path, s));
}

Backend default_backend(SourceKind k) {
    switch (k) {
        case SourceKind::KnowledgeGraph: return Backend::Triples;
        case SourceKind::WebSearch: return Backend::Http;
        case SourceKind::DomainDb: return Backend::Corpus;
    }
    return Backend::Triples;
}

SourceConfig parse_source(const YAML::Node& n, std::size_t index, const std::filesystem::path& base) {
    std::string path = fmt::format("sources[{}]", index);
    allow_keys(n, path,
               {"id", "kind", "backend", "path", "endpoint", "mock_fixture", "mock_delay_ms", "reliability", "weight",
                "timeout_ms", "max_results", "citation_reference", "as_of_reference", "label"});
    SourceConfig s;
    if (!n["id"]) throw ConfigInvalid(path + ".id: required");
    s.id = read<std::string>(n["id"], path + ".id");
    if (s.id.empty()) throw ConfigInvalid(path + ".id: must not be empty");
    path = "sources." + s.id;
    const std::string pre = path + ".";

    if (!n["kind"]) throw ConfigInvalid(pre + "kind: required");
    try {
        s.kind = parse_source_kind(read<std::string>(n["kind"], pre + "kind"));
    } catch (const ConfigInvalid&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigInvalid(fmt::format("{}kind: expected kg, web or db, got '{}'", pre, n["kind"].Scalar()));
    }
    s.backend = default_backend(s.kind);
    if (n["backend"]) {
        const auto b = read<std::string>(n["backend"], pre + "backend");
        if (b == "triples") s.backend = Backend::Triples;
        else if (b == "corpus") s.backend = Backend::Corpus;
        else if (b == "http") s.backend = Backend::Http;
        else throw ConfigInvalid(fmt::format("{}backend: expected triples, corpus or http, got '{}'", pre, b));
    }
    std::string file, fixture;
    read_into(n, "path", pre, file);
    read_into(n, "endpoint", pre, s.endpoint);
    read_into(n, "mock_fixture", pre, fixture);
    s.path = resolve(base, file);
    s.mock_fixture = resolve(base, fixture);
    if (n["mock_delay_ms"]) s.mock_delay_ms = read<int>(n["mock_delay_ms"], pre + "mock_delay_ms");
    read_into(n, "reliability", pre, s.reliability);
    read_into(n, "weight", pre, s.weight);
    read_into(n, "timeout_ms", pre, s.timeout_ms);
    read_into(n, "max_results", pre, s.max_results);
    read_into(n, "citation_reference", pre, s.citation_reference);
    read_into(n, "as_of_reference", pre, s.as_of_reference);
    read_into(n, "label", pre, s.label);
    return s;
}

std::vector<std::string> parse_id_list(const std::string& s) {
    std::vector<std::string> out;
    for (auto& part : text::split(s, ',')) {
        auto t = std::string(text::trim(part));
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

using Setter = std::function<void(AppConfig&, const std::string& value, const std::string& key)>;

template <class T>
T env_scalar(const std::string& value, const std::string& key) {
    try {
        return read<T>(YAML::Load(value), key);
    } catch (const YAML::Exception&) {
        throw ConfigInvalid(fmt::format("{}: cannot parse '{}'", key, value));
    }
}

const std::map<std::string, Setter>& env_setters() {
    static const std::map<std::string, Setter> kSetters = [] {
        std::map<std::string, Setter> m;
        auto num = [&](const char* name, auto member) {
            m[name] = [member](AppConfig& c, const std::string& v, const std::string& k) {
                using T = std::remove_reference_t<decltype(c.*member)>;
                c.*member = env_scalar<T>(v, k);
            };
        };
        m["reference_date"] = [](AppConfig& c, const std::string& v, const std::string& k) {
            c.reference_date = parse_date(v, k);
        };
        m["enabled_sources"] = [](AppConfig& c, const std::string& v, const std::string&) {
            c.enabled_sources = parse_id_list(v);
        };
        num("extractor.link_threshold", &AppConfig::link_threshold);
        num("fusion.tau_consistency", &AppConfig::tau_consistency);
        num("fusion.stance_margin", &AppConfig::stance_margin);
        num("fusion.recency_half_life_days", &AppConfig::recency_half_life_days);
        m["fusion.strength.authority"] = [](AppConfig& c, const std::string& v, const std::string& k) {
            c.strength.authority = env_scalar<double>(v, k);
        };
        m["fusion.strength.recency"] = [](AppConfig& c, const std::string& v, const std::string& k) {
            c.strength.recency = env_scalar<double>(v, k);
        };
        m["fusion.strength.citations"] = [](AppConfig& c, const std::string& v, const std::string& k) {
            c.strength.citations = env_scalar<double>(v, k);
        };
        num("confidence.tau", &AppConfig::tau);
        m["confidence.weights.alpha"] = [](AppConfig& c, const std::string& v, const std::string& k) {
            c.weights.alpha = env_scalar<double>(v, k);
        };
        m["confidence.weights.beta"] = [](AppConfig& c, const std::string& v, const std::string& k) {
            c.weights.beta = env_scalar<double>(v, k);
        };
        m["confidence.weights.gamma"] = [](AppConfig& c, const std::string& v, const std::string& k) {
            c.weights.gamma = env_scalar<double>(v, k);
        };
        m["confidence.intrinsic.provider"] = [](AppConfig& c, const std::string& v, const std::string& k) {
            c.intrinsic = parse_intrinsic(v, k);
        };
        num("confidence.intrinsic.value", &AppConfig::intrinsic_value);
        m["correction.substitution_threshold"] = [](AppConfig& c, const std::string& v, const std::string& k) {
            c.correction.substitution_threshold = env_scalar<double>(v, k);
        };
        m["correction.tie_margin"] = [](AppConfig& c, const std::string& v, const std::string& k) {
            c.correction.tie_margin = env_scalar<double>(v, k);
        };
        m["correction.multi_value_min_mass"] = [](AppConfig& c, const std::string& v, const std::string& k) {
            c.correction.multi_value_min_mass = env_scalar<double>(v, k);
        };
        m["correction.hedge_phrase"] = [](AppConfig& c, const std::string& v, const std::string&) {
            c.correction.hedge_phrase = v;
        };
        m["cache.ttl_s"] = [](AppConfig& c, const std::string& v, const std::string& k) {
            c.cache_ttl = std::chrono::seconds(env_scalar<long long>(v, k));
        };
        num("cache.capacity", &AppConfig::cache_capacity);
        m["service.bind"] = [](AppConfig& c, const std::string& v, const std::string&) { c.bind = v; };
        num("service.max_concurrent", &AppConfig::max_concurrent);
        m["service.evidence_budget_ms"] = [](AppConfig& c, const std::string& v, const std::string& k) {
            c.evidence_budget = std::chrono::milliseconds(env_scalar<long long>(v, k));
        };
        return m;
    }();
    return kSetters;
}

std::string env_name(const std::string& key) {
    std::string out = "VERIFY_";
    for (char ch : key) out += ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return out;
}

}  // namespace

EnvLookup process_env() {
    return [](const std::string& name) -> std::optional<std::string> {
        if (const char* v = std::getenv(name.c_str())) return std::string(v);
        return std::nullopt;
    };
}

EnvLookup no_env() {
    return [](const std::string&) -> std::optional<std::string> { return std::nullopt; };
}

std::vector<std::string> overridable_keys() {
    std::vector<std::string> out;
    for (const auto& [k, _] : env_setters()) out.push_back(env_name(k));
    return out;
}

ScoringContext AppConfig::scoring() const {
    ScoringContext ctx;
    ctx.reference_date = reference_date;
    ctx.recency_half_life_days = recency_half_life_days;
    ctx.stance_margin = stance_margin;
    return ctx;
}

PipelineConfig AppConfig::pipeline_config() const {
    PipelineConfig p;
    p.tau = tau;
    p.evidence_budget = evidence_budget;
    p.enabled_sources = enabled_sources;
    p.fusion.tau_consistency = tau_consistency;
    p.fusion.strength = strength;
    for (const auto& s : sources) p.fusion.weights[s.id] = s.weight;
    p.weights = weights;
    p.correction = correction;
    for (const auto& s : sources)
        if (!s.label.empty()) p.correction.source_labels[s.id] = s.label;
    p.cache_ttl = cache_ttl;
    p.cache_capacity = cache_capacity;
    return p;
}

void AppConfig::validate() const {
    auto unit = [](double v, const std::string& field) {
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigInvalid(fmt::format("{}: must be in [0,1], got {}", field, v));
    };
    unit(link_threshold, "extractor.link_threshold");
    if (sources.empty()) throw ConfigInvalid("sources: at least one source is required");
    std::set<std::string> ids;
    for (const auto& s : sources) {
        const std::string pre = "sources." + s.id + ".";
        if (!ids.insert(s.id).second) throw ConfigInvalid(fmt::format("sources.{}: duplicate id", s.id));
        unit(s.reliability, pre + "reliability");
        if (!(s.weight >= 0.0)) throw ConfigInvalid(fmt::format("{}weight: must be >= 0, got {}", pre, s.weight));
        if (s.timeout_ms <= 0) throw ConfigInvalid(fmt::format("{}timeout_ms: must be > 0", pre));
        if (s.max_results <= 0) throw ConfigInvalid(fmt::format("{}max_results: must be > 0", pre));
        if (s.mock_delay_ms && *s.mock_delay_ms < 0) throw ConfigInvalid(pre + "mock_delay_ms: must be >= 0");
        switch (s.backend) {
            case Backend::Triples:
            case Backend::Corpus:
                if (s.path.empty()) throw ConfigInvalid(pre + "path: required for this backend");
                break;
            case Backend::Http:
                if (s.endpoint.empty() && s.mock_fixture.empty())
                    throw ConfigInvalid(pre + "endpoint: required (or mock_fixture)");
                if (!s.endpoint.empty()) {
                    try {
                        HttpEndpoint::parse(s.endpoint);
                    } catch (const std::exception& e) {
                        throw ConfigInvalid(fmt::format("{}endpoint: {}", pre, e.what()));
                    }
                }
                break;
        }
    }
    for (const auto& id : enabled_sources)
        if (!ids.count(id)) throw ConfigInvalid(fmt::format("enabled_sources: unknown source '{}'", id));
    unit(tau_consistency, "fusion.tau_consistency");
    unit(stance_margin, "fusion.stance_margin");
    if (!(recency_half_life_days > 0.0)) throw ConfigInvalid("fusion.recency_half_life_days: must be > 0");
    try {
        strength.validate();
    } catch (const std::exception&) {
        throw ConfigInvalid(fmt::format("fusion.strength: ({}, {}, {}) must be non-negative and sum to 1",
                                        strength.authority, strength.recency, strength.citations));
    }
    unit(tau, "confidence.tau");
    try {
        weights.validate();
    } catch (const std::exception&) {
        throw ConfigInvalid(fmt::format("confidence.weights: ({}, {}, {}) must be non-negative and sum to 1",
                                        weights.alpha, weights.beta, weights.gamma));
    }
    unit(intrinsic_value, "confidence.intrinsic.value");
    try {
        correction.validate();
    } catch (const std::exception& e) {
        throw ConfigInvalid(e.what());
    }
    if (cache_ttl.count() < 0) throw ConfigInvalid("cache.ttl_s: must be >= 0");
    if (max_concurrent == 0) throw ConfigInvalid("service.max_concurrent: must be > 0");
    if (evidence_budget.count() <= 0) throw ConfigInvalid("service.evidence_budget_ms: must be > 0");
    if (bind.find(':') == std::string::npos) throw ConfigInvalid("service.bind: expected host:port");
}

AppConfig parse_config(const std::string& yaml, const std::filesystem::path& base_dir, const EnvLookup& env) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml);
    } catch (const YAML::Exception& e) {
        throw ConfigInvalid(fmt::format("<root>: YAML syntax error at line {}: {}", e.mark.line + 1, e.msg));
    }
    if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    allow_keys(root, "",
               {"reference_date", "extractor", "sources", "enabled_sources", "fusion", "confidence", "correction",
                "cache", "service"});

    AppConfig c;
    if (root["reference_date"]) c.reference_date = parse_date(read<std::string>(root["reference_date"], "reference_date"), "reference_date");

    if (const auto ex = root["extractor"]) {
        allow_keys(ex, "extractor", {"vocabulary", "aliases", "link_threshold"});
        std::string vocab, aliases;
        read_into(ex, "vocabulary", "extractor.", vocab);
        read_into(ex, "aliases", "extractor.", aliases);
        c.vocabulary = resolve(base_dir, vocab);
        c.aliases = resolve(base_dir, aliases);
        read_into(ex, "link_threshold", "extractor.", c.link_threshold);
    }

    if (const auto src = root["sources"]) {
        if (!src.IsSequence()) throw ConfigInvalid("sources: expected a list");
        for (std::size_t i = 0; i < src.size(); ++i) c.sources.push_back(parse_source(src[i], i, base_dir));
    }
    if (const auto en = root["enabled_sources"]) {
        if (en.IsScalar()) {
            c.enabled_sources = parse_id_list(en.Scalar());
        } else if (en.IsSequence()) {
            for (std::size_t i = 0; i < en.size(); ++i)
                c.enabled_sources.push_back(read<std::string>(en[i], fmt::format("enabled_sources[{}]", i)));
        } else {
            throw ConfigInvalid("enabled_sources: expected a list of source ids");
        }
    }

    if (const auto f = root["fusion"]) {
        allow_keys(f, "fusion", {"tau_consistency", "stance_margin", "recency_half_life_days", "strength"});
        read_into(f, "tau_consistency", "fusion.", c.tau_consistency);
        read_into(f, "stance_margin", "fusion.", c.stance_margin);
        read_into(f, "recency_half_life_days", "fusion.", c.recency_half_life_days);
        if (const auto s = f["strength"]) {
            allow_keys(s, "fusion.strength", {"authority", "recency", "citations"});
            read_into(s, "authority", "fusion.strength.", c.strength.authority);
            read_into(s, "recency", "fusion.strength.", c.strength.recency);
            read_into(s, "citations", "fusion.strength.", c.strength.citations);
        }
    }

    if (const auto conf = root["confidence"]) {
        allow_keys(conf, "confidence", {"tau", "weights", "intrinsic"});
        read_into(conf, "tau", "confidence.", c.tau);
        if (const auto w = conf["weights"]) {
            allow_keys(w, "confidence.weights", {"alpha", "beta", "gamma"});
            read_into(w, "alpha", "confidence.weights.", c.weights.alpha);
            read_into(w, "beta", "confidence.weights.", c.weights.beta);
            read_into(w, "gamma", "confidence.weights.", c.weights.gamma);
        }
        if (const auto in = conf["intrinsic"]) {
            allow_keys(in, "confidence.intrinsic", {"provider", "value"});
            if (in["provider"])
                c.intrinsic = parse_intrinsic(read<std::string>(in["provider"], "confidence.intrinsic.provider"),
                                              "confidence.intrinsic.provider");
            read_into(in, "value", "confidence.intrinsic.", c.intrinsic_value);
        }
    }

    if (const auto corr = root["correction"]) {
        allow_keys(corr, "correction",
                   {"substitution_threshold", "tie_margin", "multi_value_min_mass", "hedge_phrase", "templates",
                    "default_template"});
        read_into(corr, "substitution_threshold", "correction.", c.correction.substitution_threshold);
        read_into(corr, "tie_margin", "correction.", c.correction.tie_margin);
        read_into(corr, "multi_value_min_mass", "correction.", c.correction.multi_value_min_mass);
        read_into(corr, "hedge_phrase", "correction.", c.correction.hedge_phrase);
        read_into(corr, "default_template", "correction.", c.correction.default_template);
        if (const auto t = corr["templates"]) {
            if (!t.IsMap()) throw ConfigInvalid("correction.templates: expected a mapping predicate -> template");
            for (const auto& kv : t) {
                const auto pred = kv.first.as<std::string>();
                c.correction.templates[pred] = read<std::string>(kv.second, "correction.templates." + pred);
            }
        }
    }

    if (const auto cache = root["cache"]) {
        allow_keys(cache, "cache", {"ttl_s", "capacity"});
        long long ttl = c.cache_ttl.count();
        read_into(cache, "ttl_s", "cache.", ttl);
        c.cache_ttl = std::chrono::seconds(ttl);
        read_into(cache, "capacity", "cache.", c.cache_capacity);
    }

    if (const auto svc = root["service"]) {
        allow_keys(svc, "service", {"bind", "max_concurrent", "evidence_budget_ms"});
        read_into(svc, "bind", "service.", c.bind);
        read_into(svc, "max_concurrent", "service.", c.max_concurrent);
        long long budget = c.evidence_budget.count();
        read_into(svc, "evidence_budget_ms", "service.", budget);
        c.evidence_budget = std::chrono::milliseconds(budget);
    }

    for (const auto& [key, set] : env_setters())
        if (auto v = env(env_name(key))) set(c, *v, key);

    c.validate();
    return c;
}

AppConfig load_config(const std::filesystem::path& path, const EnvLookup& env) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid(fmt::format("<file>: cannot open config {}", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    auto c = parse_config(ss.str(), path.parent_path(), env);
    c.origin = path;
    return c;
}

Runtime::~Runtime() {
    pipeline_.reset();
    for (auto& m : mocks_) m->stop();
}

std::shared_ptr<Runtime> Runtime::build(const AppConfig& config) {
    config.validate();
    std::shared_ptr<Runtime> rt(new Runtime());
    rt->config_ = config;
    const auto scoring = config.scoring();

    auto aliases = std::make_shared<AliasTable>();
    if (!config.aliases.empty()) *aliases = AliasTable::load(config.aliases);
    auto ecfg = config.vocabulary.empty() ? ExtractorConfig::defaults() : ExtractorConfig::load(config.vocabulary);
    ecfg.link_threshold = config.link_threshold;
    auto extractor = std::make_shared<PatternExtractor>(std::move(ecfg), aliases);
    rt->parts_.extractor = extractor;

    for (const auto& s : config.sources) {
        SourceProfile p;
        p.source_id = s.id;
        p.kind = s.kind;
        p.base_reliability = s.reliability;
        p.fusion_weight = s.weight;
        p.timeout = std::chrono::milliseconds(s.timeout_ms);
        p.max_results = s.max_results;
        p.citation_reference = s.citation_reference;
        switch (s.backend) {
            case Backend::Triples: {
                auto store = std::make_shared<TripleStore>(TripleStore::load(s.path, aliases.get()));
                rt->parts_.sources.push_back(
                    std::make_shared<TripleStoreSource>(p, store, aliases, scoring, s.as_of_reference));
                break;
            }
            case Backend::Corpus: {
                auto index = std::make_shared<CorpusIndex>(load_documents(s.path));
                rt->parts_.sources.push_back(std::make_shared<CorpusSource>(p, index, extractor, scoring));
                break;
            }
            case Backend::Http: {
                std::string url = s.endpoint;
                if (!s.mock_fixture.empty()) {
                    auto mock = std::make_unique<MockSearchServer>(MockSearchServer::read_fixture(s.mock_fixture));
                    if (s.mock_delay_ms) mock->set_delay(std::chrono::milliseconds(*s.mock_delay_ms));
                    mock->start();
                    url = mock->url();
                    rt->mocks_.push_back(std::move(mock));
                }
                rt->parts_.sources.push_back(
                    std::make_shared<HttpSearchSource>(p, HttpEndpoint::parse(url), scoring, aliases));
                break;
            }
        }
    }

    switch (config.intrinsic) {
        case IntrinsicKind::Constant:
            rt->parts_.intrinsic = std::make_shared<ConstantIntrinsic>(config.intrinsic_value);
            break;
        case IntrinsicKind::Supplied: rt->parts_.intrinsic = std::make_shared<SuppliedIntrinsic>(); break;
        case IntrinsicKind::SampleAgreement:
            rt->parts_.intrinsic = std::make_shared<SampleAgreementIntrinsic>(extractor);
            break;
    }
    rt->parts_.similarity = std::make_shared<TfCosineSimilarity>();
    rt->pipeline_ = std::make_shared<Pipeline>(config.pipeline_config(), rt->parts_);
    return rt;
}

std::shared_ptr<const Pipeline> Runtime::make_pipeline(const std::vector<std::string>& enabled) const {
    auto pc = config_.pipeline_config();
    pc.enabled_sources = enabled;
    return std::make_shared<Pipeline>(std::move(pc), parts_);
}

}  // namespace factcheck
