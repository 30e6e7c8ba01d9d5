#include "factcheck/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "factcheck/text.hpp"

namespace factcheck {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

enum class Outcome { Pending, Ok, Timeout, Unavailable };

struct Task {
    std::size_t claim;
    std::size_t source;
    Outcome outcome = Outcome::Pending;
    Evidence evidence;
};

struct FanOut {
    std::mutex mu;
    std::condition_variable cv;
    std::vector<Task> tasks;
    std::size_t remaining = 0;
};

}  // namespace

std::string_view to_string(GateDecision g) {
    switch (g) {
        case GateDecision::Pass: return "PASS";
        case GateDecision::Corrected: return "CORRECTED";
        case GateDecision::Hedged: return "HEDGED";
        case GateDecision::Attributed: return "ATTRIBUTED";
        case GateDecision::RolledBack: return "ROLLED_BACK";
    }
    return "?";
}

void PipelineConfig::validate() const {
    if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("confidence.tau: must be in [0,1]");
    if (evidence_budget.count() <= 0) throw std::invalid_argument("service.evidence_budget_ms: must be > 0");
    fusion.validate();
    weights.validate();
    correction.validate();
}

Pipeline::Pipeline(PipelineConfig config, PipelineParts parts)
    : config_(std::move(config)),
      parts_(std::move(parts)),
      cache_(config_.cache_capacity),
      in_flight_(std::make_shared<InFlight>()) {
    config_.validate();
    if (!parts_.extractor) throw std::invalid_argument("pipeline: no extractor");
    if (!parts_.intrinsic) throw std::invalid_argument("pipeline: no intrinsic confidence provider");
    if (!parts_.similarity) parts_.similarity = std::make_shared<TfCosineSimilarity>();

    if (config_.enabled_sources.empty()) {
        sources_ = parts_.sources;
    } else {
        for (const auto& id : config_.enabled_sources) {
            auto it = std::find_if(parts_.sources.begin(), parts_.sources.end(),
                                   [&](const auto& s) { return s->profile().source_id == id; });
            if (it == parts_.sources.end()) throw UnknownSource(fmt::format("unknown source '{}'", id));
            if (std::find(sources_.begin(), sources_.end(), *it) == sources_.end()) sources_.push_back(*it);
        }
    }
    if (sources_.empty()) throw std::invalid_argument("sources: at least one source must be enabled");
    for (const auto& s : sources_) {
        s->profile().validate();
        config_.fusion.weights.try_emplace(s->profile().source_id, s->profile().fusion_weight);
    }
}

Pipeline::~Pipeline() {
    std::unique_lock lock(in_flight_->mu);
    in_flight_->cv.wait(lock, [&] { return in_flight_->count == 0; });
}

std::string Pipeline::cache_key(const Claim& claim) const {
    // The complement steers document retrieval, so it is part of the key.
    return fmt::format("{:016x}|{}", fingerprint(claim), text::normalize(claim.complement));
}

Pipeline::Gathered Pipeline::gather(const std::vector<Claim>& claims) const {
    Gathered g;
    g.evidence.resize(claims.size());
    g.cached.assign(claims.size(), false);

    auto state = std::make_shared<FanOut>();
    for (std::size_t c = 0; c < claims.size(); ++c) {
        if (auto hit = cache_.get(cache_key(claims[c]))) {
            for (auto& e : *hit) e.claim_id = claims[c].id;
            g.evidence[c] = std::move(*hit);
            g.cached[c] = true;
            continue;
        }
        for (std::size_t s = 0; s < sources_.size(); ++s) state->tasks.push_back(Task{c, s, Outcome::Pending, {}});
    }
    state->remaining = state->tasks.size();

    const auto deadline = Clock::now() + config_.evidence_budget;
    for (std::size_t t = 0; t < state->tasks.size(); ++t) {
        auto source = sources_[state->tasks[t].source];
        {
            std::lock_guard lock(in_flight_->mu);
            ++in_flight_->count;
        }
        std::thread([state, t, source, claim = claims[state->tasks[t].claim], in_flight = in_flight_] {
            Outcome outcome = Outcome::Ok;
            Evidence ev;
            try {
                ev = source->query(claim);
            } catch (const SourceTimeout&) {
                outcome = Outcome::Timeout;
            } catch (const std::exception&) {
                outcome = Outcome::Unavailable;
            }
            {
                std::lock_guard lock(state->mu);
                state->tasks[t].outcome = outcome;
                state->tasks[t].evidence = std::move(ev);
                --state->remaining;
            }
            state->cv.notify_all();
            {
                std::lock_guard lock(in_flight->mu);
                --in_flight->count;
            }
            in_flight->cv.notify_all();
        }).detach();
    }

    std::vector<Task> done;
    {
        std::unique_lock lock(state->mu);
        state->cv.wait_until(lock, deadline, [&] { return state->remaining == 0; });
        done = state->tasks;  // late tasks stay Pending in this snapshot
    }

    std::set<std::string> degraded;
    std::vector<bool> claim_degraded(claims.size(), false);
    bool any_answer = std::find(g.cached.begin(), g.cached.end(), true) != g.cached.end();
    // Tasks are grouped by claim in source order, so evidence order is stable.
    for (auto& task : done) {
        const auto& profile = sources_[task.source]->profile();
        const auto& claim = claims[task.claim];
        switch (task.outcome) {
            case Outcome::Ok:
                task.evidence.claim_id = claim.id;
                g.evidence[task.claim].push_back(std::move(task.evidence));
                any_answer = true;
                break;
            case Outcome::Timeout:
                g.evidence[task.claim].push_back(insufficient_evidence(profile, claim, profile.timeout));
                degraded.insert(profile.source_id);
                claim_degraded[task.claim] = true;
                break;
            case Outcome::Pending:
                g.evidence[task.claim].push_back(insufficient_evidence(profile, claim, config_.evidence_budget));
                degraded.insert(profile.source_id);
                claim_degraded[task.claim] = true;
                break;
            case Outcome::Unavailable:
                degraded.insert(profile.source_id);
                claim_degraded[task.claim] = true;
                break;
        }
    }
    g.degraded.assign(degraded.begin(), degraded.end());
    g.all_failed = !claims.empty() && !any_answer;

    for (std::size_t c = 0; c < claims.size(); ++c)
        if (!g.cached[c] && !claim_degraded[c])
            cache_.put(cache_key(claims[c]), g.evidence[c], config_.cache_ttl);
    return g;
}

VerifiedResponse Pipeline::verify(std::string_view text, const RequestContext& ctx) const {
    const auto t_start = Clock::now();
    VerifiedResponse out;
    out.original_text = std::string(text);
    out.final_text = out.original_text;

    auto t0 = Clock::now();
    const auto claims = parts_.extractor->extract(text);
    out.timings.extract = ms_since(t0);

    t0 = Clock::now();
    auto gathered = gather(claims);
    out.timings.evidence = ms_since(t0);
    out.degraded_sources = gathered.degraded;

    if (gathered.all_failed) {
        out.unverified = true;
        out.e_score = out.initial_e_score = 0.0;
        out.annotation = "unverified: no knowledge source responded";
        out.timings.total = ms_since(t_start);
        return out;
    }

    t0 = Clock::now();
    std::vector<ConsistencyReport> reports;
    for (std::size_t c = 0; c < claims.size(); ++c)
        reports.push_back(assess_claim(claims[c], gathered.evidence[c], config_.fusion));
    out.initial_e_score = out.e_score = evidence_score(reports);
    out.timings.fusion = ms_since(t0);

    t0 = Clock::now();
    for (std::size_t c = 0; c < claims.size(); ++c) {
        ClaimVerdict v;
        v.claim = claims[c];
        v.evidence = std::move(gathered.evidence[c]);
        v.report = std::move(reports[c]);
        v.cached = gathered.cached[c];
        v.confidence = confidence_breakdown(v.claim, v.report, v.evidence, *parts_.intrinsic, ctx, config_.weights,
                                            *parts_.similarity);
        out.verdicts.push_back(std::move(v));
    }
    out.timings.confidence = ms_since(t0);

    t0 = Clock::now();
    for (auto& v : out.verdicts) {
        if (v.confidence.combined > config_.tau) continue;
        const auto choice = select_strategy(v.claim, v.report, v.confidence, config_.tau, config_.correction,
                                            parts_.extractor->is_multi_valued(v.claim.predicate));
        out.corrections.push_back(build_correction(text, v.claim, choice, v.report, config_.correction));
        switch (choice.strategy) {
            case Strategy::Substitute: v.gate = GateDecision::Corrected; break;
            case Strategy::Hedge: v.gate = GateDecision::Hedged; break;
            case Strategy::Attribute: v.gate = GateDecision::Attributed; break;
        }
    }
    std::string corrected;
    if (!out.corrections.empty()) corrected = apply_corrections(text, claims, out.corrections);
    out.timings.correction = ms_since(t0);

    if (!out.corrections.empty()) {
        // One pass only: claims surfacing in the corrected text are scored,
        // never corrected again.
        t0 = Clock::now();
        Reverification rv;
        rv.claims = parts_.extractor->extract(corrected);
        auto again = gather(rv.claims);
        for (std::size_t c = 0; c < rv.claims.size(); ++c)
            rv.reports.push_back(assess_claim(rv.claims[c], again.evidence[c], config_.fusion));
        rv.e_score = again.all_failed ? 0.0 : evidence_score(rv.reports);
        std::set<std::string> degraded(out.degraded_sources.begin(), out.degraded_sources.end());
        degraded.insert(again.degraded.begin(), again.degraded.end());
        out.degraded_sources.assign(degraded.begin(), degraded.end());

        if (rv.e_score < out.initial_e_score) {
            for (auto& c : out.corrections) c.rolled_back = true;
            for (auto& v : out.verdicts)
                if (v.gate != GateDecision::Pass) v.gate = GateDecision::RolledBack;
            out.annotation = fmt::format("low confidence: correction rolled back (evidence score {:.6g} -> {:.6g})",
                                         out.initial_e_score, rv.e_score);
        } else {
            out.final_text = std::move(corrected);
            out.e_score = rv.e_score;
        }
        out.reverification = std::move(rv);
        out.timings.reverify = ms_since(t0);
    }
    out.timings.total = ms_since(t_start);
    return out;
}

std::vector<SourceStatus> Pipeline::health() const {
    std::vector<SourceStatus> out;
    for (const auto& s : sources_) {
        SourceStatus st;
        st.source_id = s->profile().source_id;
        st.kind = s->profile().kind;
        try {
            const auto h = s->health();
            st.up = h.up;
            st.detail = h.detail;
        } catch (const std::exception& e) {
            st.up = false;
            st.detail = e.what();
        }
        out.push_back(std::move(st));
    }
    return out;
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double rank = std::ceil(std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(values.size()));
    const auto idx = static_cast<std::size_t>(std::max(1.0, rank)) - 1;
    return values[std::min(idx, values.size() - 1)];
}

}  // namespace factcheck
