#include "factcheck/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>

#include <fmt/format.h>
#include <json.hpp>

#include "factcheck/text.hpp"

namespace factcheck {

void CalibrationReport::write_reliability_csv(std::ostream& out) const {
    out << "bin_mid,mean_conf,accuracy,count\n";
    for (const auto& b : bins) {
        if (b.count == 0) continue;
        out << fmt::format("{:.6g},{:.6g},{:.6g},{}\n", b.midpoint(), b.mean_confidence, b.accuracy, b.count);
    }
}

CalibrationReport expected_calibration_error(std::span<const Prediction> predictions, std::size_t bins) {
    if (predictions.empty()) throw EmptyInput("expected_calibration_error: no predictions");
    if (bins == 0) throw std::invalid_argument("expected_calibration_error: bins must be >= 1");

    CalibrationReport r;
    r.samples = predictions.size();
    const double width = 1.0 / static_cast<double>(bins);
    for (std::size_t b = 0; b <= bins; ++b) r.bin_edges.push_back(b == bins ? 1.0 : static_cast<double>(b) * width);

    std::vector<double> conf_sum(bins, 0.0), correct_sum(bins, 0.0);
    std::vector<std::size_t> count(bins, 0);
    for (const auto& p : predictions) {
        if (!(p.confidence >= 0.0 && p.confidence <= 1.0))
            throw std::invalid_argument(fmt::format("confidence {} outside [0,1]", p.confidence));
        auto b = static_cast<std::size_t>(p.confidence * static_cast<double>(bins));
        if (b >= bins) b = bins - 1;
        conf_sum[b] += p.confidence;
        correct_sum[b] += p.correct ? 1.0 : 0.0;
        ++count[b];
    }
    const double n = static_cast<double>(predictions.size());
    for (std::size_t b = 0; b < bins; ++b) {
        ReliabilityBin bin;
        bin.lower = r.bin_edges[b];
        bin.upper = r.bin_edges[b + 1];
        bin.count = count[b];
        if (count[b] > 0) {
            bin.mean_confidence = conf_sum[b] / static_cast<double>(count[b]);
            bin.accuracy = correct_sum[b] / static_cast<double>(count[b]);
            r.ece += (static_cast<double>(count[b]) / n) * std::abs(bin.mean_confidence - bin.accuracy);
        }
        r.bins.push_back(bin);
    }
    return r;
}

std::vector<ComponentSample> load_calibration_set(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(fmt::format("cannot open calibration set {}", path.string()));
    return parse_calibration_set(in, path.string());
}

std::vector<ComponentSample> parse_calibration_set(std::istream& in, std::string_view origin) {
    std::vector<ComponentSample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            ComponentSample s;
            s.intrinsic = j.at("intrinsic").get<double>();
            s.external = j.at("external").get<double>();
            s.coherence = j.at("coherence").get<double>();
            s.correct = j.at("correct").get<bool>();
            for (double v : {s.intrinsic, s.external, s.coherence})
                if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("component outside [0,1]");
            out.push_back(s);
        } catch (const std::exception& e) {
            throw std::runtime_error(fmt::format("{}:{}: {}", origin, lineno, e.what()));
        }
    }
    return out;
}

std::vector<ConfidenceWeights> simplex_grid(double step) {
    if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("grid step must be in (0,1]");
    const double inv = 1.0 / step;
    const long n = std::lround(inv);
    if (std::abs(inv - static_cast<double>(n)) > 1e-9) throw std::invalid_argument("grid step must divide 1");
    std::vector<ConfidenceWeights> grid;
    const double dn = static_cast<double>(n);
    for (long i = 0; i <= n; ++i)
        for (long j = 0; i + j <= n; ++j)
            grid.push_back({static_cast<double>(i) / dn, static_cast<double>(j) / dn, static_cast<double>(n - i - j) / dn});
    return grid;
}

namespace {

struct GridScore {
    double ece;
    double accuracy;
};

GridScore score_weights(std::span<const ComponentSample> data, const ConfidenceWeights& w, std::size_t bins,
                        double tau) {
    std::vector<Prediction> preds;
    preds.reserve(data.size());
    std::size_t hits = 0;
    for (const auto& s : data) {
        const double c = std::clamp(w.alpha * s.intrinsic + w.beta * s.external + w.gamma * s.coherence, 0.0, 1.0);
        preds.push_back({c, s.correct});
        if ((c > tau) == s.correct) ++hits;
    }
    return {expected_calibration_error(preds, bins).ece, static_cast<double>(hits) / static_cast<double>(data.size())};
}

}  // namespace

ConfidenceWeights learn_weights(std::span<const ComponentSample> validation, const WeightSearchOptions& opts) {
    if (validation.empty()) throw EmptyInput("learn_weights: empty validation set");
    const auto grid = simplex_grid(opts.grid_step);
    std::vector<GridScore> scores(grid.size());

    const unsigned threads = std::max(1u, opts.threads);
    if (threads == 1) {
        for (std::size_t g = 0; g < grid.size(); ++g) scores[g] = score_weights(validation, grid[g], opts.bins, opts.tau);
    } else {
        std::vector<std::future<void>> jobs;
        for (unsigned t = 0; t < threads; ++t) {
            jobs.push_back(std::async(std::launch::async, [&, t] {
                for (std::size_t g = t; g < grid.size(); g += threads)
                    scores[g] = score_weights(validation, grid[g], opts.bins, opts.tau);
            }));
        }
        for (auto& j : jobs) j.get();
    }

    // Grid is already lexicographic, so the first of equals wins.
    std::size_t best = 0;
    for (std::size_t g = 1; g < grid.size(); ++g) {
        const double d = scores[g].ece - scores[best].ece;
        if (d < -1e-12 || (std::abs(d) <= 1e-12 && scores[g].accuracy > scores[best].accuracy)) best = g;
    }
    return grid[best];
}

CalibrationReport calibrate(std::span<const ComponentSample> validation, const WeightSearchOptions& opts) {
    const auto w = learn_weights(validation, opts);
    std::vector<Prediction> preds;
    for (const auto& s : validation)
        preds.push_back({std::clamp(w.alpha * s.intrinsic + w.beta * s.external + w.gamma * s.coherence, 0.0, 1.0),
                         s.correct});
    auto report = expected_calibration_error(preds, opts.bins);
    report.learned_weights = w;
    return report;
}

double apply_temperature(double p, double temperature) {
    const double q = std::clamp(p, 1e-6, 1.0 - 1e-6);
    const double z = std::log(q / (1.0 - q)) / temperature;
    return 1.0 / (1.0 + std::exp(-z));
}

double fit_temperature(std::span<const Prediction> predictions) {
    if (predictions.empty()) throw EmptyInput("fit_temperature: no predictions");
    auto nll = [&](double log_t) {
        const double t = std::exp(log_t);
        double sum = 0.0;
        for (const auto& p : predictions) {
            const double q = std::clamp(apply_temperature(p.confidence, t), 1e-12, 1.0 - 1e-12);
            sum -= p.correct ? std::log(q) : std::log(1.0 - q);
        }
        return sum;
    };
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = std::log(0.05), hi = std::log(20.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = nll(x1), f2 = nll(x2);
    for (int it = 0; it < 100 && hi - lo > 1e-9; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = nll(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = nll(x2);
        }
    }
    return std::exp(0.5 * (lo + hi));
}

}  // namespace factcheck
