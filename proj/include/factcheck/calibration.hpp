#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "factcheck/confidence.hpp"

namespace factcheck {

class EmptyInput : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct Prediction {
    double confidence = 0.0;
    bool correct = false;
};

struct ReliabilityBin {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
    double mean_confidence = 0.0;
    double accuracy = 0.0;

    double midpoint() const { return 0.5 * (lower + upper); }
};

struct CalibrationReport {
    std::vector<double> bin_edges;
    std::vector<ReliabilityBin> bins;
    std::size_t samples = 0;
    double ece = 0.0;
    std::optional<ConfidenceWeights> learned_weights;

    /// CSV with header "bin_mid,mean_conf,accuracy,count"; empty bins are
    /// omitted.
    void write_reliability_csv(std::ostream& out) const;
};

inline constexpr std::size_t kDefaultEceBins = 15;

/// Equal-width bins on [0,1]; every bin is [lo, hi) except the last, which
/// is closed. ECE = sum_b (n_b / N) |mean_conf_b - acc_b|.
/// Throws EmptyInput, or std::invalid_argument for bins == 0 or a confidence
/// outside [0,1].
CalibrationReport expected_calibration_error(std::span<const Prediction> predictions,
                                             std::size_t bins = kDefaultEceBins);

/// One validation row for weight learning.
struct ComponentSample {
    double intrinsic = 0.0;
    double external = 0.0;
    double coherence = 0.0;
    bool correct = false;
};

/// JSON-lines rows {intrinsic, external, coherence, correct}.
std::vector<ComponentSample> load_calibration_set(const std::filesystem::path& path);
std::vector<ComponentSample> parse_calibration_set(std::istream& in, std::string_view origin = "<stream>");

/// Grid points (i*step, j*step, 1 - i*step - j*step), lexicographic in
/// (alpha, beta). Throws std::invalid_argument unless 1/step is an integer.
std::vector<ConfidenceWeights> simplex_grid(double step);

struct WeightSearchOptions {
    double grid_step = 0.05;
    std::size_t bins = kDefaultEceBins;
    /// Threshold for the accuracy tie-break: a sample counts as predicted
    /// correct when its combined confidence exceeds tau.
    double tau = 0.7;
    /// Worker threads for grid evaluation; the result does not depend on it.
    unsigned threads = 1;
};

/// Exhaustive simplex search minimizing ECE. Ties (within 1e-12) go to the
/// higher accuracy at tau, then to the lexicographically smallest weights.
/// Throws EmptyInput.
ConfidenceWeights learn_weights(std::span<const ComponentSample> validation, const WeightSearchOptions& opts = {});

/// Full report for the learned weights.
CalibrationReport calibrate(std::span<const ComponentSample> validation, const WeightSearchOptions& opts = {});

/// Post-hoc temperature scaling of a probability: sigmoid(logit(p) / T).
double apply_temperature(double p, double temperature);

/// Temperature minimizing negative log-likelihood, by golden-section search
/// over log T in [ln 0.05, ln 20]. Throws EmptyInput.
double fit_temperature(std::span<const Prediction> predictions);

}  // namespace factcheck
