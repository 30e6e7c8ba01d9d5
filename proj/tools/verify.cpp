// verify: command-line front end for the fact-verification middleware.

#include <csignal>
#include <fstream>
#include <iostream>
#include <pthread.h>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "factcheck/batch.hpp"
#include "factcheck/calibration.hpp"
#include "factcheck/config.hpp"
#include "factcheck/corpus_generator.hpp"
#include "factcheck/eval.hpp"
#include "factcheck/mock_search_server.hpp"
#include "factcheck/service.hpp"

using namespace factcheck;

namespace {

// Blocks SIGINT/SIGTERM in every thread, then waits for one.
struct SignalWaiter {
    sigset_t set;
    SignalWaiter() {
        sigemptyset(&set);
        sigaddset(&set, SIGINT);
        sigaddset(&set, SIGTERM);
        pthread_sigmask(SIG_BLOCK, &set, nullptr);
    }
    int wait() {
        int sig = 0;
        sigwait(&set, &sig);
        return sig;
    }
};

std::shared_ptr<Runtime> load_runtime(const std::string& path) { return Runtime::build(load_config(path)); }

int cmd_serve(const std::string& config_path, const std::string& bind_override) {
    SignalWaiter signals;
    auto runtime = load_runtime(config_path);
    const auto [host, port] = parse_bind_address(bind_override.empty() ? runtime->config().bind : bind_override);
    VerificationService service(runtime, [config_path] { return load_runtime(config_path); });
    const int bound = service.start(host, port);
    std::cerr << fmt::format("listening on {}:{}\n", host, bound);
    const int sig = signals.wait();
    std::cerr << fmt::format("signal {}, draining in-flight requests\n", sig);
    service.stop();
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& input, const std::string& output, bool diagnostics) {
    auto runtime = load_runtime(config_path);
    const auto summary = run_batch(*runtime->pipeline(), input, output, diagnostics);
    for (const auto& e : summary.error_lines) std::cerr << input << ": " << e << '\n';
    std::cout << to_json(summary).dump(2) << '\n';
    return summary.errors == 0 ? 0 : 1;
}

int cmd_calibrate(const std::string& val, double step, std::size_t bins, double tau, const std::string& csv,
                  bool temperature) {
    const auto data = load_calibration_set(val);
    WeightSearchOptions opts;
    opts.grid_step = step;
    opts.bins = bins;
    opts.tau = tau;
    opts.threads = std::max(1u, std::thread::hardware_concurrency());
    const auto report = calibrate(data, opts);
    const auto& w = *report.learned_weights;
    ojson j;
    j["samples"] = report.samples;
    j["weights"] = {{"alpha", w.alpha}, {"beta", w.beta}, {"gamma", w.gamma}};
    j["ece"] = report.ece;
    if (temperature) {
        std::vector<Prediction> preds;
        for (const auto& s : data)
            preds.push_back({w.alpha * s.intrinsic + w.beta * s.external + w.gamma * s.coherence, s.correct});
        j["temperature"] = fit_temperature(preds);
    }
    std::cout << j.dump(2) << '\n';
    if (!csv.empty()) {
        std::ofstream out(csv);
        if (!out) throw std::runtime_error(fmt::format("cannot write {}", csv));
        report.write_reliability_csv(out);
    }
    return 0;
}

int cmd_ablate(const std::string& config_path, const std::string& corpus_path, const std::vector<std::string>& subsets,
               const std::string& csv, const std::string& json_out) {
    auto runtime = load_runtime(config_path);
    const auto corpus = load_corpus(corpus_path);
    const auto rows = ablate(*runtime, corpus, subsets);
    std::ofstream file;
    if (!csv.empty()) {
        file.open(csv);
        if (!file) throw std::runtime_error(fmt::format("cannot write {}", csv));
    }
    write_ablation_csv(csv.empty() ? std::cout : file, rows);
    if (!json_out.empty()) {
        std::ofstream out(json_out);
        ojson arr = ojson::array();
        for (const auto& r : rows) arr.push_back(to_json(r));
        out << arr.dump(2) << '\n';
    }
    return 0;
}

int cmd_eval(const std::string& config_path, const std::string& corpus_path, const std::string& csv) {
    auto runtime = load_runtime(config_path);
    const auto corpus = load_corpus(corpus_path);
    const auto report = evaluate(*runtime->pipeline(), corpus);
    std::cout << to_json(report).dump(2) << '\n';
    if (!csv.empty() && report.calibration) {
        std::ofstream out(csv);
        report.calibration->write_reliability_csv(out);
    }
    return 0;
}

int cmd_mock(const std::string& fixture, int port) {
    SignalWaiter signals;
    auto server = MockSearchServer::from_file(fixture);
    server.start("127.0.0.1", port);
    std::cerr << "mock search at " << server.url() << '\n';
    signals.wait();
    server.stop();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Real-time fact verification middleware"};
    app.require_subcommand(1);

    std::string config, bind, input, output, val, csv, json_out, corpus, fixture, out_dir;
    bool diagnostics = false, temperature = false;
    double step = 0.05, tau = 0.7, rate = 0.5, staleness = 0.0;
    std::size_t bins = kDefaultEceBins, examples = 200;
    std::uint64_t seed = 7;
    int port = 8089;
    std::vector<std::string> subsets;

    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
    serve->add_option("--bind", bind, "host:port (overrides service.bind)");

    auto* run = app.add_subcommand("run", "Verify a JSON-lines file");
    run->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
    run->add_option("--input", input, "Input JSON lines")->required()->check(CLI::ExistingFile);
    run->add_option("--output", output, "Output JSON lines")->required();
    run->add_flag("--timings", diagnostics, "Include timings and other run-dependent fields");

    auto* cal = app.add_subcommand("calibrate", "Learn confidence weights on a validation set");
    cal->add_option("--val", val, "Validation JSON lines")->required()->check(CLI::ExistingFile);
    cal->add_option("--grid-step", step, "Simplex grid step")->capture_default_str();
    cal->add_option("--bins", bins, "ECE bins")->capture_default_str();
    cal->add_option("--tau", tau, "Gate threshold for the accuracy tie-break")->capture_default_str();
    cal->add_option("--reliability-csv", csv, "Write the reliability diagram here");
    cal->add_flag("--temperature", temperature, "Also fit a temperature");

    auto* abl = app.add_subcommand("ablate", "Evaluate source subsets");
    abl->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
    abl->add_option("--corpus", corpus, "Labeled JSON lines")->required()->check(CLI::ExistingFile);
    abl->add_option("--subsets", subsets, "Subsets such as kg, kg+web, all")->required()->delimiter(',');
    abl->add_option("--csv", csv, "Write the table here instead of stdout");
    abl->add_option("--json", json_out, "Also write full reports as JSON");

    auto* ev = app.add_subcommand("eval", "Evaluate the configured pipeline");
    ev->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
    ev->add_option("--corpus", corpus, "Labeled JSON lines")->required()->check(CLI::ExistingFile);
    ev->add_option("--reliability-csv", csv, "Write the reliability diagram here");

    auto* gen = app.add_subcommand("generate", "Write a synthetic evaluation world");
    gen->add_option("--out", out_dir, "Output directory")->required();
    gen->add_option("--seed", seed)->capture_default_str();
    gen->add_option("--examples", examples)->capture_default_str();
    gen->add_option("--hallucination-rate", rate)->capture_default_str();
    gen->add_option("--staleness", staleness)->capture_default_str();

    auto* mock = app.add_subcommand("mock-server", "Serve a search fixture over HTTP");
    mock->add_option("--fixture", fixture)->required()->check(CLI::ExistingFile);
    mock->add_option("--port", port)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve) return cmd_serve(config, bind);
        if (*run) return cmd_run(config, input, output, diagnostics);
        if (*cal) return cmd_calibrate(val, step, bins, tau, csv, temperature);
        if (*abl) return cmd_ablate(config, corpus, subsets, csv, json_out);
        if (*ev) return cmd_eval(config, corpus, csv);
        if (*gen) {
            GeneratorOptions o;
            o.seed = seed;
            o.examples = examples;
            o.hallucination_rate = rate;
            o.staleness = staleness;
            const auto files = generate_corpus(o, out_dir);
            std::cout << fmt::format("wrote {} examples ({} with injected errors) to {}\n", files.examples,
                                     files.injected_errors, out_dir);
            return 0;
        }
        if (*mock) return cmd_mock(fixture, port);
    } catch (const ConfigInvalid& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const BindFailure& e) {
        std::cerr << "bind error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
