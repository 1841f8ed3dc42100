// coordsketch CLI: synthetic datasets, coordinated sketches, estimates and
// Monte-Carlo experiment reports over the library.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "coordsketch/dataset.hpp"
#include "coordsketch/estimate_rc.hpp"
#include "coordsketch/experiment.hpp"
#include "coordsketch/io.hpp"
#include "coordsketch/sketch.hpp"

namespace {

constexpr int kExitInvalidInput = 2;
constexpr int kExitInapplicable = 3;

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output file " + path);
    return out;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open input file " + path);
    return in;
}

int run_gen(const std::string& spec_text, const std::string& weights, std::uint64_t seed,
            const std::string& output) {
    coordsketch::DatasetSpec spec = coordsketch::parse_dataset_spec(spec_text);
    spec.weights = weights;
    spec.seed = seed;
    const auto collection = coordsketch::gen_dataset(spec);
    auto out = open_output(output);
    coordsketch::write_collection(out, collection);
    return 0;
}

int run_sketch(const std::string& data_path, const std::string& family_name, int k,
               std::uint64_t seed, const std::vector<std::string>& sets,
               const std::string& output) {
    auto in = open_input(data_path);
    const auto collection = coordsketch::read_collection(in);
    const auto family = coordsketch::rank_family_from_string(family_name);
    auto sketches = coordsketch::build_coordinated(collection, family, seed, k);
    if (!sets.empty()) {
        std::map<coordsketch::SetId, coordsketch::BottomKSketch> selected;
        for (const auto& id : sets) {
            auto it = sketches.find(id);
            if (it == sketches.end()) throw std::invalid_argument("unknown set " + id);
            selected.emplace(*it);
        }
        sketches = std::move(selected);
    }
    auto out = open_output(output);
    coordsketch::write_sketches(out, sketches);
    return 0;
}

int run_estimate(const std::vector<std::string>& sketch_paths, const std::string& family_name,
                 const std::string& predicate_text, const std::string& combination) {
    const auto family = coordsketch::rank_family_from_string(family_name);
    std::map<coordsketch::SetId, coordsketch::BottomKSketch> sketches;
    for (const std::string& path : sketch_paths) {
        auto in = open_input(path);
        for (auto& [id, sketch] : coordsketch::read_sketches(in, family)) {
            if (!sketches.emplace(id, std::move(sketch)).second) {
                throw std::invalid_argument("duplicate sketch for set " + id);
            }
        }
    }
    const auto pred = coordsketch::Predicate::parse(predicate_text);

    coordsketch::EstimateResult result;
    if (combination == "auto") {
        result = coordsketch::estimate_weight(sketches, pred);
    } else {
        const auto kind = coordsketch::combination_kind_from_string(combination);
        try {
            result = coordsketch::estimate_weight_with(sketches, pred, kind);
        } catch (const std::invalid_argument& e) {
            const std::string what = e.what();
            if (what.find("not applicable") != std::string::npos) {
                std::cerr << "error: " << what << "\n";
                return kExitInapplicable;
            }
            throw;
        }
    }
    std::printf("estimate %.17g kind %s size %zu\n", result.estimate,
                coordsketch::to_string(result.kind), result.combination_size);
    return 0;
}

int run_oracle(const std::string& data_path, const std::string& predicate_text) {
    auto in = open_input(data_path);
    const auto collection = coordsketch::read_collection(in);
    const auto pred = coordsketch::Predicate::parse(predicate_text);
    std::printf("exact %.17g\n", coordsketch::oracle_weight(collection, pred));
    return 0;
}

int run_experiment_cmd(const std::string& config_path, const std::string& output_override) {
    auto cfg = coordsketch::ExperimentConfig::parse_file(config_path);
    if (!output_override.empty()) cfg.output = output_override;
    if (cfg.output.empty()) throw std::invalid_argument("config missing output path");
    const auto rows = coordsketch::run_experiment(cfg);
    auto out = open_output(cfg.output);
    coordsketch::write_result_csv(out, rows);
    std::cerr << "wrote " << rows.size() << " rows to " << cfg.output << "\n";
    return 0;
}

int run_summarize(const std::string& input, const std::string& output) {
    auto in = open_input(input);
    const auto rows = coordsketch::read_result_csv(in);
    const auto report = coordsketch::summarize(rows);
    auto out = open_output(output);
    coordsketch::write_report_csv(out, report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coordinated bottom-k sketches and multiple-set estimators"};
    app.require_subcommand(1);

    std::string spec_text, weights = "uniform", output, data_path, family = "pri";
    std::string predicate_text, combination = "auto", config_path, input_path;
    std::uint64_t seed = 1;
    int k = 64;
    std::vector<std::string> sets, sketch_paths;

    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
    gen->add_option("--spec", spec_text, "generator spec, e.g. pair(10000,2000)")->required();
    gen->add_option("--weights", weights, "uniform | pareto:<alpha>");
    gen->add_option("--seed", seed, "dataset seed");
    gen->add_option("-o,--output", output, "output file")->required();

    auto* sketch = app.add_subcommand("sketch", "build coordinated bottom-k sketches");
    sketch->add_option("--data", data_path, "collection file")->required();
    sketch->add_option("--family", family, "ws | pri");
    sketch->add_option("--k", k, "sketch size")->required();
    sketch->add_option("--seed", seed, "rank assignment seed");
    sketch->add_option("--sets", sets, "subset of sets to sketch")->delimiter(',');
    sketch->add_option("-o,--output", output, "output file")->required();

    auto* estimate = app.add_subcommand("estimate", "estimate a predicate weight from sketches");
    estimate->add_option("--sketches", sketch_paths, "sketch files")->required()->delimiter(',');
    estimate->add_option("--family", family, "ws | pri (rank family of the sketches)")->required();
    estimate->add_option("--pred", predicate_text, "selection predicate")->required();
    estimate->add_option("--combination", combination, "auto | union | scs | lcs");

    auto* oracle = app.add_subcommand("oracle", "exact predicate weight by full scan");
    oracle->add_option("--data", data_path, "collection file")->required();
    oracle->add_option("--pred", predicate_text, "selection predicate")->required();

    auto* experiment = app.add_subcommand("experiment", "run a Monte-Carlo experiment to CSV");
    experiment->add_option("--config", config_path, "config file (key = value lines)")->required();
    experiment->add_option("-o,--output", output, "override the config output path");

    auto* summarize_cmd = app.add_subcommand("summarize", "improvement-factor report from a result CSV");
    summarize_cmd->add_option("--input", input_path, "result CSV")->required();
    summarize_cmd->add_option("-o,--output", output, "report CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalidInput;
    }

    try {
        if (gen->parsed()) return run_gen(spec_text, weights, seed, output);
        if (sketch->parsed()) return run_sketch(data_path, family, k, seed, sets, output);
        if (estimate->parsed())
            return run_estimate(sketch_paths, family, predicate_text, combination);
        if (oracle->parsed()) return run_oracle(data_path, predicate_text);
        if (experiment->parsed()) return run_experiment_cmd(config_path, output);
        if (summarize_cmd->parsed()) return run_summarize(input_path, output);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
