#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tlink/pipeline.hpp"

namespace {

struct Invocation {
    std::string config_path;
    std::vector<std::string> overrides;
};

void print_keys() {
    for (const auto& k : tlink::kConfigKeys) {
        std::cout << k.name << " = " << (k.default_value.empty() ? "\"\"" : k.default_value) << "\n    " << k.help
                  << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Temporal link prediction pipeline: synth, ingest, split, features, train, predict, blend, eval"};
    app.require_subcommand(0, 1);
    bool list_keys = false;
    app.add_flag("--list-keys", list_keys, "Print every config key with its default and exit");

    Invocation inv;
    const std::vector<std::pair<const char*, const char*>> commands{
        {"synth", "Generate a preferential-attachment temporal edge list"},
        {"ingest", "Validate an edge list; optionally export it and its decayed adjacency"},
        {"split", "Build a labeled candidate-pair split (all positives + uniform negatives)"},
        {"features", "Compute the 41-column feature matrix for a split"},
        {"train", "Train the gradient-boosted tree model"},
        {"predict", "Score a feature matrix with a trained model"},
        {"blend", "Power-transform weighted average of score files"},
        {"eval", "AUC and logloss of a score file against a split"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", inv.config_path,
                        "Key-value config file (default: $" + std::string(tlink::kConfigEnvVar) + ")");
        sub->add_option("overrides", inv.overrides, "key=value overrides, applied after the config file");
    }

    CLI11_PARSE(app, argc, argv);

    if (list_keys) {
        print_keys();
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return 2;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    tlink::PipelineConfig cfg;
    try {
        cfg = tlink::make_config(inv.config_path, inv.overrides);
    } catch (const std::exception& e) {
        std::cerr << "tlink " << name << ": " << e.what() << '\n';
        return 2;
    }
    return tlink::run_subcommand(name, cfg, std::cout, std::cerr);
}
