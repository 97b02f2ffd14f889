#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "parisi/errors.hpp"
#include "parisi/runconfig.hpp"

namespace {

int fail_validation(const std::string& msg) {
    std::cerr << parisi::ordered_json{{"error", {{"type", "validation"}, {"message", msg}}}}.dump()
              << "\n";
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evaluate and minimize the vector-spin Parisi functional"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    std::string format = "json";
    int threads = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool no_meta = false;

    const std::vector<std::string> commands{"eval-phi",  "eval-functional", "minimize",
                                            "sde-check", "potts",           "verify"};
    // potts-specific overrides
    int potts_dim = 0;
    std::string potts_betas;
    std::string potts_case;

    for (const std::string& name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--output", output_dir, "directory for report artifacts");
        sub->add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--threads", threads, "worker threads (0 = hardware)");
        sub->add_option("--seed", seed, "override the configured seed")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_flag("--no-meta", no_meta, "omit timestamps from reports");
        if (name == "potts") {
            sub->add_option("--dim", potts_dim, "number of states");
            sub->add_option("--betas", potts_betas, "mixture, e.g. '2:1.0,3:0.5'");
            sub->add_option("--case", potts_case, "auto|quadratic|mixed");
        }
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    parisi::ordered_json j;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) return fail_validation("cannot open config file '" + config_path + "'");
        try {
            in >> j;
        } catch (const std::exception& e) {
            return fail_validation(std::string("config parse error: ") + e.what());
        }
    } else if (command != "verify" && command != "potts") {
        return fail_validation("--config is required for " + command);
    }
    j["command"] = command;

    parisi::RunConfig cfg;
    try {
        cfg = parisi::parse_config(j);
        if (command == "potts") {
            if (potts_dim > 0) cfg.potts.dim = potts_dim;
            if (!potts_case.empty()) cfg.potts.experiment_case = potts_case;
            if (!potts_betas.empty()) {
                std::vector<std::pair<int, double>> betas;
                std::stringstream ss(potts_betas);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    const auto colon = item.find(':');
                    if (colon == std::string::npos)
                        throw parisi::ValidationError("--betas expects 'p:beta' pairs");
                    betas.emplace_back(std::stoi(item.substr(0, colon)),
                                       std::stod(item.substr(colon + 1)));
                }
                cfg.potts.betas = std::move(betas);
            }
        }
    } catch (const std::exception& e) {
        return fail_validation(e.what());
    }

    parisi::CliOptions opt;
    opt.format = format;
    opt.output_dir = output_dir;
    opt.threads = threads;
    if (seed_set) opt.seed = seed;
    opt.no_meta = no_meta;

    return parisi::run_command(cfg, opt, std::cout, std::cerr);
}
