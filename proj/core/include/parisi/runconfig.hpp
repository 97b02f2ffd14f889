#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "parisi/functional.hpp"
#include "parisi/measure.hpp"
#include "parisi/model.hpp"
#include "parisi/paths.hpp"

namespace parisi {

using ordered_json = nlohmann::ordered_json;

struct GridConfig {
    std::optional<double> half_width;   // defaulted from the model when absent
    double spacing = 0.05;
    int quad_nodes = 21;
};

struct McConfig {
    std::uint64_t seed = 1;
    int paths = 4096;
    int steps = 256;
    int replications = 32;
    long leaf_budget = 1L << 20;
    std::vector<int> widths;   // explicit per-level widths override the budget
};

struct SdeConfig {
    double s = 0.0;
    double t = 1.0;
    std::vector<double> x;   // defaults to the origin
    int perturbations = 5;
    double shift = 0.25;
};

struct OptimizeJsonConfig {
    std::vector<double> q_grid{0.0, 0.25, 0.5, 0.75, 1.0};
    double tol_f = 1e-9;
    double tol_m = 1e-5;
    int max_iters = 200;
    double fd_step = 1e-3;
    int starts = 1;
};

struct PottsJsonConfig {
    int dim = 2;
    std::vector<std::pair<int, double>> betas{{2, 1.0}};
    std::string experiment_case = "auto";   // auto | quadratic | mixed
    int pairs = 5;
    int x_samples = 100;
    bool run_pde_checks = true;
};

/// Parsed run description. The command decides which blocks are consulted.
struct RunConfig {
    std::string command;
    std::optional<MixtureModel> model;
    std::optional<MatrixPath> psi;
    std::optional<DiscreteCdf> alpha;
    std::optional<BaseMeasure> base;
    std::vector<double> eval_point;   // x for eval-phi; defaults to origin
    GridConfig grid;
    McConfig mc;
    SdeConfig sde;
    OptimizeJsonConfig optimize;
    PottsJsonConfig potts;
    std::uint64_t verify_seed = 7;
};

RunConfig parse_config(const ordered_json& j);
ordered_json config_to_json(const RunConfig& cfg);

ordered_json symmat_to_json(const SymMat& m);
SymMat symmat_from_json(const ordered_json& j);

struct CliOptions {
    std::string format = "json";   // json | csv
    std::string output_dir;
    int threads = 0;
    std::optional<std::uint64_t> seed;   // overrides mc.seed / verify seed
    bool no_meta = false;
};

/// Dispatches the configured command, writing the report to `out` and a
/// machine-readable error object to `err` on failure.
/// Returns 0 on success, 1 on validation failure, 2 on numerical failure.
int run_command(const RunConfig& cfg, const CliOptions& opt, std::ostream& out,
                std::ostream& err);

} // namespace parisi
