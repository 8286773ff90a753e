#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "agp/experiment.hpp"
#include "agp/ucb.hpp"

namespace {

using agp::ExperimentConfig;
using agp::format_double;

/// Flags shared by every subcommand that reads an experiment config.
struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> runs;
    std::optional<std::size_t> T;
    std::optional<std::size_t> workers;
    std::optional<double> omega;
    std::optional<std::string> schedule;
    std::optional<std::string> algorithm;
    std::optional<std::string> trajectory;
    std::string out;

    void attach(CLI::App* app, bool with_out) {
        app->add_option("--config", config, "JSON experiment config; flags override its values")
            ->check(CLI::ExistingFile);
        app->add_option("--seed", seed, "Base seed; run i uses seed + i");
        app->add_option("--runs", runs, "Number of independent runs");
        app->add_option("-T,--steps", T, "Time steps per run");
        app->add_option("--workers", workers, "Worker threads (0: hardware concurrency)");
        app->add_option("--omega", omega, "Angular frequency of the engineering target");
        app->add_option("--schedule", schedule, "every_step | every_q(Q) | bernoulli(P)");
        app->add_option("--algorithm", algorithm, "agp_ucb | synthetic | zero2 | zero4");
        app->add_option("--trajectory", trajectory, "Target trajectory kind");
        if (with_out) app->add_option("--out", out, "Output directory");
    }

    ExperimentConfig resolve() const {
        ExperimentConfig cfg;
        if (!config.empty()) cfg = agp::load_config(config);
        if (seed) cfg.seed = *seed;
        if (runs) cfg.runs = *runs;
        if (T) cfg.T = *T;
        if (workers) cfg.workers = *workers;
        if (omega) cfg.omega = *omega;
        if (schedule) cfg.schedule = agp::FeedbackSchedule::parse(*schedule);
        if (algorithm) cfg.algorithm = agp::algorithm_from_string(*algorithm);
        if (trajectory) cfg.trajectory = agp::trajectory_kind_from_string(*trajectory);
        if (!out.empty()) cfg.output_dir = out;
        cfg.validate();
        return cfg;
    }
};

void print_paths(const std::vector<std::string>& paths) {
    for (const auto& p : paths) std::cout << p << '\n';
}

/// Opens `path` for writing, or returns stdout when it is empty.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (path.empty()) return;
        const auto parent = std::filesystem::path(path).parent_path();
        if (!parent.empty()) std::filesystem::create_directories(parent);
        file_.open(path, std::ios::binary);
        if (!file_) throw agp::InputError("cannot write '" + path + "'");
    }
    std::ostream& out() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

void write_bound_rows(std::ostream& out, const std::vector<agp::BoundRow>& rows) {
    out << "T,gamma_T,beta_T,bound\n";
    for (const auto& r : rows) {
        out << r.T << ',' << format_double(r.gamma_T) << ',' << format_double(r.beta_T) << ','
            << format_double(r.terms.total) << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AGP-UCB simulator: online optimization with concurrent GP learning of user utility"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    auto* run = app.add_subcommand("run", "Run seeded replicates and write CSV artifacts");
    run_flags.attach(run, true);

    CommonFlags sweep_flags;
    std::vector<double> sweep_omegas{0.0, 0.2, 0.4};
    std::vector<std::string> sweep_schedules{"every_step", "every_q(4)"};
    auto* sweep = app.add_subcommand("sweep", "Cartesian sweep over omega and feedback schedule");
    sweep_flags.attach(sweep, true);
    sweep->add_option("--omegas", sweep_omegas, "Omega values")->delimiter(',');
    sweep->add_option("--schedules", sweep_schedules, "Feedback schedules")->delimiter(',');

    CommonFlags bound_flags;
    std::vector<std::size_t> bound_Ts{100, 500, 1000, 2000};
    std::optional<double> bound_eta;
    std::string bound_file;
    auto* bounds = app.add_subcommand("bounds", "Theoretical regret bound as CSV (T, gamma_T, beta_T, bound)");
    bound_flags.attach(bounds, false);
    bounds->add_option("--horizons", bound_Ts, "Horizons T")->delimiter(',');
    bounds->add_option("--eta", bound_eta, "Solver contraction factor; estimated when omitted")
        ->check(CLI::Range(0.0, 1.0));
    bounds->add_option("--file", bound_file, "Write CSV here instead of stdout");

    CommonFlags gain_flags;
    std::optional<double> gain_eta;
    std::string gain_file;
    auto* gain = app.add_subcommand("info-gain", "Greedy information gain for T = 1..steps as CSV");
    gain_flags.attach(gain, false);
    gain->add_option("--eta", gain_eta, "Solver contraction factor; estimated when omitted")
        ->check(CLI::Range(0.0, 1.0));
    gain->add_option("--file", gain_file, "Write CSV here instead of stdout");

    double ab_length = 1.0, ab_variance = 1.0, ab_epsilon = 1.0, ab_r = 1.0;
    std::size_t ab_paths = 2000, ab_grid = 201, ab_dim = 1;
    std::uint64_t ab_seed = 1;
    std::string ab_format = "csv", ab_file;
    auto* ab = app.add_subcommand("estimate-ab", "Empirical derivative tail constants a and b");
    ab->add_option("--length-scale", ab_length)->check(CLI::PositiveNumber);
    ab->add_option("--output-variance", ab_variance)->check(CLI::PositiveNumber);
    ab->add_option("--epsilon", ab_epsilon)->check(CLI::PositiveNumber);
    ab->add_option("--r", ab_r, "Domain side")->check(CLI::PositiveNumber);
    ab->add_option("--dim", ab_dim)->check(CLI::Range(1, 2));
    ab->add_option("--paths", ab_paths);
    ab->add_option("--grid", ab_grid, "Lattice nodes per axis");
    ab->add_option("--seed", ab_seed);
    ab->add_option("--format", ab_format)->check(CLI::IsMember({"csv", "json"}));
    ab->add_option("--file", ab_file, "Write output here instead of stdout");

    CommonFlags dump_flags;
    std::vector<std::size_t> dump_steps{25, 100, 400};
    std::optional<std::size_t> dump_grid;
    auto* dump = app.add_subcommand("gp-dump", "Posterior mean and 1-sigma band on a grid at checkpoints");
    dump_flags.attach(dump, true);
    dump->add_option("--checkpoints", dump_steps, "Steps k at which to dump")->delimiter(',');
    dump->add_option("--grid", dump_grid, "Grid nodes per axis");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const auto cfg = run_flags.resolve();
            const auto result = agp::run_experiment(cfg);
            print_paths(agp::write_artifacts(result, cfg.output_dir));
        } else if (*sweep) {
            const auto cfg = sweep_flags.resolve();
            std::vector<agp::FeedbackSchedule> schedules;
            for (const auto& s : sweep_schedules) schedules.push_back(agp::FeedbackSchedule::parse(s));
            agp::sweep(cfg, sweep_omegas, schedules, cfg.output_dir);
            std::cout << (std::filesystem::path(cfg.output_dir) / "manifest.json").string() << '\n';
        } else if (*bounds) {
            const auto cfg = bound_flags.resolve();
            const double eta = bound_eta ? *bound_eta : agp::estimate_eta(cfg);
            Sink sink(bound_file);
            write_bound_rows(sink.out(), agp::bound_curve(cfg, bound_Ts, eta));
        } else if (*gain) {
            const auto cfg = gain_flags.resolve();
            const double eta = gain_eta ? *gain_eta : agp::estimate_eta(cfg);
            std::vector<std::size_t> Ts(cfg.T);
            for (std::size_t i = 0; i < cfg.T; ++i) Ts[i] = i + 1;
            Sink sink(gain_file);
            write_bound_rows(sink.out(), agp::bound_curve(cfg, Ts, eta));
        } else if (*ab) {
            const agp::KernelSpec kernel(ab_length, ab_variance);
            const auto est = agp::estimate_ab(kernel, agp::BoxDomain::unit(ab_dim, ab_r), ab_epsilon, ab_paths,
                                              ab_grid, ab_seed);
            Sink sink(ab_file);
            auto& out = sink.out();
            if (ab_format == "json") {
                nlohmann::json j{{"a", est.a}, {"b", est.b}, {"table", nlohmann::json::array()}};
                for (const auto& row : est.table) {
                    j["table"].push_back({{"coordinate", row.coordinate},
                                          {"level", row.level},
                                          {"frequency", row.frequency},
                                          {"ratio", row.ratio}});
                }
                out << j.dump(2) << '\n';
            } else {
                out << "# a=" << format_double(est.a) << " b=" << format_double(est.b) << '\n';
                out << "coordinate,level,frequency,ratio\n";
                for (const auto& row : est.table) {
                    out << row.coordinate << ',' << format_double(row.level) << ','
                        << format_double(row.frequency) << ',' << format_double(row.ratio) << '\n';
                }
            }
        } else if (*dump) {
            auto cfg = dump_flags.resolve();
            if (dump_steps.empty()) throw agp::InputError("gp-dump: no checkpoints given");
            cfg.gp_dump_steps = dump_steps;
            if (dump_grid) cfg.gp_dump_grid = *dump_grid;
            cfg.runs = 1;
            if (!dump_flags.T) cfg.T = *std::max_element(dump_steps.begin(), dump_steps.end());
            cfg.validate();
            const auto result = agp::run_experiment(cfg);
            print_paths(agp::write_artifacts(result, cfg.output_dir));
        }
    } catch (const agp::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
