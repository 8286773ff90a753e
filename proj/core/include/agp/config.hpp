#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agp/common.hpp"
#include "agp/kernel.hpp"
#include "agp/loop.hpp"
#include "agp/objective.hpp"

namespace agp {

/// Invalid configuration; the message starts with the offending field path.
class ConfigError : public InputError {
public:
    ConfigError(const std::string& path, const std::string& what)
        : InputError(path + ": " + what), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

enum class GpMode { Separable, Joint };

/// How the simulated users are generated.
struct UserTruthConfig {
    /// "lognormal": U_i(d) = exp(-log(d)²/ξ_i²)/(ξ_i d). "sample_path": GP draws on a lattice.
    std::string kind = "lognormal";
    std::vector<double> xi{0.6, 0.7};
    /// Lattice nodes per axis for sample-path users.
    std::size_t grid_resolution = 51;
};

struct ExperimentConfig {
    std::size_t m = 2;  // decision dimension (one coordinate per user when separable)
    std::size_t T = 2000;
    std::size_t runs = 25;
    std::uint64_t seed = 1;
    std::size_t workers = 0;  // 0: one per hardware thread

    double delta = 0.1;
    double alpha = 0.1;
    std::size_t ns_steps = 1;
    double noise_std = 0.1;
    double sampling_period = 0.1;  // h, seconds per tick

    double omega = 0.0;
    TrajectoryKind trajectory = TrajectoryKind::Periodic;
    std::optional<Matrix> q;  // default: TimeVaryingQuadratic::default_q(m)
    double gamma = 1.0;

    KernelSpec kernel;
    double a = 1.1;
    double b = 2.0;
    double r = 1.0;  // D = [0, r]^m

    FeedbackSchedule schedule;
    Algorithm algorithm = Algorithm::AgpUcb;
    GpMode gp_mode = GpMode::Separable;
    UserTruthConfig users;
    std::vector<double> synthetic_xi{0.9, 0.9};

    std::size_t oracle_grid = 501;
    std::size_t oracle_polish = 50;

    std::string output_dir = "out";
    std::vector<std::size_t> gp_dump_steps;
    std::size_t gp_dump_grid = 101;
    bool track_learning_rate = false;
    std::size_t probe_points = 51;

    Matrix q_matrix() const;
    /// Throws ConfigError naming the first invalid field.
    void validate() const;
};

/// JSON text <-> config. Missing fields keep their defaults; unknown fields are rejected.
ExperimentConfig parse_config(const std::string& json_text);
std::string dump_config(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

std::string_view to_string(GpMode mode);
GpMode gp_mode_from_string(std::string_view name);

}  // namespace agp
