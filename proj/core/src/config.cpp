#include "agp/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

namespace agp {

using json = nlohmann::json;

std::string_view to_string(GpMode mode) {
    return mode == GpMode::Separable ? "separable" : "joint";
}

GpMode gp_mode_from_string(std::string_view name) {
    if (name == "separable") return GpMode::Separable;
    if (name == "joint") return GpMode::Joint;
    throw InputError("unknown gp mode '" + std::string(name) + "'");
}

Matrix ExperimentConfig::q_matrix() const { return q ? *q : TimeVaryingQuadratic::default_q(m); }

namespace {

void require(bool ok, const std::string& path, const std::string& what) {
    if (!ok) throw ConfigError(path, what);
}

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

void ExperimentConfig::validate() const {
    require(m >= 1, "config.m", "must be >= 1");
    require(T >= 1, "config.T", "must be >= 1");
    require(runs >= 1, "config.runs", "must be >= 1");
    require(delta > 0.0 && delta < 1.0, "config.delta", "must lie in (0, 1)");
    require(positive(alpha), "config.alpha", "must be positive");
    require(ns_steps >= 1, "config.ns_steps", "must be >= 1");
    require(positive(noise_std), "config.noise_std", "must be positive");
    require(positive(sampling_period), "config.sampling_period", "must be positive");
    require(std::isfinite(omega), "config.omega", "must be finite");
    require(positive(gamma), "config.gamma", "must be positive");
    require(positive(a), "config.a", "must be positive");
    require(positive(b), "config.b", "must be positive");
    require(positive(r), "config.r", "must be positive");

    const Matrix Q = q_matrix();
    const auto me = static_cast<Eigen::Index>(m);
    require(Q.rows() == me && Q.cols() == me, "config.q_matrix", "must be m x m");
    require(Q.isApprox(Q.transpose(), 1e-12), "config.q_matrix", "must be symmetric");
    require(Eigen::SelfAdjointEigenSolver<Matrix>(Q).eigenvalues().minCoeff() > 0.0, "config.q_matrix",
            "must be positive definite");

    require(users.kind == "lognormal" || users.kind == "sample_path", "config.users.kind",
            "must be 'lognormal' or 'sample_path'");
    if (users.kind == "lognormal") {
        require(users.xi.size() == m, "config.users.xi", "needs one entry per decision coordinate");
        for (double v : users.xi) require(positive(v), "config.users.xi", "entries must be positive");
    }
    require(users.grid_resolution >= 2, "config.users.grid_resolution", "must be >= 2");
    if (gp_mode == GpMode::Joint) require(m <= 2, "config.gp_mode", "joint mode supports m <= 2");

    if (algorithm == Algorithm::Synthetic) {
        require(gp_mode == GpMode::Separable, "config.algorithm", "synthetic baseline needs separable users");
        require(synthetic_xi.size() == m, "config.synthetic_xi", "needs one entry per user");
        for (double v : synthetic_xi) require(positive(v), "config.synthetic_xi", "entries must be positive");
    }
    if (algorithm == Algorithm::Zero2 || algorithm == Algorithm::Zero4) {
        require(gp_mode == GpMode::Separable, "config.algorithm", "zeroth-order baselines need separable users");
        require(schedule.mode() == FeedbackSchedule::Mode::EveryStep, "config.schedule",
                "zeroth-order baselines require feedback on every step");
    }
    require(oracle_grid >= 2, "config.oracle.grid", "must be >= 2");
    require(gp_dump_grid >= 2, "config.gp_dump.grid", "must be >= 2");
    require(probe_points >= 2, "config.probe_points", "must be >= 2");
    for (auto k : gp_dump_steps) require(k >= 1, "config.gp_dump.steps", "checkpoints must be >= 1");
}

namespace {

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_, "must be an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(child(key), std::string("wrong type (") + e.what() + ")");
        }
    }

    const json* object(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    std::string child(const char* key) const { return path_ + "." + key; }

    void reject_unknown() const {
        for (const auto& item : j_.items()) {
            if (!seen_.count(item.key())) throw ConfigError(child(item.key().c_str()), "unknown field");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class F>
auto converting(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const InputError& e) {
        throw ConfigError(path, e.what());
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    Reader r(root, "config");
    r.get("m", cfg.m);
    r.get("T", cfg.T);
    r.get("runs", cfg.runs);
    r.get("seed", cfg.seed);
    r.get("workers", cfg.workers);
    r.get("delta", cfg.delta);
    r.get("alpha", cfg.alpha);
    r.get("ns_steps", cfg.ns_steps);
    r.get("noise_std", cfg.noise_std);
    r.get("sampling_period", cfg.sampling_period);
    r.get("omega", cfg.omega);
    r.get("gamma", cfg.gamma);
    r.get("a", cfg.a);
    r.get("b", cfg.b);
    r.get("r", cfg.r);
    r.get("synthetic_xi", cfg.synthetic_xi);
    r.get("output_dir", cfg.output_dir);
    r.get("track_learning_rate", cfg.track_learning_rate);
    r.get("probe_points", cfg.probe_points);

    std::string text;
    if (r.object("trajectory")) {
        r.get("trajectory", text);
        cfg.trajectory = converting(r.child("trajectory"), [&] { return trajectory_kind_from_string(text); });
    }
    if (r.object("schedule")) {
        r.get("schedule", text);
        cfg.schedule = converting(r.child("schedule"), [&] { return FeedbackSchedule::parse(text); });
    }
    if (r.object("algorithm")) {
        r.get("algorithm", text);
        cfg.algorithm = converting(r.child("algorithm"), [&] { return algorithm_from_string(text); });
    }
    if (r.object("gp_mode")) {
        r.get("gp_mode", text);
        cfg.gp_mode = converting(r.child("gp_mode"), [&] { return gp_mode_from_string(text); });
    }
    if (r.object("q_matrix")) {
        std::vector<std::vector<double>> rows;
        r.get("q_matrix", rows);
        Matrix Q(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows[0].size()) throw ConfigError(r.child("q_matrix"), "rows differ in length");
            for (std::size_t j = 0; j < rows[i].size(); ++j) {
                Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
            }
        }
        cfg.q = Q;
    }
    if (const json* k = r.object("kernel")) {
        Reader kr(*k, r.child("kernel"));
        std::string family = std::string(to_string(cfg.kernel.family()));
        double ls = cfg.kernel.length_scale(), ov = cfg.kernel.output_variance();
        kr.get("family", family);
        kr.get("length_scale", ls);
        kr.get("output_variance", ov);
        kr.reject_unknown();
        cfg.kernel = converting(r.child("kernel"), [&] {
            return KernelSpec(ls, ov, kernel_family_from_string(family));
        });
    }
    if (const json* u = r.object("users")) {
        Reader ur(*u, r.child("users"));
        ur.get("kind", cfg.users.kind);
        ur.get("xi", cfg.users.xi);
        ur.get("grid_resolution", cfg.users.grid_resolution);
        ur.reject_unknown();
    }
    if (const json* o = r.object("oracle")) {
        Reader orr(*o, r.child("oracle"));
        orr.get("grid", cfg.oracle_grid);
        orr.get("polish", cfg.oracle_polish);
        orr.reject_unknown();
    }
    if (const json* g = r.object("gp_dump")) {
        Reader gr(*g, r.child("gp_dump"));
        gr.get("steps", cfg.gp_dump_steps);
        gr.get("grid", cfg.gp_dump_grid);
        gr.reject_unknown();
    }
    r.reject_unknown();
    cfg.validate();
    return cfg;
}

std::string dump_config(const ExperimentConfig& cfg) {
    json j;
    j["m"] = cfg.m;
    j["T"] = cfg.T;
    j["runs"] = cfg.runs;
    j["seed"] = cfg.seed;
    j["workers"] = cfg.workers;
    j["delta"] = cfg.delta;
    j["alpha"] = cfg.alpha;
    j["ns_steps"] = cfg.ns_steps;
    j["noise_std"] = cfg.noise_std;
    j["sampling_period"] = cfg.sampling_period;
    j["omega"] = cfg.omega;
    j["trajectory"] = std::string(to_string(cfg.trajectory));
    if (cfg.q) {
        std::vector<std::vector<double>> rows;
        for (Eigen::Index i = 0; i < cfg.q->rows(); ++i) {
            rows.emplace_back(cfg.q->cols());
            for (Eigen::Index k = 0; k < cfg.q->cols(); ++k) rows.back()[static_cast<std::size_t>(k)] = (*cfg.q)(i, k);
        }
        j["q_matrix"] = rows;
    }
    j["gamma"] = cfg.gamma;
    j["kernel"] = {{"family", std::string(to_string(cfg.kernel.family()))},
                   {"length_scale", cfg.kernel.length_scale()},
                   {"output_variance", cfg.kernel.output_variance()}};
    j["a"] = cfg.a;
    j["b"] = cfg.b;
    j["r"] = cfg.r;
    j["schedule"] = cfg.schedule.describe();
    j["algorithm"] = std::string(to_string(cfg.algorithm));
    j["gp_mode"] = std::string(to_string(cfg.gp_mode));
    j["users"] = {{"kind", cfg.users.kind}, {"xi", cfg.users.xi}, {"grid_resolution", cfg.users.grid_resolution}};
    j["synthetic_xi"] = cfg.synthetic_xi;
    j["oracle"] = {{"grid", cfg.oracle_grid}, {"polish", cfg.oracle_polish}};
    j["output_dir"] = cfg.output_dir;
    j["gp_dump"] = {{"steps", cfg.gp_dump_steps}, {"grid", cfg.gp_dump_grid}};
    j["track_learning_rate"] = cfg.track_learning_rate;
    j["probe_points"] = cfg.probe_points;
    return j.dump(2) + "\n";
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace agp
