#include "agp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "agp/baselines.hpp"

namespace agp {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

BoxDomain make_domain(const ExperimentConfig& cfg) { return BoxDomain::unit(cfg.m, cfg.r); }

TimeVaryingQuadratic make_objective(const ExperimentConfig& cfg) {
    return TimeVaryingQuadratic(cfg.q_matrix(), TargetTrajectory(cfg.m, cfg.omega, cfg.trajectory), cfg.gamma);
}

std::uint64_t run_seed(const ExperimentConfig& cfg, std::size_t run_id) {
    return cfg.seed + static_cast<std::uint64_t>(run_id);
}

bool deterministic_users(const ExperimentConfig& cfg) { return cfg.users.kind == "lognormal"; }

namespace {

std::uint64_t derived_seed(std::uint64_t seed, std::uint32_t stream, std::uint32_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream, index};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

constexpr std::uint32_t kUserStream = 0x75736572u;

}  // namespace

UserModel make_users(const ExperimentConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const BoxDomain axis = BoxDomain::unit(1, cfg.r);
    std::vector<UtilityPtr> scalar;
    if (cfg.users.kind == "lognormal") {
        for (double xi : cfg.users.xi) scalar.push_back(std::make_shared<LogNormalUtility>(xi));
    } else if (cfg.gp_mode == GpMode::Separable) {
        const SamplePathSampler sampler(cfg.kernel, axis, cfg.users.grid_resolution);
        for (std::size_t i = 0; i < cfg.m; ++i) {
            scalar.push_back(std::make_shared<SamplePath>(sampler.draw(derived_seed(seed, kUserStream, static_cast<std::uint32_t>(i)))));
        }
    }

    UserModel users;
    users.noise_std = cfg.noise_std;
    users.schedule = cfg.schedule;
    if (cfg.gp_mode == GpMode::Separable) {
        for (std::size_t i = 0; i < cfg.m; ++i) users.blocks.push_back({{i}, scalar[i]});
    } else {
        UserBlock block;
        for (std::size_t i = 0; i < cfg.m; ++i) block.coords.push_back(i);
        if (!scalar.empty()) {
            block.truth = std::make_shared<AdditiveUtility>(scalar);
        } else {
            const SamplePathSampler sampler(cfg.kernel, make_domain(cfg), cfg.users.grid_resolution);
            block.truth = std::make_shared<SamplePath>(sampler.draw(derived_seed(seed, kUserStream, 0)));
        }
        users.blocks.push_back(std::move(block));
    }
    users.validate(cfg.m);
    return users;
}

LoopConfig make_loop_config(const ExperimentConfig& cfg) {
    LoopConfig lc;
    lc.solver = {cfg.alpha, cfg.ns_steps};
    lc.confidence = {cfg.delta, cfg.gp_mode == GpMode::Joint ? cfg.m : 1, cfg.a, cfg.b, cfg.r};
    lc.kernel = cfg.kernel;
    lc.noise_variance = cfg.noise_std * cfg.noise_std;
    lc.gamma = cfg.gamma;
    lc.algorithm = cfg.algorithm;
    lc.synthetic.xi = cfg.synthetic_xi;
    return lc;
}

std::vector<OracleResult> oracle_trajectory(const ExperimentConfig& cfg, const UserModel& users) {
    const auto v = make_objective(cfg);
    const auto domain = make_domain(cfg);
    std::vector<OracleResult> out;
    out.reserve(cfg.T);

    // Separable truths go through the tabulated oracle, also when a joint GP learns them.
    const UserModel* tabulated = nullptr;
    UserModel split;
    const bool scalar_blocks = std::all_of(users.blocks.begin(), users.blocks.end(),
                                           [](const UserBlock& b) { return b.coords.size() == 1; });
    if (scalar_blocks) {
        tabulated = &users;
    } else if (users.size() == 1) {
        if (const auto* add = dynamic_cast<const AdditiveUtility*>(users.blocks[0].truth.get())) {
            split = UserModel::separable(add->parts(), users.noise_std, users.schedule);
            tabulated = &split;
        }
    }
    if (tabulated && cfg.m <= 2) {
        const SeparableOracle oracle(v, *tabulated, cfg.gamma, domain, cfg.oracle_grid, cfg.oracle_polish);
        for (std::size_t k = 1; k <= cfg.T; ++k) {
            out.push_back(oracle.at({k, static_cast<double>(k) * cfg.sampling_period}));
        }
        return out;
    }
    const std::size_t per_axis = std::min<std::size_t>(cfg.oracle_grid, 101);
    for (std::size_t k = 1; k <= cfg.T; ++k) {
        const Tick tick{k, static_cast<double>(k) * cfg.sampling_period};
        out.push_back(oracle_opt(true_objective(v, users, cfg.gamma, tick), domain, per_axis, cfg.oracle_polish));
    }
    return out;
}

namespace {

BoxDomain block_domain(const BoxDomain& domain, const UserBlock& block) {
    Vector lo(static_cast<Eigen::Index>(block.coords.size())), hi(lo.size());
    for (std::size_t i = 0; i < block.coords.size(); ++i) {
        lo[static_cast<Eigen::Index>(i)] = domain.lo()[static_cast<Eigen::Index>(block.coords[i])];
        hi[static_cast<Eigen::Index>(i)] = domain.hi()[static_cast<Eigen::Index>(block.coords[i])];
    }
    return {lo, hi};
}

}  // namespace

RunResult simulate_run(const ExperimentConfig& cfg, std::size_t run_id,
                       const std::vector<OracleResult>* shared_optima) {
    cfg.validate();
    RunResult result;
    result.run_id = run_id;
    result.seed = run_seed(cfg, run_id);

    const auto v = make_objective(cfg);
    const auto domain = make_domain(cfg);
    const auto users = make_users(cfg, result.seed);
    const auto lc = make_loop_config(cfg);

    std::vector<OracleResult> own;
    if (!shared_optima) {
        own = oracle_trajectory(cfg, users);
        shared_optima = &own;
    }
    if (shared_optima->size() < cfg.T) throw InputError("simulate_run: oracle trajectory shorter than T");
    const UcNormalizer normalizer(users, domain);

    std::vector<ProbeTracker> trackers;
    std::vector<std::vector<double>> previous_ucb;
    if (cfg.track_learning_rate && cfg.algorithm == Algorithm::AgpUcb) {
        const double beta1 = beta(1, lc.confidence);
        for (const auto& b : users.blocks) {
            trackers.emplace_back(block_domain(domain, b).lattice(cfg.probe_points));
            previous_ucb.emplace_back(trackers.back().probes().size(),
                                      std::sqrt(beta1) * std::sqrt(cfg.kernel.output_variance()));
        }
    }

    result.records.reserve(cfg.T);
    double cum = 0.0;
    const auto observer = [&](const LoopState& state, const StepOutcome& o) {
        const OracleResult& star = (*shared_optima)[o.k - 1];
        RunRecord rec;
        rec.run_id = run_id;
        rec.k = o.k;
        rec.n = o.n;
        rec.t = o.tick.t;
        rec.x = o.x;
        rec.f_star = star.value;
        rec.f_x = v.value(as_point(o.x), o.tick) + cfg.gamma * users.total(o.x);
        rec.regret_inst = rec.f_star - rec.f_x;
        cum += rec.regret_inst;
        rec.regret_cum = cum;
        rec.regret_avg = cum / static_cast<double>(o.k);
        rec.uc = normalizer.uc(o.x);
        rec.feedback = o.feedback;
        rec.beta_n = o.beta;
        result.records.push_back(std::move(rec));
        result.oracle_x.push_back(star.x);
        result.target.push_back(v.target().at(o.tick));

        if (!trackers.empty() && o.feedback) {
            const double beta_next = beta(state.n, lc.confidence);
            std::vector<std::vector<double>> deltas;
            for (std::size_t b = 0; b < trackers.size(); ++b) {
                trackers[b].sync(state.beliefs[b]);
                auto now = trackers[b].ucb(beta_next);
                std::vector<double> d(now.size());
                for (std::size_t p = 0; p < now.size(); ++p) d[p] = now[p] - previous_ucb[b][p];
                deltas.push_back(std::move(d));
                previous_ucb[b] = std::move(now);
            }
            result.learning_rate.push_back(combine_separable_error(deltas));
        }

        if (run_id == 0 && cfg.algorithm == Algorithm::AgpUcb &&
            std::find(cfg.gp_dump_steps.begin(), cfg.gp_dump_steps.end(), o.k) != cfg.gp_dump_steps.end()) {
            for (std::size_t b = 0; b < users.size(); ++b) {
                const auto& post = state.beliefs[b];
                GpSnapshot snap;
                snap.k = o.k;
                snap.block = b;
                snap.grid = block_domain(domain, users.blocks[b]).lattice(cfg.gp_dump_grid);
                for (const auto& g : snap.grid) {
                    const auto pred = post.predict(as_point(g), false);
                    snap.mean.push_back(pred.mean);
                    snap.stddev.push_back(pred.stddev);
                    snap.truth.push_back(users.blocks[b].truth->value(as_point(g)));
                }
                for (std::size_t i = 0; i < post.size(); ++i) {
                    snap.data.push_back({to_vector(post.input(i)), post.output(i)});
                }
                result.snapshots.push_back(std::move(snap));
            }
        }
    };
    run(cfg.T, result.seed, v, users, lc, domain, cfg.sampling_period, observer);
    return result;
}

Aggregate aggregate(const std::vector<RunResult>& runs) {
    Aggregate agg;
    if (runs.empty()) return agg;
    const std::size_t T = runs.front().records.size();
    const std::size_t users = T ? runs.front().records.front().uc.size() : 0;
    agg.k.resize(T);
    agg.regret_avg.assign(T, 0.0);
    agg.regret_inst.assign(T, 0.0);
    agg.regret_cum.assign(T, 0.0);
    agg.feedback_rate.assign(T, 0.0);
    agg.uc.assign(users, std::vector<double>(T, 0.0));
    for (const auto& r : runs) {
        if (r.records.size() != T) throw InputError("aggregate: runs differ in length");
        for (std::size_t i = 0; i < T; ++i) {
            const auto& rec = r.records[i];
            agg.regret_avg[i] += rec.regret_avg;
            agg.regret_inst[i] += rec.regret_inst;
            agg.regret_cum[i] += rec.regret_cum;
            agg.feedback_rate[i] += rec.feedback ? 1.0 : 0.0;
            for (std::size_t u = 0; u < users; ++u) agg.uc[u][i] += rec.uc[u];
        }
    }
    const double inv = 1.0 / static_cast<double>(runs.size());
    for (std::size_t i = 0; i < T; ++i) {
        agg.k[i] = runs.front().records[i].k;
        agg.regret_avg[i] *= inv;
        agg.regret_inst[i] *= inv;
        agg.regret_cum[i] *= inv;
        agg.feedback_rate[i] *= inv;
        for (std::size_t u = 0; u < users; ++u) agg.uc[u][i] *= inv;
    }
    return agg;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult result;
    result.config = cfg;
    result.runs.resize(cfg.runs);

    std::vector<OracleResult> shared;
    const bool share = deterministic_users(cfg);
    if (share) shared = oracle_trajectory(cfg, make_users(cfg, run_seed(cfg, 0)));

    std::size_t workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, cfg.runs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto work = [&] {
        for (std::size_t id = next++; id < cfg.runs; id = next++) {
            try {
                result.runs[id] = simulate_run(cfg, id, share ? &shared : nullptr);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    result.aggregate = aggregate(result.runs);
    return result;
}

double estimate_eta(const ExperimentConfig& cfg, std::size_t samples) {
    const auto v = make_objective(cfg);
    const auto users = make_users(cfg, run_seed(cfg, 0));
    const SmoothFunction f = true_objective(v, users, cfg.gamma, {1, cfg.sampling_period});
    const auto pl = estimate_pl_kappa(f, make_domain(cfg), 1.0 / cfg.alpha, samples, cfg.seed);
    return pl.eta(cfg.alpha);
}

double info_gain_resolution(std::size_t) { return 0.02; }

std::vector<BoundRow> bound_curve(const ExperimentConfig& cfg, const std::vector<std::size_t>& Ts,
                                  double eta) {
    cfg.validate();
    if (Ts.empty()) return {};
    const std::size_t T_max = *std::max_element(Ts.begin(), Ts.end());
    if (T_max == 0) throw InputError("bound_curve: horizons must be >= 1");
    const auto lc = make_loop_config(cfg);
    const std::size_t d = lc.confidence.dim;
    const auto gains = info_gain_greedy(cfg.kernel, BoxDomain::unit(d, cfg.r), info_gain_resolution(d), T_max,
                                        cfg.noise_std);
    std::vector<Tick> ticks;
    for (std::size_t k = 1; k <= std::max<std::size_t>(T_max, 2); ++k) {
        ticks.push_back({k, static_cast<double>(k) * cfg.sampling_period});
    }
    const auto meta = metadata(make_objective(cfg), make_domain(cfg), ticks);

    std::size_t per_data = 1;
    if (cfg.schedule.mode() == FeedbackSchedule::Mode::EveryQ) per_data = cfg.schedule.q();

    std::vector<BoundRow> rows;
    for (std::size_t T : Ts) {
        BoundInputs in;
        in.T = T;
        in.delta = cfg.delta;
        in.sigma = cfg.noise_std;
        in.d = d;
        in.a = cfg.a;
        in.b = cfg.b;
        in.r = cfg.r;
        in.L = meta.smoothness;
        in.D_g = meta.grad_bound;
        in.Delta = meta.drift_bound;
        in.eta = eta;
        in.gamma_T = gains.at(T - 1);
        in.p = per_data;
        in.q = per_data;
        BoundRow row;
        row.T = T;
        row.gamma_T = in.gamma_T;
        row.terms = theoretical_bound(in);
        row.beta_T = row.terms.beta_T;
        rows.push_back(row);
    }
    return rows;
}

namespace {

class CsvFile {
public:
    explicit CsvFile(const fs::path& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw InputError("cannot write '" + path.string() + "'");
    }
    template <class... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        (write_cell(cells, first), ...);
        out_ << '\n';
    }
    void raw(const std::string& line) { out_ << line << '\n'; }
    std::ofstream& stream() { return out_; }
    std::string path() const { return path_.string(); }
    ~CsvFile() = default;

private:
    void sep(bool& first) {
        if (!first) out_ << ',';
        first = false;
    }
    void write_cell(double v, bool& first) {
        sep(first);
        out_ << format_double(v);
    }
    void write_cell(std::size_t v, bool& first) {
        sep(first);
        out_ << v;
    }
    void write_cell(const std::string& v, bool& first) {
        sep(first);
        out_ << v;
    }
    void write_cell(const char* v, bool& first) {
        sep(first);
        out_ << v;
    }

    fs::path path_;
    std::ofstream out_;
};

std::string indexed(const char* prefix, std::size_t i) { return prefix + std::to_string(i + 1); }

std::string padded(std::size_t v, int width) {
    std::string s = std::to_string(v);
    return std::string(static_cast<std::size_t>(std::max<int>(0, width - static_cast<int>(s.size()))), '0') + s;
}

}  // namespace

std::vector<std::string> write_artifacts(const ExperimentResult& result, const std::string& dir) {
    const fs::path root(dir);
    std::error_code ec;
    fs::create_directories(root / "runs", ec);
    if (ec) throw InputError("cannot create output directory '" + dir + "': " + ec.message());
    std::vector<std::string> paths;
    const auto& cfg = result.config;

    {
        const auto p = root / "config.json";
        std::ofstream out(p, std::ios::binary);
        if (!out) throw InputError("cannot write '" + p.string() + "'");
        out << dump_config(cfg);
        paths.push_back(p.string());
    }

    const std::size_t m = cfg.m;
    for (const auto& run : result.runs) {
        CsvFile csv(root / "runs" / ("run_" + padded(run.run_id, 3) + ".csv"));
        std::string header = "run_id,k,n,t";
        for (std::size_t i = 0; i < m; ++i) header += "," + indexed("x_", i);
        header += ",f_star,f_x,regret_inst,regret_cum,regret_avg";
        const std::size_t users = run.records.empty() ? 0 : run.records.front().uc.size();
        for (std::size_t u = 0; u < users; ++u) header += "," + indexed("uc_", u);
        header += ",feedback_given,beta_n";
        csv.raw(header);
        for (const auto& r : run.records) {
            std::string line = std::to_string(r.run_id) + "," + std::to_string(r.k) + "," +
                               std::to_string(r.n) + "," + format_double(r.t);
            for (Eigen::Index i = 0; i < r.x.size(); ++i) line += "," + format_double(r.x[i]);
            line += "," + format_double(r.f_star) + "," + format_double(r.f_x) + "," +
                    format_double(r.regret_inst) + "," + format_double(r.regret_cum) + "," +
                    format_double(r.regret_avg);
            for (double u : r.uc) line += "," + format_double(u);
            line += std::string(",") + (r.feedback ? "1" : "0") + "," + format_double(r.beta_n);
            csv.raw(line);
        }
        paths.push_back(csv.path());

        if (!run.learning_rate.empty()) {
            CsvFile lr(root / "runs" / ("learning_rate_" + padded(run.run_id, 3) + ".csv"));
            lr.row("n", "ell", "ell_cum");
            double acc = 0.0;
            for (std::size_t i = 0; i < run.learning_rate.size(); ++i) {
                acc += run.learning_rate[i];
                lr.row(i + 1, run.learning_rate[i], acc);
            }
            paths.push_back(lr.path());
        }
    }

    {
        CsvFile csv(root / "aggregate.csv");
        const auto& a = result.aggregate;
        std::string header = "k,regret_avg,regret_inst,regret_cum";
        for (std::size_t u = 0; u < a.uc.size(); ++u) header += "," + indexed("uc_", u);
        header += ",feedback_rate";
        csv.raw(header);
        for (std::size_t i = 0; i < a.k.size(); ++i) {
            std::string line = std::to_string(a.k[i]) + "," + format_double(a.regret_avg[i]) + "," +
                               format_double(a.regret_inst[i]) + "," + format_double(a.regret_cum[i]);
            for (const auto& u : a.uc) line += "," + format_double(u[i]);
            line += "," + format_double(a.feedback_rate[i]);
            csv.raw(line);
        }
        paths.push_back(csv.path());
    }

    if (!result.runs.empty()) {
        // Distances to the leader: cumulative gaps, each scaled from [0, 1] to [0, 3].
        const auto& run = result.runs.front();
        CsvFile csv(root / "trajectory_run000.csv");
        std::string header = "k,t";
        for (const char* name : {"dist_", "oracle_dist_", "eng_best_dist_"}) {
            for (std::size_t i = 0; i < m; ++i) header += "," + indexed(name, i);
        }
        csv.raw(header);
        const BoxDomain domain = make_domain(cfg);
        for (std::size_t s = 0; s < run.records.size(); ++s) {
            std::string line = std::to_string(run.records[s].k) + "," + format_double(run.records[s].t);
            const Vector eng = domain.clamp(as_point(run.target[s]));
            for (const Vector* x : {&run.records[s].x, &run.oracle_x[s], &eng}) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    acc += 3.0 * (*x)[static_cast<Eigen::Index>(i)];
                    line += "," + format_double(acc);
                }
            }
            csv.raw(line);
        }
        paths.push_back(csv.path());

        for (const auto& snap : run.snapshots) {
            const std::string stem = "gp_run000_k" + padded(snap.k, 4) + "_user" + std::to_string(snap.block + 1);
            CsvFile grid(root / (stem + ".csv"));
            const std::size_t d = snap.grid.empty() ? 0 : static_cast<std::size_t>(snap.grid.front().size());
            std::string header = "";
            for (std::size_t i = 0; i < d; ++i) header += (i ? "," : "") + indexed("x_", i);
            header += ",mean,std,lower,upper,truth";
            grid.raw(header);
            for (std::size_t i = 0; i < snap.grid.size(); ++i) {
                std::string line;
                for (std::size_t a = 0; a < d; ++a) line += (a ? "," : "") + format_double(snap.grid[i][static_cast<Eigen::Index>(a)]);
                line += "," + format_double(snap.mean[i]) + "," + format_double(snap.stddev[i]) + "," +
                        format_double(snap.mean[i] - snap.stddev[i]) + "," +
                        format_double(snap.mean[i] + snap.stddev[i]) + "," + format_double(snap.truth[i]);
                grid.raw(line);
            }
            paths.push_back(grid.path());

            CsvFile obs(root / (stem + "_obs.csv"));
            std::string oh;
            for (std::size_t i = 0; i < d; ++i) oh += (i ? "," : "") + indexed("x_", i);
            obs.raw(oh + ",y");
            for (const auto& o : snap.data) {
                std::string line;
                for (Eigen::Index a = 0; a < o.x.size(); ++a) line += (a ? "," : "") + format_double(o.x[a]);
                obs.raw(line + "," + format_double(o.y));
            }
            paths.push_back(obs.path());
        }
    }
    return paths;
}

std::vector<SweepEntry> sweep(const ExperimentConfig& base, const std::vector<double>& omegas,
                              const std::vector<FeedbackSchedule>& schedules,
                              const std::string& out_dir) {
    if (omegas.empty() || schedules.empty()) throw InputError("sweep: empty parameter grid");
    std::vector<SweepEntry> entries;
    nlohmann::json manifest = nlohmann::json::array();
    for (double omega : omegas) {
        for (const auto& schedule : schedules) {
            ExperimentConfig cfg = base;
            cfg.omega = omega;
            cfg.schedule = schedule;
            char omega_text[32];
            std::snprintf(omega_text, sizeof omega_text, "%g", omega);
            std::string name = std::string("omega_") + omega_text + "__" + schedule.describe();
            std::replace(name.begin(), name.end(), '(', '_');
            name.erase(std::remove(name.begin(), name.end(), ')'), name.end());
            const fs::path dir = fs::path(out_dir) / name;
            cfg.output_dir = dir.string();
            const auto result = run_experiment(cfg);
            const auto paths = write_artifacts(result, dir.string());
            SweepEntry e{omega, schedule, dir.string(), (dir / "aggregate.csv").string()};
            manifest.push_back({{"omega", omega},
                                {"schedule", schedule.describe()},
                                {"directory", e.directory},
                                {"aggregate", e.aggregate},
                                {"artifacts", paths}});
            entries.push_back(std::move(e));
        }
    }
    const auto p = fs::path(out_dir) / "manifest.json";
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InputError("cannot write '" + p.string() + "'");
    out << manifest.dump(2) << '\n';
    return entries;
}

}  // namespace agp
