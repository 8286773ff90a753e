#include "agp/loop.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <sstream>

namespace agp {

FeedbackSchedule FeedbackSchedule::every_q(std::size_t q) {
    if (q == 0) throw InputError("feedback schedule: q must be >= 1");
    FeedbackSchedule s;
    s.mode_ = Mode::EveryQ;
    s.q_ = q;
    return s;
}

FeedbackSchedule FeedbackSchedule::bernoulli(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw InputError("feedback schedule: p must lie in (0, 1]");
    FeedbackSchedule s;
    s.mode_ = Mode::Bernoulli;
    s.p_ = p;
    return s;
}

namespace {

std::string_view argument_of(std::string_view text, std::string_view head) {
    if (text.size() < head.size() + 2 || text.substr(0, head.size()) != head ||
        text[head.size()] != '(' || text.back() != ')') {
        throw InputError("feedback schedule: cannot parse '" + std::string(text) + "'");
    }
    return text.substr(head.size() + 1, text.size() - head.size() - 2);
}

}  // namespace

FeedbackSchedule FeedbackSchedule::parse(std::string_view text) {
    if (text == "every_step") return every_step();
    if (text.starts_with("every_q")) {
        const auto arg = argument_of(text, "every_q");
        std::size_t q = 0;
        const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), q);
        if (ec != std::errc() || ptr != arg.data() + arg.size()) {
            throw InputError("feedback schedule: bad q in '" + std::string(text) + "'");
        }
        return every_q(q);
    }
    if (text.starts_with("bernoulli")) {
        const std::string arg(argument_of(text, "bernoulli"));
        std::size_t used = 0;
        double p = 0.0;
        try {
            p = std::stod(arg, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != arg.size() || arg.empty()) {
            throw InputError("feedback schedule: bad p in '" + std::string(text) + "'");
        }
        return bernoulli(p);
    }
    throw InputError("feedback schedule: unknown mode '" + std::string(text) + "'");
}

bool FeedbackSchedule::fires(std::size_t k, double u) const {
    switch (mode_) {
        case Mode::EveryStep: return true;
        case Mode::EveryQ: return k % q_ == 0;
        case Mode::Bernoulli: return u < p_;
    }
    return false;
}

std::string FeedbackSchedule::describe() const {
    std::ostringstream out;
    switch (mode_) {
        case Mode::EveryStep: out << "every_step"; break;
        case Mode::EveryQ: out << "every_q(" << q_ << ")"; break;
        case Mode::Bernoulli: {
            char buf[32];
            const auto res = std::to_chars(buf, buf + sizeof buf, p_);
            out << "bernoulli(" << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << ")";
            break;
        }
    }
    return out.str();
}

AdditiveUtility::AdditiveUtility(std::vector<UtilityPtr> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) throw InputError("AdditiveUtility: needs at least one part");
    for (const auto& p : parts_) {
        if (!p || p->dim() != 1) throw InputError("AdditiveUtility: parts must be scalar functions");
    }
}

double AdditiveUtility::value(Point x) const {
    if (x.size() != parts_.size()) throw InputError("AdditiveUtility: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < parts_.size(); ++i) s += parts_[i]->value(x.subspan(i, 1));
    return s;
}

Vector AdditiveUtility::grad(Point x) const {
    if (x.size() != parts_.size()) throw InputError("AdditiveUtility: dimension mismatch");
    Vector g(static_cast<Eigen::Index>(parts_.size()));
    for (std::size_t i = 0; i < parts_.size(); ++i) g[static_cast<Eigen::Index>(i)] = parts_[i]->grad(x.subspan(i, 1))[0];
    return g;
}

Vector restrict_to(const Vector& x, const std::vector<std::size_t>& coords) {
    Vector out(static_cast<Eigen::Index>(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i) out[static_cast<Eigen::Index>(i)] = x[static_cast<Eigen::Index>(coords[i])];
    return out;
}

void UserModel::validate(std::size_t decision_dim) const {
    if (blocks.empty()) throw InputError("user model: needs at least one user");
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
        throw InputError("user model: noise_std must be non-negative");
    }
    std::vector<bool> used(decision_dim, false);
    for (const auto& b : blocks) {
        if (b.coords.empty()) throw InputError("user model: empty coordinate block");
        if (!b.truth) throw InputError("user model: block without a satisfaction function");
        if (b.truth->dim() != b.coords.size()) {
            throw InputError("user model: satisfaction function dimension does not match its block");
        }
        for (auto c : b.coords) {
            if (c >= decision_dim) throw InputError("user model: coordinate out of range");
            if (used[c]) throw InputError("user model: blocks must be disjoint");
            used[c] = true;
        }
    }
}

UserModel UserModel::separable(std::vector<UtilityPtr> truths, double noise_std,
                               FeedbackSchedule schedule) {
    UserModel model;
    model.noise_std = noise_std;
    model.schedule = schedule;
    for (std::size_t i = 0; i < truths.size(); ++i) model.blocks.push_back({{i}, std::move(truths[i])});
    return model;
}

double UserModel::value(std::size_t block, const Vector& x) const {
    const auto& b = blocks.at(block);
    return b.truth->value(as_point(restrict_to(x, b.coords)));
}

double UserModel::total(const Vector& x) const {
    double s = 0.0;
    for (std::size_t b = 0; b < blocks.size(); ++b) s += value(b, x);
    return s;
}

Vector UserModel::total_grad(const Vector& x) const {
    Vector g = Vector::Zero(x.size());
    for (const auto& b : blocks) {
        const Vector gb = b.truth->grad(as_point(restrict_to(x, b.coords)));
        for (std::size_t i = 0; i < b.coords.size(); ++i) {
            g[static_cast<Eigen::Index>(b.coords[i])] += gb[static_cast<Eigen::Index>(i)];
        }
    }
    return g;
}

std::string_view to_string(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::AgpUcb: return "agp_ucb";
        case Algorithm::Synthetic: return "synthetic";
        case Algorithm::Zero2: return "zero2";
        case Algorithm::Zero4: return "zero4";
    }
    return "unknown";
}

Algorithm algorithm_from_string(std::string_view name) {
    if (name == "agp_ucb") return Algorithm::AgpUcb;
    if (name == "synthetic") return Algorithm::Synthetic;
    if (name == "zero2") return Algorithm::Zero2;
    if (name == "zero4") return Algorithm::Zero4;
    throw InputError("unknown algorithm '" + std::string(name) + "'");
}

void LoopConfig::validate(const UserModel& users) const {
    solver.validate();
    confidence.validate();
    if (!(noise_variance > 0.0)) throw InputError("loop: GP noise variance must be positive");
    if (!(gamma > 0.0)) throw InputError("loop: gamma must be positive");
    const bool scalar_blocks = std::all_of(users.blocks.begin(), users.blocks.end(),
                                           [](const UserBlock& b) { return b.coords.size() == 1; });
    switch (algorithm) {
        case Algorithm::AgpUcb:
            for (const auto& b : users.blocks) {
                if (b.coords.size() != confidence.dim) {
                    throw InputError("loop: learning dimension does not match the user block size");
                }
            }
            break;
        case Algorithm::Synthetic:
            synthetic.validate();
            if (!scalar_blocks) throw InputError("loop: the synthetic model needs one coordinate per user");
            if (synthetic.users() != users.size()) {
                throw InputError("loop: synthetic model needs one xi per user");
            }
            break;
        case Algorithm::Zero2:
        case Algorithm::Zero4:
            if (!scalar_blocks) throw InputError("loop: zeroth-order estimates need one coordinate per user");
            if (users.schedule.mode() != FeedbackSchedule::Mode::EveryStep) {
                throw InputError("loop: zeroth-order baselines require feedback on every step");
            }
            break;
    }
}

RandomStreams::RandomStreams(std::uint64_t seed) {
    const auto lo = static_cast<std::uint32_t>(seed);
    const auto hi = static_cast<std::uint32_t>(seed >> 32);
    std::seed_seq noise_seq{lo, hi, 0x6e6f6973u};
    std::seed_seq schedule_seq{lo, hi, 0x73636864u};
    noise_rng_.seed(noise_seq);
    schedule_rng_.seed(schedule_seq);
}

std::vector<double> RandomStreams::noise(std::size_t blocks) {
    std::vector<double> out(blocks);
    for (auto& e : out) e = normal_(noise_rng_);
    return out;
}

double RandomStreams::schedule_uniform() { return uniform_(schedule_rng_); }

LoopState initial_state(const LoopConfig& cfg, const UserModel& users, const BoxDomain& domain) {
    users.validate(domain.dim());
    cfg.validate(users);
    LoopState state;
    state.x = domain.center();
    if (cfg.algorithm == Algorithm::AgpUcb) {
        for (const auto& b : users.blocks) {
            state.beliefs.emplace_back(cfg.kernel, cfg.noise_variance, b.coords.size());
        }
        state.beta = beta(1, cfg.confidence);
        state.cache.resize(users.size());
    } else if (cfg.algorithm == Algorithm::Zero2 || cfg.algorithm == Algorithm::Zero4) {
        state.zero_order.emplace(users.size(), cfg.algorithm == Algorithm::Zero2 ? 2 : 4);
    }
    return state;
}

SmoothFunction ucb_surrogate(const LoopState& state, const EngineeringObjective& v,
                             const UserModel& users, const LoopConfig& cfg, Tick tick) {
    SmoothFunction phi;
    phi.value = [&state, &v, &users, &cfg, tick](const Vector& x) {
        double s = v.value(as_point(x), tick);
        for (std::size_t b = 0; b < users.size(); ++b) {
            const Vector xb = restrict_to(x, users.blocks[b].coords);
            s += cfg.gamma * ucb_value(state.beliefs[b], state.beta, as_point(xb));
        }
        return s;
    };
    phi.grad = [&state, &v, &users, &cfg, tick](const Vector& x) {
        Vector g = v.grad(as_point(x), tick);
        for (std::size_t b = 0; b < users.size(); ++b) {
            const auto& coords = users.blocks[b].coords;
            const Vector xb = restrict_to(x, coords);
            const auto& cached = state.cache[b];
            const auto pred = cached && cached->x == xb ? cached->prediction
                                                        : state.beliefs[b].predict(as_point(xb), true);
            const Vector gb = pred.mean_grad + std::sqrt(state.beta) * pred.stddev_grad;
            for (std::size_t i = 0; i < coords.size(); ++i) {
                g[static_cast<Eigen::Index>(coords[i])] += cfg.gamma * gb[static_cast<Eigen::Index>(i)];
            }
        }
        return g;
    };
    return phi;
}

Vector synthetic_pgd_step(const Vector& x, const EngineeringObjective& v, const UserModel& users,
                          const SyntheticUserModel& model, double gamma, double alpha,
                          const BoxDomain& domain, Tick tick) {
    Vector g = v.grad(as_point(x), tick);
    for (std::size_t b = 0; b < users.size(); ++b) {
        const auto c = static_cast<Eigen::Index>(users.blocks[b].coords.at(0));
        g[c] += gamma * model.grad(b, x[c]);
    }
    return project(domain, x + alpha * g);
}

StepOutcome step(LoopState& state, const EngineeringObjective& v, const UserModel& users,
                 const LoopConfig& cfg, const BoxDomain& domain, Tick tick, RandomStreams& streams) {
    StepOutcome out;
    out.k = state.k;
    out.n = state.n;
    out.tick = tick;

    Vector x = state.x;
    switch (cfg.algorithm) {
        case Algorithm::AgpUcb:
            state.beta = beta(state.n, cfg.confidence);
            x = run_inner(ucb_surrogate(state, v, users, cfg, tick), x, cfg.solver, domain);
            break;
        case Algorithm::Synthetic:
            for (std::size_t s = 0; s < cfg.solver.ns_steps; ++s) {
                x = synthetic_pgd_step(x, v, users, cfg.synthetic, cfg.gamma, cfg.solver.alpha, domain, tick);
            }
            break;
        case Algorithm::Zero2:
        case Algorithm::Zero4: {
            Vector est = Vector::Zero(x.size());
            for (std::size_t b = 0; b < users.size(); ++b) {
                est[static_cast<Eigen::Index>(users.blocks[b].coords[0])] = zero_order_grad(*state.zero_order, b);
            }
            for (std::size_t s = 0; s < cfg.solver.ns_steps; ++s) {
                x = project(domain, x + cfg.solver.alpha * (v.grad(as_point(x), tick) + cfg.gamma * est));
            }
            break;
        }
    }
    out.beta = state.beta;

    const auto eps = streams.noise(users.size());
    const double u = streams.schedule_uniform();
    out.y.resize(users.size());
    for (std::size_t b = 0; b < users.size(); ++b) out.y[b] = users.value(b, x) + users.noise_std * eps[b];

    out.feedback = users.schedule.fires(state.k, u);
    if (out.feedback) {
        for (std::size_t b = 0; b < users.size(); ++b) {
            const Vector xb = restrict_to(x, users.blocks[b].coords);
            if (cfg.algorithm == Algorithm::AgpUcb) {
                state.cache[b] = LoopState::CachedPrediction{
                    xb, state.beliefs[b].update_and_predict(as_point(xb), out.y[b])};
            } else if (state.zero_order) {
                state.zero_order->push(b, xb[0], out.y[b]);
            }
        }
        ++state.n;
    }
    state.x = x;
    ++state.k;
    out.x = std::move(x);
    return out;
}

std::vector<StepOutcome> run(std::size_t T, std::uint64_t seed, const EngineeringObjective& v,
                             const UserModel& users, const LoopConfig& cfg,
                             const BoxDomain& domain, double sampling_period,
                             const StepObserver& observer) {
    if (!(sampling_period > 0.0)) throw InputError("run: sampling period must be positive");
    LoopState state = initial_state(cfg, users, domain);
    RandomStreams streams(seed);
    std::vector<StepOutcome> log;
    log.reserve(T);
    for (std::size_t k = 1; k <= T; ++k) {
        const Tick tick{k, static_cast<double>(k) * sampling_period};
        log.push_back(step(state, v, users, cfg, domain, tick, streams));
        if (observer) observer(state, log.back());
    }
    return log;
}

}  // namespace agp
