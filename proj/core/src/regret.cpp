#include "agp/regret.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agp/ucb.hpp"

namespace agp {

OracleResult oracle_opt(const SmoothFunction& f, const BoxDomain& domain, std::size_t per_axis,
                        std::size_t polish_steps) {
    auto best = maximize_on_grid(f, domain, per_axis, polish_steps);
    return {std::move(best.x), best.value};
}

SmoothFunction true_objective(const EngineeringObjective& v, const UserModel& users, double gamma,
                              Tick tick) {
    SmoothFunction f;
    f.value = [&v, &users, gamma, tick](const Vector& x) {
        return v.value(as_point(x), tick) + gamma * users.total(x);
    };
    f.grad = [&v, &users, gamma, tick](const Vector& x) {
        return Vector(v.grad(as_point(x), tick) + gamma * users.total_grad(x));
    };
    return f;
}

SeparableOracle::SeparableOracle(const TimeVaryingQuadratic& v, const UserModel& users,
                                 double gamma, const BoxDomain& domain, std::size_t per_axis,
                                 std::size_t polish_steps)
    : v_(v), users_(users), gamma_(gamma), domain_(domain), per_axis_(per_axis),
      polish_steps_(polish_steps) {
    const std::size_t m = domain.dim();
    if (m > 2) throw UnsupportedOperation("SeparableOracle: decision dimension must be 1 or 2");
    if (v.dim() != m) throw InputError("SeparableOracle: objective and domain dimensions differ");
    if (per_axis < 2) throw InputError("SeparableOracle: need at least 2 nodes per axis");
    users.validate(m);
    std::vector<int> owner(m, -1);
    for (std::size_t b = 0; b < users.size(); ++b) {
        if (users.blocks[b].coords.size() != 1) {
            throw UnsupportedOperation("SeparableOracle: every user must own a single coordinate");
        }
        owner[users.blocks[b].coords[0]] = static_cast<int>(b);
    }
    nodes_.resize(m);
    table_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const auto je = static_cast<Eigen::Index>(j);
        const double lo = domain.lo()[je], hi = domain.hi()[je];
        for (std::size_t i = 0; i < per_axis; ++i) {
            const double s = static_cast<double>(i) / static_cast<double>(per_axis - 1);
            const double node = i + 1 == per_axis ? hi : lo + s * (hi - lo);
            nodes_[j].push_back(node);
            double u = 0.0;
            if (owner[j] >= 0) {
                const double p[1] = {node};
                u = gamma * users.blocks[static_cast<std::size_t>(owner[j])].truth->value(Point(p, 1));
            }
            table_[j].push_back(u);
        }
    }
}

OracleResult SeparableOracle::at(Tick tick) const {
    const std::size_t m = domain_.dim();
    const Vector target = v_.target().at(tick);
    const Matrix& Q = v_.q();
    Vector best = Vector::Zero(static_cast<Eigen::Index>(m));
    double best_value = -std::numeric_limits<double>::infinity();

    // Diagonal part plus user term per axis.
    std::vector<std::vector<double>> diag(m), err(m);
    for (std::size_t j = 0; j < m; ++j) {
        const auto je = static_cast<Eigen::Index>(j);
        for (std::size_t i = 0; i < per_axis_; ++i) {
            const double e = nodes_[j][i] - target[je];
            err[j].push_back(e);
            diag[j].push_back(-0.5 * Q(je, je) * e * e + table_[j][i]);
        }
    }
    if (m == 1) {
        const auto it = std::max_element(diag[0].begin(), diag[0].end());
        best[0] = nodes_[0][static_cast<std::size_t>(it - diag[0].begin())];
        best_value = *it;
    } else {
        const double c = -Q(0, 1);
        for (std::size_t i = 0; i < per_axis_; ++i) {
            const double a = diag[0][i], ce = c * err[0][i];
            const double* b = diag[1].data();
            const double* e1 = err[1].data();
            std::size_t arg = 0;
            double row_best = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < per_axis_; ++j) {
                const double val = b[j] + ce * e1[j];
                if (val > row_best) {
                    row_best = val;
                    arg = j;
                }
            }
            if (a + row_best > best_value) {
                best_value = a + row_best;
                best[0] = nodes_[0][i];
                best[1] = nodes_[1][arg];
            }
        }
    }
    if (polish_steps_ == 0) return {best, best_value};
    const auto f = true_objective(v_, users_, gamma_, tick);
    auto polished = polish(f, domain_, best, polish_steps_,
                           domain_.side() / static_cast<double>(per_axis_));
    return {std::move(polished.x), polished.value};
}

void RegretLedger::add(double f_star, double f_x) {
    f_star_.push_back(f_star);
    f_x_.push_back(f_x);
    inst_.push_back(f_star - f_x);
    cum_.push_back((cum_.empty() ? 0.0 : cum_.back()) + inst_.back());
}

std::vector<double> info_gain_greedy(const KernelSpec& kernel, const BoxDomain& domain,
                                     double grid_resolution, std::size_t T, double noise_std,
                                     bool distinct) {
    if (!(noise_std > 0.0)) throw InputError("info_gain_greedy: noise std must be positive");
    if (!(grid_resolution > 0.0)) throw InputError("info_gain_greedy: resolution must be positive");
    const auto nodes = domain.lattice(domain.nodes_for_resolution(grid_resolution));
    const auto g = static_cast<Eigen::Index>(nodes.size());
    if (distinct && T > nodes.size()) {
        throw InputError("info_gain_greedy: T exceeds the number of lattice points");
    }
    Matrix C(g, g);
    for (Eigen::Index i = 0; i < g; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            C(i, j) = C(j, i) = kernel.eval(nodes[static_cast<std::size_t>(i)], nodes[static_cast<std::size_t>(j)]);
        }
    }
    const double s2 = noise_std * noise_std;
    std::vector<bool> taken(nodes.size(), false);
    std::vector<double> gamma;
    gamma.reserve(T);
    double acc = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        Eigen::Index arg = -1;
        double best = -1.0;
        for (Eigen::Index i = 0; i < g; ++i) {
            if (distinct && taken[static_cast<std::size_t>(i)]) continue;
            if (C(i, i) > best) {
                best = C(i, i);
                arg = i;
            }
        }
        const double var = std::max(best, 0.0);
        acc += 0.5 * std::log1p(var / s2);
        gamma.push_back(acc);
        taken[static_cast<std::size_t>(arg)] = true;
        const Vector c = C.col(arg);
        C.noalias() -= (c / (var + s2)) * c.transpose();
    }
    return gamma;
}

void BoundInputs::validate() const {
    if (T == 0) throw InputError("bound: T must be >= 1");
    if (!(sigma > 0.0)) throw InputError("bound: sigma must be positive");
    if (!(L >= 0.0) || !(D_g >= 0.0) || !(Delta >= 0.0) || !(gamma_T >= 0.0)) {
        throw InputError("bound: L, D_g, Delta and gamma_T must be non-negative");
    }
    if (!(eta >= 0.0 && eta < 1.0)) throw InputError("bound: eta must lie in [0, 1)");
    if (p == 0 || q < p) throw InputError("bound: need 1 <= p <= q");
}

BoundTerms theoretical_bound(const BoundInputs& in) {
    in.validate();
    const ConfidenceParams cp{in.delta, in.d, in.a, in.b, in.r};
    BoundTerms out;
    out.beta_T = beta(in.T, cp);
    out.C1 = 8.0 / std::log1p(1.0 / in.sigma);
    const double dd = static_cast<double>(in.d);
    const double lg = std::log(2.0 * dd * in.a / in.delta);
    if (!(lg > 0.0)) throw InputError("bound: 2da/delta must exceed 1");
    out.C2 = 2.0 * in.D_g / (in.b * std::sqrt(lg)) + 2.0 * in.L / (2.0 * dd * in.b * in.b * lg) + 2.0;
    out.learning = std::sqrt(out.C1 * static_cast<double>(in.T) * out.beta_T * in.gamma_T);
    const double eta_p = std::pow(in.eta, static_cast<double>(in.p));
    const double delta_q = in.eta == 0.0
                               ? in.Delta
                               : in.Delta * (1.0 - std::pow(in.eta, static_cast<double>(in.q))) / (1.0 - in.eta);
    out.G_T = 2.0 * delta_q * eta_p * static_cast<double>(in.T) / (1.0 - eta_p);
    out.total = out.learning + out.C2 + out.G_T;
    return out;
}

double learning_rate_error(const GpPosterior& prev, double beta_prev, const GpPosterior& curr,
                           double beta_curr, const std::vector<Vector>& probes) {
    double worst = 0.0;
    for (const auto& p : probes) {
        const double d = ucb_value(curr, beta_curr, as_point(p)) - ucb_value(prev, beta_prev, as_point(p));
        worst = std::max(worst, std::abs(d));
    }
    return worst;
}

ProbeTracker::ProbeTracker(std::vector<Vector> probes) : probes_(std::move(probes)) {
    if (probes_.empty()) throw InputError("ProbeTracker: needs at least one probe");
}

void ProbeTracker::rebuild(const GpPosterior& post) {
    whitened_.clear();
    mean_.assign(probes_.size(), 0.0);
    var_.resize(probes_.size());
    for (std::size_t p = 0; p < probes_.size(); ++p) var_[p] = post.kernel().eval(probes_[p], probes_[p]);
    z_.clear();
    seen_ = 0;
    refactors_ = post.refactor_count();
    initialised_ = true;
}

void ProbeTracker::sync(const GpPosterior& post) {
    if (!initialised_ || post.refactor_count() != refactors_ || post.size() < seen_) rebuild(post);
    const std::size_t P = probes_.size();
    for (std::size_t i = seen_; i < post.size(); ++i) {
        const auto row = post.factor_row(i);
        std::vector<double> w(P);
        for (std::size_t p = 0; p < P; ++p) w[p] = post.kernel().eval(post.input(i), as_point(probes_[p]));
        double zi = post.output(i);
        for (std::size_t j = 0; j < i; ++j) {
            const double lij = row[j];
            const double* wj = whitened_[j].data();
            for (std::size_t p = 0; p < P; ++p) w[p] -= lij * wj[p];
            zi -= lij * z_[j];
        }
        const double lii = row[i];
        zi /= lii;
        for (std::size_t p = 0; p < P; ++p) {
            w[p] /= lii;
            mean_[p] += w[p] * zi;
            var_[p] -= w[p] * w[p];
        }
        z_.push_back(zi);
        whitened_.push_back(std::move(w));
    }
    seen_ = post.size();
}

std::vector<double> ProbeTracker::ucb(double beta) const {
    const double s = std::sqrt(beta);
    std::vector<double> out(mean_.size());
    for (std::size_t p = 0; p < out.size(); ++p) out[p] = mean_[p] + s * std::sqrt(std::max(var_[p], 0.0));
    return out;
}

double combine_separable_error(const std::vector<std::vector<double>>& deltas) {
    double hi = 0.0, lo = 0.0;
    for (const auto& d : deltas) {
        if (d.empty()) throw InputError("combine_separable_error: empty block");
        const auto [mn, mx] = std::minmax_element(d.begin(), d.end());
        hi += *mx;
        lo += *mn;
    }
    return std::max(std::abs(hi), std::abs(lo));
}

UcNormalizer::UcNormalizer(const UserModel& users, const BoxDomain& domain, double resolution)
    : users_(users) {
    users.validate(domain.dim());
    for (const auto& b : users.blocks) {
        Vector lo(static_cast<Eigen::Index>(b.coords.size())), hi(lo.size());
        for (std::size_t i = 0; i < b.coords.size(); ++i) {
            lo[static_cast<Eigen::Index>(i)] = domain.lo()[static_cast<Eigen::Index>(b.coords[i])];
            hi[static_cast<Eigen::Index>(i)] = domain.hi()[static_cast<Eigen::Index>(b.coords[i])];
        }
        const BoxDomain sub(lo, hi);
        std::size_t per_axis = sub.nodes_for_resolution(resolution);
        if (sub.dim() >= 2) per_axis = std::min<std::size_t>(per_axis, 1001);
        SmoothFunction u;
        const auto truth = b.truth;
        u.value = [truth](const Vector& x) { return truth->value(as_point(x)); };
        u.grad = [truth](const Vector& x) { return truth->grad(as_point(x)); };
        const auto best = maximize_on_grid(u, sub, per_axis, 50);
        if (!(best.value > 0.0)) {
            throw DegenerateInstance("uc_metric: a user's maximum satisfaction is not positive");
        }
        maxima_.push_back(best.value);
    }
}

std::vector<double> UcNormalizer::uc(const Vector& x) const {
    std::vector<double> out(maxima_.size());
    for (std::size_t b = 0; b < out.size(); ++b) out[b] = users_.value(b, x) / maxima_[b];
    return out;
}

std::vector<double> uc_metric(const UserModel& users, const Vector& x, const BoxDomain& domain) {
    return UcNormalizer(users, domain).uc(x);
}

std::vector<double> rolling_mean(const std::vector<double>& series, std::size_t window) {
    if (window == 0) throw InputError("rolling_mean: window must be >= 1");
    std::vector<double> out(series.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        acc += series[i];
        if (i >= window) acc -= series[i - window];
        out[i] = acc / static_cast<double>(std::min(i + 1, window));
    }
    return out;
}

std::vector<double> reference_rate(const std::vector<std::size_t>& T, std::size_t T_first,
                                   double value_first) {
    if (T_first < 2) throw InputError("reference_rate: the anchor T must be >= 2");
    const auto shape = [](std::size_t t) {
        const double x = static_cast<double>(t);
        return std::log(x) / std::sqrt(x);
    };
    const double c = value_first / shape(T_first);
    std::vector<double> out;
    out.reserve(T.size());
    for (auto t : T) {
        if (t < 2) throw InputError("reference_rate: T must be >= 2");
        out.push_back(c * shape(t));
    }
    return out;
}

}  // namespace agp
