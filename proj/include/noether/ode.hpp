#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "noether/errors.hpp"
#include "noether/rootfind.hpp"
#include "noether/state.hpp"

namespace noether {

struct EventSpec {
    enum class Direction { rising, falling, any };
    std::string id;
    std::function<double(const State&)> fn;
    Direction direction = Direction::any;
};

struct Event {
    double t;
    std::string id;
    State state;
};

struct IntegrateOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double event_time_tol = 1e-12;
    std::vector<EventSpec> events;
    std::size_t max_steps = 2000000;
};

enum class TrajectoryStatus { ok, truncated_min_step };

namespace detail {

// Dormand-Prince 5(4) tableau
inline constexpr double kA21 = 1.0 / 5;
inline constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
inline constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
inline constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                        kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
inline constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                        kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
inline constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                        kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
inline constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                        kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;
// dense-output coefficients (Hairer & Wanner)
inline constexpr double kD1 = -12715105075.0 / 11282082432.0;
inline constexpr double kD3 = 87487479700.0 / 32700410799.0;
inline constexpr double kD4 = -10690763975.0 / 1880347072.0;
inline constexpr double kD5 = 701980252875.0 / 199316789632.0;
inline constexpr double kD6 = -1453857185.0 / 822651844.0;
inline constexpr double kD7 = 69997945.0 / 29380423.0;

}  // namespace detail

/// One accepted step with its quartic interpolant.
struct DenseSegment {
    double t0, h;
    Vec r1, r2, r3, r4, r5;  // y(t0+theta*h) = r1 + theta(r2 + (1-theta)(r3 + theta(r4 + (1-theta) r5)))

    Vec eval(double t) const {
        double theta = (t - t0) / h;
        std::size_t n = r1.size();
        Vec y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double om = 1.0 - theta;
            y[i] = r1[i] + theta * (r2[i] + om * (r3[i] + theta * (r4[i] + om * r5[i])));
        }
        return y;
    }
};

/// Dense-output solution of a first-order system on a flat state vector.
class FlatTrajectory {
public:
    using Rhs = std::function<void(double, const Vec&, Vec&)>;

    double t_begin() const { return t0_; }
    double t_end() const { return t1_; }
    TrajectoryStatus status() const { return status_; }
    const std::string& diagnostic() const { return diagnostic_; }
    const std::vector<DenseSegment>& segments() const { return segs_; }
    const std::vector<std::pair<double, Vec>>& nodes() const { return nodes_; }

    Vec eval(double t) const {
        double lo = std::min(t0_, t1_), hi = std::max(t0_, t1_);
        double pad = 1e-12 * (1.0 + hi - lo);
        if (t < lo - pad || t > hi + pad) throw OutOfRange("dense_eval: t outside span");
        if (segs_.empty()) throw OutOfRange("dense_eval: empty trajectory");
        // binary search over segments ordered by start time (direction-aware)
        bool fwd = t1_ >= t0_;
        std::size_t a = 0, b = segs_.size() - 1;
        while (a < b) {
            std::size_t mid = (a + b) / 2;
            double tend = segs_[mid].t0 + segs_[mid].h;
            if ((fwd && t <= tend) || (!fwd && t >= tend))
                b = mid;
            else
                a = mid + 1;
        }
        return segs_[a].eval(t);
    }

    friend class FlatIntegrator;

private:
    double t0_ = 0, t1_ = 0;
    TrajectoryStatus status_ = TrajectoryStatus::ok;
    std::string diagnostic_;
    std::vector<DenseSegment> segs_;
    std::vector<std::pair<double, Vec>> nodes_;
};

class FlatIntegrator {
public:
    FlatIntegrator(FlatTrajectory::Rhs rhs, IntegrateOptions opt,
                   std::function<State(double, const Vec&)> to_state = {})
        : rhs_(std::move(rhs)), opt_(std::move(opt)), to_state_(std::move(to_state)) {}

    FlatTrajectory run(double t0, Vec y0, double t1, std::vector<Event>* events_out = nullptr) {
        FlatTrajectory traj;
        traj.t0_ = t0;
        traj.t1_ = t1;
        if (!all_finite(y0)) throw NonFiniteState("integrate: non-finite initial state");
        const std::size_t n = y0.size();
        const double dir = (t1 >= t0) ? 1.0 : -1.0;
        const double span = std::fabs(t1 - t0);
        const double hmin = 1e-14 * std::max(span, 1.0);

        Vec y = y0, k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), yerr(n);
        double t = t0;
        eval_rhs(t, y, k1);
        double h = dir * initial_step(t, y, k1);
        traj.nodes_.push_back({t, y});

        std::vector<double> ev_prev(opt_.events.size());
        for (std::size_t i = 0; i < opt_.events.size(); ++i)
            ev_prev[i] = opt_.events[i].fn(make_state(t, y));

        std::size_t steps = 0;
        while (dir * (t1 - t) > 1e-14 * std::max(1.0, std::fabs(t))) {
            if (++steps > opt_.max_steps) {
                traj.status_ = TrajectoryStatus::truncated_min_step;
                traj.diagnostic_ = "step budget exhausted";
                break;
            }
            if (dir * (t + h - t1) > 0) h = t1 - t;
            if (std::fabs(h) < hmin) {
                traj.status_ = TrajectoryStatus::truncated_min_step;
                traj.diagnostic_ = "step size underflow at t=" + std::to_string(t);
                break;
            }

            bool bad = false;
            stage(t, y, h, k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, yerr, bad);
            double err = 0.0;
            if (bad)
                err = 10.0;  // force rejection on non-finite stages
            else {
                for (std::size_t i = 0; i < n; ++i) {
                    double sk = opt_.abs_tol + opt_.rel_tol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
                    double e = yerr[i] / sk;
                    err += e * e;
                }
                err = std::sqrt(err / n);
            }

            if (err <= 1.0) {
                DenseSegment seg = make_dense(t, h, y, ynew, k1, k2, k3, k4, k5, k6, k7);
                traj.segs_.push_back(seg);
                double tnew = t + h;
                if (!all_finite(ynew)) {
                    traj.status_ = TrajectoryStatus::truncated_min_step;
                    traj.diagnostic_ = "non-finite state reached";
                    break;
                }
                locate_events(seg, t, tnew, ev_prev, events_out);
                t = tnew;
                y = ynew;
                k1 = k7;  // FSAL
                traj.nodes_.push_back({t, y});
            }
            double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
            fac = std::clamp(fac, 0.2, 5.0);
            h *= fac;
        }
        traj.t1_ = t;
        return traj;
    }

    State make_state(double t, const Vec& y) const {
        if (to_state_) return to_state_(t, y);
        State s;
        s.t = t;
        s.q = y;
        return s;
    }

private:
    FlatTrajectory::Rhs rhs_;
    IntegrateOptions opt_;
    std::function<State(double, const Vec&)> to_state_;

    void eval_rhs(double t, const Vec& y, Vec& dy) { rhs_(t, y, dy); }

    double initial_step(double t, const Vec& y, const Vec& dy) {
        double d0 = 0, d1 = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            double sk = opt_.abs_tol + opt_.rel_tol * std::fabs(y[i]);
            d0 += (y[i] / sk) * (y[i] / sk);
            d1 += (dy[i] / sk) * (dy[i] / sk);
        }
        double h = (d0 > 1e-10 && d1 > 1e-10) ? 0.01 * std::sqrt(d0 / d1) : 1e-6;
        return std::min(h, 0.1);
    }

    void stage(double t, const Vec& y, double h, const Vec& k1, Vec& k2, Vec& k3, Vec& k4,
               Vec& k5, Vec& k6, Vec& k7, Vec& ytmp, Vec& ynew, Vec& yerr, bool& bad) {
        using namespace detail;
        const std::size_t n = y.size();
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * kA21 * k1[i];
        eval_rhs(t + h / 5.0, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (kA31 * k1[i] + kA32 * k2[i]);
        eval_rhs(t + 3.0 * h / 10.0, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (kA41 * k1[i] + kA42 * k2[i] + kA43 * k3[i]);
        eval_rhs(t + 4.0 * h / 5.0, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (kA51 * k1[i] + kA52 * k2[i] + kA53 * k3[i] + kA54 * k4[i]);
        eval_rhs(t + 8.0 * h / 9.0, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (kA61 * k1[i] + kA62 * k2[i] + kA63 * k3[i] + kA64 * k4[i] +
                                  kA65 * k5[i]);
        eval_rhs(t + h, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (kB1 * k1[i] + kB3 * k3[i] + kB4 * k4[i] + kB5 * k5[i] +
                                  kB6 * k6[i]);
        eval_rhs(t + h, ynew, k7);
        bad = false;
        for (std::size_t i = 0; i < n; ++i) {
            yerr[i] = h * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] + kE5 * k5[i] + kE6 * k6[i] +
                           kE7 * k7[i]);
            if (!std::isfinite(ynew[i]) || !std::isfinite(yerr[i])) bad = true;
        }
    }

    DenseSegment make_dense(double t, double h, const Vec& y, const Vec& ynew, const Vec& k1,
                            const Vec& k2, const Vec& k3, const Vec& k4, const Vec& k5,
                            const Vec& k6, const Vec& k7) {
        using namespace detail;
        const std::size_t n = y.size();
        DenseSegment seg;
        seg.t0 = t;
        seg.h = h;
        seg.r1.resize(n);
        seg.r2.resize(n);
        seg.r3.resize(n);
        seg.r4.resize(n);
        seg.r5.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            double dy = ynew[i] - y[i];
            double bspl = h * k1[i] - dy;
            seg.r1[i] = y[i];
            seg.r2[i] = dy;
            seg.r3[i] = bspl;
            seg.r4[i] = dy - h * k7[i] - bspl;
            seg.r5[i] = h * (kD1 * k1[i] + kD3 * k3[i] + kD4 * k4[i] + kD5 * k5[i] +
                             kD6 * k6[i] + kD7 * k7[i]);
        }
        return seg;
    }

    void locate_events(const DenseSegment& seg, double ta, double tb,
                       std::vector<double>& ev_prev, std::vector<Event>* out) {
        if (opt_.events.empty()) return;
        // scan a few interior samples so double crossings within one step are caught
        constexpr int kSamples = 8;
        std::vector<std::pair<double, std::size_t>> hits;
        for (std::size_t e = 0; e < opt_.events.size(); ++e) {
            const auto& spec = opt_.events[e];
            double fprev = ev_prev[e];
            double tprev = ta;
            for (int j = 1; j <= kSamples; ++j) {
                double tj = ta + (tb - ta) * j / kSamples;
                double fj = spec.fn(make_state(tj, seg.eval(tj)));
                if (fprev == 0.0 && j == 1) {
                    // started exactly on a zero; skip to avoid duplicate firing
                } else if (fprev * fj < 0.0 || (fj == 0.0 && fprev != 0.0)) {
                    bool rising = fprev < fj;
                    bool want = spec.direction == EventSpec::Direction::any ||
                                (rising && spec.direction == EventSpec::Direction::rising) ||
                                (!rising && spec.direction == EventSpec::Direction::falling);
                    if (want) {
                        double troot = fj == 0.0 ? tj
                                                 : find_root(
                                                       [&](double tt) {
                                                           return spec.fn(make_state(tt, seg.eval(tt)));
                                                       },
                                                       tprev, tj, opt_.event_time_tol);
                        hits.push_back({troot, e});
                    }
                }
                fprev = fj;
                tprev = tj;
            }
            ev_prev[e] = fprev;
        }
        if (out) {
            std::stable_sort(hits.begin(), hits.end(), [&](const auto& a, const auto& b) {
                if (a.first != b.first) return (tb > ta) ? a.first < b.first : a.first > b.first;
                return a.second < b.second;  // ties by registration order
            });
            for (const auto& [troot, e] : hits)
                out->push_back({troot, opt_.events[e].id, make_state(troot, seg.eval(troot))});
        }
    }
};

/// Trajectory of a SystemDef: wraps the flat solution and exposes States.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(std::shared_ptr<const SystemDef> sys, FlatTrajectory flat,
               std::vector<Event> events)
        : sys_(std::move(sys)), flat_(std::move(flat)), events_(std::move(events)) {}

    double t_begin() const { return flat_.t_begin(); }
    double t_end() const { return flat_.t_end(); }
    TrajectoryStatus status() const { return flat_.status(); }
    const std::string& diagnostic() const { return flat_.diagnostic(); }
    const std::vector<Event>& events() const { return events_; }
    const FlatTrajectory& flat() const { return flat_; }
    const SystemDef& sys() const { return *sys_; }

    State state(double t) const { return unpack(*sys_, t, flat_.eval(t)); }

    static State unpack(const SystemDef& sys, double t, const Vec& y) {
        std::size_t n = sys.n_dof;
        State s;
        s.t = t;
        s.q.assign(y.begin(), y.begin() + n);
        s.qdot.assign(y.begin() + n, y.begin() + 2 * n);
        s.aux.assign(y.begin() + 2 * n, y.end());
        return s;
    }

    static Vec pack(const State& s) {
        Vec y;
        y.reserve(2 * s.q.size() + s.aux.size());
        y.insert(y.end(), s.q.begin(), s.q.end());
        y.insert(y.end(), s.qdot.begin(), s.qdot.end());
        y.insert(y.end(), s.aux.begin(), s.aux.end());
        return y;
    }

private:
    std::shared_ptr<const SystemDef> sys_;  // owned copy; keeps dense states valid
    FlatTrajectory flat_;
    std::vector<Event> events_;
};

/// Integrate qddot = f(t,q,qdot) (plus any aux channels) from `init` to t1.
inline Trajectory integrate(const SystemDef& sys, const State& init, double t1,
                            IntegrateOptions opt = {}) {
    if (init.q.size() != sys.n_dof || init.qdot.size() != sys.n_dof)
        throw DomainError("integrate: state dimension mismatch");
    if (!init.finite()) throw NonFiniteState("integrate: non-finite initial state");
    auto owned = std::make_shared<const SystemDef>(sys);
    const std::size_t n = owned->n_dof;
    auto rhs = [owned, n](double t, const Vec& y, Vec& dy) {
        State s = Trajectory::unpack(*owned, t, y);
        Vec f = owned->force(s);
        dy.resize(y.size());
        for (std::size_t i = 0; i < n; ++i) dy[i] = s.qdot[i];
        for (std::size_t i = 0; i < n; ++i) dy[n + i] = f[i];
        if (owned->n_aux) {
            Vec a = owned->aux_rhs(s);
            for (std::size_t i = 0; i < owned->n_aux; ++i) dy[2 * n + i] = a[i];
        }
    };
    auto to_state = [owned](double t, const Vec& y) { return Trajectory::unpack(*owned, t, y); };
    FlatIntegrator integ(rhs, opt, to_state);
    std::vector<Event> events;
    FlatTrajectory flat = integ.run(init.t, Trajectory::pack(init), t1, &events);
    return Trajectory(owned, std::move(flat), std::move(events));
}

inline State dense_eval(const Trajectory& traj, double t) { return traj.state(t); }

}  // namespace noether
