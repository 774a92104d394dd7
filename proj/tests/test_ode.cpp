#include "catch2/catch_amalgamated.hpp"

#include <cmath>

#include "noether/ode.hpp"

using namespace noether;
using Catch::Approx;

namespace {

SystemDef free_particle(std::size_t n) {
    SystemDef sys;
    sys.n_dof = n;
    sys.name = "free";
    sys.force = [n](const State&) { return Vec(n, 0.0); };
    sys.lagrangian = [](const State& s) { return 0.5 * dot(s.qdot, s.qdot); };
    return sys;
}

SystemDef harmonic() {
    SystemDef sys;
    sys.n_dof = 1;
    sys.name = "harmonic";
    sys.force = [](const State& s) { return Vec{-s.q[0]}; };
    sys.lagrangian = [](const State& s) { return 0.5 * (s.qdot[0] * s.qdot[0] - s.q[0] * s.q[0]); };
    return sys;
}

}  // namespace

TEST_CASE("free motion is exact") {
    auto sys = free_particle(2);
    State init(0.0, Vec{1.0, -2.0}, Vec{0.5, 0.25});
    auto traj = integrate(sys, init, 10.0);
    REQUIRE(traj.status() == TrajectoryStatus::ok);
    State end = traj.state(10.0);
    CHECK(end.q[0] == Approx(1.0 + 0.5 * 10).margin(1e-10));
    CHECK(end.q[1] == Approx(-2.0 + 0.25 * 10).margin(1e-10));
    // dense midpoint of a linear solution is exact
    State mid = traj.state(3.7);
    CHECK(mid.q[0] == Approx(1.0 + 0.5 * 3.7).margin(1e-10));
    CHECK(mid.qdot[0] == Approx(0.5).margin(1e-12));
}

TEST_CASE("harmonic oscillator matches sin over [0,20]") {
    auto sys = harmonic();
    State init(0.0, Vec{0.0}, Vec{1.0});
    auto traj = integrate(sys, init, 20.0);
    double worst = 0.0;
    for (double t = 0.0; t <= 20.0; t += 0.37) {
        State s = traj.state(t);
        worst = std::max(worst, std::fabs(s.q[0] - std::sin(t)));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("dense output satisfies the equation of motion between nodes") {
    auto sys = harmonic();
    State init(0.0, Vec{0.3}, Vec{0.7});
    auto traj = integrate(sys, init, 5.0);
    // residual qddot + q at an off-node time, qddot from differentiating dense qdot
    double t = 2.34567;
    double h = 1e-5;
    double qd_p = traj.state(t + h).qdot[0];
    double qd_m = traj.state(t - h).qdot[0];
    double qddot = (qd_p - qd_m) / (2 * h);
    CHECK(std::fabs(qddot + traj.state(t).q[0]) < 1e-6);
}

TEST_CASE("reversibility") {
    auto sys = harmonic();
    State init(0.0, Vec{0.2}, Vec{-0.4});
    auto fwd = integrate(sys, init, 15.0);
    State far = fwd.state(15.0);
    auto back = integrate(sys, far, 0.0);
    State home = back.state(0.0);
    CHECK(home.q[0] == Approx(0.2).margin(1e-7));
    CHECK(home.qdot[0] == Approx(-0.4).margin(1e-7));
}

TEST_CASE("events: turning points of sin located to tight tolerance") {
    auto sys = harmonic();
    State init(0.0, Vec{0.0}, Vec{1.0});
    IntegrateOptions opt;
    EventSpec turning;
    turning.id = "turning";
    turning.fn = [](const State& s) { return s.qdot[0]; };
    opt.events.push_back(turning);
    auto traj = integrate(sys, init, 10.0, opt);
    REQUIRE(traj.events().size() == 3);  // pi/2, 3pi/2, 5pi/2
    double expect[3] = {M_PI / 2, 3 * M_PI / 2, 5 * M_PI / 2};
    for (int i = 0; i < 3; ++i) {
        CHECK(traj.events()[i].t == Approx(expect[i]).margin(1e-10));
        CHECK(std::fabs(traj.events()[i].state.qdot[0]) < 1e-10);
    }
}

TEST_CASE("event direction filter") {
    auto sys = harmonic();
    State init(0.0, Vec{0.0}, Vec{1.0});
    IntegrateOptions opt;
    EventSpec rising;
    rising.id = "q-zero-rising";
    rising.fn = [](const State& s) { return s.q[0]; };
    rising.direction = EventSpec::Direction::rising;
    opt.events.push_back(rising);
    auto traj = integrate(sys, init, 10.0, opt);
    REQUIRE(traj.events().size() == 1);  // only t = 2pi crosses upward (t=0 start excluded)
    CHECK(traj.events()[0].t == Approx(2 * M_PI).margin(1e-10));
}

TEST_CASE("singular force truncates instead of crashing") {
    SystemDef sys;
    sys.n_dof = 1;
    sys.name = "collapse";
    // attractive inverse-cube: falls into q=0 in finite time
    sys.force = [](const State& s) { return Vec{-1.0 / (s.q[0] * s.q[0] * s.q[0])}; };
    sys.lagrangian = [](const State& s) {
        return 0.5 * s.qdot[0] * s.qdot[0] - 0.5 / (s.q[0] * s.q[0]);
    };
    State init(0.0, Vec{1.0}, Vec{0.0});
    auto traj = integrate(sys, init, 10.0);
    CHECK(traj.status() == TrajectoryStatus::truncated_min_step);
    CHECK(traj.t_end() < 10.0);
    CHECK(!traj.diagnostic().empty());
}

TEST_CASE("aux channels co-integrate") {
    // q'' = 0 with aux integrating B' = t, so B = t^2/2
    SystemDef sys = free_particle(1);
    sys.n_aux = 1;
    sys.aux_rhs = [](const State& s) { return Vec{s.t}; };
    State init(0.0, Vec{0.0}, Vec{1.0});
    init.aux = Vec{0.0};
    auto traj = integrate(sys, init, 4.0);
    CHECK(traj.state(4.0).aux[0] == Approx(8.0).epsilon(1e-10));
    CHECK(traj.state(1.5).aux[0] == Approx(1.125).epsilon(1e-9));
}
