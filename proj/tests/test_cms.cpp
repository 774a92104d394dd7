#include "catch2/catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "noether/cms.hpp"
#include "noether/framework.hpp"

using namespace noether;
using namespace noether::cms;
using Catch::Approx;

namespace {

// ascending positions keep C3 > 0 along the whole trajectory
State random_admissible(std::mt19937_64& rng, double boost = 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        State s;
        s.t = u(rng) - 0.5;
        double x1 = -1.5 - 0.6 * u(rng);
        double x2 = x1 + 0.8 + 1.2 * u(rng);
        double x3 = x2 + 0.8 + 1.2 * u(rng);
        s.q = Vec{x1, x2, x3};
        s.qdot = Vec{boost + 1.2 * (u(rng) - 0.5), boost + 1.2 * (u(rng) - 0.5),
                     boost + 1.2 * (u(rng) - 0.5)};
        Params par{1.0};
        auto I = cms_integrals(par, s);
        Scaled sc = scaled_invariants(par, I);
        PolarState p = cms_to_polar(par, s);
        double s3 = std::sin(3 * p.phi);
        if (I.C3 <= 0) continue;
        if (s3 * s3 - sc.kappa < 0.05) continue;                      // angular margin
        if ((sc.Etil / sc.C3til) * p.r * p.r - 1.0 < 0.05) continue;  // radial margin
        if (std::fabs(p.phidot) < 0.05 || std::fabs(p.rdot) < 0.05) continue;
        return s;
    }
}

}  // namespace

TEST_CASE("cms rhs: symmetry, total force, euler-lagrange") {
    Params par{1.0};
    auto sys = make_system(par);

    State sym(0.0, Vec{-0.7, 0.0, 0.7}, Vec{0.0, 0.0, 0.0});
    Vec f = cms_rhs(par, sym);
    CHECK(f[1] == Approx(0.0).margin(1e-15));

    std::mt19937_64 rng(3);
    for (int i = 0; i < 6; ++i) {
        State s = random_admissible(rng);
        Vec g = cms_rhs(par, s);
        CHECK(g[0] + g[1] + g[2] == Approx(0.0).margin(1e-12));
        CHECK(max_abs(euler_lagrange_residual(sys, s)) < 1e-9);
    }

    CHECK_THROWS_AS(cms_rhs(par, State(0.0, Vec{0.0, 0.0, 1.0}, Vec{0.0, 0.0, 0.0})), Collision);
}

TEST_CASE("integrals: golden values") {
    Params par{1.0};
    State s1(0.0, Vec{0.0, 1.0, 2.0}, Vec{1.0, 1.0, 1.0});
    CHECK(cms_integrals(par, s1).P == Approx(3.0));

    // rest configuration (-1, 0, 1): C3 = 81 k by direct substitution
    State s2(0.0, Vec{-1.0, 0.0, 1.0}, Vec{0.0, 0.0, 0.0});
    auto I = cms_integrals(par, s2);
    CHECK(I.C3 == Approx(81.0).epsilon(1e-13));
    CHECK(I.E == Approx(9.0 / 4.0));

    Params par3{3.0};
    CHECK(cms_integrals(par3, s2).C3 == Approx(3.0 * 81.0).epsilon(1e-13));

    // polar radius of the same configuration
    PolarState p = cms_to_polar(par, s2);
    CHECK(p.r == Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(p.xbar == Approx(0.0).margin(1e-15));
}

TEST_CASE("all nine integrals conserved along a trajectory") {
    Params par{1.0};
    auto sys = make_system(par);
    State init(0.0, Vec{-1.2, 0.1, 1.3}, Vec{0.55, -0.75, 0.35});
    auto traj = integrate(sys, init, 30.0);
    REQUIRE(traj.status() == TrajectoryStatus::ok);
    auto I0 = cms_integrals(par, init);
    double T0 = cms_T(par, init);
    double Psi0 = cms_Psi(par, init);
    double w[11] = {0};
    for (double t = 0.0; t <= 30.0; t += 0.25) {
        State s = traj.state(t);
        auto I = cms_integrals(par, s);
        w[0] = std::max(w[0], std::fabs(I.P - I0.P));
        w[1] = std::max(w[1], std::fabs(I.E - I0.E) / std::fabs(I0.E));
        w[2] = std::max(w[2], std::fabs(I.K - I0.K));
        w[3] = std::max(w[3], std::fabs(I.E_dil - I0.E_dil) / std::max(1.0, std::fabs(I0.E_dil)));
        w[4] = std::max(w[4], std::fabs(I.E_conf - I0.E_conf) /
                                  std::max(1.0, std::fabs(I0.E_conf)));
        w[5] = std::max(w[5], std::fabs(I.C1 - I0.C1) / std::max(1.0, std::fabs(I0.C1)));
        w[6] = std::max(w[6], std::fabs(I.C2 - I0.C2) / std::max(1.0, std::fabs(I0.C2)));
        w[7] = std::max(w[7], std::fabs(I.C3 - I0.C3) / std::fabs(I0.C3));
        w[8] = std::max(w[8], std::fabs(I.C4 - I0.C4) / std::max(1.0, std::fabs(I0.C4)));
        w[9] = std::max(w[9], std::fabs(cms_T(par, s) - T0));
        // Psi wraps by 2 pi when the angular phase passes the cos < 0 turning
        w[10] = std::max(w[10], std::fabs(std::remainder(cms_Psi(par, s) - Psi0, 2 * M_PI)));
    }
    for (int i = 0; i < 11; ++i) CHECK(w[i] < 1e-7);
}

TEST_CASE("algebraic identities at random states") {
    Params par{1.0};
    std::mt19937_64 rng(7);
    for (int i = 0; i < 12; ++i) {
        State s = random_admissible(rng, (i % 3 == 0) ? 0.4 : 0.0);
        auto I = cms_integrals(par, s);
        auto res = cms_identities(par, s);
        double scale = std::fabs(I.E * I.C3);
        // the combination factorizes through E C3 with coefficient 1/6
        CHECK(std::fabs(res.factorization) / scale < 1e-9);
        // the printed 2/3 coefficient leaves exactly -E C3 / 2 behind
        CHECK(res.factorization_displayed == Approx(-0.5 * I.E * I.C3).epsilon(1e-9));
        CHECK(std::fabs(res.pt_k) < 1e-9 * std::max(1.0, std::fabs(I.K)));
        CHECK(std::fabs(res.scal_E) < 1e-10 * std::max(1.0, std::fabs(I.E)));
        CHECK(std::fabs(res.scal_C3) < 1e-10 * std::fabs(I.C3));
    }
}

TEST_CASE("polar round trip and degenerate-energy guard") {
    Params par{1.0};
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        State s = random_admissible(rng, 0.3 * (i % 4));
        PolarState p = cms_to_polar(par, s);
        State back = cms_from_polar(par, p);
        for (int j = 0; j < 3; ++j) {
            worst = std::max(worst, std::fabs(back.q[j] - s.q[j]));
            worst = std::max(worst, std::fabs(back.qdot[j] - s.qdot[j]));
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("T and Psi: dual evaluation paths and special points") {
    Params par{1.0};
    auto sys = make_system(par);
    std::mt19937_64 rng(13);

    SECTION("polar and cartesian T agree in any frame") {
        for (int i = 0; i < 8; ++i) {
            State s = random_admissible(rng, 0.5 * (i % 3));
            auto I = cms_integrals(par, s);
            PolarState p = cms_to_polar(par, s);
            Scaled sc = scaled_invariants(par, I);
            double t_polar =
                s.t - p.sgn_r / sc.Etil *
                          std::sqrt(std::max(0.5 * (sc.Etil * p.r * p.r - sc.C3til), 0.0)) *
                          ((p.rdot >= 0) ? 1.0 : -1.0) * p.sgn_r;
            // (sgn factors collapse: T = t - r rdot / (2 Etil))
            t_polar = s.t - p.r * p.rdot / (2.0 * sc.Etil);
            CHECK(cms_T(par, s) == Approx(t_polar).margin(1e-10));
        }
    }

    SECTION("Psi from the velocity-cubic route matches the polar route") {
        for (int i = 0; i < 8; ++i) {
            State s = random_admissible(rng);
            double a = cms_Psi(par, s);
            double b = cms_Psi_from_C4(par, s);
            // the C4 route returns the principal arctan branch
            CHECK(std::remainder(a - b, M_PI) == Approx(0.0).margin(1e-8));
            CHECK(std::tan(a) == Approx(std::tan(b)).epsilon(1e-7));
        }
    }

    SECTION("T equals t at the radial minimum event") {
        State init(0.0, Vec{-1.4, -0.1, 1.2}, Vec{0.4, -0.5, 0.1});
        IntegrateOptions opt;
        for (auto& e : cms_events(par)) opt.events.push_back(e);
        // bring the motion toward its radial minimum first
        auto I = cms_integrals(par, init);
        double Tstar = cms_T(par, init);
        auto traj = integrate(sys, init, Tstar + 6.0, opt);
        bool found = false;
        for (auto& e : traj.events())
            if (e.id == "radial_turning") {
                CHECK(e.t == Approx(Tstar).margin(1e-8));
                CHECK(cms_T(par, e.state) == Approx(e.t).margin(1e-8));
                found = true;
            }
        CHECK(found);
    }
}

TEST_CASE("shape relation along rest-frame trajectories") {
    Params par{1.0};
    auto sys = make_system(par);
    std::mt19937_64 rng(17);
    for (int run = 0; run < 5; ++run) {
        State init = random_admissible(rng);
        // project to the rest frame
        double p = (init.qdot[0] + init.qdot[1] + init.qdot[2]) / 3.0;
        for (auto& v : init.qdot) v -= p;
        double psi = cms_Psi(par, init);
        auto traj = integrate(sys, init, init.t + 6.0);
        double worst = 0.0;
        for (double t = init.t; t <= init.t + 6.0; t += 0.1)
            worst = std::max(worst, std::fabs(cms_shape_residual(par, traj.state(t), psi)));
        CHECK(worst < 1e-6);
        // sensitivity: perturbing Psi by 0.1 must move the residual visibly
        CHECK(std::fabs(cms_shape_residual(par, traj.state(1.0), psi + 0.1)) > 0.01);
    }
}

TEST_CASE("poisson bracket tables") {
    Params par{1.0};
    auto sys = make_system(par);
    auto P = field_P(par);
    auto E = field_E(par);
    auto K = field_K(par);
    auto C1 = field_C1(par);
    auto C2 = field_C2(par);
    auto C3 = field_C3(par);
    auto C3p = field_C3prime(par);
    auto T = field_T(par);
    auto Psi = field_Psi(par);

    std::mt19937_64 rng(19);
    for (int i = 0; i < 20; ++i) {
        State s = random_admissible(rng, 0.3 * (i % 3));
        auto I = cms_integrals(par, s);
        double tol = 1e-5;

        // canonical pairs and the C3 ladder
        CHECK(poisson_bracket(sys, E, T, s) == Approx(1.0).margin(tol));
        CHECK(poisson_bracket(sys, E, K, s) == Approx(I.P).margin(tol));
        // sign note: with P = g^-1 dC/dqdot throughout, {P, K} comes out +3
        CHECK(poisson_bracket(sys, P, K, s) == Approx(3.0).margin(tol));
        CHECK(poisson_bracket(sys, Psi, C3, s) ==
              Approx(18.0 * std::sqrt(I.C3)).epsilon(1e-5));
        // antisymmetry then forces {C3', Psi} = -3 C3'
        double c3p = std::exp(std::sqrt(I.C3) / 3.0);
        CHECK(poisson_bracket(sys, C3p, Psi, s) == Approx(-3.0 * c3p).epsilon(1e-5));

        // scaling-algebra brackets
        CHECK(poisson_bracket(sys, P, C1, s) ==
              Approx(0.5 * I.P * I.P - 3.0 * I.E).margin(tol));
        CHECK(poisson_bracket(sys, P, C2, s) == Approx(-I.C1).margin(tol * 10));
        CHECK(poisson_bracket(sys, C1, C2, s) == Approx(I.P * I.C2).margin(tol * 10));
        CHECK(poisson_bracket(sys, E, C1, s) == Approx(0.0).margin(tol));
        CHECK(poisson_bracket(sys, E, C2, s) == Approx(0.0).margin(tol * 10));

        // the remaining pairs among (P, E, C3', Psi, K, T) vanish
        CHECK(poisson_bracket(sys, P, E, s) == Approx(0.0).margin(tol));
        CHECK(poisson_bracket(sys, P, C3p, s) == Approx(0.0).margin(tol * c3p));
        CHECK(poisson_bracket(sys, P, Psi, s) == Approx(0.0).margin(tol));
        CHECK(poisson_bracket(sys, P, T, s) == Approx(0.0).margin(tol));
        CHECK(poisson_bracket(sys, E, C3p, s) == Approx(0.0).margin(tol * c3p));
        CHECK(poisson_bracket(sys, E, Psi, s) == Approx(0.0).margin(tol));
        CHECK(poisson_bracket(sys, C3p, K, s) == Approx(0.0).margin(tol * c3p));
        CHECK(poisson_bracket(sys, C3p, T, s) == Approx(0.0).margin(tol * c3p));
        CHECK(poisson_bracket(sys, Psi, K, s) == Approx(0.0).margin(tol));
        CHECK(poisson_bracket(sys, Psi, T, s) == Approx(0.0).margin(tol));
        CHECK(poisson_bracket(sys, K, T, s) == Approx(0.0).margin(tol));
    }
}

TEST_CASE("symmetry actions") {
    Params par{1.0};
    auto sys = make_system(par);
    auto P = field_P(par);
    auto E = field_E(par);
    auto K = field_K(par);
    auto C4 = field_C4(par);
    auto T = field_T(par);
    auto Psi = field_Psi(par);
    auto xk = x_of_K(par);
    auto xc3 = x_of_C3(par);
    auto xc4 = x_of_C4(par);
    auto xt = x_of_T(par);

    std::mt19937_64 rng(23);
    for (int i = 0; i < 6; ++i) {
        State s = random_admissible(rng, 0.4 * (i % 2));
        auto I = cms_integrals(par, s);
        CHECK(symmetry_action(sys, xk, P, s) == Approx(3.0).margin(1e-5));
        CHECK(symmetry_action(sys, xk, E, s) == Approx(I.P).margin(1e-5));
        CHECK(symmetry_action(sys, xk, C4, s) == Approx(2.0 * I.E).margin(1e-5));
        CHECK(symmetry_action(sys, xc4, K, s) == Approx(-2.0 * I.E).margin(1e-5));
        CHECK(symmetry_action(sys, xc3, Psi, s) ==
              Approx(18.0 * std::sqrt(I.C3)).epsilon(1e-5));
        CHECK(symmetry_action(sys, xc3, T, s) == Approx(0.0).margin(1e-5 * I.C3));
        CHECK(symmetry_action(sys, xt, Psi, s) == Approx(0.0).margin(1e-5));
        CHECK(symmetry_action(sys, xt, E, s) == Approx(1.0).margin(1e-5));
    }
}

TEST_CASE("commutators close") {
    Params par{1.0};
    auto sys = make_system(par);
    auto xp = x_of_P(par);
    auto xe = x_of_E(par);
    auto xk = x_of_K(par);
    auto xt = x_of_T(par);
    auto xc3p = x_of_C3prime(par);
    auto Psi = field_Psi(par);
    auto xpsi = symmetry_from_integral(sys, Psi);

    std::mt19937_64 rng(29);
    for (int i = 0; i < 4; ++i) {
        State s = random_admissible(rng, 0.3 * i);

        // [X_E, X_K] = -X_P
        Vec c = commutator(sys, xe, xk, s);
        for (int j = 0; j < 3; ++j) CHECK(c[j] == Approx(-1.0).margin(1e-4));

        // [X_Psi, X_C3'] = -3 X_C3' (theorem-consistent with {Psi, C3} = +18 sqrt C3)
        Vec d = commutator(sys, xpsi, xc3p, s);
        Vec x = xc3p.p(s);
        for (int j = 0; j < 3; ++j)
            CHECK(d[j] == Approx(-3.0 * x[j]).epsilon(2e-4).margin(1e-4 * std::fabs(x[j])));

        // abelian subalgebra {P, E, C3', T}
        std::vector<SymmetryField*> ab{&xp, &xe, &xc3p, &xt};
        double scale = std::max(1.0, max_abs(x));
        for (auto* a : ab)
            for (auto* b : ab)
                CHECK(max_abs(commutator(sys, *a, *b, s)) < 1e-4 * scale);
    }
}

TEST_CASE("noether map reproduces the catalogued characteristics") {
    Params par{1.0};
    auto sys = make_system(par);
    std::mt19937_64 rng(31);
    auto C3 = field_C3(par);
    auto C4 = field_C4(par);
    auto T = field_T(par);
    auto K = field_K(par);
    auto xc3_num = symmetry_from_integral(sys, C3);
    auto xc4_num = symmetry_from_integral(sys, C4);
    auto xt_num = symmetry_from_integral(sys, T);
    auto xk_num = symmetry_from_integral(sys, K);
    auto xc3 = x_of_C3(par);
    auto xc4 = x_of_C4(par);
    auto xt = x_of_T(par);

    for (int i = 0; i < 5; ++i) {
        State s = random_admissible(rng, 0.5 * (i % 2));
        Vec a3 = xc3_num.p(s), b3 = xc3.p(s);
        Vec a4 = xc4_num.p(s), b4 = xc4.p(s);
        Vec at = xt_num.p(s), bt = xt.p(s);
        Vec ak = xk_num.p(s);
        for (int j = 0; j < 3; ++j) {
            CHECK(a3[j] == Approx(b3[j]).epsilon(1e-6).margin(1e-6));
            CHECK(a4[j] == Approx(b4[j]).epsilon(1e-6).margin(1e-6));
            CHECK(at[j] == Approx(bt[j]).epsilon(1e-6).margin(1e-6));
            CHECK(ak[j] == Approx(s.t).margin(1e-8));
        }
    }
}

TEST_CASE("integral_from_symmetry reconstructs the total momentum") {
    Params par{1.0};
    auto sys = make_system(par);
    auto xp = x_of_P(par);
    std::mt19937_64 rng(37);
    State base = random_admissible(rng);
    double Pbase = cms_integrals(par, base).P;
    for (int i = 0; i < 6; ++i) {
        State s = random_admissible(rng, 0.4 * (i % 2));
        double rec = integral_from_symmetry(sys, xp, base, s);
        CHECK(rec == Approx(cms_integrals(par, s).P - Pbase).margin(1e-8));
    }
    // spec example: pure velocity change from (0,0,0) to (a,b,c)
    State b2(0.0, Vec{1.0, 2.0, 4.0}, Vec{0.0, 0.0, 0.0});
    State s2(0.0, Vec{1.0, 2.0, 4.0}, Vec{0.3, -0.2, 0.5});
    CHECK(integral_from_symmetry(sys, xp, b2, s2) == Approx(0.6).margin(1e-10));
}

TEST_CASE("classification of the cms symmetries") {
    Params par{1.0};
    auto sys = make_system(par);
    std::mt19937_64 rng(41);
    std::vector<State> samples{random_admissible(rng), random_admissible(rng)};
    CHECK(classify_symmetry(sys, x_of_P(par), samples) == SymmetryType::point);
    CHECK(classify_symmetry(sys, x_of_K(par), samples) == SymmetryType::point);
    CHECK(classify_symmetry(sys, x_of_Edil(par), samples) == SymmetryType::point);
    CHECK(classify_symmetry(sys, x_of_Econf(par), samples) == SymmetryType::point);
    CHECK(classify_symmetry(sys, x_of_C3(par), samples) == SymmetryType::dynamical);
    CHECK(classify_symmetry(sys, x_of_C4(par), samples) == SymmetryType::dynamical);
    CHECK(classify_symmetry(sys, x_of_T(par), samples) == SymmetryType::dynamical);
}

TEST_CASE("transformation groups") {
    Params par{1.0};
    auto sys = make_system(par);
    State init(0.0, Vec{-1.2, 0.1, 1.3}, Vec{0.5, -0.8, 0.3});
    auto traj = integrate(sys, init, 4.0);
    State s = traj.state(1.7);
    auto I = cms_integrals(par, s);
    PolarState p0 = cms_to_polar(par, s);

    SECTION("identity at eps = 0") {
        PolarState a = cms_group_C3(par, p0, I, 0.0);
        PolarState b = cms_group_T(par, p0, I, 0.0);
        PolarState c = cms_group_Psi(par, p0, I, 0.0);
        CHECK(a.phi == p0.phi);
        CHECK(b.xbar == p0.xbar);
        CHECK(c.r == p0.r);
    }

    auto reintegration_residual = [&](const State& m, double span) {
        auto t2 = integrate(sys, m, m.t + span);
        auto Im = cms_integrals(par, m);
        double worst = 0.0;
        for (double t = m.t; t <= m.t + span; t += span / 12.0) {
            auto It = cms_integrals(par, t2.state(t));
            worst = std::max({worst, std::fabs(It.E - Im.E), std::fabs(It.P - Im.P),
                              std::fabs(It.C3 - Im.C3) / std::fabs(Im.C3)});
        }
        return worst;
    };

    SECTION("C3 group: invariants fixed, solutions map to solutions") {
        for (double eps : {-0.01, -0.001, 0.001, 0.01}) {
            PolarState g = cms_group_C3(par, p0, I, eps);
            State m = cms_from_polar(par, g);
            auto Im = cms_integrals(par, m);
            CHECK(Im.C3 == Approx(I.C3).epsilon(1e-10));
            CHECK(Im.E == Approx(I.E).margin(1e-10));
            CHECK(Im.P == Approx(I.P).margin(1e-12));
            CHECK(reintegration_residual(m, 2.0) < 1e-6);
        }
    }

    SECTION("T group: E shifts by eps; T itself is preserved") {
        for (double eps : {-0.1, -0.01, 0.01, 0.1}) {
            PolarState g = cms_group_T(par, p0, I, eps);
            State m = cms_from_polar(par, g);
            auto Im = cms_integrals(par, m);
            CHECK(Im.E == Approx(I.E + eps).margin(1e-10));
            CHECK(Im.P == Approx(I.P).margin(1e-12));
            CHECK(Im.C3 == Approx(I.C3).epsilon(1e-10));
            CHECK(cms_T(par, m) == Approx(cms_T(par, s)).margin(1e-8));
            CHECK(reintegration_residual(m, 2.0) < 1e-6);
        }
    }

    SECTION("Psi group: sqrt(C3) shifts; E, P, Psi, T preserved") {
        for (double eps : {-0.1, -0.01, 0.01, 0.1}) {
            PolarState g = cms_group_Psi(par, p0, I, eps);
            State m = cms_from_polar(par, g);
            auto Im = cms_integrals(par, m);
            CHECK(std::sqrt(Im.C3) == Approx(std::sqrt(I.C3) - 9.0 * eps).epsilon(1e-10));
            CHECK(Im.E == Approx(I.E).margin(1e-10));
            CHECK(Im.P == Approx(I.P).margin(1e-12));
            CHECK(cms_Psi(par, m) == Approx(cms_Psi(par, s)).margin(1e-8));
            CHECK(cms_T(par, m) == Approx(cms_T(par, s)).margin(1e-8));
            CHECK(reintegration_residual(m, 2.0) < 1e-6);
        }
    }
}
