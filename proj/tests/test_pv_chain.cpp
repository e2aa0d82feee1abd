#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hybridplant/pv_chain.hpp"

using namespace hybridplant;

TEST_CASE("boost converter derivatives") {
    BoostParams bp;
    SECTION("analytic equilibrium zeroes both loops") {
        double duty = 0.5, v_in = 303.2;
        double v_c = v_in / (1.0 - duty);
        double i_l = v_c / (bp.r_load * (1.0 - duty));
        auto d = boost_derivatives({i_l, v_c}, v_in, duty, bp);
        CHECK(d[0] == Catch::Approx(0.0).margin(1e-9));
        CHECK(d[1] == Catch::Approx(0.0).margin(1e-9));
        CHECK(v_c == Catch::Approx(606.4));
    }
    SECTION("unit duty is rejected") {
        CHECK_THROWS_AS(boost_derivatives({1.0, 100.0}, 300.0, 1.0, bp), DomainError);
    }
    SECTION("zero duty reduces to the plain source circuit") {
        auto d = boost_derivatives({2.0, 10.0}, 300.0, 0.0, bp);
        CHECK(d[1] > 0.0);  // i_l exceeds the load draw, capacitor charges
        auto d2 = boost_derivatives({0.5, 10.0}, 300.0, 0.0, bp);
        CHECK(std::signbit(d2[1]) == std::signbit(0.5 - 10.0 / bp.r_load));
    }
}

TEST_CASE("boost converter settles at the averaged-model equilibrium") {
    BoostParams bp;
    double v_in = 303.2;
    for (double duty : {0.2, 0.5, 0.7}) {
        BoostState s{0.0, v_in};
        // 1.5 s at 20 us resolves every transient of this LC pair
        const double dt = 2e-5;
        for (int k = 0; k < 75000; ++k) {
            auto f = [&](const std::array<double, 2>& x) {
                return boost_derivatives({x[0], x[1]}, v_in, duty, bp);
            };
            std::array<double, 2> x{s.i_l, s.v_c};
            x = rk4_step<2>(x, f, dt);
            s = {x[0], x[1]};
        }
        double expected = v_in / (1.0 - duty);
        CHECK(s.v_c == Catch::Approx(expected).epsilon(0.005));
    }
}

TEST_CASE("perturb-and-observe rule") {
    MpptState s{30.0, 100.0, 0.5, 0.5};
    SECTION("gain keeps the direction") {
        MpptState n = perturb_observe_step(s, 101.0);
        CHECK(n.v_ref == Catch::Approx(30.5));
        CHECK(n.prev_dv == Catch::Approx(0.5));
    }
    SECTION("loss reverses the direction") {
        MpptState n = perturb_observe_step(s, 99.0);
        CHECK(n.v_ref == Catch::Approx(29.5));
        CHECK(n.prev_dv == Catch::Approx(-0.5));
    }
    SECTION("invalid step magnitude is rejected") {
        MpptState bad = s;
        bad.dv_mag = 0.0;
        CHECK_THROWS_AS(perturb_observe_step(bad, 100.0), DomainError);
    }
}

TEST_CASE("tracker converges on the module curve and oscillates tightly") {
    PvModuleParams module = calibrate_series_shunt(PvModuleParams{});
    PvOperatingConditions stc{1000.0, module.t_nominal};
    IvPoint mpp = mpp_scan(stc, module, 0.01);

    MpptState s{30.0, 0.0, 0.0, 0.5};
    auto measure = [&](double v) { return v * solve_output_current(v, stc, module); };
    int converged_at = -1;
    for (int k = 0; k < 200; ++k) {
        s = perturb_observe_step(s, measure(s.v_ref));
        if (converged_at < 0 && std::abs(s.v_ref - mpp.v) <= 2.0 * s.dv_mag) converged_at = k;
    }
    REQUIRE(converged_at >= 0);
    // once captured, the orbit stays within two steps of the optimum
    for (int k = 0; k < 200; ++k) {
        s = perturb_observe_step(s, measure(s.v_ref));
        CHECK(std::abs(s.v_ref - mpp.v) <= 2.0 * s.dv_mag + 1e-9);
    }
}

TEST_CASE("tracker captures the argmax of any unimodal curve") {
    for (double v_star : {12.3, 25.0, 40.1}) {
        auto curve = [&](double v) { return 300.0 - (v - v_star) * (v - v_star); };
        MpptState s{5.0, 0.0, 0.0, 0.5};
        for (int k = 0; k < 150; ++k) s = perturb_observe_step(s, curve(s.v_ref));
        for (int k = 0; k < 100; ++k) {
            s = perturb_observe_step(s, curve(s.v_ref));
            CHECK(std::abs(s.v_ref - v_star) <= 2.0 * s.dv_mag + 1e-9);
        }
    }
}

TEST_CASE("averaged bridge phase voltages") {
    auto v = inverter_phase_voltages(1.0, 0.0, 0.0, 1200.0);
    CHECK(v[0] == Catch::Approx(400.0));
    CHECK(v[1] == Catch::Approx(-200.0));
    CHECK(v[2] == Catch::Approx(-200.0));
    auto z = inverter_phase_voltages(0.0, 0.0, 0.0, 1200.0);
    CHECK(z[0] == 0.0);
    auto common = inverter_phase_voltages(1.0, 1.0, 1.0, 1200.0);
    CHECK(common[0] == Catch::Approx(0.0).margin(1e-12));
    CHECK(common[1] == Catch::Approx(0.0).margin(1e-12));
    CHECK(common[2] == Catch::Approx(0.0).margin(1e-12));
    CHECK_THROWS_AS(inverter_phase_voltages(1.5, 0.0, 0.0, 1200.0), DomainError);
}

TEST_CASE("filter dynamics in the rotating frame") {
    RlFilterParams f;
    SECTION("no drive, no response") {
        auto d = rl_filter_dq_derivatives({0, 0}, {10.0, 520.0}, {10.0, 520.0}, f);
        CHECK(d[0] == Catch::Approx(0.0).margin(1e-12));
        CHECK(d[1] == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("a d-axis mismatch drives the d current against it") {
        double delta = 7.5;
        auto d = rl_filter_dq_derivatives({0, 0}, {delta, 0.0}, {0.0, 0.0}, f);
        CHECK(d[0] == Catch::Approx(-delta / f.l_f));
    }
    SECTION("pure cross-coupling") {
        auto d = rl_filter_dq_derivatives({0.0, 1.0}, {3.0, 4.0}, {3.0, 4.0}, f);
        CHECK(d[0] == Catch::Approx(f.omega));
    }
}

TEST_CASE("power measurement conventions") {
    CHECK(measure_pq({100, 200}, {0, 0}, PowerConvention::Paper).p == 0.0);
    PqPair paper = measure_pq({0.0, 563.4}, {0.0, 10.0}, PowerConvention::Paper);
    CHECK(paper.p == Catch::Approx(5634.0));
    CHECK(paper.q == Catch::Approx(0.0).margin(1e-12));
    PqPair phys = measure_pq({0.0, 563.4}, {0.0, 10.0}, PowerConvention::Physical);
    CHECK(phys.p == Catch::Approx(8451.0));

    // the physical form is exactly 3/2 of the printed form
    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k) {
        DqPair v{static_cast<double>(rng() % 1000), static_cast<double>(rng() % 1000)};
        DqPair i{static_cast<double>(rng() % 100), static_cast<double>(rng() % 100)};
        PqPair a = measure_pq(v, i, PowerConvention::Paper);
        PqPair b = measure_pq(v, i, PowerConvention::Physical);
        CHECK(b.p == Catch::Approx(1.5 * a.p).margin(1e-9));
        CHECK(b.q == Catch::Approx(1.5 * a.q).margin(1e-9));
    }
}

TEST_CASE("power loop holds its output at zero error") {
    PowerLoopState loop;
    loop.p_ref = -14000.0;
    loop.q_ref = 0.0;
    PiGains g{5.6749, 11.6077};
    DqPair v_grid{0.0, 563.4};
    // drive away from zero first
    power_loop_step(loop, g, {0.0, 0.0}, v_grid, 1e-3);
    double accum_q = loop.pi_q.integral_accum;
    loop.pi_q.prev_error = 0.0;
    loop.pi_d.prev_error = 0.0;
    DqPair out = power_loop_step(loop, g, {-14000.0, 0.0}, v_grid, 1e-3);
    CHECK(out.q == Catch::Approx(v_grid.q + g.ki * accum_q).margin(1e-9));
    CHECK(out.d == Catch::Approx(v_grid.d + g.ki * loop.pi_d.integral_accum).margin(1e-9));
}

TEST_CASE("pv string closed loop reaches its reference at unity power factor") {
    PvStringConfig cfg;
    cfg.mppt_enabled = false;
    cfg.fixed_p_ref = -14005.0;
    PvStringSim sim(cfg);
    for (int k = 0; k < 12000; ++k) sim.control_step(1e-3, 1e-4);
    PqPair pq = sim.grid_power();
    double rated = 14000.0;
    CHECK(std::abs(pq.p - cfg.fixed_p_ref) < 0.002 * rated);
    CHECK(std::abs(pq.q) < 0.01 * rated);
    // negative reference means power flows out toward the grid node
    CHECK(pq.p < 0.0);
    CHECK(sim.filter_current().q < 0.0);
    // current and voltage vectors are collinear to better than one degree
    double angle = std::atan2(std::abs(pq.q), std::abs(pq.p)) * 180.0 / kPi;
    CHECK(angle < 1.0);
}

TEST_CASE("pv string with the tracker lands at the string rating") {
    PvStringConfig cfg;
    cfg.module = calibrate_series_shunt(PvModuleParams{});
    cfg.mppt_enabled = true;
    PvStringSim sim(cfg);
    for (int k = 0; k < 15000; ++k) sim.control_step(1e-3, 1e-4);
    PqPair pq = sim.grid_power();
    CHECK(-pq.p == Catch::Approx(14000.0).epsilon(0.02));
    CHECK(std::abs(pq.q) < 0.01 * 14000.0);
    CHECK(std::abs(sim.tracker().v_ref - 38.41) < 1.1);
}
