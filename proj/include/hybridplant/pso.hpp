#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hybridplant/errors.hpp"
#include "hybridplant/rng.hpp"

namespace hybridplant {

// Inertia decay and acceleration staging of the swarm. Stage thresholds are
// fixed at 30 / 60 / 85 percent of the budget; lambda2 defaults to the value
// that makes the inertia start exactly at omega_max.
struct PsoSchedule {
    double omega_min = 0.4;
    double omega_max = 0.9;
    double lambda1 = 3.0;
    double lambda2 = std::exp(0.9) / 0.5;
    double c1_init = 2.5;
    double c2_init = 0.5;
    // acceleration increments (alpha, beta) per stage
    double stage1_alpha = 0.085, stage1_beta = -0.0425;   // g/G <= 30%
    double stage2_alpha = 0.045, stage2_beta = -0.09;     // 30% < g/G <= 60%
    double stage3_alpha = -0.025, stage3_beta = 0.05;     // 60% < g/G <= 85%
    double stage4_alpha = -0.0025, stage4_beta = 0.0025;  // g/G > 85%
    // keeps the accelerations from drifting negative over a long run
    double c_min = 0.05;
    double c_max = 4.5;
    double velocity_clamp_fraction = 0.2;  // of each bound's range

    void validate() const {
        if (!(0.0 < omega_min && omega_min < omega_max)) throw ConfigError("need 0 < omega_min < omega_max");
        if (lambda2 <= 0.0) throw ConfigError("lambda2 must be positive");
        if (!(c_min < c_max)) throw ConfigError("need c_min < c_max");
    }
};

inline double inertia_weight(long g, long big_g, const PsoSchedule& sched) {
    if (big_g < 1 || g < 0 || g > big_g) throw DomainError("generation outside [0, G]");
    double frac = static_cast<double>(g) / static_cast<double>(big_g);
    return sched.omega_min +
           std::exp(sched.omega_max - sched.lambda1 * (sched.omega_max + sched.omega_min) * frac) /
               sched.lambda2;
}

inline std::pair<double, double> acceleration_update(double c1, double c2, long g, long big_g,
                                                     const PsoSchedule& sched) {
    if (big_g < 1 || g < 0 || g > big_g) throw DomainError("generation outside [0, G]");
    double frac = static_cast<double>(g) / static_cast<double>(big_g);
    double a, b;
    if (frac <= 0.30) {
        a = sched.stage1_alpha;
        b = sched.stage1_beta;
    } else if (frac <= 0.60) {
        a = sched.stage2_alpha;
        b = sched.stage2_beta;
    } else if (frac <= 0.85) {
        a = sched.stage3_alpha;
        b = sched.stage3_beta;
    } else {
        a = sched.stage4_alpha;
        b = sched.stage4_beta;
    }
    auto clamp = [&](double v) { return std::min(std::max(v, sched.c_min), sched.c_max); };
    return {clamp(c1 + a), clamp(c2 + b)};
}

struct Particle {
    std::vector<double> position;
    std::vector<double> velocity;
    std::vector<double> pbest_position;
    double pbest_fitness = std::numeric_limits<double>::infinity();
};

struct Bounds {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dim() const { return lo.size(); }
    void validate() const {
        if (lo.empty() || lo.size() != hi.size()) throw ConfigError("bounds shape invalid");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] < hi[i])) throw ConfigError("bounds must satisfy lo < hi");
    }
};

// Closed-loop recipe evaluated per candidate gain vector; returns the mean
// squared tracking error over the horizon.
struct FitnessSpec {
    std::string scenario;
    double horizon_s = 1.0;
    std::function<double(const std::vector<double>&)> run_mse;

    void validate() const {
        if (horizon_s <= 0.0) throw ConfigError("fitness horizon must be positive");
        if (!run_mse) throw ConfigError("fitness spec has no scenario attached: " + scenario);
    }
};

// A diverged or throwing simulation scores +inf and the swarm moves on.
inline double evaluate_mse(const std::vector<double>& gains, const FitnessSpec& spec) {
    spec.validate();
    try {
        double v = spec.run_mse(gains);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    } catch (const SimulationFault&) {
        return std::numeric_limits<double>::infinity();
    } catch (const SolverError&) {
        return std::numeric_limits<double>::infinity();
    }
}

struct Swarm {
    std::vector<Particle> particles;
    std::vector<double> gbest_position;
    double gbest_fitness = std::numeric_limits<double>::infinity();
    long generation = 0;
    long max_generations = 100;
    std::uint64_t rng_seed = 0;
    double c1 = 2.5;
    double c2 = 0.5;
    Bounds bounds;
    std::mt19937_64 rng;

    // Uniform start positions, zero velocities; optional warm starts replace
    // the first particles' positions.
    static Swarm init(const Bounds& bounds, std::size_t population, long generations,
                      std::uint64_t seed, const PsoSchedule& sched,
                      const std::vector<std::vector<double>>& warm_starts = {}) {
        bounds.validate();
        sched.validate();
        if (population < 2) throw ConfigError("population must be >= 2");
        if (generations < 1) throw ConfigError("generations must be >= 1");
        Swarm s;
        s.bounds = bounds;
        s.max_generations = generations;
        s.rng_seed = seed;
        s.rng.seed(seed);
        s.c1 = sched.c1_init;
        s.c2 = sched.c2_init;
        s.particles.resize(population);
        std::size_t d = bounds.dim();
        for (std::size_t i = 0; i < population; ++i) {
            auto& p = s.particles[i];
            p.position.resize(d);
            p.velocity.assign(d, 0.0);
            for (std::size_t k = 0; k < d; ++k)
                p.position[k] = bounds.lo[k] + detail::uniform01(s.rng) * (bounds.hi[k] - bounds.lo[k]);
            if (i < warm_starts.size()) {
                if (warm_starts[i].size() != d) throw ConfigError("warm start has wrong dimension");
                p.position = warm_starts[i];
                for (std::size_t k = 0; k < d; ++k)
                    p.position[k] = std::min(std::max(p.position[k], bounds.lo[k]), bounds.hi[k]);
            }
            p.pbest_position = p.position;
        }
        return s;
    }
};

namespace detail {

inline void score_particles(const FitnessSpec& fitness,
                            const std::vector<std::vector<double>>& positions,
                            std::vector<double>& out, unsigned threads) {
    out.resize(positions.size());
    if (threads <= 1 || positions.size() <= 1) {
        for (std::size_t i = 0; i < positions.size(); ++i) out[i] = evaluate_mse(positions[i], fitness);
        return;
    }
    // fan out, then collect in index order so scheduling cannot reorder anything
    std::vector<std::future<double>> futs(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
        futs[i] = std::async(std::launch::async,
                             [&fitness, &positions, i] { return evaluate_mse(positions[i], fitness); });
    for (std::size_t i = 0; i < positions.size(); ++i) out[i] = futs[i].get();
}

} // namespace detail

// One generation: schedule update, velocity/position update with all random
// draws made up front on the coordinator, fitness evaluation (optionally
// concurrent), then best-so-far bookkeeping in particle order.
inline void pso_step(Swarm& swarm, const PsoSchedule& sched, const FitnessSpec& fitness,
                     unsigned threads = 1) {
    if (swarm.generation >= swarm.max_generations) throw DomainError("swarm budget exhausted");
    long g = swarm.generation + 1;
    double w = inertia_weight(g, swarm.max_generations, sched);
    std::tie(swarm.c1, swarm.c2) = acceleration_update(swarm.c1, swarm.c2, g, swarm.max_generations, sched);

    const std::size_t d = swarm.bounds.dim();
    const bool first = swarm.generation == 0;
    // On the very first generation the initial positions are scored as-is so
    // pbest/gbest exist before anything moves.
    std::vector<std::vector<double>> proposals(swarm.particles.size());
    std::vector<std::pair<double, double>> draws(swarm.particles.size());
    for (auto& dr : draws) {
        dr.first = detail::uniform01(swarm.rng);
        dr.second = detail::uniform01(swarm.rng);
    }
    for (std::size_t i = 0; i < swarm.particles.size(); ++i) {
        auto& p = swarm.particles[i];
        if (!first) {
            const auto& gb = swarm.gbest_position;
            for (std::size_t k = 0; k < d; ++k) {
                double vmax = sched.velocity_clamp_fraction * (swarm.bounds.hi[k] - swarm.bounds.lo[k]);
                double v = w * p.velocity[k] + swarm.c1 * draws[i].first * (p.pbest_position[k] - p.position[k]) +
                           swarm.c2 * draws[i].second * (gb[k] - p.position[k]);
                v = std::min(std::max(v, -vmax), vmax);
                double x = p.position[k] + v;
                if (x < swarm.bounds.lo[k]) {
                    x = swarm.bounds.lo[k];
                    v = 0.0;
                } else if (x > swarm.bounds.hi[k]) {
                    x = swarm.bounds.hi[k];
                    v = 0.0;
                }
                p.velocity[k] = v;
                p.position[k] = x;
            }
        }
        proposals[i] = p.position;
    }
    std::vector<double> scores;
    detail::score_particles(fitness, proposals, scores, threads);
    for (std::size_t i = 0; i < swarm.particles.size(); ++i) {
        auto& p = swarm.particles[i];
        if (scores[i] < p.pbest_fitness) {
            p.pbest_fitness = scores[i];
            p.pbest_position = p.position;
        }
        if (p.pbest_fitness < swarm.gbest_fitness) {
            swarm.gbest_fitness = p.pbest_fitness;
            swarm.gbest_position = p.pbest_position;
        }
    }
    ++swarm.generation;
}

struct TuneResult {
    std::vector<double> best_position;
    double best_fitness = std::numeric_limits<double>::infinity();
    std::vector<double> fitness_trace;  // gbest after each generation
    std::uint64_t seed = 0;
    std::string scenario;
};

inline TuneResult tune(const FitnessSpec& spec, const PsoSchedule& sched, const Bounds& bounds,
                       std::size_t population, long generations, std::uint64_t seed,
                       unsigned threads = 1,
                       const std::vector<std::vector<double>>& warm_starts = {}) {
    spec.validate();
    Swarm swarm = Swarm::init(bounds, population, generations, seed, sched, warm_starts);
    TuneResult result;
    result.seed = seed;
    result.scenario = spec.scenario;
    for (long g = 0; g < generations; ++g) {
        pso_step(swarm, sched, spec, threads);
        result.fitness_trace.push_back(swarm.gbest_fitness);
    }
    result.best_position = swarm.gbest_position;
    result.best_fitness = swarm.gbest_fitness;
    return result;
}

} // namespace hybridplant
