#include <benchmark/benchmark.h>

#include <cmath>

#include "nhep/control.hpp"
#include "nhep/hamel.hpp"
#include "nhep/models.hpp"
#include "nhep/oracle.hpp"
#include "nhep/sim.hpp"

using namespace nhep;
using linalg::VecX;
using models::ReducedState;
using models::SkateParams;

namespace {

const SkateParams kSkate{};
const ReducedState kState{0.3, -0.7, 1.1, std::sin(0.4), std::cos(0.4)};

models::RotorParams rotor() {
    models::RotorParams rp;
    rp.base.m = 3.0;
    return rp;
}

}  // namespace

static void ClosedFormField(benchmark::State& state) {
    for (auto _ : state) {
        const ReducedState d = models::skate_vector_field(kSkate, kState);
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(ClosedFormField);

static void HamelFrameworkField(benchmark::State& state) {
    const hamel::ReducedSystem sys = models::skate_system(kSkate);
    const VecX y{kState.v1, kState.v2, kState.v3, 0.0, kState.G2, kState.G3};
    for (auto _ : state) {
        const VecX d = hamel::state_rhs(sys, y);
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(HamelFrameworkField);

static void MultiplierOracleField(benchmark::State& state) {
    const oracle::SkateOracle orc(kSkate);
    const VecX z = oracle::SkateOracle::pack(models::full_from_reduced(kState));
    for (auto _ : state) {
        const VecX d = orc.rhs(z);
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(MultiplierOracleField);

static void ClosedLoopField(benchmark::State& state) {
    const control::RotorDynamics dyn(rotor());
    const control::RotorState s{kState, -50.0};
    for (auto _ : state) {
        const control::RotorState d = dyn.closed_loop_rhs(s);
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(ClosedLoopField);

static void FallTimeRun(benchmark::State& state) {
    const double phi0 = 0.1;
    const VecX y0{0.1, 0.1 / std::cos(phi0), 1.0, std::sin(phi0), std::cos(phi0)};
    const sim::Rhs rhs = [](double, const VecX& y) {
        const ReducedState d = models::skate_vector_field(kSkate, {y[0], y[1], y[2], y[3], y[4]});
        return VecX{d.v1, d.v2, d.v3, d.G2, d.G3};
    };
    for (auto _ : state) {
        sim::IntegratorConfig cfg;
        cfg.dt = 1e-4;
        cfg.t_end = 2.0;
        cfg.store_every = 1 << 30;  // keep only the endpoint
        cfg.event = [](double, const VecX& y) { return y[4]; };
        const auto traj = sim::integrate(rhs, y0, cfg);
        benchmark::DoNotOptimize(traj);
    }
}
BENCHMARK(FallTimeRun)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
