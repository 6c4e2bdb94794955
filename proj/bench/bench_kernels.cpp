// Serial reference against the OpenMP kernels on one fixed desk state.
#include <benchmark/benchmark.h>

#include "dlf/kernels.hpp"
#include "dlf/nibble.hpp"

using namespace dlf;

namespace {

struct Fixture {
  Digraph d;
  NibbleState s;
  Assignment assigned;
  ReserveMap reserve;
  NibbleConfig cfg;

  Fixture() : d(eulerian_orientation(random_even_regular_multigraph(400, 32, 1))) {
    s = NibbleState(d, ListAssignment::uniform(d.arc_count(), 128));
    s = iterate(s, cfg, SeedStream(1)).first;
    Rng rng(2);
    assigned.resize(d.arc_count());
    for (ArcId a = 0; a < d.arc_count(); ++a) {
      if (!s.gamma.is_colored(a) && s.lists.size(a) > 0 && bernoulli(rng, cfg.p)) {
        assigned[a] = s.lists.at(a)[uniform_index(rng, s.lists.size(a))];
      }
    }
    reserve.resize(d.vertex_count());
    for (auto& r : reserve) {
      for (Color c = 128; c < 160; ++c) {
        if (bernoulli(rng, 0.3)) r.push_back(c);
      }
    }
    s.reserve = &reserve;
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

Exec exec_of(const benchmark::State& state) {
  return state.range(0) ? Exec::Parallel : Exec::Serial;
}

void BM_DetectThreats(benchmark::State& state) {
  const Fixture& f = fixture();
  const std::size_t ell = resolve_ell(f.d, f.cfg);
  for (auto _ : state) {
    auto t = detect_threats(f.d, f.s.lists, f.s.gamma, f.assigned, &f.reserve, ell, exec_of(state));
    benchmark::DoNotOptimize(t);
  }
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_DetectThreats)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EstimateRetention(benchmark::State& state) {
  const Fixture& f = fixture();
  const IterationParams ip = iteration_params(f.s, f.cfg);
  ArcId e = 0;
  while (f.s.gamma.is_colored(e)) ++e;
  for (auto _ : state) {
    auto r = estimate_retention(f.s, ip, f.cfg, e, f.s.lists.at(e)[0], 100000, 3, exec_of(state));
    benchmark::DoNotOptimize(r);
  }
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_EstimateRetention)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EstimateListSize(benchmark::State& state) {
  const Fixture& f = fixture();
  const IterationParams ip = iteration_params(f.s, f.cfg);
  ArcId e = 0;
  while (f.s.gamma.is_colored(e)) ++e;
  for (auto _ : state) {
    auto r = estimate_list_size(f.s, ip, f.cfg, e, 2000, 3, exec_of(state));
    benchmark::DoNotOptimize(r);
  }
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_EstimateListSize)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
