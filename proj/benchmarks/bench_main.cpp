#include "nss/network.hpp"
#include "nss/pipeline.hpp"

#include <benchmark/benchmark.h>

using namespace nss;

namespace {

Vector unit_input(Eigen::Index n, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
    return v.normalized();
}

}  // namespace

static void BM_LcaStep(benchmark::State& state) {
    LcaConfig cfg;
    cfg.bit_width = static_cast<int>(state.range(0));
    const NssModel model{NssConfig{}};
    const Vector bias = model.layer1().atoms().transpose() * unit_input(120, 1);
    LcaLayerState s(model.layer1().atom_count());
    for (auto _ : state) {
        lca_step(s, bias, model.inhibition1(), cfg);
        benchmark::DoNotOptimize(s.a.data());
    }
}
BENCHMARK(BM_LcaStep)->Arg(1)->Arg(2)->Arg(8);

static void BM_Present(benchmark::State& state) {
    NssConfig cfg;
    cfg.layer1.n_steps = cfg.layer2.n_steps = static_cast<int>(state.range(0));
    const NssModel model(cfg);
    const Vector x = unit_input(120, 2);
    for (auto _ : state) benchmark::DoNotOptimize(present(model, x).emitted_spikes);
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Present)->Arg(32)->Arg(200)->Unit(benchmark::kMicrosecond);

static void BM_OnlineTrain(benchmark::State& state) {
    ExperimentConfig cfg;
    cfg.synth.duration_s = 20.0;
    cfg = resolve_seeds(cfg);
    const auto synth = generate_recording(cfg.synth);
    const auto pre = preprocess(synth.recording, cfg);
    for (auto _ : state) {
        NssModel model(cfg.nss);
        benchmark::DoNotOptimize(nss_train_online(model, pre.waveforms).size());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(pre.waveforms.size()));
}
BENCHMARK(BM_OnlineTrain)->Unit(benchmark::kMillisecond);

static void BM_BandpassFilter(benchmark::State& state) {
    SynthConfig sc;
    sc.duration_s = static_cast<double>(state.range(0));
    sc.seed = 3;
    const auto rec = generate_recording(sc).recording;
    const DetectionConfig dc;
    for (auto _ : state) benchmark::DoNotOptimize(bandpass_filter(rec, dc).samples.data());
    state.SetItemsProcessed(state.iterations() * rec.sample_count() * rec.channel_count());
}
BENCHMARK(BM_BandpassFilter)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_Detect(benchmark::State& state) {
    SynthConfig sc;
    sc.duration_s = 10.0;
    sc.seed = 3;
    const DetectionConfig dc;
    const auto filtered = bandpass_filter(generate_recording(sc).recording, dc);
    for (auto _ : state) {
        const auto th = mad_threshold(filtered, dc);
        benchmark::DoNotOptimize(detect_spikes(filtered, th, dc).size());
    }
}
BENCHMARK(BM_Detect)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
