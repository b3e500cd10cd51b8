#include <benchmark/benchmark.h>

#include "lean3d/codec.hpp"
#include "lean3d/deepcodec.hpp"
#include "lean3d/entropy.hpp"
#include "lean3d/synth.hpp"

using namespace lean3d;

namespace {

PointCloud scene(std::size_t points) {
  synth::Rng rng(42);
  return synth::structured_scene(rng, {4096.0, points});
}

void BM_Quantize(benchmark::State& state) {
  const auto cloud = scene(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(quantize(cloud, 4));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Quantize)->Arg(30000)->Arg(120000);

void BM_Bpa(benchmark::State& state) {
  const auto v = quantize(scene(static_cast<std::size_t>(state.range(0))), 1);
  for (auto _ : state) benchmark::DoNotOptimize(bpa(v.voxels));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(v.voxels.size()));
}
BENCHMARK(BM_Bpa)->Arg(30000)->Arg(120000);

void BM_Bce(benchmark::State& state) {
  const auto v = quantize(scene(static_cast<std::size_t>(state.range(0))), 1);
  const auto level = bpa(v.voxels);
  for (auto _ : state) benchmark::DoNotOptimize(bce(level));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(v.voxels.size()));
}
BENCHMARK(BM_Bce)->Arg(30000)->Arg(120000);

void BM_PyramidBuild(benchmark::State& state) {
  const auto v = quantize(scene(30000), 4);
  const auto depth = default_depth(v.voxels);
  for (auto _ : state) benchmark::DoNotOptimize(build_pyramid(v.voxels, depth));
}
BENCHMARK(BM_PyramidBuild);

void BM_RansEncode(benchmark::State& state) {
  synth::Rng rng(7);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::uint8_t> symbols(n);
  for (auto& s : symbols) s = static_cast<std::uint8_t>(rng.below(100) < 90 ? 0 : rng.below(16));
  const std::vector<IntegerCdf> cdfs(n, uniform_prior_cdf());
  for (auto _ : state) benchmark::DoNotOptimize(rans_encode(symbols, cdfs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RansEncode)->Arg(10000)->Arg(100000);

void BM_RansDecode(benchmark::State& state) {
  synth::Rng rng(7);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::uint8_t> symbols(n);
  for (auto& s : symbols) s = static_cast<std::uint8_t>(rng.below(100) < 90 ? 0 : rng.below(16));
  const std::vector<IntegerCdf> cdfs(n, uniform_prior_cdf());
  const auto bytes = rans_encode(symbols, cdfs);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rans_decode(bytes, [&](std::size_t, auto) -> const IntegerCdf& { return cdfs[0]; }, n));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RansDecode)->Arg(10000)->Arg(100000);

void BM_LogitsToCdf(benchmark::State& state) {
  synth::Rng rng(9);
  std::vector<QuantizedLogits> logits(1024);
  for (auto& z : logits) {
    for (auto& v : z) v = static_cast<std::int16_t>(static_cast<std::int64_t>(rng.below(2048)) - 1024);
  }
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(logits_to_cdf(logits[i++ & 1023]));
}
BENCHMARK(BM_LogitsToCdf);

std::vector<std::uint8_t> deep_level(std::size_t n) {
  synth::Rng rng(11);
  std::vector<std::uint8_t> occ(n);
  for (auto& o : occ) {
    o = rng.below(100) < 95 ? static_cast<std::uint8_t>(1u << rng.below(8))
                            : static_cast<std::uint8_t>(1 + rng.below(255));
  }
  return occ;
}

void BM_DeepEncode(benchmark::State& state) {
  const auto occ = deep_level(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(encode_deep_level(occ));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DeepEncode)->Arg(10000)->Arg(100000);

void BM_DeepDecode(benchmark::State& state) {
  const auto stream = encode_deep_level(deep_level(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(decode_deep_level(stream));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DeepDecode)->Arg(10000)->Arg(100000);

void BM_FrameEncode(benchmark::State& state) {
  const auto cloud = scene(30000);
  CodecConfig cfg;
  cfg.pos_q = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(encode_frame(cloud, cfg));
}
BENCHMARK(BM_FrameEncode)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_FrameDecode(benchmark::State& state) {
  CodecConfig cfg;
  cfg.pos_q = static_cast<std::uint32_t>(state.range(0));
  const auto bytes = encode_frame(scene(30000), cfg);
  const LogitTableModel model;
  for (auto _ : state) benchmark::DoNotOptimize(decode_frame(bytes, model));
}
BENCHMARK(BM_FrameDecode)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
