#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "kpicc/crc16.h"
#include "kpicc/diag_frame.h"
#include "kpicc/frame_decoder.h"

namespace {

using namespace kpicc;

std::vector<std::uint8_t> GrantStream(std::size_t frames) {
  std::vector<std::uint8_t> bytes;
  for (std::size_t i = 0; i < frames; ++i) {
    DciGrant g;
    g.prb = static_cast<std::uint16_t>(i % 273);
    g.tbs_index = static_cast<std::uint8_t>(i % 27);
    AppendEncodedFrame(MakeFrame(g, i * 1000), bytes);
  }
  return bytes;
}

void BM_Crc16(benchmark::State& state) {
  std::vector<std::uint8_t> data(static_cast<std::size_t>(state.range(0)));
  std::mt19937 rng(1);
  for (auto& b : data) b = static_cast<std::uint8_t>(rng());
  for (auto _ : state) benchmark::DoNotOptimize(Crc16CcittFalse(data));
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Crc16)->Arg(64)->Arg(4096);

void BM_EncodeGrant(benchmark::State& state) {
  DciGrant g;
  g.prb = 100;
  g.tbs_index = 10;
  std::vector<std::uint8_t> out;
  for (auto _ : state) {
    out.clear();
    AppendEncodedFrame(MakeFrame(g, 42), out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_EncodeGrant);

void BM_DecodeStream(benchmark::State& state) {
  const auto bytes = GrantStream(10'000);
  std::vector<DiagFrame> frames;
  for (auto _ : state) {
    FrameDecoder decoder;
    frames.clear();
    decoder.Feed(bytes, frames);
    benchmark::DoNotOptimize(frames.size());
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_DecodeStream);

void BM_DecodeChunked(benchmark::State& state) {
  const auto bytes = GrantStream(10'000);
  const auto chunk = static_cast<std::size_t>(state.range(0));
  std::vector<DiagFrame> frames;
  for (auto _ : state) {
    FrameDecoder decoder;
    frames.clear();
    for (std::size_t i = 0; i < bytes.size(); i += chunk) {
      decoder.Feed(std::span(bytes).subspan(i, std::min(chunk, bytes.size() - i)), frames);
    }
    benchmark::DoNotOptimize(frames.size());
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_DecodeChunked)->Arg(7)->Arg(512);

}  // namespace
