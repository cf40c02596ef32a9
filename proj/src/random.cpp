#include "tfzeros/random.hpp"

#include <cmath>

namespace tfz {
namespace {

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::seed_seq make_seed_seq(SeededStream s) {
  const std::uint64_t a = mix64(s.seed);
  const std::uint64_t b = mix64(s.stream_id ^ 0x5851f42d4c957f2dULL);
  return std::seed_seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                       static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
}

}  // namespace

SeededStream derive(SeededStream parent, std::uint64_t index) {
  return {parent.seed, mix64(parent.stream_id * 0x2545f4914f6cdd1dULL + mix64(index + 1))};
}

Rng::Rng(SeededStream stream) {
  auto seq = make_seed_seq(stream);
  engine_.seed(seq);
}

double Rng::uniform() { return uniform_(engine_); }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform_(engine_); }

double Rng::normal() { return normal_(engine_); }

std::uint64_t Rng::poisson(double mean) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(engine_);
}

std::complex<double> Rng::complex_normal() {
  const double x = normal_(engine_);
  const double y = normal_(engine_);
  return {x / std::sqrt(2.0), y / std::sqrt(2.0)};
}

}  // namespace tfz
