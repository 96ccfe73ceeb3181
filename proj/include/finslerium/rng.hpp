#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <thread>
#include <vector>

#include "finslerium/core.hpp"

// Seeded sampling helpers. Every sampler is a pure function of its RNG, and
// parallel drivers split work into chunks with per-chunk derived seeds so the
// result stream is independent of the thread count.

namespace finslerium {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline C random_unit_complex(Rng& rng) {
  double t = uniform(rng, 0.0, 6.283185307179586);
  return {std::cos(t), std::sin(t)};
}

// uniform direction on the euclidean unit sphere of C^n
inline CVec random_sphere_dir(Rng& rng, int n) {
  CVec v(n);
  double nrm2 = 0;
  do {
    for (int i = 0; i < n; ++i) {
      v[i] = {normal(rng), normal(rng)};
    }
    nrm2 = norm2(v);
  } while (nrm2 < 1e-12);
  double inv = 1.0 / std::sqrt(nrm2);
  for (C& c : v) c = c * inv;
  return v;
}

// uniform point in the closed ball of radius R in C^n (2n real dimensions)
inline CVec random_ball_point(Rng& rng, int n, double radius) {
  CVec z = random_sphere_dir(rng, n);
  double r = radius * std::pow(uniform(rng, 0.0, 1.0), 1.0 / (2.0 * n));
  for (C& c : z) c = c * r;
  return z;
}

// thread cap from FINSLERIUM_THREADS (>=1); 0/unset means hardware default
inline unsigned thread_cap() {
  if (const char* env = std::getenv("FINSLERIUM_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs fn(chunk_index, chunk_rng, begin, end) over [0, total) split into fixed
// chunks; deterministic for a fixed seed regardless of the executing threads.
template <class Fn>
void seeded_parallel_chunks(std::uint64_t seed, int total, Fn fn) {
  const int kChunk = 32;
  const int nchunks = (total + kChunk - 1) / kChunk;
  unsigned nthreads = std::min<unsigned>(thread_cap(), static_cast<unsigned>(nchunks));
  if (nthreads <= 1) {
    for (int c = 0; c < nchunks; ++c) {
      Rng rng(seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(c + 1));
      fn(c, rng, c * kChunk, std::min(total, (c + 1) * kChunk));
    }
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (unsigned t = 0; t < nthreads; ++t)
    pool.emplace_back([&]() {
      for (;;) {
        int c = next.fetch_add(1);
        if (c >= nchunks) break;
        Rng rng(seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(c + 1));
        fn(c, rng, c * kChunk, std::min(total, (c + 1) * kChunk));
      }
    });
  for (auto& th : pool) th.join();
}

}  // namespace finslerium
