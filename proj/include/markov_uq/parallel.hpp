#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace markov_uq {

/// Worker count used when a caller passes 0.
inline unsigned default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Runs body(i) for i in [0, n) on up to `threads` workers. Work is split into
/// contiguous blocks; body must only write to slot i of caller-owned storage,
/// so results never depend on the worker count. The first exception thrown by
/// any worker is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  if (threads == 0) threads = default_threads();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    const std::size_t lo = n * w / threads;
    const std::size_t hi = n * (w + 1) / threads;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Fixed-order pairwise summation; the result depends only on the values.
inline double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Sample mean and standard error of the mean, both by pairwise summation.
inline MeanEstimate estimate_mean(const std::vector<double>& values) {
  MeanEstimate out;
  out.n = values.size();
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = pairwise_sum(values.data(), values.size()) / n;
  if (values.size() < 2) {
    out.std_error = std::nan("");
    return out;
  }
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - out.mean;
    sq[i] = d * d;
  }
  out.std_error = std::sqrt(pairwise_sum(sq.data(), sq.size()) / (n - 1.0) / n);
  return out;
}

/// Stream identifiers: the high 16 bits name the purpose, the rest index the path.
enum class StreamPurpose : std::uint64_t {
  Ctmc = 1,
  UniformizedDtmc = 2,
  EulerMaruyama = 3,
  Girsanov = 4,
  EmOneStep = 5,
  EmRate = 6,
  EmTaylor = 7,
  InitialEntropy = 8,
  Validation = 9,
  Perturbation = 10,
};

inline std::uint64_t stream_id(StreamPurpose purpose, std::uint64_t index) {
  return (static_cast<std::uint64_t>(purpose) << 48) | (index & ((1ULL << 48) - 1));
}

}  // namespace markov_uq
