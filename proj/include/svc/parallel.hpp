#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace svc {

/// Splits [0, count) into fixed chunks of `chunk` indices and evaluates
/// body(begin, end) for each chunk on up to `workers` threads. Results are
/// returned in chunk order, so a reduction over them does not depend on the
/// worker count. Exceptions from a chunk are rethrown on the caller's thread.
template <class Body>
auto parallel_chunks(std::size_t count, std::size_t chunk, unsigned workers, Body&& body) {
  using Result = decltype(body(std::size_t{0}, std::size_t{0}));
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t chunks = (count + chunk - 1) / chunk;
  std::vector<Result> results(chunks);
  std::vector<std::exception_ptr> errors(chunks);
  auto run = [&](std::size_t first_chunk, std::size_t stride) {
    for (std::size_t c = first_chunk; c < chunks; c += stride) {
      try {
        results[c] = body(c * chunk, std::min(count, (c + 1) * chunk));
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(chunks, 1))));
  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(long double x) noexcept {
    const long double t = sum_ + x;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (x >= 0 ? x : -x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  long double value() const noexcept { return sum_ + carry_; }

 private:
  long double sum_ = 0;
  long double carry_ = 0;
};

}  // namespace svc
