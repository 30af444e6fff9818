#include "czlab/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "czlab/errors.hpp"

namespace czlab {

void RunningStats::add(double x) {
  ++count_;
  const double delta = x - mean();
  // Neumaier-compensated update of the mean.
  const double inc = delta / static_cast<double>(count_);
  const double t = mean_ + inc;
  if (std::abs(mean_) >= std::abs(inc)) {
    mean_comp_ += (mean_ - t) + inc;
  } else {
    mean_comp_ += (inc - t) + mean_;
  }
  mean_ = t;
  m2_ += delta * (x - mean());
}

void RunningStats::merge(const RunningStats& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const double delta = other.mean() - mean();
  const double inc = delta * nb / n;
  const double t = mean_ + inc;
  if (std::abs(mean_) >= std::abs(inc)) {
    mean_comp_ += (mean_ - t) + inc;
  } else {
    mean_comp_ += (inc - t) + mean_;
  }
  mean_ = t;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  count_ += other.count_;
}

double RunningStats::variance() const {
  return count_ > 1 ? std::max(0.0, m2_ / static_cast<double>(count_ - 1)) : 0.0;
}

double RunningStats::std_error() const {
  return count_ > 0 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
}

unsigned default_thread_count() { return std::max(1U, std::thread::hardware_concurrency()); }

void parallel_for(std::size_t n_tasks, unsigned threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n_tasks, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n_tasks && !failed; i = next++) {
          try {
            fn(i);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<RunningStats> monte_carlo(std::uint64_t n_samples, std::size_t n_outputs, unsigned threads,
                                      const std::function<void(std::uint64_t, std::span<double>)>& fn,
                                      std::uint64_t chunk_size) {
  if (chunk_size == 0) throw DomainError("monte_carlo: zero chunk size");
  const std::uint64_t n_chunks = (n_samples + chunk_size - 1) / chunk_size;
  std::vector<std::vector<RunningStats>> partial(n_chunks, std::vector<RunningStats>(n_outputs));
  parallel_for(n_chunks, threads, [&](std::size_t chunk) {
    std::vector<double> out(n_outputs);
    const std::uint64_t begin = chunk * chunk_size;
    const std::uint64_t end = std::min(n_samples, begin + chunk_size);
    for (std::uint64_t i = begin; i < end; ++i) {
      fn(i, out);
      for (std::size_t o = 0; o < n_outputs; ++o) partial[chunk][o].add(out[o]);
    }
  });
  std::vector<RunningStats> total(n_outputs);
  for (const auto& chunk : partial) {
    for (std::size_t o = 0; o < n_outputs; ++o) total[o].merge(chunk[o]);
  }
  return total;
}

LinearFit least_squares(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw DomainError("least_squares needs two or more paired points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw DomainError("least_squares: abscissae are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = xs.size();
  return fit;
}

}  // namespace czlab
