#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace czlab {

/// Streaming (count, mean, M2) accumulator with a compensated running mean.
class RunningStats {
 public:
  void add(double x);
  /// Chan et al. pairwise combination.
  void merge(const RunningStats& other);

  std::uint64_t count() const { return count_; }
  double mean() const { return mean_ + mean_comp_; }
  double variance() const;  // sample variance (N - 1)
  double std_error() const;

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double mean_comp_ = 0.0;
  double m2_ = 0.0;
};

/// Runs fn(task) for task in [0, n_tasks) on `threads` workers.
void parallel_for(std::size_t n_tasks, unsigned threads, const std::function<void(std::size_t)>& fn);

unsigned default_thread_count();

/// Monte Carlo driver. fn(sample_index, outputs) fills one value per output.
/// Samples are grouped into fixed chunks; chunk results are merged in chunk
/// order, so the result is independent of the thread count.
std::vector<RunningStats> monte_carlo(std::uint64_t n_samples, std::size_t n_outputs, unsigned threads,
                                      const std::function<void(std::uint64_t, std::span<double>)>& fn,
                                      std::uint64_t chunk_size = 512);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares of ys on xs.
LinearFit least_squares(std::span<const double> xs, std::span<const double> ys);

}  // namespace czlab
