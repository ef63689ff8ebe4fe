#pragma once

#include <cstdint>
#include <stdexcept>

namespace sumimo {

// Streaming first/second moment estimator. Accumulates in extended
// precision so 10^6+ samples do not lose mass to cancellation.
class MomentAccumulator {
 public:
  void add(double x) {
    ++count_;
    sum_ += x;
    sum_sq_ += static_cast<long double>(x) * x;
  }

  std::uint64_t count() const { return count_; }

  double mean() const {
    require_samples();
    return static_cast<double>(sum_ / count_);
  }

  double second_moment() const {
    require_samples();
    return static_cast<double>(sum_sq_ / count_);
  }

  double variance() const {
    const double m = mean();
    const double v = second_moment() - m * m;
    return v > 0.0 ? v : 0.0;
  }

 private:
  void require_samples() const {
    if (count_ == 0) throw std::logic_error("MomentAccumulator: no samples");
  }

  std::uint64_t count_ = 0;
  long double sum_ = 0.0L;
  long double sum_sq_ = 0.0L;
};

}  // namespace sumimo
