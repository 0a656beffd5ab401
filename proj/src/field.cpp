#include "vwave/field.hpp"

namespace vwave {

AgingTable::AgingTable(std::vector<double> times, std::vector<double> values)
    : t_(std::move(times)), v_(std::move(values)) {
  if (t_.empty() || t_.size() != v_.size())
    throw ConfigError("aging table needs matching, nonempty time/value lists");
  for (size_t k = 1; k < t_.size(); ++k) {
    if (!(t_[k] > t_[k - 1]))
      throw ConfigError("aging table times must be strictly increasing");
    if (v_[k] > v_[k - 1])
      throw ConfigError("aging table values must be non-increasing");
  }
  for (double v : v_)
    if (!(v > 0.0)) throw ConfigError("aging table values must stay positive");
}

double AgingTable::value(double t) const {
  if (t_.size() == 1 || t <= t_.front()) return v_.front();
  if (t >= t_.back()) return v_.back();
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  size_t k = static_cast<size_t>(it - t_.begin());
  double w = (t - t_[k - 1]) / (t_[k] - t_[k - 1]);
  return v_[k - 1] + w * (v_[k] - v_[k - 1]);
}

double AgingTable::slope(double t) const {
  if (t_.size() == 1 || t < t_.front() || t >= t_.back()) return 0.0;
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  size_t k = static_cast<size_t>(it - t_.begin());
  return (v_[k] - v_[k - 1]) / (t_[k] - t_[k - 1]);
}

} // namespace vwave
