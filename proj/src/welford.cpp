#include "mice/welford.hpp"

namespace mice {

void WelfordAgg::add(const Vector& sample) {
  require_same_dim(sample.size(), mean.size(), "welford_update");
  ++count;
  const Vector delta = sample - mean;
  mean += delta / static_cast<double>(count);
  m2_total += delta.dot(sample - mean);
}

WelfordAgg welford_update(WelfordAgg agg, const Vector& sample) {
  agg.add(sample);
  return agg;
}

WelfordAgg welford_merge(const WelfordAgg& a, const WelfordAgg& b) {
  require_same_dim(a.dimension(), b.dimension(), "welford_merge");
  if (b.count == 0) return a;
  if (a.count == 0) return b;
  WelfordAgg out(a.dimension());
  out.count = a.count + b.count;
  const double na = static_cast<double>(a.count);
  const double nb = static_cast<double>(b.count);
  const double n = static_cast<double>(out.count);
  const Vector delta = b.mean - a.mean;
  out.mean = a.mean + delta * (nb / n);
  out.m2_total = a.m2_total + b.m2_total + delta.squaredNorm() * (na * nb / n);
  return out;
}

}  // namespace mice
