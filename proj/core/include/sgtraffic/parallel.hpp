#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace sgtraffic {

/// Runs task(0..count-1) on up to `workers` threads. Tasks must write only to
/// their own slot; the first exception (lowest index) is rethrown.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task);

/// Pairwise (tree) sum; the result depends only on the order of `values`.
double pairwise_sum(std::span<const double> values);

}  // namespace sgtraffic
