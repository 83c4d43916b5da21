#pragma once

#include <span>
#include <vector>

namespace csdsvm::stats {

double mean(std::span<const double> xs);
/// Sample standard deviation with the n-1 denominator; 0 for a single value.
double sample_std(std::span<const double> xs);
/// Hyndman-Fan type 7 quantile (linear interpolation between order statistics).
double quantile(std::span<const double> xs, double p);
double median(std::span<const double> xs);
double iqr(std::span<const double> xs);

}  // namespace csdsvm::stats
