#include "cwh/kde.hpp"

#include "cwh/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cwh::kde {

double scott_bandwidth(std::span<const double> samples)
{
  const auto n = samples.size();
  if (n < 2) {
    throw DegenerateSampleError(fmt::format("bandwidth needs at least 2 samples, got {}", n));
  }
  double mean = 0.0;
  for (double x : samples) {
    mean += x;
  }
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : samples) {
    ss += (x - mean) * (x - mean);
  }
  double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0) || !std::isfinite(sd)) {
    throw DegenerateSampleError("samples have zero variance");
  }
  return sd * std::pow(static_cast<double>(n), -0.2);
}

double density_at(std::span<const double> samples, double bandwidth, double x)
{
  const double norm = 1.0 / (static_cast<double>(samples.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
  double sum = 0.0;
  for (double s : samples) {
    double u = (x - s) / bandwidth;
    sum += std::exp(-0.5 * u * u);
  }
  return sum * norm;
}

DensityEstimate evaluate_density(std::span<const double> samples, double bandwidth, std::size_t grid_points)
{
  if (samples.empty()) {
    throw EmptyInputError("density estimate needs at least one sample");
  }
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw ValueError(fmt::format("bandwidth must be positive, got {}", bandwidth));
  }
  if (grid_points < min_grid_points) {
    throw ValueError(fmt::format("grid needs at least {} points, got {}", min_grid_points, grid_points));
  }
  auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it - 4.0 * bandwidth;
  const double hi = *hi_it + 4.0 * bandwidth;
  const double dx = (hi - lo) / static_cast<double>(grid_points - 1);

  DensityEstimate est;
  est.samples.assign(samples.begin(), samples.end());
  est.bandwidth = bandwidth;
  est.grid.resize(grid_points);
  est.density.resize(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) {
    est.grid[i] = lo + dx * static_cast<double>(i);
    est.density[i] = density_at(samples, bandwidth, est.grid[i]);
  }
  return est;
}

std::vector<LocalMinimum> local_minima(const DensityEstimate& est)
{
  std::vector<LocalMinimum> out;
  const auto& d = est.density;
  const auto n = d.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (!(d[i] < d[i - 1])) {
      ++i;
      continue;
    }
    // Extend over a plateau of equal values.
    std::size_t j = i;
    while (j + 1 < n && d[j + 1] == d[i]) {
      ++j;
    }
    if (j + 1 < n && d[j + 1] > d[j]) {
      out.push_back({ 0.5 * (est.grid[i] + est.grid[j]), d[i] });
    }
    i = j + 1;
  }
  return out;
}

std::optional<double> first_local_minimum(const DensityEstimate& est)
{
  auto minima = local_minima(est);
  if (minima.empty()) {
    return std::nullopt;
  }
  return minima.front().abscissa;
}

namespace {

std::optional<double> pick_minimum(const std::vector<LocalMinimum>& minima, MinimumStrategy strategy)
{
  if (minima.empty()) {
    return std::nullopt;
  }
  if (strategy == MinimumStrategy::lowest_abscissa) {
    return minima.front().abscissa;
  }
  // Ties keep the leftmost valley.
  auto best = std::min_element(
    minima.begin(), minima.end(), [](const auto& a, const auto& b) { return a.density < b.density; });
  return best->abscissa;
}

} // namespace

std::optional<double> lowest_local_minimum(const DensityEstimate& est, MinimumStrategy strategy)
{
  return pick_minimum(local_minima(est), strategy);
}

std::optional<double> lowest_local_minimum_below(const DensityEstimate& est, double limit, MinimumStrategy strategy)
{
  auto minima = local_minima(est);
  std::erase_if(minima, [limit](const LocalMinimum& m) { return !(m.abscissa < limit); });
  return pick_minimum(minima, strategy);
}

std::optional<double> argmax_in(const DensityEstimate& est, double lo, double hi)
{
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < est.grid.size(); ++i) {
    if (est.grid[i] < lo || est.grid[i] > hi) {
      continue;
    }
    if (!best || est.density[i] > est.density[*best]) {
      best = i;
    }
  }
  if (!best) {
    return std::nullopt;
  }
  return est.grid[*best];
}

} // namespace cwh::kde
