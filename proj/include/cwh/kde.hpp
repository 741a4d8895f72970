#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace cwh::kde {

inline constexpr std::size_t default_grid_points = 512;
inline constexpr std::size_t min_grid_points = 64;

//! Gaussian kernel density evaluated on an even grid.
struct DensityEstimate
{
  std::vector<double> samples;
  double bandwidth = 0.0;
  std::vector<double> grid;
  std::vector<double> density;

  double grid_step() const { return grid.size() > 1 ? grid[1] - grid[0] : 0.0; }
};

struct LocalMinimum
{
  double abscissa;
  double density;
};

enum class MinimumStrategy
{
  lowest_density,  // deepest valley
  lowest_abscissa  // leftmost valley
};

/// One-dimensional Scott rule, sigma * n^(-1/5) with the n-1 standard deviation.
/// Throws DegenerateSampleError for fewer than two samples or zero spread.
double scott_bandwidth(std::span<const double> samples);

/// Density averaged over Gaussian kernels, on `grid_points` evenly spaced
/// abscissas covering [min - 4h, max + 4h].
DensityEstimate evaluate_density(std::span<const double> samples,
                                 double bandwidth,
                                 std::size_t grid_points = default_grid_points);

/// Density of the estimate at an arbitrary point.
double density_at(std::span<const double> samples, double bandwidth, double x);

/// Interior minima from left to right. A flat valley counts once, at the
/// midpoint of the plateau.
std::vector<LocalMinimum> local_minima(const DensityEstimate& est);

std::optional<double> first_local_minimum(const DensityEstimate& est);

std::optional<double> lowest_local_minimum(const DensityEstimate& est,
                                           MinimumStrategy strategy = MinimumStrategy::lowest_density);

/// Same, restricted to valleys strictly left of `limit`.
std::optional<double> lowest_local_minimum_below(const DensityEstimate& est, double limit, MinimumStrategy strategy);

/// Grid abscissa of the highest density within [lo, hi], or nullopt if no grid
/// point falls in the range.
std::optional<double> argmax_in(const DensityEstimate& est, double lo, double hi);

} // namespace cwh::kde
