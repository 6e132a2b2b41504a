#pragma once

// Reference extremum values for the alpha in {1, 1.8}, t in {1..4} runs,
// with the per-cell tolerances applied by `table1`.

#include <array>

namespace superband::reference {

struct ExtremumRow {
  double alpha;
  double t;
  double kappa_max;        ///< kappa_max / kappa0
  double kappa_min_depth;  ///< tabulated as 1 - kappa_min / kappa0
  double spectrum_weight;  ///< |phi0(kappa_ext)|^2
  double x_max;
  double x_min;
  double density;          ///< |psi(x_ext, t)|^2

  double kappa_min() const { return 1.0 - kappa_min_depth; }
};

inline constexpr std::array<ExtremumRow, 8> kExtremumTable{{
    {1.0, 1.0, 1.95, 0.95, 2.9e-123, 10.0, 2.4, 2.0e-3},
    {1.0, 2.0, 1.48, 0.48, 4.5e-31, 16.4, 8.7, 5.0e-3},
    {1.0, 3.0, 1.33, 0.33, 2.0e-14, 22.7, 14.9, 1.0e-2},
    {1.0, 4.0, 1.26, 0.26, 9.6e-9, 29.0, 21.2, 1.8e-2},
    {1.8, 1.0, 1.75, 0.75, 1.3e-76, 4.7, 7.8, 3.1e-1},
    {1.8, 2.0, 1.39, 0.39, 2.0e-20, 10.9, 14.2, 2.9e-1},
    {1.8, 3.0, 1.27, 0.27, 1.0e-9, 17.0, 20.6, 2.4e-1},
    {1.8, 4.0, 1.21, 0.21, 1.0e-5, 23.2, 27.0, 2.2e-1},
}};

inline constexpr double kKappaTolerance = 0.01;
inline constexpr double kPositionTolerance = 0.1;
inline constexpr double kDensityRelativeTolerance = 0.10;
inline constexpr double kLog10WeightTolerance = 1.0;

/// Weight ratio anchors: alpha = 1 at t = 1 (order of magnitude) and t = 4 (30%).
inline constexpr double kWeightRatioT1 = 1e-60;
inline constexpr double kWeightRatioT1Decades = 1.0;
inline constexpr double kWeightRatioT4 = 7e-4;
inline constexpr double kWeightRatioT4Relative = 0.30;

struct FluxRow {
  double alpha;
  double flux_left;
  double flux_right;
};

inline constexpr std::array<FluxRow, 2> kFluxTable{{
    {1.0, 0.0699, 0.0951},
    {1.8, 0.0571, 0.0484},
}};
inline constexpr double kFluxRelativeTolerance = 0.15;

} // namespace superband::reference
