#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>

namespace bloombench {

/// Ordinal bloom severity, 1 (very low) .. 5 (very high).
class SeverityLevel {
 public:
  /// Throws InvalidLevel outside 1..5.
  explicit SeverityLevel(int level);

  int value() const noexcept { return level_; }
  auto operator<=>(const SeverityLevel&) const = default;

 private:
  int level_;
};

/// Lower bounds (cells/mL) of levels 2..5; each bin is lower-inclusive.
inline constexpr double kSeverityThresholds[4] = {2.0e4, 1.0e5, 1.0e6, 1.0e7};

/// Throws InvalidDensity for negative, NaN or infinite input.
SeverityLevel bin_density(double cells_per_ml);

/// "Very low", "Low", "Moderate", "High", "Very high".
std::string_view severity_name(SeverityLevel level) noexcept;

struct SeverityReport {
  double mse = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  std::size_t n = 0;
  std::size_t n_unparsed = 0;
};

/// Throws LengthMismatch or EmptyInput.
SeverityReport severity_metrics(std::span<const SeverityLevel> pred, std::span<const SeverityLevel> truth);
/// Metrics over precomputed residuals (pred - truth). Throws EmptyInput.
SeverityReport severity_metrics_from_residuals(std::span<const double> residuals);

/// Reads a label CSV with header `scene_id,cells_per_ml` or
/// `scene_id,severity_level`. Throws MalformedLabels (with line), IoError,
/// InvalidDensity, InvalidLevel.
std::map<std::string, SeverityLevel> read_label_csv(const std::filesystem::path& path);

}  // namespace bloombench
