#include "bloombench/severity.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "bloombench/csv.hpp"
#include "bloombench/error.hpp"

namespace bloombench {

SeverityLevel::SeverityLevel(int level) : level_(level) {
  if (level < 1 || level > 5) throw Error(ErrorCode::InvalidLevel, std::to_string(level));
}

SeverityLevel bin_density(double cells_per_ml) {
  if (!std::isfinite(cells_per_ml) || cells_per_ml < 0.0) {
    throw Error(ErrorCode::InvalidDensity, std::to_string(cells_per_ml));
  }
  int level = 1;
  for (double bound : kSeverityThresholds) {
    if (cells_per_ml >= bound) ++level;
  }
  return SeverityLevel(level);
}

std::string_view severity_name(SeverityLevel level) noexcept {
  static constexpr std::string_view names[] = {"Very low", "Low", "Moderate", "High", "Very high"};
  return names[level.value() - 1];
}

SeverityReport severity_metrics_from_residuals(std::span<const double> residuals) {
  if (residuals.empty()) throw Error(ErrorCode::EmptyInput, "no severity pairs");
  double sq = 0.0;
  double abs = 0.0;
  for (double r : residuals) {
    sq += r * r;
    abs += std::abs(r);
  }
  const auto n = static_cast<double>(residuals.size());
  SeverityReport report;
  report.n = residuals.size();
  report.mse = sq / n;
  report.rmse = std::sqrt(report.mse);
  report.mae = abs / n;
  return report;
}

SeverityReport severity_metrics(std::span<const SeverityLevel> pred, std::span<const SeverityLevel> truth) {
  if (pred.size() != truth.size()) {
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(pred.size()) + " predictions vs " + std::to_string(truth.size()) + " labels");
  }
  std::vector<double> residuals(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    residuals[i] = static_cast<double>(pred[i].value() - truth[i].value());
  }
  return severity_metrics_from_residuals(residuals);
}

std::map<std::string, SeverityLevel> read_label_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::MalformedLabels, "missing header", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = csv::split_line(line);
  if (header.size() != 2 || csv::trim(header[0]) != "scene_id") {
    throw Error(ErrorCode::MalformedLabels, "header must be scene_id,<cells_per_ml|severity_level>", 1);
  }
  const auto column = csv::trim(header[1]);
  const bool density = column == "cells_per_ml";
  if (!density && column != "severity_level") {
    throw Error(ErrorCode::MalformedLabels, "unknown value column '" + column + "'", 1);
  }

  std::map<std::string, SeverityLevel> labels;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split_line(line);
    if (fields.size() != 2) throw Error(ErrorCode::MalformedLabels, "expected 2 fields", lineno);
    const auto id = csv::trim(fields[0]);
    const auto value = csv::trim(fields[1]);
    if (id.empty()) throw Error(ErrorCode::MalformedLabels, "empty scene_id", lineno);
    std::size_t used = 0;
    double number = 0.0;
    try {
      number = std::stod(value, &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::MalformedLabels, "not a number: '" + value + "'", lineno);
    }
    if (used != value.size()) throw Error(ErrorCode::MalformedLabels, "not a number: '" + value + "'", lineno);
    SeverityLevel level = density ? bin_density(number) : SeverityLevel(1);
    if (!density) {
      if (number != std::floor(number)) throw Error(ErrorCode::InvalidLevel, value);
      level = SeverityLevel(static_cast<int>(number));
    }
    if (!labels.emplace(id, level).second) {
      throw Error(ErrorCode::MalformedLabels, "duplicate scene_id '" + id + "'", lineno);
    }
  }
  return labels;
}

}  // namespace bloombench
