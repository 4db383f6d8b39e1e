#include "bloombench/loss.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>

#include "bloombench/error.hpp"

namespace bloombench {

namespace {

void require_match(const SoftMask& pred, const Mask& target) {
  if (pred.width() != target.width || pred.height() != target.height) {
    throw Error(ErrorCode::DimensionMismatch, "soft mask and target differ in size");
  }
}

double bce_raw(std::span<const double> p, const Mask& t) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum -= t.bits[i] ? std::log(p[i]) : std::log1p(-p[i]);
  return sum / static_cast<double>(p.size());
}

struct DiceSums {
  double inter = 0.0;
  double pred = 0.0;
  double truth = 0.0;
};

DiceSums dice_sums(std::span<const double> p, const Mask& t) {
  DiceSums s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double ti = t.bits[i] ? 1.0 : 0.0;
    s.inter += p[i] * ti;
    s.pred += p[i];
    s.truth += ti;
  }
  return s;
}

double dice_raw(std::span<const double> p, const Mask& t) {
  const auto s = dice_sums(p, t);
  return 1.0 - (2.0 * s.inter + kDiceSmoothing) / (s.pred + s.truth + kDiceSmoothing);
}

double text_raw(std::span<const double> logits, std::size_t vocab, std::span<const std::size_t> targets) {
  double sum = 0.0;
  for (std::size_t pos = 0; pos < targets.size(); ++pos) {
    const auto row = logits.subspan(pos * vocab, vocab);
    const double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (double v : row) z += std::exp(v - mx);
    sum += (mx + std::log(z)) - row[targets[pos]];
  }
  return sum / static_cast<double>(targets.size());
}

double rel_error(double analytic, double numeric) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  if (scale < 1e-12) return 0.0;
  return std::abs(analytic - numeric) / scale;
}

double central_difference_check(std::vector<double> x, const std::vector<double>& analytic, double h,
                                const std::function<double(std::span<const double>)>& f) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = f(x);
    x[i] = saved - h;
    const double down = f(x);
    x[i] = saved;
    worst = std::max(worst, rel_error(analytic[i], (up - down) / (2.0 * h)));
  }
  return worst;
}

}  // namespace

void LossWeights::validate() const {
  for (double w : {w_txt, w_mask, w_bce, w_dice}) {
    if (!std::isfinite(w) || w < 0.0) throw Error(ErrorCode::InvalidArgument, "loss weights must be >= 0");
  }
}

SoftMask::SoftMask(std::size_t width, std::size_t height, std::vector<double> probs)
    : width_(width), height_(height), probs_(std::move(probs)) {
  if (probs_.size() != width * height) {
    throw Error(ErrorCode::DimensionMismatch, "soft mask needs width*height probabilities");
  }
  for (auto& p : probs_) {
    if (std::isnan(p)) throw Error(ErrorCode::InvalidArgument, "NaN probability");
    p = std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon);
  }
}

TokenDistribution::TokenDistribution(std::vector<std::vector<double>> logits, std::vector<std::size_t> targets)
    : vocab_(0), targets_(std::move(targets)) {
  if (logits.empty() || targets_.empty()) throw Error(ErrorCode::EmptySequence, "no token positions");
  if (logits.size() != targets_.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(logits.size()) + " logit rows vs " +
                                               std::to_string(targets_.size()) + " targets");
  }
  vocab_ = logits.front().size();
  if (vocab_ == 0) throw Error(ErrorCode::InvalidArgument, "empty vocabulary");
  logits_.reserve(vocab_ * logits.size());
  for (std::size_t pos = 0; pos < logits.size(); ++pos) {
    if (logits[pos].size() != vocab_) throw Error(ErrorCode::InvalidArgument, "ragged logit rows");
    if (targets_[pos] >= vocab_) throw Error(ErrorCode::InvalidArgument, "target index outside vocabulary");
    for (double v : logits[pos]) {
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite logit");
    }
    logits_.insert(logits_.end(), logits[pos].begin(), logits[pos].end());
  }
}

double text_loss(const TokenDistribution& dist) { return text_raw(dist.logits(), dist.vocab(), dist.targets()); }

std::vector<double> text_loss_grad(const TokenDistribution& dist) {
  const auto v = dist.vocab();
  const auto n = static_cast<double>(dist.positions());
  std::vector<double> grad(dist.logits().size());
  for (std::size_t pos = 0; pos < dist.positions(); ++pos) {
    const auto* row = dist.logits().data() + pos * v;
    const double mx = *std::max_element(row, row + v);
    double z = 0.0;
    for (std::size_t j = 0; j < v; ++j) z += std::exp(row[j] - mx);
    for (std::size_t j = 0; j < v; ++j) {
      const double softmax = std::exp(row[j] - mx) / z;
      grad[pos * v + j] = (softmax - (j == dist.targets()[pos] ? 1.0 : 0.0)) / n;
    }
  }
  return grad;
}

double bce_loss(const SoftMask& pred, const Mask& target) {
  require_match(pred, target);
  return bce_raw(pred.probs(), target);
}

std::vector<double> bce_loss_grad(const SoftMask& pred, const Mask& target) {
  require_match(pred, target);
  const auto& p = pred.probs();
  const auto n = static_cast<double>(p.size());
  std::vector<double> grad(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    grad[i] = (target.bits[i] ? -1.0 / p[i] : 1.0 / (1.0 - p[i])) / n;
  }
  return grad;
}

double dice_loss(const SoftMask& pred, const Mask& target) {
  require_match(pred, target);
  return dice_raw(pred.probs(), target);
}

std::vector<double> dice_loss_grad(const SoftMask& pred, const Mask& target) {
  require_match(pred, target);
  const auto s = dice_sums(pred.probs(), target);
  const double num = 2.0 * s.inter + kDiceSmoothing;
  const double den = s.pred + s.truth + kDiceSmoothing;
  std::vector<double> grad(pred.probs().size());
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double ti = target.bits[i] ? 1.0 : 0.0;
    grad[i] = -(2.0 * ti * den - num) / (den * den);
  }
  return grad;
}

TotalLoss total_loss(const TokenDistribution& dist, const SoftMask& pred, const Mask& target,
                     const LossWeights& w) {
  w.validate();
  TotalLoss out;
  out.parts.txt = text_loss(dist);
  out.parts.bce = bce_loss(pred, target);
  out.parts.dice = dice_loss(pred, target);
  out.parts.mask = w.w_bce * out.parts.bce + w.w_dice * out.parts.dice;
  out.total = w.w_txt * out.parts.txt + w.w_mask * out.parts.mask;
  return out;
}

double grad_check(MaskLoss op, const SoftMask& pred, const Mask& target, double h) {
  require_match(pred, target);
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
  if (op == MaskLoss::bce) {
    return central_difference_check(pred.probs(), bce_loss_grad(pred, target), h,
                                    [&](std::span<const double> p) { return bce_raw(p, target); });
  }
  return central_difference_check(pred.probs(), dice_loss_grad(pred, target), h,
                                  [&](std::span<const double> p) { return dice_raw(p, target); });
}

double grad_check(const TokenDistribution& dist, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
  return central_difference_check(dist.logits(), text_loss_grad(dist), h, [&](std::span<const double> x) {
    return text_raw(x, dist.vocab(), dist.targets());
  });
}

}  // namespace bloombench
