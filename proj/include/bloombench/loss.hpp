#pragma once

// Training objective evaluated on supplied arrays: autoregressive text
// cross-entropy, per-pixel BCE and soft DICE over a probability mask, and
// their weighted combination. Analytic gradients are provided for each term
// together with a central-difference checker.
//
// Reductions are means (over positions / pixels). Accumulation runs in
// row-major order in double precision, so results are bit-stable.

#include <cstddef>
#include <vector>

#include "bloombench/mask.hpp"

namespace bloombench {

inline constexpr double kProbEpsilon = 1e-7;
inline constexpr double kDiceSmoothing = 1e-6;

struct LossWeights {
  double w_txt = 1.0;
  double w_mask = 1.0;
  double w_bce = 2.0;
  double w_dice = 0.5;

  /// Throws InvalidArgument on a negative or non-finite weight.
  void validate() const;
  bool operator==(const LossWeights&) const = default;
};

/// Predicted mask probabilities, clamped to [eps, 1-eps] on construction.
class SoftMask {
 public:
  SoftMask(std::size_t width, std::size_t height, std::vector<double> probs);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  const std::vector<double>& probs() const noexcept { return probs_; }

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> probs_;
};

/// Per-position logits over a vocabulary plus target token indices.
class TokenDistribution {
 public:
  /// Throws EmptySequence, LengthMismatch or InvalidArgument.
  TokenDistribution(std::vector<std::vector<double>> logits, std::vector<std::size_t> targets);

  std::size_t positions() const noexcept { return targets_.size(); }
  std::size_t vocab() const noexcept { return vocab_; }
  const std::vector<double>& logits() const noexcept { return logits_; }  // positions x vocab, row-major
  const std::vector<std::size_t>& targets() const noexcept { return targets_; }

 private:
  std::size_t vocab_;
  std::vector<double> logits_;
  std::vector<std::size_t> targets_;
};

double text_loss(const TokenDistribution& dist);
/// d(text_loss)/d(logits), same layout as `logits()`.
std::vector<double> text_loss_grad(const TokenDistribution& dist);

/// Throws DimensionMismatch.
double bce_loss(const SoftMask& pred, const Mask& target);
std::vector<double> bce_loss_grad(const SoftMask& pred, const Mask& target);

double dice_loss(const SoftMask& pred, const Mask& target);
std::vector<double> dice_loss_grad(const SoftMask& pred, const Mask& target);

struct LossParts {
  double txt = 0.0;
  double bce = 0.0;
  double dice = 0.0;
  double mask = 0.0;  // w_bce*bce + w_dice*dice
};

struct TotalLoss {
  double total = 0.0;  // w_txt*txt + w_mask*mask
  LossParts parts;
};

TotalLoss total_loss(const TokenDistribution& dist, const SoftMask& pred, const Mask& target,
                     const LossWeights& w = {});

enum class MaskLoss { bce, dice };

/// Max relative error between the analytic gradient (wrt probabilities) and
/// central differences with step h. Points must lie inside [eps+h, 1-eps-h].
double grad_check(MaskLoss op, const SoftMask& pred, const Mask& target, double h);
/// Same for the text loss, with respect to the logits.
double grad_check(const TokenDistribution& dist, double h);

}  // namespace bloombench
