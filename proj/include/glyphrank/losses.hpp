#pragma once

// Forward-only reference values of the contrastive training objectives, for
// parity checks against an external training stack. Nothing here computes
// gradients.

#include <cstddef>
#include <span>
#include <vector>

#include "glyphrank/embedding.hpp"
#include "glyphrank/ids.hpp"

namespace glyphrank {

/// One matched (image, IDS) pair. `mask` belongs to the text side.
struct BatchSample {
    GlobalEmbedding image_global;
    GlobalEmbedding text_global;
    LocalEmbeddingSet image_local;
    LocalEmbeddingSet text_local;
    Mask mask;
};

struct CurriculumSchedule {
    static constexpr double kDefaultAlpha = 0.8;
    static constexpr double kDefaultBeta = 1.0;
    static constexpr double kWarmupFraction = 0.25;

    int total_epochs = 1;
    int warmup_epochs = 0;
    double alpha = kDefaultAlpha;
    double beta = kDefaultBeta;

    // Warm-up of ceil(fraction * total) epochs.
    static CurriculumSchedule with_warmup_fraction(int total_epochs, double fraction = kWarmupFraction,
                                                   double alpha = kDefaultAlpha, double beta = kDefaultBeta);

    void validate() const;
};

struct LossBreakdown {
    double total = 0.0;
    double global = 0.0;
    double local = 0.0;
    double l1 = 1.0;
    double l2 = 1.0;
};

double global_loss(std::span<const BatchSample> batch, double tau_g);
double local_loss(std::span<const BatchSample> batch, double tau_l);

// Epochs are 0-indexed, valid for 0 <= t <= total_epochs. At t == warmup the
// linear branch applies with zero progress.
double lambda1(int t, const CurriculumSchedule& sched);
double lambda2(int t, const CurriculumSchedule& sched);

LossBreakdown total_loss(std::span<const BatchSample> batch, int t, const CurriculumSchedule& sched, double tau_g,
                         double tau_l);

// Mean over rows i of -log softmax(row_i / tau)[i], with max-subtraction.
// `scores` is a B x B row-major matrix.
double contrastive_nll(std::span<const double> scores, std::size_t batch, double tau);

}  // namespace glyphrank
