#include "glyphrank/losses.hpp"

#include <algorithm>
#include <cmath>

#include "glyphrank/error.hpp"
#include "glyphrank/similarity.hpp"

namespace glyphrank {

namespace {

void check_temperature(double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw Error(ErrorCode::InvalidTemperature, "temperature must be finite and > 0");
    }
}

void check_batch(std::span<const BatchSample> batch) {
    if (batch.empty()) throw Error(ErrorCode::InvalidParams, "batch is empty");
    const std::size_t dim = batch.front().image_global.dim();
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& s = batch[i];
        if (s.image_global.dim() != dim || s.text_global.dim() != dim || s.image_local.dim() != dim ||
            s.text_local.dim() != dim) {
            throw Error(ErrorCode::DimMismatch, "batch sample dims differ", i);
        }
    }
}

double progress(int t, const CurriculumSchedule& sched) {
    sched.validate();
    if (t < 0 || t > sched.total_epochs) {
        throw Error(ErrorCode::EpochOutOfRange,
                    "epoch " + std::to_string(t) + " outside [0, " + std::to_string(sched.total_epochs) + "]");
    }
    if (t < sched.warmup_epochs || sched.total_epochs == sched.warmup_epochs) return -1.0;
    return static_cast<double>(t - sched.warmup_epochs) / (sched.total_epochs - sched.warmup_epochs);
}

}  // namespace

CurriculumSchedule CurriculumSchedule::with_warmup_fraction(int total_epochs, double fraction, double alpha,
                                                            double beta) {
    CurriculumSchedule s;
    s.total_epochs = total_epochs;
    s.warmup_epochs = static_cast<int>(std::ceil(fraction * total_epochs));
    s.alpha = alpha;
    s.beta = beta;
    s.validate();
    return s;
}

void CurriculumSchedule::validate() const {
    if (total_epochs < 1 || warmup_epochs < 0 || warmup_epochs > total_epochs) {
        throw Error(ErrorCode::InvalidParams, "schedule needs total >= 1 and 0 <= warmup <= total");
    }
}

double contrastive_nll(std::span<const double> scores, std::size_t batch, double tau) {
    double sum = 0.0;
    for (std::size_t i = 0; i < batch; ++i) {
        const auto row = scores.subspan(i * batch, batch);
        const double m = *std::max_element(row.begin(), row.end());
        double z = 0.0;
        for (double s : row) z += std::exp((s - m) / tau);
        sum += (m - row[i]) / tau + std::log(z);
    }
    return sum / static_cast<double>(batch);
}

double global_loss(std::span<const BatchSample> batch, double tau_g) {
    check_temperature(tau_g);
    check_batch(batch);
    const std::size_t b = batch.size();
    // i2t[i][j] = <v_i, t_j>; t2i is its transpose.
    std::vector<double> i2t(b * b), t2i(b * b);
    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t j = 0; j < b; ++j) {
            const double s = cosine(batch[i].image_global, batch[j].text_global);
            i2t[i * b + j] = s;
            t2i[j * b + i] = s;
        }
    }
    return 0.5 * (contrastive_nll(i2t, b, tau_g) + contrastive_nll(t2i, b, tau_g));
}

double local_loss(std::span<const BatchSample> batch, double tau_l) {
    check_temperature(tau_l);
    check_batch(batch);
    const std::size_t b = batch.size();
    // Row i of i2t varies the text index: S_I2T(V_i, T_j).
    // Row i of t2i varies the image index: S_T2I(V_j, T_i).
    std::vector<double> i2t(b * b), t2i(b * b);
    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t j = 0; j < b; ++j) {
            i2t[i * b + j] = s_i2t(batch[i].image_local, batch[j].text_local, batch[j].mask);
            t2i[i * b + j] = s_t2i(batch[j].image_local, batch[i].text_local, batch[i].mask);
        }
    }
    return 0.5 * (contrastive_nll(i2t, b, tau_l) + contrastive_nll(t2i, b, tau_l));
}

double lambda1(int t, const CurriculumSchedule& sched) {
    const double p = progress(t, sched);
    return p < 0.0 ? 1.0 : 1.0 - sched.alpha * p;
}

double lambda2(int t, const CurriculumSchedule& sched) {
    const double p = progress(t, sched);
    return p < 0.0 ? 1.0 : 1.0 + sched.beta * p;
}

LossBreakdown total_loss(std::span<const BatchSample> batch, int t, const CurriculumSchedule& sched, double tau_g,
                         double tau_l) {
    LossBreakdown out;
    out.l1 = lambda1(t, sched);
    out.l2 = lambda2(t, sched);
    out.global = global_loss(batch, tau_g);
    out.local = local_loss(batch, tau_l);
    out.total = out.l1 * out.global + out.l2 * out.local;
    return out;
}

}  // namespace glyphrank
