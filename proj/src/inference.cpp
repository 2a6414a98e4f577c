#include "glyphrank/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "glyphrank/error.hpp"
#include "glyphrank/similarity.hpp"

namespace glyphrank {

void InferenceConfig::validate() const {
    if (k < 1) throw Error(ErrorCode::InvalidParams, "k must be >= 1");
    if (!(tau_g > 0.0) || !std::isfinite(tau_g) || !(tau_l > 0.0) || !std::isfinite(tau_l)) {
        throw Error(ErrorCode::InvalidTemperature, "temperatures must be finite and > 0");
    }
}

std::vector<std::size_t> select_topk(std::span<const double> scores, std::size_t k) {
    if (scores.empty()) throw Error(ErrorCode::InvalidParams, "no scores to rank");
    if (k < 1) throw Error(ErrorCode::InvalidParams, "k must be >= 1");
    k = std::min(k, scores.size());
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto before = [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
    };
    if (k == scores.size()) {
        std::sort(order.begin(), order.end(), before);
    } else {
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), before);
        order.resize(k);
    }
    return order;
}

std::vector<double> normalize_topk(std::span<const double> scores, double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorCode::InvalidTemperature, "tau must be > 0");
    if (scores.empty()) throw Error(ErrorCode::InvalidParams, "no scores to normalize");
    const double m = *std::max_element(scores.begin(), scores.end());
    std::vector<double> p(scores.size());
    double z = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        p[i] = std::exp((scores[i] - m) / tau);
        z += p[i];
    }
    for (double& x : p) x /= z;
    return p;
}

std::vector<double> fuse(std::span<const double> p_global, std::span<const double> p_local) {
    if (p_global.size() != p_local.size()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(p_global.size()) + " vs " +
                                                   std::to_string(p_local.size()));
    }
    std::vector<double> out(p_global.size());
    std::transform(p_global.begin(), p_global.end(), p_local.begin(), out.begin(), std::multiplies<>{});
    return out;
}

std::size_t argmax(std::span<const double> values) {
    return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

RankingResult infer(const QuerySample& query, const CandidateIndex& index, const InferenceConfig& cfg) {
    cfg.validate();
    const auto s_global = global_scores(query, index);
    const auto coarse = select_topk(s_global, s_global.size());
    const std::size_t k = std::min(cfg.k, index.size());

    std::vector<double> topk_global(k), topk_local(k);
    for (std::size_t r = 0; r < k; ++r) {
        const auto& cand = index[coarse[r]];
        topk_global[r] = s_global[coarse[r]];
        topk_local[r] = s_t2i(query.local, cand.local, cand.ids.mask());
    }
    const auto p_global = normalize_topk(topk_global, cfg.tau_g);
    const auto p_local = normalize_topk(topk_local, cfg.tau_l);
    const auto s_final = fuse(p_global, p_local);

    RankingResult result;
    result.k = k;
    result.entries.resize(index.size());
    for (std::size_t r = 0; r < coarse.size(); ++r) {
        auto& e = result.entries[r];
        e.candidate = coarse[r];
        e.label = index[coarse[r]].label;
        e.coarse_rank = r;
        e.s_global = s_global[coarse[r]];
        if (r < k) {
            e.s_local = topk_local[r];
            e.p_global = p_global[r];
            e.p_local = p_local[r];
            e.s_final = s_final[r];
        }
    }
    std::sort(result.entries.begin(), result.entries.begin() + static_cast<std::ptrdiff_t>(k),
              [](const RankedEntry& a, const RankedEntry& b) {
                  return *a.s_final > *b.s_final || (*a.s_final == *b.s_final && a.candidate < b.candidate);
              });
    return result;
}

RankingResult infer_exhaustive(const QuerySample& query, const CandidateIndex& index, const InferenceConfig& cfg) {
    InferenceConfig full = cfg;
    full.k = index.size();
    return infer(query, index, full);
}

void write_ranking_csv_header(std::ostream& out) {
    out << "query_id,rank,label,s_global,s_local,p_global,p_local,s_final\n";
}

namespace {

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void put_number(std::ostream& out, std::optional<double> v) {
    out << ',';
    if (!v) return;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    out << buf;
}

}  // namespace

void write_ranking_csv(std::string_view query_id, const RankingResult& result, std::ostream& out,
                       std::size_t max_rows) {
    const auto id = csv_field(query_id);
    const std::size_t rows = std::min(max_rows, result.entries.size());
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& e = result.entries[r];
        out << id << ',' << (r + 1) << ',' << csv_field(e.label);
        put_number(out, e.s_global);
        put_number(out, e.s_local);
        put_number(out, e.p_global);
        put_number(out, e.p_local);
        put_number(out, e.s_final);
        out << '\n';
    }
}

}  // namespace glyphrank
