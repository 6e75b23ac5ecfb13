#include "tacan/chan_hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tacan/bitcodec.hpp"

namespace tacan::chan_hybrid {

namespace {

std::size_t frame_len(const BitString& part) {
    return part.empty() ? 0 : bitcodec::encode_frame(part).size();
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

// Mean duration gap (IAT part minus LSB part) over the sample, in periods.
double mean_gap(std::span<const BitString> sample, std::size_t k, const HybridConfig& cfg) {
    double gap = 0.0;
    for (const auto& m : sample) {
        const auto parts = split_at(m, k);
        const double d1 = static_cast<double>(frame_len(parts.iat) * cfg.l1);
        const double d2 = static_cast<double>(ceil_div(frame_len(parts.lsb), cfg.l2));
        gap += d1 - d2;
    }
    return std::abs(gap / static_cast<double>(sample.size()));
}

}  // namespace

void HybridConfig::validate() const {
    if (l1 == 0 || l2 == 0) {
        throw std::invalid_argument("hybrid: l1 and l2 must be >= 1");
    }
}

double splitting_ratio(const HybridConfig& cfg) {
    cfg.validate();
    if (cfg.n_m == 0) {
        throw std::invalid_argument("splitting_ratio: n_m must be > 0");
    }
    const double ll = static_cast<double>(cfg.l1 * cfg.l2);
    const double nm = static_cast<double>(cfg.n_m);
    const double no = static_cast<double>(cfg.n_o);
    const double alpha = (nm + no * (1.0 - ll)) / (nm * (1.0 + ll));
    return std::clamp(alpha, 0.0, 1.0);
}

std::size_t iat_share(double alpha, std::size_t n) {
    const double x = std::round(alpha * static_cast<double>(n) * 1e9) / 1e9;
    return static_cast<std::size_t>(std::ceil(x));
}

SplitMessage split_message(const BitString& a_m, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("split_message: alpha must lie in [0, 1]");
    }
    return split_at(a_m, iat_share(alpha, a_m.size()));
}

SplitMessage split_at(const BitString& a_m, std::size_t k) {
    if (k > a_m.size()) {
        throw std::invalid_argument("split_at: share exceeds message length");
    }
    return {a_m.slice(0, k), a_m.slice(k, a_m.size() - k)};
}

std::optional<BitString> reassemble(const std::optional<BitString>& part_iat,
                                    const std::optional<BitString>& part_lsb) {
    if (!part_iat || !part_lsb) {
        return std::nullopt;
    }
    return *part_iat + *part_lsb;
}

double hybrid_duration(const HybridConfig& cfg, double t) {
    const double alpha = splitting_ratio(cfg);
    const std::size_t k1 = iat_share(alpha, cfg.n_m);
    const std::size_t k2 = iat_share(1.0 - alpha, cfg.n_m);
    const std::size_t d1 = k1 == 0 ? 0 : (k1 + cfg.n_o) * cfg.l1;
    const std::size_t d2 = k2 == 0 ? 0 : ceil_div(k2 + cfg.n_o, cfg.l2);
    return t * static_cast<double>(std::max(d1, d2));
}

std::size_t split_periods(const BitString& a_m, std::size_t k, const HybridConfig& cfg) {
    cfg.validate();
    const auto parts = split_at(a_m, k);
    return std::max(frame_len(parts.iat) * cfg.l1, ceil_div(frame_len(parts.lsb), cfg.l2));
}

std::size_t refine_split(const HybridConfig& cfg, std::span<const BitString> sample) {
    const double alpha = splitting_ratio(cfg);
    std::size_t k = iat_share(alpha, cfg.n_m);
    if (alpha <= 0.0 || alpha >= 1.0 || sample.empty() || cfg.n_m < 2) {
        return k;
    }
    k = std::clamp<std::size_t>(k, 1, cfg.n_m - 1);
    double best = mean_gap(sample, k, cfg);
    for (int step = 0; step < 16; ++step) {
        std::size_t next = k;
        for (std::size_t cand : {k - 1, k + 1}) {
            if (cand < 1 || cand > cfg.n_m - 1) {
                continue;
            }
            const double g = mean_gap(sample, cand, cfg);
            if (g < best) {
                best = g;
                next = cand;
            }
        }
        if (next == k) {
            break;
        }
        k = next;
    }
    return k;
}

}  // namespace tacan::chan_hybrid
