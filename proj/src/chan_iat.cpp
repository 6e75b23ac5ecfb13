#include "tacan/chan_iat.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tacan::chan_iat {

void IatChannelConfig::validate() const {
    if (!(period > 0.0)) {
        throw std::invalid_argument("IAT channel: period must be > 0");
    }
    if (!(delta > 0.0 && delta < period)) {
        throw std::invalid_argument("IAT channel: need 0 < delta < period");
    }
    if (window < 1) {
        throw std::invalid_argument("IAT channel: window must be >= 1");
    }
}

std::vector<double> modulate_iat(const BitString& bits, const IatChannelConfig& cfg) {
    cfg.validate();
    std::vector<double> itts;
    itts.reserve(bits.size() * cfg.window);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        const double v = bits[i] ? cfg.period - cfg.delta : cfg.period + cfg.delta;
        itts.insert(itts.end(), cfg.window, v);
    }
    return itts;
}

std::vector<double> running_average(std::span<const double> iat_seq, std::size_t l) {
    if (l == 0) {
        throw std::invalid_argument("running_average: window must be >= 1");
    }
    if (iat_seq.size() < l) {
        throw std::invalid_argument("running_average: sequence shorter than window");
    }
    std::vector<double> out(iat_seq.size() - l + 1);
    // Direct sums keep each output independent of accumulated rounding.
    for (std::size_t i = 0; i < out.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < l; ++j) {
            s += iat_seq[i + j];
        }
        out[i] = s / static_cast<double>(l);
    }
    return out;
}

std::size_t find_sampling_offset(std::span<const double> avg_seq, std::size_t l, double gamma) {
    if (l == 0) {
        throw std::invalid_argument("find_sampling_offset: window must be >= 1");
    }
    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t tau = 0; tau < l && tau < avg_seq.size(); ++tau) {
        double score = 0.0;
        for (std::size_t i = tau; i < avg_seq.size(); i += l) {
            score += std::abs(avg_seq[i] - gamma);
        }
        if (score > best_score) {
            best_score = score;
            best = tau;
        }
    }
    return best;
}

Demodulation demodulate_iat_detailed(std::span<const double> iat_seq, const IatChannelConfig& cfg) {
    cfg.validate();
    if (iat_seq.size() < cfg.window) {
        throw std::invalid_argument("demodulate_iat: sequence shorter than window");
    }
    const auto avg = running_average(iat_seq, cfg.window);
    const double gamma = cfg.threshold();
    Demodulation out;
    out.offset = find_sampling_offset(avg, cfg.window, gamma);
    out.bits.reserve(avg.size() / cfg.window + 1);
    for (std::size_t i = out.offset; i < avg.size(); i += cfg.window) {
        out.bits.push_back(!(avg[i] >= gamma));
    }
    return out;
}

BitString demodulate_iat(std::span<const double> iat_seq, const IatChannelConfig& cfg) {
    return demodulate_iat_detailed(iat_seq, cfg).bits;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double q_inverse(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("q_inverse: p must be in (0, 1)");
    }
    double lo = -40.0;
    double hi = 40.0;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (q_function(mid) > p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double analytic_ber(const IatChannelConfig& cfg, double sigma) {
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("analytic_ber: sigma must be > 0");
    }
    if (!(cfg.delta >= 0.0) || cfg.window < 1) {
        throw std::invalid_argument("analytic_ber: need delta >= 0 and window >= 1");
    }
    return q_function(static_cast<double>(cfg.window) * cfg.delta / ((1.0 + cfg.skew) * sigma));
}

std::size_t min_window(double delta, double skew, double sigma, double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 0.5)) {
        throw std::invalid_argument("min_window: epsilon must be in (0, 0.5]");
    }
    if (!(delta > 0.0) || !(sigma > 0.0)) {
        throw std::invalid_argument("min_window: delta and sigma must be > 0");
    }
    const double l = std::ceil((1.0 + skew) * sigma * q_inverse(epsilon) / delta);
    return l < 1.0 ? 1 : static_cast<std::size_t>(l);
}

}  // namespace tacan::chan_iat
