#include "tacan/chan_offset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tacan::chan_offset {

void OffsetChannelConfig::validate() const {
    if (window == 0 || window % 2 != 0) {
        throw std::invalid_argument("offset channel: window must be even and >= 2");
    }
    if (batch_symbols == 0) {
        throw std::invalid_argument("offset channel: batch must hold at least one symbol");
    }
    if (!(period > 0.0) || !(delta > 0.0 && delta < period)) {
        throw std::invalid_argument("offset channel: need 0 < delta < period");
    }
}

std::vector<Symbol> to_symbols(const BitString& bits) {
    std::vector<Symbol> out(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        out[i] = bits[i] ? Symbol::one : Symbol::zero;
    }
    return out;
}

std::vector<double> modulate_offset(std::span<const Symbol> symbols, const OffsetChannelConfig& cfg) {
    if (cfg.window == 0 || cfg.window % 2 != 0) {
        throw std::invalid_argument("modulate_offset: window must be even");
    }
    const std::size_t half = cfg.window / 2;
    const double lo = cfg.period - cfg.delta;
    const double hi = cfg.period + cfg.delta;
    std::vector<double> itts;
    itts.reserve(symbols.size() * cfg.window);
    for (Symbol s : symbols) {
        switch (s) {
            case Symbol::zero:
                itts.insert(itts.end(), half, lo);
                itts.insert(itts.end(), half, hi);
                break;
            case Symbol::one:
                itts.insert(itts.end(), half, hi);
                itts.insert(itts.end(), half, lo);
                break;
            case Symbol::silence:
                itts.insert(itts.end(), cfg.window, cfg.period);
                break;
        }
    }
    return itts;
}

std::vector<double> batch_offsets(std::span<const double> iat_seq, double period) {
    std::vector<double> out(iat_seq.size());
    // Neumaier sum of T - x_i. Summing absolute time instead loses about
    // eps * elapsed per sample.
    double sum = 0.0;
    double comp = 0.0;
    for (std::size_t i = 0; i < iat_seq.size(); ++i) {
        const double d = period - iat_seq[i];
        const double t = sum + d;
        comp += std::abs(sum) >= std::abs(d) ? (sum - t) + d : (d - t) + sum;
        sum = t;
        out[i] = sum + comp;
    }
    return out;
}

BatchDecode demodulate_batch(std::span<const double> batch, const OffsetChannelConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.batch_size();
    if (batch.size() != n) {
        throw std::invalid_argument("demodulate_batch: batch length must equal n_f * L");
    }
    // offsets[0] is the batch reference point (zero elapsed IATs).
    std::vector<double> offsets(n + 1, 0.0);
    const auto o = batch_offsets(batch, cfg.period);
    std::copy(o.begin(), o.end(), offsets.begin() + 1);

    BatchDecode out;
    out.symbols.assign(cfg.batch_symbols, Symbol::silence);
    const auto [mn, mx] = std::minmax_element(o.begin(), o.end());
    if (*mx == *mn) {
        return out;
    }
    out.kappa = 0.5 * (*mx + *mn);

    double best = -1.0;
    for (std::size_t tau = 0; tau < cfg.window; ++tau) {
        double score = 0.0;
        for (std::size_t j = 0; j < cfg.batch_symbols; ++j) {
            score += std::abs(offsets[j * cfg.window + tau] - out.kappa);
        }
        if (score > best) {
            best = score;
            out.offset = tau;
        }
    }

    const double margin = cfg.delta * static_cast<double>(cfg.window) / (4.0 * (1.0 + cfg.skew));
    const double upper = out.kappa + margin;
    const double lower = out.kappa - margin;
    for (std::size_t j = 0; j < cfg.batch_symbols; ++j) {
        const double v = offsets[j * cfg.window + out.offset];
        if (v > upper) {
            out.symbols[j] = Symbol::zero;
        } else if (v < lower) {
            out.symbols[j] = Symbol::one;
        }
    }
    return out;
}

std::vector<Symbol> demodulate_offset(std::span<const double> iat_seq, const OffsetChannelConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.batch_size();
    if (iat_seq.size() < n) {
        throw std::invalid_argument("demodulate_offset: sequence shorter than one batch");
    }
    std::vector<Symbol> out;
    out.reserve((iat_seq.size() / n) * cfg.batch_symbols);
    for (std::size_t start = 0; start + n <= iat_seq.size(); start += n) {
        auto batch = demodulate_batch(iat_seq.subspan(start, n), cfg);
        out.insert(out.end(), batch.symbols.begin(), batch.symbols.end());
    }
    return out;
}

std::vector<BitString> split_at_silence(std::span<const Symbol> symbols) {
    std::vector<BitString> runs;
    BitString current;
    for (Symbol s : symbols) {
        if (s == Symbol::silence) {
            if (!current.empty()) {
                runs.push_back(std::move(current));
                current = BitString{};
            }
            continue;
        }
        current.push_back(s == Symbol::one);
    }
    if (!current.empty()) {
        runs.push_back(std::move(current));
    }
    return runs;
}

}  // namespace tacan::chan_offset
