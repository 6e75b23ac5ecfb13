#include "tacan/timing.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string_view>

namespace tacan::timing {

void ClockModel::validate() const {
    if (!(sigma_eta >= 0.0)) {
        throw std::invalid_argument("ClockModel: sigma_eta must be >= 0");
    }
    if (!(1.0 + skew > 0.0)) {
        throw std::invalid_argument("ClockModel: 1 + skew must be > 0");
    }
}

std::vector<double> make_periodic_itts(double period, std::size_t n) {
    if (!(period > 0.0)) {
        throw std::invalid_argument("make_periodic_itts: period must be > 0");
    }
    return std::vector<double>(n, period);
}

TimingTrace simulate_arrivals(std::span<const double> itts, const ClockModel& clock) {
    Rng rng(clock.seed);
    return simulate_arrivals(itts, clock, rng);
}

TimingTrace simulate_arrivals(std::span<const double> itts, const ClockModel& clock, Rng& rng) {
    clock.validate();
    auto noise = [&]() {
        if (clock.sigma_eta == 0.0) {
            return clock.delay;
        }
        const double z = clock.noise == NoiseKind::laplace ? rng.laplace() : rng.normal();
        return clock.delay + clock.sigma_eta * z;
    };

    TimingTrace trace;
    trace.arrivals.reserve(itts.size() + 1);
    const double scale = 1.0 / (1.0 + clock.skew);
    double t = 0.0;
    trace.arrivals.push_back(noise());
    for (double itt : itts) {
        if (!(itt > 0.0)) {
            throw std::invalid_argument("simulate_arrivals: ITTs must be > 0");
        }
        t += itt;
        trace.arrivals.push_back(t * scale + noise());
    }
    return trace;
}

std::vector<double> iats(std::span<const double> arrivals) {
    if (arrivals.size() < 2) {
        throw std::invalid_argument("iats: need at least two arrivals");
    }
    std::vector<double> out(arrivals.size() - 1);
    for (std::size_t i = 1; i < arrivals.size(); ++i) {
        out[i - 1] = arrivals[i] - arrivals[i - 1];
    }
    return out;
}

std::vector<double> iats(const TimingTrace& trace) { return iats(std::span<const double>(trace.arrivals)); }

IatStats robust_sigma(std::span<const double> iat_seq, double period) {
    if (!(period > 0.0)) {
        throw std::invalid_argument("robust_sigma: period must be > 0");
    }
    const double lo = 0.8 * period;
    const double hi = 1.2 * period;
    IatStats stats;
    stats.n_total = iat_seq.size();
    double sum = 0.0;
    for (double x : iat_seq) {
        if (x >= lo && x <= hi) {
            sum += x;
            ++stats.n_used;
        }
    }
    if (stats.n_used == 0) {
        throw std::domain_error("robust_sigma: no IATs within +-20% of the period");
    }
    stats.mu = sum / static_cast<double>(stats.n_used);
    if (stats.n_used > 1) {
        double ss = 0.0;
        for (double x : iat_seq) {
            if (x >= lo && x <= hi) {
                ss += (x - stats.mu) * (x - stats.mu);
            }
        }
        stats.sigma = std::sqrt(ss / static_cast<double>(stats.n_used - 1));
    }
    return stats;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

struct Record {
    double ts = 0.0;
    std::uint32_t id = 0;
    Payload data;
};

// Returns an empty string on success, otherwise the reason.
std::string parse_line(std::string_view line, Record& rec) {
    if (line.empty() || line.front() != '(') {
        return "expected '(' timestamp";
    }
    const auto close = line.find(')');
    if (close == std::string_view::npos) {
        return "unterminated timestamp";
    }
    const auto ts_text = line.substr(1, close - 1);
    const auto [ts_end, ts_ec] = std::from_chars(ts_text.data(), ts_text.data() + ts_text.size(), rec.ts);
    if (ts_ec != std::errc{} || ts_end != ts_text.data() + ts_text.size()) {
        return "bad timestamp";
    }
    auto rest = trim(line.substr(close + 1));
    const auto space = rest.find_first_of(" \t");
    if (space == std::string_view::npos) {
        return "missing interface or frame field";
    }
    auto frame = trim(rest.substr(space + 1));
    const auto extra = frame.find_first_of(" \t");
    if (extra != std::string_view::npos) {
        frame = frame.substr(0, extra);  // trailing flags from candump -L are ignored
    }
    const auto hash = frame.find('#');
    if (hash == std::string_view::npos || hash == 0 || hash > 8) {
        return "bad ID#DATA field";
    }
    std::uint32_t id = 0;
    for (char c : frame.substr(0, hash)) {
        const int d = hex_digit(c);
        if (d < 0) {
            return "bad hex ID";
        }
        id = (id << 4) | static_cast<std::uint32_t>(d);
    }
    rec.id = id;
    auto data = frame.substr(hash + 1);
    rec.data.clear();
    if (data == "R" || data.starts_with("R")) {
        return {};
    }
    if (data.size() % 2 != 0) {
        return "odd number of hex digits in payload";
    }
    for (std::size_t i = 0; i < data.size(); i += 2) {
        const int hi = hex_digit(data[i]);
        const int lo = hex_digit(data[i + 1]);
        if (hi < 0 || lo < 0) {
            return "bad hex payload";
        }
        rec.data.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return {};
}

}  // namespace

CandumpLog parse_candump(std::istream& in) {
    CandumpLog log;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto view = trim(line);
        if (view.empty()) {
            continue;
        }
        Record rec;
        if (auto reason = parse_line(view, rec); !reason.empty()) {
            log.errors.push_back({lineno, std::string(view), std::move(reason)});
            continue;
        }
        auto& trace = log.traces[rec.id];
        trace.msg_id = rec.id;
        trace.arrivals.push_back(rec.ts);
        trace.payloads.push_back(std::move(rec.data));
    }
    return log;
}

void write_trace_csv(std::ostream& out, const TimingTrace& trace) {
    out << "index,timestamp_seconds\n";
    for (std::size_t i = 0; i < trace.arrivals.size(); ++i) {
        out << fmt::format("{},{:.9f}\n", i, trace.arrivals[i]);
    }
}

}  // namespace tacan::timing
