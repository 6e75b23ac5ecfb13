#include "tacan/sched.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <string_view>

#include <fmt/format.h>

namespace tacan::sched {

namespace {

// Ceiling that ignores representation error just above an integer.
double safe_ceil(double x) {
    const double r = std::round(x);
    return std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)) ? r : std::ceil(x);
}

const MessageSpec& find(const BusSpec& bus, int priority) {
    for (const auto& m : bus.messages) {
        if (m.priority == priority) {
            return m;
        }
    }
    throw std::invalid_argument("unknown priority " + std::to_string(priority));
}

ResponseReport analyse(const BusSpec& bus, const MessageSpec& target, double f) {
    ResponseReport rep;
    rep.id = target.id;
    rep.priority = target.priority;
    rep.c = transmission_time(target.bytes, bus.tau_bit);
    rep.deadline = target.deadline;
    rep.j = target.jitter + f * target.period;
    rep.b = blocking_delay(bus, target.priority);

    struct Hp {
        double c, j, t;
    };
    std::vector<Hp> hp;
    for (const auto& m : bus.messages) {
        if (m.priority < target.priority) {
            const double c = transmission_time(m.bytes, bus.tau_bit);
            if (f > 0.0) {
                rep.b += f / (1.0 - f) * c;
            }
            hp.push_back({f > 0.0 ? c / (1.0 - f) : c, m.jitter, m.period});
        }
    }

    double w = rep.b;
    for (;;) {
        double next = rep.b;
        for (const auto& h : hp) {
            next += safe_ceil((w + h.j + bus.tau_bit) / h.t) * h.c;
        }
        ++rep.iterations;
        const bool converged = next == w;
        w = next;
        if (converged) {
            rep.schedulable = rep.j + w + rep.c <= rep.deadline;
            break;
        }
        if (rep.j + w + rep.c > rep.deadline) {
            rep.schedulable = false;
            break;
        }
    }
    rep.w = w;
    rep.r = rep.j + w + rep.c;
    return rep;
}

double parse_double(std::string_view s, std::size_t line) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || p != end) {
        throw ParseError(fmt::format("line {}: bad number '{}'", line, s));
    }
    return v;
}

long long parse_int(std::string_view s, std::size_t line) {
    int base = 10;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        s.remove_prefix(2);
        base = 16;
    }
    long long v = 0;
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v, base);
    if (ec != std::errc{} || p != end) {
        throw ParseError(fmt::format("line {}: bad integer '{}'", line, s));
    }
    return v;
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

void BusSpec::validate() const {
    if (!(tau_bit > 0.0)) {
        throw std::invalid_argument("bus: bit time must be > 0");
    }
    std::set<int> seen;
    for (const auto& m : messages) {
        if (!(m.period > 0.0) || !(m.deadline > 0.0) || m.jitter < 0.0) {
            throw std::invalid_argument(fmt::format("bus: message 0x{:X} needs period, deadline > 0", m.id));
        }
        if (m.bytes > 8) {
            throw std::invalid_argument(fmt::format("bus: message 0x{:X} has more than 8 bytes", m.id));
        }
        if (!seen.insert(m.priority).second) {
            throw std::invalid_argument(fmt::format("bus: duplicate priority {}", m.priority));
        }
    }
}

double transmission_time(std::size_t bytes, double tau_bit) {
    if (bytes > 8) {
        throw std::invalid_argument("transmission_time: payload exceeds 8 bytes");
    }
    return static_cast<double>(80 + 10 * bytes) * tau_bit;
}

double blocking_delay(const BusSpec& bus, int priority) {
    find(bus, priority);
    double b = 0.0;
    for (const auto& m : bus.messages) {
        if (m.priority > priority) {
            b = std::max(b, transmission_time(m.bytes, bus.tau_bit));
        }
    }
    return b;
}

ResponseReport worst_case_response(const BusSpec& bus, int priority) {
    return analyse(bus, find(bus, priority), 0.0);
}

ResponseReport tacan_adjusted_response(const BusSpec& bus, int priority, double f) {
    if (!(f >= 0.0 && f < 1.0)) {
        throw std::invalid_argument("tacan_adjusted_response: f must lie in [0, 1)");
    }
    return analyse(bus, find(bus, priority), f);
}

Adjustment tacan_adjustment(const BusSpec& bus, int priority, double f) {
    if (!(f >= 0.0 && f < 1.0)) {
        throw std::invalid_argument("tacan_adjustment: f must lie in [0, 1)");
    }
    const auto& target = find(bus, priority);
    Adjustment a;
    a.jitter_increase = f * target.period;
    for (const auto& m : bus.messages) {
        if (m.priority < priority) {
            a.blocking_increase += f / (1.0 - f) * transmission_time(m.bytes, bus.tau_bit);
        }
    }
    const double c8 = transmission_time(8, bus.tau_bit);
    a.per_message_increase = c8 / (1.0 - f) - c8;
    return a;
}

BusReport bus_schedulable(const BusSpec& bus, double f) {
    bus.validate();
    if (!(f >= 0.0 && f < 1.0)) {
        throw std::invalid_argument("bus_schedulable: f must lie in [0, 1)");
    }
    std::vector<const MessageSpec*> order;
    for (const auto& m : bus.messages) {
        order.push_back(&m);
    }
    std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->priority < b->priority; });
    BusReport report;
    for (const auto* m : order) {
        report.messages.push_back(analyse(bus, *m, f));
        report.schedulable = report.schedulable && report.messages.back().schedulable;
    }
    return report;
}

BusSpec parse_bus(std::istream& in) {
    BusSpec bus;
    bool have_rate = false;
    bool have_header = false;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (line.rfind("bitrate_bps", 0) == 0) {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ParseError(fmt::format("line {}: expected bitrate_bps=<value>", line_no));
            }
            const double rate = parse_double(trim(line.substr(eq + 1)), line_no);
            if (!(rate > 0.0)) {
                throw ParseError(fmt::format("line {}: bit rate must be > 0", line_no));
            }
            bus.tau_bit = 1.0 / rate;
            have_rate = true;
            continue;
        }
        if (line.rfind("id,", 0) == 0) {
            if (line != "id,priority,bytes,period_ms,jitter_ms,deadline_ms") {
                throw ParseError(fmt::format("line {}: unexpected header", line_no));
            }
            have_header = true;
            continue;
        }
        if (!have_header) {
            throw ParseError(fmt::format("line {}: record before header", line_no));
        }
        std::vector<std::string_view> f;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            f.push_back(trim(line.substr(start, comma - start)));
            if (comma == std::string_view::npos) {
                break;
            }
            start = comma + 1;
        }
        if (f.size() != 6) {
            throw ParseError(fmt::format("line {}: expected 6 fields, got {}", line_no, f.size()));
        }
        MessageSpec m;
        const long long id = parse_int(f[0], line_no);
        const long long prio = parse_int(f[1], line_no);
        const long long bytes = parse_int(f[2], line_no);
        if (id < 0 || bytes < 0 || bytes > 8) {
            throw ParseError(fmt::format("line {}: id or byte count out of range", line_no));
        }
        m.id = static_cast<std::uint32_t>(id);
        m.priority = static_cast<int>(prio);
        m.bytes = static_cast<std::size_t>(bytes);
        m.period = parse_double(f[3], line_no) * 1e-3;
        m.jitter = parse_double(f[4], line_no) * 1e-3;
        m.deadline = parse_double(f[5], line_no) * 1e-3;
        bus.messages.push_back(m);
    }
    if (!have_rate) {
        throw ParseError("missing bitrate_bps line");
    }
    try {
        bus.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    return bus;
}

void write_report_csv(std::ostream& out, const BusSpec& bus, const BusReport& report) {
    out << "id,priority,bytes,C_us,J_us,B_us,w_us,R_us,D_us,iterations,schedulable\n";
    for (const auto& r : report.messages) {
        std::size_t bytes = 0;
        for (const auto& m : bus.messages) {
            if (m.priority == r.priority) {
                bytes = m.bytes;
            }
        }
        out << fmt::format("0x{:03X},{},{},{:.3f},{:.3f},{:.3f},{:.3f},{:.3f},{:.3f},{},{}\n", r.id, r.priority,
                           bytes, r.c * 1e6, r.j * 1e6, r.b * 1e6, r.w * 1e6, r.r * 1e6, r.deadline * 1e6,
                           r.iterations, r.schedulable ? 1 : 0);
    }
}

}  // namespace tacan::sched
