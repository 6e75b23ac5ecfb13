#pragma once

// Worst-case response time analysis for a fixed-priority CAN bus, plus the
// variant for a covert channel that shifts ITTs by a fraction f of the
// period: the target's jitter grows by f T_k, its blocking by
// sum_{hp} f/(1-f) C_i, and every higher-priority C_i becomes C_i/(1-f).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace tacan::sched {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MessageSpec {
    std::uint32_t id = 0;
    int priority = 0;         ///< smaller is higher
    std::size_t bytes = 8;    ///< 0..8
    double period = 0.01;     ///< seconds
    double jitter = 0.0;      ///< seconds
    double deadline = 0.01;   ///< seconds
};

struct BusSpec {
    double tau_bit = 2e-6;
    std::vector<MessageSpec> messages;

    /// Throws std::invalid_argument on a non-positive bit time, period or
    /// deadline, payload > 8 bytes, or duplicate priorities.
    void validate() const;
};

struct ResponseReport {
    std::uint32_t id = 0;
    int priority = 0;
    double c = 0.0;  ///< own transmission time
    double j = 0.0;  ///< queuing jitter used
    double b = 0.0;  ///< blocking used
    double w = 0.0;  ///< queuing delay (last iterate)
    double r = 0.0;  ///< j + w + c
    double deadline = 0.0;
    std::size_t iterations = 0;
    bool schedulable = false;
};

/// (80 + 10 s) tau_bit. Throws std::invalid_argument for s > 8.
double transmission_time(std::size_t bytes, double tau_bit);

/// Largest C over lower-priority messages, 0 if none. Throws
/// std::invalid_argument for an unknown priority.
double blocking_delay(const BusSpec& bus, int priority);

ResponseReport worst_case_response(const BusSpec& bus, int priority);

/// Throws std::invalid_argument unless 0 <= f < 1.
ResponseReport tacan_adjusted_response(const BusSpec& bus, int priority, double f);

struct Adjustment {
    double jitter_increase = 0.0;    ///< f T_k
    double blocking_increase = 0.0;  ///< sum_{hp} f/(1-f) C_i
    double per_message_increase = 0.0;  ///< C/(1-f) - C for an 8-byte frame
};

Adjustment tacan_adjustment(const BusSpec& bus, int priority, double f);

struct BusReport {
    bool schedulable = true;
    std::vector<ResponseReport> messages;  ///< ordered by priority
};

BusReport bus_schedulable(const BusSpec& bus, double f);

/// Text format:
///   # comment
///   bitrate_bps=500000
///   id,priority,bytes,period_ms,jitter_ms,deadline_ms
///   0x100,1,8,10,0,10
/// Throws ParseError with the offending line number.
BusSpec parse_bus(std::istream& in);

/// Header: id,priority,bytes,C_us,J_us,B_us,w_us,R_us,D_us,iterations,schedulable
void write_report_csv(std::ostream& out, const BusSpec& bus, const BusReport& report);

}  // namespace tacan::sched
