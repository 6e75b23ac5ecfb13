#include "tacan/link.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "tacan/bitcodec.hpp"
#include "tacan/chan_hybrid.hpp"
#include "tacan/chan_iat.hpp"
#include "tacan/chan_lsb.hpp"
#include "tacan/chan_offset.hpp"

namespace tacan::link {

namespace {

using attacks::AuthKind;
using attacks::AuthResult;
using bitcodec::FrameStatus;

constexpr std::size_t kOverhead = bitcodec::kOverheadBits;

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

std::size_t framed_slot_bits(std::size_t data_bits, std::size_t gap) {
    return bitcodec::worst_case_frame_len(data_bits + kOverhead) + gap;
}

// Per-slot outcome of one covert stream.
struct Gathered {
    std::vector<std::optional<BitString>> frames;
    std::vector<std::string> cause;

    explicit Gathered(std::size_t n) : frames(n), cause(n, "lost") {}

    void note(std::size_t slot, FrameStatus status, BitString data) {
        if (slot >= frames.size() || frames[slot]) {
            return;
        }
        if (status == FrameStatus::ok) {
            frames[slot] = std::move(data);
            cause[slot].clear();
        } else if (cause[slot] == "lost") {
            cause[slot] = std::string(bitcodec::to_string(status));
        }
    }
};

chan_iat::IatChannelConfig iat_config(const LinkConfig& cfg, std::size_t window) {
    return {cfg.period, cfg.delta(), window, cfg.skew};
}

chan_offset::OffsetChannelConfig offset_config(const LinkConfig& cfg, const SlotLayout& layout) {
    return {cfg.period, cfg.delta(), cfg.window, layout.timing_slot_bits, cfg.skew};
}

chan_lsb::LsbChannelConfig lsb_config(const LinkConfig& cfg) { return {cfg.lsb_bits, cfg.byte_index}; }

// Frames padded with `fill` to `slot_bits` each.
BitString slot_stream(std::span<const BitString> parts, std::size_t slot_bits) {
    BitString out;
    out.reserve(parts.size() * slot_bits);
    for (const auto& p : parts) {
        const BitString frame = bitcodec::encode_frame(p);
        out.append(frame);
        out.append(BitString::repeat(true, slot_bits - frame.size()));
    }
    return out;
}

Gathered gather_iat(const LinkConfig& cfg, std::span<const double> x, std::size_t window, std::size_t slot_bits,
                    std::size_t data_bits, std::size_t n_slots) {
    Gathered g(n_slots);
    if (x.size() < window) {
        return g;
    }
    const BitString bits = chan_iat::demodulate_iat(x, iat_config(cfg, window));
    for (auto& r : bitcodec::scan_stream(bits, data_bits)) {
        g.note(r.offset / slot_bits, r.status, std::move(r.data));
    }
    return g;
}

Gathered gather_lsb(const LinkConfig& cfg, const timing::TimingTrace& trace, std::size_t carriers_per_slot,
                    std::size_t data_bits, std::size_t n_slots) {
    Gathered g(n_slots);
    if (!trace.has_payloads()) {
        return g;
    }
    for (auto& r : chan_lsb::extract_lsb(trace.payloads, lsb_config(cfg), data_bits)) {
        g.note(r.carrier / carriers_per_slot, r.status, std::move(r.data));
    }
    return g;
}

Gathered gather_offset(const LinkConfig& cfg, const SlotLayout& layout, std::span<const double> x,
                       std::size_t n_slots) {
    Gathered g(n_slots);
    const auto ocfg = offset_config(cfg, layout);
    const std::size_t n = ocfg.batch_size();
    for (std::size_t slot = 0; slot < n_slots && (slot + 1) * n <= x.size(); ++slot) {
        const auto batch = chan_offset::demodulate_batch(x.subspan(slot * n, n), ocfg);
        for (const auto& run : chan_offset::split_at_silence(batch.symbols)) {
            auto outcome = bitcodec::try_decode_frame(run, 0, layout.iat_data_bits);
            g.note(slot, outcome.status, std::move(outcome.data));
        }
    }
    return g;
}

BitString forge_digest(const BitString& legit, std::size_t counter_bits, std::size_t digest_bits, Rng& rng) {
    BitString out = legit.slice(0, counter_bits);
    const std::uint64_t mask = digest_bits == 64 ? ~0ULL : ((1ULL << digest_bits) - 1);
    out.append(BitString::from_uint(rng.next_u64() & mask, digest_bits));
    return out;
}

timing::TimingTrace arrivals_from(const timing::TimingTrace& trace, double t) {
    timing::TimingTrace out = trace;
    out.arrivals.clear();
    out.payloads.clear();
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (trace.arrivals[i] >= t) {
            out.arrivals.push_back(trace.arrivals[i]);
            if (trace.has_payloads()) {
                out.payloads.push_back(trace.payloads[i]);
            }
        }
    }
    return out;
}

timing::Payload random_payload(std::size_t bytes, Rng& rng) {
    timing::Payload p(bytes);
    for (auto& b : p) {
        b = static_cast<std::uint8_t>(rng.next_u64() >> 56);
    }
    return p;
}

}  // namespace

std::string_view to_string(Channel c) noexcept {
    switch (c) {
        case Channel::iat: return "iat";
        case Channel::lsb: return "lsb";
        case Channel::offset: return "offset";
        case Channel::hybrid: return "hybrid";
    }
    return "unknown";
}

std::string_view to_string(Attack a) noexcept {
    switch (a) {
        case Attack::none: return "none";
        case Attack::suspension: return "suspension";
        case Attack::injection: return "injection";
        case Attack::masquerade: return "masquerade";
        case Attack::forgery: return "forgery";
        case Attack::replay: return "replay";
    }
    return "unknown";
}

Channel parse_channel(std::string_view name) {
    for (Channel c : {Channel::iat, Channel::lsb, Channel::offset, Channel::hybrid}) {
        if (name == to_string(c)) {
            return c;
        }
    }
    throw std::invalid_argument("unknown channel '" + std::string(name) + "'");
}

Attack parse_attack(std::string_view name) {
    for (Attack a : {Attack::none, Attack::suspension, Attack::injection, Attack::masquerade, Attack::forgery,
                     Attack::replay}) {
        if (name == to_string(a)) {
            return a;
        }
    }
    throw std::invalid_argument("unknown attack '" + std::string(name) + "'");
}

void LinkConfig::validate() const {
    if (!(period > 0.0)) {
        throw std::invalid_argument("link: period must be > 0");
    }
    if (!(delta_frac > 0.0 && delta_frac < 1.0)) {
        throw std::invalid_argument("link: delta fraction must lie in (0, 1)");
    }
    if (window == 0 || (channel == Channel::offset && window % 2 != 0)) {
        throw std::invalid_argument("link: window must be >= 1 (even on the offset channel)");
    }
    if (lsb_bits == 0 || lsb_bits > 8) {
        throw std::invalid_argument("link: LSB bits must be in [1, 8]");
    }
    if (byte_index >= payload_bytes || payload_bytes > 8) {
        throw std::invalid_argument("link: byte index must address one of at most 8 payload bytes");
    }
    if (counter_bits == 0 || counter_bits > 63) {
        throw std::invalid_argument("link: counter bits must be in [1, 63]");
    }
    try {
        digest.validate();
    } catch (const auth::AuthError& e) {
        throw std::invalid_argument(std::string("link: ") + e.what());
    }
    if (!(sigma_frac >= 0.0) || !(1.0 + skew > 0.0)) {
        throw std::invalid_argument("link: sigma must be >= 0 and 1 + skew > 0");
    }
}

SlotLayout slot_layout(const LinkConfig& cfg) {
    cfg.validate();
    const std::size_t n_m = cfg.message_bits();
    SlotLayout s;
    switch (cfg.channel) {
        case Channel::iat:
        case Channel::offset:
            s.iat_data_bits = n_m;
            s.timing_slot_bits = framed_slot_bits(n_m, cfg.gap_bits);
            s.messages_per_slot = s.timing_slot_bits * cfg.window;
            break;
        case Channel::lsb:
            s.lsb_data_bits = n_m;
            s.lsb_slot_carriers = ceil_div(framed_slot_bits(n_m, cfg.gap_bits), cfg.lsb_bits);
            s.messages_per_slot = s.lsb_slot_carriers;
            break;
        case Channel::hybrid: {
            const chan_hybrid::HybridConfig h{cfg.window, cfg.lsb_bits, n_m, kOverhead};
            s.iat_data_bits = chan_hybrid::iat_share(chan_hybrid::splitting_ratio(h), n_m);
            s.lsb_data_bits = n_m - s.iat_data_bits;
            const std::size_t d1 =
                s.iat_data_bits > 0 ? framed_slot_bits(s.iat_data_bits, cfg.gap_bits) * cfg.window : 0;
            const std::size_t d2 =
                s.lsb_data_bits > 0 ? ceil_div(framed_slot_bits(s.lsb_data_bits, cfg.gap_bits), cfg.lsb_bits) : 0;
            s.messages_per_slot = ceil_div(std::max(d1, d2), cfg.window) * cfg.window;
            s.timing_slot_bits = s.iat_data_bits > 0 ? s.messages_per_slot / cfg.window : 0;
            s.lsb_slot_carriers = s.lsb_data_bits > 0 ? s.messages_per_slot : 0;
            break;
        }
    }
    return s;
}

double slot_duration(const LinkConfig& cfg) {
    return static_cast<double>(slot_layout(cfg).messages_per_slot) * cfg.period;
}

timing::TimingTrace transmit(const LinkConfig& cfg, std::span<const BitString> messages, Rng& noise_rng,
                             Rng& payload_rng) {
    const SlotLayout layout = slot_layout(cfg);
    const std::size_t n_itts = messages.size() * layout.messages_per_slot;

    std::vector<BitString> iat_parts;
    std::vector<BitString> lsb_parts;
    for (const auto& m : messages) {
        if (m.size() != cfg.message_bits()) {
            throw std::invalid_argument("transmit: message length does not match the configuration");
        }
        const auto parts = chan_hybrid::split_at(m, layout.iat_data_bits);
        iat_parts.push_back(parts.iat);
        lsb_parts.push_back(parts.lsb);
    }

    std::vector<double> itts;
    switch (cfg.channel) {
        case Channel::iat:
            itts = chan_iat::modulate_iat(slot_stream(iat_parts, layout.timing_slot_bits), iat_config(cfg, cfg.window));
            break;
        case Channel::offset: {
            auto symbols = chan_offset::to_symbols(slot_stream(iat_parts, layout.timing_slot_bits));
            // Idle fill on this channel is silence, not 1s.
            for (std::size_t s = 0; s < messages.size(); ++s) {
                const std::size_t used = bitcodec::encode_frame(iat_parts[s]).size();
                std::fill(symbols.begin() + static_cast<std::ptrdiff_t>(s * layout.timing_slot_bits + used),
                          symbols.begin() + static_cast<std::ptrdiff_t>((s + 1) * layout.timing_slot_bits),
                          chan_offset::Symbol::silence);
            }
            itts = chan_offset::modulate_offset(symbols, offset_config(cfg, layout));
            break;
        }
        case Channel::lsb:
            itts = timing::make_periodic_itts(cfg.period, n_itts);
            break;
        case Channel::hybrid:
            if (layout.iat_data_bits > 0) {
                itts = chan_iat::modulate_iat(slot_stream(iat_parts, layout.timing_slot_bits),
                                              iat_config(cfg, cfg.window));
            } else {
                itts = timing::make_periodic_itts(cfg.period, n_itts);
            }
            break;
    }

    timing::ClockModel clock;
    clock.skew = cfg.skew;
    clock.sigma_eta = cfg.sigma_frac * cfg.period / std::sqrt(2.0);
    clock.noise = cfg.noise;
    timing::TimingTrace trace = timing::simulate_arrivals(itts, clock, noise_rng);
    trace.msg_id = cfg.msg_id;
    trace.nominal_period = cfg.period;

    if (layout.lsb_data_bits > 0) {
        chan_lsb::PayloadStream payloads;
        payloads.reserve(trace.size());
        for (std::size_t i = 0; i < trace.size(); ++i) {
            payloads.push_back(random_payload(cfg.payload_bytes, payload_rng));
        }
        const auto lcfg = lsb_config(cfg);
        chan_lsb::idle_fill(payloads, 0, payloads.size(), lcfg);
        const BitString bits = slot_stream(lsb_parts, layout.lsb_slot_carriers * cfg.lsb_bits);
        trace.payloads = chan_lsb::embed_lsb(bits, payloads, lcfg);
    }
    return trace;
}

std::vector<AuthResult> receive(const LinkConfig& cfg, const timing::TimingTrace& trace, std::size_t n_slots,
                                auth::AuthContext& monitor) {
    const SlotLayout layout = slot_layout(cfg);
    const std::vector<double> x = trace.size() >= 2 ? timing::iats(trace) : std::vector<double>{};

    std::vector<std::optional<BitString>> messages(n_slots);
    std::vector<std::string> causes(n_slots);
    switch (cfg.channel) {
        case Channel::iat: {
            auto g = gather_iat(cfg, x, cfg.window, layout.timing_slot_bits, layout.iat_data_bits, n_slots);
            messages = std::move(g.frames);
            causes = std::move(g.cause);
            break;
        }
        case Channel::offset: {
            auto g = gather_offset(cfg, layout, x, n_slots);
            messages = std::move(g.frames);
            causes = std::move(g.cause);
            break;
        }
        case Channel::lsb: {
            auto g = gather_lsb(cfg, trace, layout.lsb_slot_carriers, layout.lsb_data_bits, n_slots);
            messages = std::move(g.frames);
            causes = std::move(g.cause);
            break;
        }
        case Channel::hybrid: {
            Gathered gi(n_slots);
            if (layout.iat_data_bits > 0) {
                gi = gather_iat(cfg, x, cfg.window, layout.timing_slot_bits, layout.iat_data_bits, n_slots);
            } else {
                std::fill(gi.frames.begin(), gi.frames.end(), BitString{});
            }
            Gathered gl(n_slots);
            if (layout.lsb_data_bits > 0) {
                gl = gather_lsb(cfg, trace, layout.lsb_slot_carriers, layout.lsb_data_bits, n_slots);
            } else {
                std::fill(gl.frames.begin(), gl.frames.end(), BitString{});
            }
            for (std::size_t s = 0; s < n_slots; ++s) {
                messages[s] = chan_hybrid::reassemble(gi.frames[s], gl.frames[s]);
                if (!gi.frames[s]) {
                    causes[s] = "iat:" + gi.cause[s];
                } else if (!gl.frames[s]) {
                    causes[s] = "lsb:" + gl.cause[s];
                }
            }
            break;
        }
    }

    std::vector<AuthResult> results;
    results.reserve(n_slots);
    for (std::size_t s = 0; s < n_slots; ++s) {
        if (!messages[s]) {
            monitor.skip_message();
            results.push_back({AuthKind::reception_failure, causes[s]});
            continue;
        }
        const std::uint64_t expected = monitor.message_counter() + 1;
        const std::uint64_t received = messages[s]->to_uint(0, cfg.counter_bits);
        if (auth::verify_auth_message(*messages[s], monitor, cfg.digest)) {
            results.push_back({AuthKind::ok, {}});
        } else {
            results.push_back(
                {AuthKind::verification_failure, received != expected ? "counter_mismatch" : "digest_mismatch"});
        }
    }
    return results;
}

auth::Bytes master_key_from_seed(std::uint64_t seed) {
    Rng rng(Rng::derive_seed(seed, 0x6b6579));
    auth::Bytes key(32);
    for (auto& b : key) {
        b = static_cast<std::uint8_t>(rng.next_u64() >> 56);
    }
    return key;
}

LinkRun run_link(const LinkConfig& cfg, std::size_t n_frames, const AttackPlan& attack, std::uint64_t seed) {
    LinkRun run;
    run.layout = slot_layout(cfg);
    run.slot_seconds = static_cast<double>(run.layout.messages_per_slot) * cfg.period;
    run.attack_slot = n_frames;
    if (!(attack.start_s >= 0.0)) {
        throw std::invalid_argument("run_link: attack start must be >= 0");
    }

    const auth::Bytes key = master_key_from_seed(seed);
    auth::AuthContext sender(key, 0, cfg.counter_bits, cfg.msg_id);
    auth::AuthContext monitor(key, 0, cfg.counter_bits, cfg.msg_id);

    Rng noise_rng(Rng::derive_seed(seed, 1));
    Rng payload_rng(Rng::derive_seed(seed, 2));
    Rng forge_rng(Rng::derive_seed(seed, 3));
    Rng attacker_noise(Rng::derive_seed(seed, 4));
    Rng attacker_payload(Rng::derive_seed(seed, 5));

    const double slots_at_start = attack.start_s / run.slot_seconds;
    const auto floor_slot = static_cast<std::size_t>(std::floor(slots_at_start));
    const auto ceil_slot = static_cast<std::size_t>(std::ceil(slots_at_start - 1e-9));

    std::vector<BitString> sent;
    std::vector<BitString> forged;
    sent.reserve(n_frames);
    for (std::size_t s = 0; s < n_frames; ++s) {
        sent.push_back(auth::generate_auth_message(sender, cfg.digest));
    }

    switch (attack.kind) {
        case Attack::forgery:
        case Attack::replay: {
            const std::size_t first = ceil_slot;
            if (attack.kind == Attack::replay && first == 0 && n_frames > 0) {
                throw std::invalid_argument("run_link: replay needs at least one earlier frame");
            }
            run.attack_slot = std::min(first, n_frames);
            for (std::size_t s = first; s < n_frames; ++s) {
                sent[s] = attack.kind == Attack::forgery
                              ? forge_digest(sent[s], cfg.counter_bits, cfg.digest.bits, forge_rng)
                              : sent[s - first];
            }
            break;
        }
        case Attack::masquerade:
            forged = sent;
            for (std::size_t s = floor_slot; s < n_frames; ++s) {
                forged[s] = forge_digest(sent[s], cfg.counter_bits, cfg.digest.bits, forge_rng);
            }
            break;
        default:
            break;
    }

    timing::TimingTrace trace = transmit(cfg, sent, noise_rng, payload_rng);

    switch (attack.kind) {
        case Attack::suspension:
            trace = attacks::apply_suspension(trace, attack.start_s);
            run.attack_slot = std::min(floor_slot, n_frames);
            break;
        case Attack::injection: {
            const double end = trace.arrivals.empty() ? 0.0 : trace.arrivals.back();
            const double stop = std::min(end, attack.start_s + attack.duration_s);
            std::size_t count = 0;
            if (stop >= attack.start_s) {
                count = static_cast<std::size_t>(std::floor((stop - attack.start_s) / attack.inject_period_s)) + 1;
            }
            auto injected = attacks::periodic_trace(cfg.msg_id, attack.start_s, attack.inject_period_s, count);
            if (trace.has_payloads()) {
                for (std::size_t i = 0; i < count; ++i) {
                    injected.payloads.push_back(random_payload(cfg.payload_bytes, attacker_payload));
                }
            }
            trace = attacks::apply_injection(trace, injected);
            run.attack_slot = std::min(floor_slot, n_frames);
            break;
        }
        case Attack::masquerade: {
            const auto attacker = transmit(cfg, forged, attacker_noise, attacker_payload);
            trace = attacks::apply_masquerade(trace, attack.start_s, arrivals_from(attacker, attack.start_s));
            run.attack_slot = std::min(floor_slot, n_frames);
            break;
        }
        default:
            break;
    }

    run.results = receive(cfg, trace, n_frames, monitor);
    return run;
}

}  // namespace tacan::link
