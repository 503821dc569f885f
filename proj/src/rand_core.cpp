#include "ergo/rand_core.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ergo/error.hpp"

namespace ergo {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi)
{
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(product);
    hi = static_cast<std::uint32_t>(product >> 32);
}

inline std::uint32_t lo32(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
inline std::uint32_t hi32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

inline std::uint64_t join(std::uint32_t lo, std::uint32_t hi)
{
    return static_cast<std::uint64_t>(lo) | (static_cast<std::uint64_t>(hi) << 32);
}

} // namespace

std::array<std::uint32_t, 4>
philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) noexcept
{
    for (int round = 0; round < 10; ++round)
    {
        std::uint32_t lo0, hi0, lo1, hi1;
        mulhilo(kPhiloxM0, ctr[0], lo0, hi0);
        mulhilo(kPhiloxM1, ctr[2], lo1, hi1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

double bits_to_open_unit(std::uint64_t bits) noexcept
{
    // Midpoints of 2^52 equal cells; 2^53 cells would round the top one to 1.
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

RngStream::Block RngStream::next_block() noexcept
{
    const auto out = philox4x32({lo32(counter_), hi32(counter_), lo32(stream_id_), hi32(stream_id_)},
                                {lo32(seed_), hi32(seed_)});
    ++counter_;
    return {join(out[0], out[1]), join(out[2], out[3])};
}

double RngStream::next_uniform() noexcept
{
    return bits_to_open_unit(next_block()[0]);
}

RngStream substream(std::uint64_t seed, std::uint64_t stream_id) noexcept
{
    return RngStream(seed, stream_id);
}

double standard_normal(RngStream& stream) noexcept
{
    // Box–Muller, cosine branch only.
    const auto block = stream.next_block();
    const double u1 = bits_to_open_unit(block[0]);
    const double u2 = bits_to_open_unit(block[1]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double standard_exponential(RngStream& stream) noexcept
{
    return -std::log(stream.next_uniform());
}

StableParams::StableParams(double alpha_, double beta_) : alpha(alpha_), beta(beta_)
{
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw DomainError("stable alpha must lie in (0, 2], got " + std::to_string(alpha));
    if (!(beta >= -1.0 && beta <= 1.0))
        throw DomainError("stable beta must lie in [-1, 1], got " + std::to_string(beta));
}

double standard_stable(RngStream& stream, const StableParams& p) noexcept
{
    using std::numbers::pi;
    const auto block = stream.next_block();
    const double v = pi * (bits_to_open_unit(block[0]) - 0.5);
    const double w = -std::log(bits_to_open_unit(block[1]));
    const double alpha = p.alpha;
    const double beta = p.beta;

    if (alpha == 1.0)
    {
        const double half_pi_bv = 0.5 * pi + beta * v;
        return (2.0 / pi)
               * (half_pi_bv * std::tan(v)
                  - beta * std::log((0.5 * pi * w * std::cos(v)) / half_pi_bv));
    }

    const double zeta = beta * std::tan(0.5 * pi * alpha);
    const double b = std::atan(zeta) / alpha;
    const double s = std::pow(1.0 + zeta * zeta, 1.0 / (2.0 * alpha));
    const double x = s * std::sin(alpha * (v + b)) / std::pow(std::cos(v), 1.0 / alpha)
                     * std::pow(std::cos(v - alpha * (v + b)) / w, (1.0 - alpha) / alpha);
    // S1 -> S0
    return x - zeta;
}

std::vector<double> sample_gaussian(RngStream& stream, std::size_t n)
{
    std::vector<double> out(n);
    for (auto& x : out)
        x = standard_normal(stream);
    return out;
}

std::vector<double> sample_stable(RngStream& stream, double alpha, double beta, std::size_t n)
{
    const StableParams params(alpha, beta);
    std::vector<double> out(n);
    for (auto& x : out)
        x = standard_stable(stream, params);
    return out;
}

std::vector<double> sample_poisson_events(RngStream& stream, double rate, double horizon)
{
    if (!(rate >= 0.0) || !std::isfinite(rate))
        throw DomainError("Poisson rate must be finite and >= 0");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw DomainError("Poisson horizon must be finite and > 0");

    std::vector<double> times;
    if (rate == 0.0)
        return times;
    double t = 0.0;
    while (true)
    {
        double next = t + standard_exponential(stream) / rate;
        if (next <= t)
            next = std::nextafter(t, horizon + 1.0);
        if (next > horizon)
            break;
        times.push_back(next);
        t = next;
    }
    return times;
}

} // namespace ergo
