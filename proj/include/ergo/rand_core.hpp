#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace ergo {

//---------------------------------------------------------------------------//
/*!
 * Counter-based random stream.
 *
 * Each draw hashes (seed, stream_id, counter) through Philox4x32-10 and then
 * bumps the counter, so a stream is fully described by those three integers.
 * Streams with the same (seed, stream_id) replay the same sequence no matter
 * which thread or batch size drives them. Copies are independent; parallel
 * callers should take their own substream rather than share one instance.
 */
class RngStream
{
  public:
    using Block = std::array<std::uint64_t, 2>;

    RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : seed_(seed), stream_id_(stream_id)
    {
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }
    std::uint64_t counter() const noexcept { return counter_; }

    //! 128 fresh bits; advances the counter by one
    Block next_block() noexcept;

    //! Uniform on the open interval (0, 1) with 52-bit resolution
    double next_uniform() noexcept;

  private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t counter_ = 0;
};

//! Raw Philox4x32-10 bijection on a 128-bit counter with a 64-bit key
std::array<std::uint32_t, 4>
philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key) noexcept;

//! Maps 64 random bits to (0, 1), never returning 0 or 1
double bits_to_open_unit(std::uint64_t bits) noexcept;

/// Fresh stream at counter 0 for instance/step `stream_id` under `seed`.
RngStream substream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

// Single draws. Every variate consumes exactly one counter block.
double standard_normal(RngStream& stream) noexcept;
double standard_exponential(RngStream& stream) noexcept;

/// Validated parameters of a unit-scale, zero-location stable law.
struct StableParams
{
    double alpha;
    double beta;

    StableParams(double alpha, double beta);
};

/// One stable variate in Nolan's S0 parameterization.
///
/// Chambers–Mallows–Stuck for alpha != 1, shifted by -beta*tan(pi*alpha/2)
/// so the law is continuous in alpha; alpha == 1 uses the closed-form branch.
/// alpha = 2 gives Normal(0, 2).
double standard_stable(RngStream& stream, const StableParams& params) noexcept;

std::vector<double> sample_gaussian(RngStream& stream, std::size_t n);
std::vector<double> sample_stable(RngStream& stream, double alpha, double beta, std::size_t n);

/// Arrival times of a homogeneous Poisson process on (0, horizon].
std::vector<double> sample_poisson_events(RngStream& stream, double rate, double horizon);

} // namespace ergo
