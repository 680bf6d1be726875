#pragma once

#include <cstdint>
#include <complex>

namespace passat {

// xoshiro256++ with splitmix64 seeding. The standard library's normal
// distribution is implementation-defined, so everything random in this
// project goes through this generator to keep outputs byte-identical
// across toolchains. Gaussians come from Box-Muller with a cached spare.
// Derives the seed of an independent sub-stream: the stream id is mixed
// into the seed material so that (seed, stream) pairs give decorrelated
// sequences. Rng(seed, stream) is equivalent to Rng(substream_seed(seed, stream)).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) { reseed(seed); }
  Rng(std::uint64_t seed, std::uint64_t stream);

  void reseed(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform();        // [0, 1)
  double normal();         // N(0, 1)
  std::complex<double> cnormal();  // circular, E|z|^2 = 1

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace passat
