#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace csdsvm {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Hash of a tag string (FNV-1a), for use as a seed-derivation component.
std::uint64_t hash_tag(std::string_view tag);

/// Folds a sequence of components into one 64-bit seed. Order matters.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

/// Counter-based uniform stream: the k-th draw is a pure function of
/// (key, k), so substreams keyed by derived seeds are reproducible and
/// independent of how many draws other streams consumed.
class CounterStream {
public:
    explicit CounterStream(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() { return mix64(key_ ^ mix64(counter_++)); }

    /// Uniform on the open interval (0, 1); safe for inverse-CDF sampling.
    double uniform_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform index in [0, bound).
    std::uint64_t below(std::uint64_t bound);

    std::uint64_t position() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace csdsvm
