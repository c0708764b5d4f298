#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace ofnet {

/// Source of uniformly random bytes for key generation.
class EntropySource {
public:
    virtual ~EntropySource() = default;
    /// Throws EntropyFailure when the source cannot deliver.
    virtual void fill(std::span<std::uint8_t> out) = 0;
};

/// Operating-system CSPRNG.
class SystemEntropy final : public EntropySource {
public:
    void fill(std::span<std::uint8_t> out) override;
};

/// Reproducible byte stream for tests and simulations. Not cryptographically secure.
class SeededEntropy final : public EntropySource {
public:
    explicit SeededEntropy(std::uint64_t seed) : engine_(seed) {}
    void fill(std::span<std::uint8_t> out) override;

private:
    std::mt19937_64 engine_;
};

}  // namespace ofnet
