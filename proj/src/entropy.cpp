#include "ofnet/entropy.hpp"

#include <openssl/rand.h>

#include "ofnet/error.hpp"

namespace ofnet {

void SystemEntropy::fill(std::span<std::uint8_t> out) {
    if (out.empty()) return;
    if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
        throw EntropyFailure("RAND_bytes failed");
    }
}

void SeededEntropy::fill(std::span<std::uint8_t> out) {
    std::size_t i = 0;
    while (i < out.size()) {
        std::uint64_t word = engine_();
        for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
            out[i] = static_cast<std::uint8_t>(word >> (8 * b));
        }
    }
}

}  // namespace ofnet
