#pragma once

#include <cstddef>
#include <cstdint>

namespace lfc {

// FNV-1a 64-bit, used for key/container content checksums.
class Fnv1a {
  public:
    void update(const void* data, size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < n; ++i) {
            h_ ^= p[i];
            h_ *= 0x100000001B3ull;
        }
    }
    uint64_t value() const { return h_; }

  private:
    uint64_t h_ = 0xCBF29CE484222325ull;
};

}  // namespace lfc
