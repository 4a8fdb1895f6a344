#pragma once

#include <cstdint>
#include <string_view>

namespace promocast {

// 64-bit FNV-1a, used for layout and dataset fingerprints and file checksums.
class Fnv1a {
 public:
  Fnv1a& update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t fnv1a(std::string_view bytes) {
  return Fnv1a().update(bytes).digest();
}

}  // namespace promocast
