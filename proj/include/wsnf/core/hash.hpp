#ifndef WSNF_CORE_HASH_HPP
#define WSNF_CORE_HASH_HPP

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace wsnf {

/// Incremental 64-bit FNV-1a.
class Fnv1a {
 public:
  void bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void text(std::string_view s) { bytes(s.data(), s.size()); }
  template <typename T>
  void value(const T& v) {
    bytes(&v, sizeof v);
  }
  std::uint64_t digest() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace wsnf

#endif  // WSNF_CORE_HASH_HPP
