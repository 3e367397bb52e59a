#ifndef WSNF_WEAK_VARIANT_HPP
#define WSNF_WEAK_VARIANT_HPP

#include <string>
#include <string_view>

namespace wsnf::weak {

/// Standard, iterative, negative-space and mixed-simplex models.
enum class Variant { Standard, Iterative, Negative, Mixed };

char variant_tag(Variant v);
Variant parse_variant(std::string_view tag);  // "S", "I", "N", "M"

}  // namespace wsnf::weak

#endif  // WSNF_WEAK_VARIANT_HPP
