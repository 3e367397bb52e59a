#include "wsnf/aggregate/aggregate.hpp"

#include <string>

namespace wsnf::aggregate {

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Max:
      return "max";
    case Scheme::Union:
      return "union";
    case Scheme::NoisyOr:
      return "noisyor";
    case Scheme::Simplex:
      return "simplex";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "max") return Scheme::Max;
  if (name == "union") return Scheme::Union;
  if (name == "noisyor") return Scheme::NoisyOr;
  if (name == "simplex") return Scheme::Simplex;
  throw ConfigError("unknown aggregation scheme '" + std::string(name) + "' (max | union | noisyor | simplex)");
}

bool compatible(weak::Variant variant, Scheme scheme) {
  switch (variant) {
    case weak::Variant::Standard:
    case weak::Variant::Iterative:
      return scheme == Scheme::Max;
    case weak::Variant::Negative:
      return scheme == Scheme::Union || scheme == Scheme::NoisyOr;
    case weak::Variant::Mixed:
      return scheme == Scheme::Max || scheme == Scheme::Simplex;
  }
  return false;
}

void require_compatible(weak::Variant variant, Scheme scheme) {
  if (!compatible(variant, scheme)) {
    throw CompatibilityError("variant " + std::string(1, weak::variant_tag(variant)) + " cannot be aggregated with '" +
                             std::string(scheme_name(scheme)) + "'");
  }
}

}  // namespace wsnf::aggregate
