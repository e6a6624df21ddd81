#include "advrec/types.hpp"

namespace advrec {

std::string to_string(Defense d) {
  switch (d) {
    case Defense::kNone: return "none";
    case Defense::kApr: return "apr";
    case Defense::kVat: return "vat";
  }
  return "none";
}

std::string to_string(AttackKind a) {
  switch (a) {
    case AttackKind::kNone: return "none";
    case AttackKind::kRandom: return "random";
    case AttackKind::kBandwagon: return "bandwagon";
  }
  return "none";
}

std::string to_string(GVariant v) {
  switch (v) {
    case GVariant::kLiteral: return "literal";
    case GVariant::kNegatedReciprocal: return "negated_reciprocal";
    case GVariant::kNegatedRelative: return "negated_relative";
  }
  return "literal";
}

Defense defense_from_string(const std::string& s) {
  if (s == "none") return Defense::kNone;
  if (s == "apr") return Defense::kApr;
  if (s == "vat") return Defense::kVat;
  throw ConfigError("unknown defense: " + s);
}

AttackKind attack_from_string(const std::string& s) {
  if (s == "none") return AttackKind::kNone;
  if (s == "random") return AttackKind::kRandom;
  if (s == "bandwagon") return AttackKind::kBandwagon;
  throw ConfigError("unknown attack: " + s);
}

GVariant g_variant_from_string(const std::string& s) {
  if (s == "literal") return GVariant::kLiteral;
  if (s == "negated_reciprocal") return GVariant::kNegatedReciprocal;
  if (s == "negated_relative") return GVariant::kNegatedRelative;
  throw ConfigError("unknown g variant: " + s);
}

}  // namespace advrec
