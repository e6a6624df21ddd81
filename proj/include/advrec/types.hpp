#pragma once
// Shared identifiers, enums and error types.

#include <cstdint>
#include <stdexcept>
#include <string>

namespace advrec {

using UserIndex = std::uint32_t;
using ItemIndex = std::uint32_t;

// One implicit-feedback interaction, internal dense indices.
struct Interaction {
  UserIndex user;
  ItemIndex item;

  friend bool operator==(const Interaction&, const Interaction&) = default;
  friend auto operator<=>(const Interaction&, const Interaction&) = default;
};

enum class Defense { kNone, kApr, kVat };
enum class AttackKind { kNone, kRandom, kBandwagon };

// How the per-user vulnerability weight maps relative loss deviation to a
// sigmoid argument. kLiteral is sigma(1/delta); the other two flip the
// direction so that low-loss (well-fitted) users receive larger weights.
enum class GVariant { kLiteral, kNegatedReciprocal, kNegatedRelative };

std::string to_string(Defense d);
std::string to_string(AttackKind a);
std::string to_string(GVariant v);
Defense defense_from_string(const std::string& s);
AttackKind attack_from_string(const std::string& s);
GVariant g_variant_from_string(const std::string& s);

// Invalid configuration or plan file.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ingestion, filtering or splitting failure.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Attack generation or injection failure.
struct AttackError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite parameters or other training faults.
struct TrainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Undefined metric (e.g. no eligible users for a target).
struct MetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// I/O failure on reports or checkpoints.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace advrec
