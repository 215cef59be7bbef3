#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fpsel {

enum class Family {
  fft_harmonic,
  thd,
  phase_diff,
  cycle_stat,
  sym_component,
  impedance,
  power,
  whole_window,
  swt
};

inline constexpr std::array<Family, 9> kAllFamilies{
    Family::fft_harmonic, Family::thd,   Family::phase_diff,   Family::cycle_stat, Family::sym_component,
    Family::impedance,    Family::power, Family::whole_window, Family::swt};

enum class Aggregation { min, max, mean, std, skew, kurt, none };

/// The six statistics applied to per-cycle series and SWT bands, in
/// registry order.
inline constexpr std::array<Aggregation, 6> kWindowAggregations{
    Aggregation::min, Aggregation::max, Aggregation::mean,
    Aggregation::std, Aggregation::skew, Aggregation::kurt};

std::string_view to_string(Family family);
std::string_view to_string(Aggregation aggregation);
std::optional<Family> family_from_string(std::string_view name);

struct FeatureId {
  Family family;
  std::string variant;
  std::string channel;
  Aggregation aggregation;

  /// `family.variant|channel|agg`, unique across the registry.
  std::string canonical() const;
  static FeatureId parse(std::string_view canonical);

  friend bool operator==(const FeatureId&, const FeatureId&) = default;
};

/// Canonical, ordered enumeration of the candidate features. Families follow
/// the feature table; within a family variants, then channels, then
/// aggregations.
class FeatureRegistry {
 public:
  explicit FeatureRegistry(std::vector<FeatureId> ids);

  std::size_t size() const { return ids_.size(); }
  const std::vector<FeatureId>& ids() const { return ids_; }
  const FeatureId& operator[](std::size_t i) const { return ids_[i]; }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<std::size_t> index_of(std::string_view canonical) const;
  /// Like index_of but throws InvalidArgument for unknown names.
  std::size_t require(std::string_view canonical) const;

  std::vector<std::size_t> indices_of(Family family) const;
  std::size_t family_count(Family family) const;

  /// SHA-256 over the newline-joined canonical names.
  const std::string& hash() const { return hash_; }

 private:
  std::vector<FeatureId> ids_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> lookup_;
  std::string hash_;
};

/// Builds the 1556-entry registry.
FeatureRegistry build_registry();

/// Process-wide instance of build_registry().
const FeatureRegistry& default_registry();

inline constexpr std::size_t kRegistrySize = 1556;

// Variant and channel vocabularies, exposed so extraction and registry stay
// in lock-step.
inline constexpr std::array<int, 8> kHarmonicOrders{1, 2, 3, 4, 5, 7, 11, 13};
inline constexpr std::array<std::string_view, 10> kCycleStatVariants{
    "max", "min", "mean", "std", "skew", "kurt", "crest", "form", "largest_delta", "rms"};
inline constexpr std::array<std::string_view, 6> kSequenceChannels{"U0", "U1", "U2",
                                                                   "I0", "I1", "I2"};
inline constexpr std::array<std::string_view, 4> kImpedanceChannels{"Za", "Zb", "Zc", "Z0"};
inline constexpr std::array<std::string_view, 4> kPowerChannels{"Sa", "Sb", "Sc", "S0"};
inline constexpr std::array<std::string_view, 4> kWholeWindowVariants{
    "autocorr", "binned_entropy", "fourier_entropy", "outlier_ratio"};
inline constexpr int kSwtLevels = 8;
inline constexpr std::array<std::string_view, 9> kSwtBands{"d1", "d2", "d3", "d4", "d5",
                                                           "d6", "d7", "d8", "a8"};

}  // namespace fpsel
