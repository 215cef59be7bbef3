#include "fpsel/features/registry.hpp"

#include "fpsel/common/error.hpp"
#include "fpsel/common/hash.hpp"
#include "fpsel/signal/waveform.hpp"

namespace fpsel {
namespace {

constexpr std::array<std::string_view, 9> kFamilyNames{
    "fft_harmonic", "thd", "phase_diff", "cycle_stat", "sym_component",
    "impedance",    "power", "whole_window", "swt"};
constexpr std::array<std::string_view, 7> kAggregationNames{"min",  "max",  "mean", "std",
                                                            "skew", "kurt", "none"};

void add_aggregated(std::vector<FeatureId>& out, Family family, std::string_view variant,
                    std::string_view channel) {
  for (Aggregation a : kWindowAggregations) {
    out.push_back({family, std::string(variant), std::string(channel), a});
  }
}

template <typename Channels>
void add_family(std::vector<FeatureId>& out, Family family, std::string_view variant,
                const Channels& channels) {
  for (const auto& ch : channels) add_aggregated(out, family, variant, ch);
}

std::vector<std::string_view> signal_channels() {
  std::vector<std::string_view> out;
  for (Channel c : kAllChannels) out.push_back(channel_name(c));
  return out;
}

}  // namespace

std::string_view to_string(Family family) {
  return kFamilyNames[static_cast<std::size_t>(family)];
}

std::string_view to_string(Aggregation aggregation) {
  return kAggregationNames[static_cast<std::size_t>(aggregation)];
}

std::optional<Family> family_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kFamilyNames.size(); ++i) {
    if (kFamilyNames[i] == name) return static_cast<Family>(i);
  }
  return std::nullopt;
}

std::string FeatureId::canonical() const {
  std::string out(to_string(family));
  out += '.';
  out += variant;
  out += '|';
  out += channel;
  out += '|';
  out += to_string(aggregation);
  return out;
}

FeatureId FeatureId::parse(std::string_view text) {
  const auto dot = text.find('.');
  const auto bar1 = text.find('|');
  const auto bar2 = bar1 == std::string_view::npos ? bar1 : text.find('|', bar1 + 1);
  if (dot == std::string_view::npos || bar1 == std::string_view::npos ||
      bar2 == std::string_view::npos || dot > bar1) {
    throw InvalidArgument("malformed feature name '" + std::string(text) + "'");
  }
  const auto family = family_from_string(text.substr(0, dot));
  if (!family) throw InvalidArgument("unknown feature family in '" + std::string(text) + "'");
  const auto agg_name = text.substr(bar2 + 1);
  std::optional<Aggregation> agg;
  for (std::size_t i = 0; i < kAggregationNames.size(); ++i) {
    if (kAggregationNames[i] == agg_name) agg = static_cast<Aggregation>(i);
  }
  if (!agg) throw InvalidArgument("unknown aggregation in '" + std::string(text) + "'");
  return {*family, std::string(text.substr(dot + 1, bar1 - dot - 1)),
          std::string(text.substr(bar1 + 1, bar2 - bar1 - 1)), *agg};
}

FeatureRegistry::FeatureRegistry(std::vector<FeatureId> ids) : ids_(std::move(ids)) {
  names_.reserve(ids_.size());
  std::string joined;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    names_.push_back(ids_[i].canonical());
    if (!lookup_.emplace(names_.back(), i).second) {
      throw InvalidArgument("duplicate feature name " + names_.back());
    }
    joined += names_.back();
    joined += '\n';
  }
  hash_ = sha256_hex(joined);
}

std::optional<std::size_t> FeatureRegistry::index_of(std::string_view canonical) const {
  const auto it = lookup_.find(std::string(canonical));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t FeatureRegistry::require(std::string_view canonical) const {
  const auto i = index_of(canonical);
  if (!i) throw InvalidArgument("unknown feature '" + std::string(canonical) + "'");
  return *i;
}

std::vector<std::size_t> FeatureRegistry::indices_of(Family family) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i].family == family) out.push_back(i);
  }
  return out;
}

std::size_t FeatureRegistry::family_count(Family family) const {
  return indices_of(family).size();
}

FeatureRegistry build_registry() {
  std::vector<FeatureId> ids;
  ids.reserve(kRegistrySize);
  const auto channels = signal_channels();

  for (int h : kHarmonicOrders) {
    add_family(ids, Family::fft_harmonic, "h" + std::to_string(h), channels);
  }
  add_family(ids, Family::thd, "thd", channels);
  add_family(ids, Family::phase_diff, "phi", channels);
  for (auto v : kCycleStatVariants) add_family(ids, Family::cycle_stat, v, channels);
  add_family(ids, Family::sym_component, "mag", kSequenceChannels);
  for (auto v : {"R", "X"}) add_family(ids, Family::impedance, v, kImpedanceChannels);
  for (auto v : {"P", "Q"}) add_family(ids, Family::power, v, kPowerChannels);
  for (auto v : kWholeWindowVariants) {
    for (auto ch : channels) {
      ids.push_back({Family::whole_window, std::string(v), std::string(ch), Aggregation::none});
    }
  }
  for (auto band : kSwtBands) add_family(ids, Family::swt, band, channels);

  return FeatureRegistry(std::move(ids));
}

const FeatureRegistry& default_registry() {
  static const FeatureRegistry registry = build_registry();
  return registry;
}

}  // namespace fpsel
