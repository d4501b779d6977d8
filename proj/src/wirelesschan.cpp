// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors

#include "hybridsync/wirelesschan.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "hybridsync/error.hpp"
#include "hybridsync/rng.hpp"

namespace hybridsync::chan {
namespace {

struct CatalogEntry {
  const char* name;
  double rms_ns;
  double max_excess_ns;
};

// Office (WLAN A/C) and industrial (IWLAN A/B) channels used with the
// emulator; only rms delay spread and span are published for them.
constexpr std::array<CatalogEntry, 4> kCatalog{{
    {"WLAN_A", 50.0, 390.0},
    {"WLAN_C", 150.0, 1050.0},
    {"IWLAN_A", 29.0, 140.0},
    {"IWLAN_B", 89.0, 600.0},
}};

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// rms delay spread of taps k * spacing with powers exp(-beta * k).
double geometric_rms(std::size_t n, double spacing, double beta) {
  std::vector<Tap> taps(n);
  for (std::size_t k = 0; k < n; ++k) {
    taps[k].delay_ns = spacing * static_cast<double>(k);
    taps[k].power_db = 10.0 * std::log10(std::exp(-beta * static_cast<double>(k)));
  }
  return rms_delay_spread(taps);
}

std::string normalise_key(std::string_view s) {
  std::string out;
  for (char c : s)
    if (std::isalnum(static_cast<unsigned char>(c)))
      out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return out;
}

}  // namespace

double PowerDelayProfile::total_linear_power() const {
  double p = 0.0;
  for (const auto& tap : taps) p += db_to_linear(tap.power_db);
  return p;
}

double rms_delay_spread(const std::vector<Tap>& taps) {
  if (taps.empty()) throw std::invalid_argument("rms_delay_spread: empty profile");
  double p = 0.0, m1 = 0.0, m2 = 0.0;
  for (const auto& tap : taps) {
    const double w = db_to_linear(tap.power_db);
    p += w;
    m1 += w * tap.delay_ns;
    m2 += w * tap.delay_ns * tap.delay_ns;
  }
  m1 /= p;
  m2 /= p;
  return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

double rms_delay_spread(const PowerDelayProfile& pdp) { return rms_delay_spread(pdp.taps); }

PowerDelayProfile make_pdp(std::string name, std::vector<Tap> taps) {
  if (taps.empty()) throw ConfigError("channel '" + name + "': no taps");
  if (taps.front().delay_ns != 0.0)
    throw ConfigError("channel '" + name + "': first tap must be at delay 0");
  for (std::size_t k = 1; k < taps.size(); ++k)
    if (!(taps[k].delay_ns > taps[k - 1].delay_ns))
      throw ConfigError("channel '" + name + "': tap delays must strictly increase");
  for (const auto& tap : taps)
    if (!std::isfinite(tap.power_db) || !std::isfinite(tap.delay_ns))
      throw ConfigError("channel '" + name + "': non-finite tap");
  PowerDelayProfile pdp;
  pdp.name = std::move(name);
  pdp.taps = std::move(taps);
  pdp.rms_delay_spread_ns = rms_delay_spread(pdp.taps);
  pdp.max_excess_delay_ns = pdp.taps.back().delay_ns - pdp.taps.front().delay_ns;
  return pdp;
}

PowerDelayProfile build_pdp(const SyntheticPdp& spec, std::string name) {
  const double rms = spec.rms_delay_spread_ns;
  const double span = spec.max_excess_ns;
  if (!(rms >= 0.0) || !(span >= rms))
    throw ConfigError("synthetic profile needs 0 <= rms_ds <= max_excess");
  if (span == 0.0) return make_pdp(std::move(name), {{0.0, 0.0}});

  std::size_t n = 0;
  double spacing = 0.0;
  if (spec.tap_spacing_ns) {
    spacing = *spec.tap_spacing_ns;
    if (!(spacing > 0.0)) throw ConfigError("tap spacing must be > 0");
    const double intervals = span / spacing;
    if (std::abs(intervals - std::round(intervals)) > 1e-9 * std::max(1.0, intervals))
      throw ConfigError("max_excess is not a multiple of the tap spacing");
    n = static_cast<std::size_t>(std::llround(intervals)) + 1;
  } else {
    n = std::min<std::size_t>(kMaxCatalogTaps,
                              static_cast<std::size_t>(std::floor(span / kDefaultTapSpacingNs)) + 1);
    n = std::max<std::size_t>(n, 2);
    spacing = span / static_cast<double>(n - 1);
  }

  // rms falls monotonically from the flat profile (beta = 0) towards 0.
  const double flat = geometric_rms(n, spacing, 0.0);
  if (rms > flat * (1.0 + 1e-12) || rms == 0.0)
    throw ConfigError("no exponential decay reaches rms " + std::to_string(rms) +
                      " ns over a span of " + std::to_string(span) + " ns");
  double lo = 0.0, hi = 1.0;
  while (geometric_rms(n, spacing, hi) > rms) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (geometric_rms(n, spacing, mid) > rms ? lo : hi) = mid;
  }
  const double beta = 0.5 * (lo + hi);

  std::vector<Tap> taps(n);
  for (std::size_t k = 0; k < n; ++k) {
    taps[k].delay_ns = spacing * static_cast<double>(k);
    taps[k].power_db = -10.0 * beta * static_cast<double>(k) / std::numbers::ln10;
  }
  taps.back().delay_ns = span;
  return make_pdp(std::move(name), std::move(taps));
}

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names{"AWGN", "WLAN_A", "WLAN_C", "IWLAN_A", "IWLAN_B"};
  return names;
}

std::optional<std::string> canonical_channel_name(std::string_view name) {
  const std::string key = normalise_key(name);
  for (const auto& n : catalog_names())
    if (normalise_key(n) == key) return n;
  return std::nullopt;
}

std::optional<CatalogTargets> catalog_targets(std::string_view name) {
  const auto canonical = canonical_channel_name(name);
  if (!canonical) return std::nullopt;
  for (const auto& entry : kCatalog)
    if (*canonical == entry.name) return CatalogTargets{entry.rms_ns, entry.max_excess_ns};
  return CatalogTargets{};
}

PowerDelayProfile build_pdp(std::string_view name) {
  const auto canonical = canonical_channel_name(name);
  if (!canonical) throw ConfigError("unknown channel '" + std::string(name) + "'");
  if (*canonical == "AWGN") return make_pdp("AWGN", {{0.0, 0.0}});
  for (const auto& entry : kCatalog)
    if (*canonical == entry.name)
      return build_pdp(SyntheticPdp{entry.rms_ns, entry.max_excess_ns, std::nullopt}, entry.name);
  throw ConfigError("unknown channel '" + std::string(name) + "'");
}

void FadingConfig::validate() const {
  if (!(doppler_hz >= 0.0) || !std::isfinite(doppler_hz))
    throw ConfigError("doppler_hz must be finite and >= 0");
  if (!(carrier_hz > 0.0)) throw ConfigError("carrier_hz must be > 0");
  if (!std::isfinite(rice_k_db)) throw ConfigError("rice_k_db must be finite");
}

double doppler_from_speed(double speed_kmh, double carrier_hz) {
  return (speed_kmh / 3.6) * carrier_hz / (kSpeedOfLightMPerNs * 1e9);
}

std::optional<double> coherence_time(const FadingConfig& fading) {
  if (fading.doppler_hz == 0.0) return std::nullopt;
  if (!(fading.doppler_hz > 0.0)) throw std::invalid_argument("doppler_hz must be >= 0");
  return 0.423 / fading.doppler_hz;
}

double jakes_autocorrelation(double doppler_hz, double lag_s) {
  return std::cyl_bessel_j(0.0, 2.0 * std::numbers::pi * doppler_hz * std::abs(lag_s));
}

// ---------------------------------------------------------------------------
// Fading synthesis

namespace {

constexpr std::size_t kBlockLen = 4096;
constexpr double kOversample = 16.0;

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Power of the normalised Doppler spectrum (x = f / f_d) inside [lo, hi].
double spectrum_mass(DopplerSpectrum shape, double lo, double hi) {
  lo = std::clamp(lo, -1.0, 1.0);
  hi = std::clamp(hi, -1.0, 1.0);
  if (hi <= lo) return 0.0;
  switch (shape) {
    case DopplerSpectrum::jakes:
      return (std::asin(hi) - std::asin(lo)) / std::numbers::pi;
    case DopplerSpectrum::bell:  // 1 / (1 + 9 x^2)
      return (std::atan(3.0 * hi) - std::atan(3.0 * lo)) / 3.0;
    case DopplerSpectrum::gaussian:  // exp(-x^2 / (2 * 0.5^2)), truncated at |x| = 1
      return std::erf(hi * std::numbers::sqrt2) - std::erf(lo * std::numbers::sqrt2);
  }
  return 0.0;
}

}  // namespace

struct FadingProcess::Impl {
  PowerDelayProfile pdp;
  FadingConfig fading;
  RngStream root;
  std::vector<double> tap_amplitude;  // sqrt of linear mean power

  // Static channel: one frozen unit gain per tap.
  std::vector<std::complex<double>> frozen;

  // Dynamic channel.
  double grid_rate_hz = 0.0;
  std::vector<int> bins;             // FFT bin indices with non-zero spectrum
  std::vector<double> bin_power;     // normalised to sum 1
  struct Block {
    std::int64_t index = -1;
    std::vector<std::complex<double>> samples;
  };
  std::vector<Block> cache;
  fftw_complex* buffer = nullptr;
  fftw_plan plan = nullptr;

  // Rice line-of-sight component on the first tap.
  double los_amplitude = 0.0;
  double diffuse_amplitude = 1.0;
  std::complex<double> los_phasor{1.0, 0.0};

  Impl(PowerDelayProfile p, FadingConfig f, std::uint64_t seed)
      : pdp(std::move(p)), fading(f), root(seed) {
    fading.validate();
    for (const auto& tap : pdp.taps) tap_amplitude.push_back(std::sqrt(db_to_linear(tap.power_db)));

    if (fading.distribution == FadingDistribution::rice) {
      const double k = db_to_linear(fading.rice_k_db);
      los_amplitude = std::sqrt(k / (k + 1.0));
      diffuse_amplitude = std::sqrt(1.0 / (k + 1.0));
      RngStream s = root.split(0xA11CE);
      const double phi = 2.0 * std::numbers::pi * s.uniform();
      los_phasor = {std::cos(phi), std::sin(phi)};
    }

    if (fading.doppler_hz == 0.0) {
      for (std::size_t k = 0; k < pdp.taps.size(); ++k) {
        RngStream s = root.split(k);
        frozen.emplace_back(s.normal() / std::numbers::sqrt2, s.normal() / std::numbers::sqrt2);
      }
      return;
    }

    grid_rate_hz = kOversample * fading.doppler_hz;
    const double df = 1.0 / static_cast<double>(kBlockLen);  // in units of grid rate
    const double fd = 1.0 / kOversample;                     // f_d in units of grid rate
    double total = 0.0;
    const int half = static_cast<int>(kBlockLen / 2);
    for (int k = -half; k < half; ++k) {
      const double f = k * df;
      const double mass = spectrum_mass(fading.spectrum, (f - 0.5 * df) / fd, (f + 0.5 * df) / fd);
      if (mass <= 0.0) continue;
      bins.push_back(k);
      bin_power.push_back(mass);
      total += mass;
    }
    for (auto& p : bin_power) p /= total;

    cache.resize(pdp.taps.size());
    std::lock_guard lock(fftw_planner_mutex());
    buffer = fftw_alloc_complex(kBlockLen);
    plan = fftw_plan_dft_1d(static_cast<int>(kBlockLen), buffer, buffer, FFTW_BACKWARD,
                            FFTW_ESTIMATE);
  }

  ~Impl() {
    if (plan == nullptr) return;
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
    fftw_free(buffer);
  }

  const Block& block(std::size_t tap, std::int64_t index) {
    Block& b = cache[tap];
    if (b.index == index) return b;
    std::fill_n(&buffer[0][0], 2 * kBlockLen, 0.0);
    RngStream s = root.split(tap).split(static_cast<std::uint64_t>(index));
    for (std::size_t i = 0; i < bins.size(); ++i) {
      const double a = std::sqrt(bin_power[i] / 2.0);
      const std::size_t slot = static_cast<std::size_t>(bins[i] < 0 ? bins[i] + static_cast<int>(kBlockLen) : bins[i]);
      buffer[slot][0] = a * s.normal();
      buffer[slot][1] = a * s.normal();
    }
    fftw_execute(plan);
    b.samples.resize(kBlockLen);
    for (std::size_t n = 0; n < kBlockLen; ++n) b.samples[n] = {buffer[n][0], buffer[n][1]};
    b.index = index;
    return b;
  }

  std::complex<double> diffuse(std::size_t tap, TrueTime t) {
    if (grid_rate_hz == 0.0) return frozen[tap];
    // Split the grid position into integer and fractional parts without
    // losing precision for long runs.
    const double x = static_cast<double>(t.ps()) * 1e-12 * grid_rate_hz;
    const double base = std::floor(x);
    const double u = x - base;
    const auto i0 = static_cast<std::int64_t>(base);
    const auto len = static_cast<std::int64_t>(kBlockLen);
    const std::int64_t bidx = i0 >= 0 ? i0 / len : -((-i0 + len - 1) / len);
    const std::int64_t j = i0 - bidx * len;
    const auto& s = block(tap, bidx).samples;
    auto at = [&](std::int64_t k) { return s[static_cast<std::size_t>((k % len + len) % len)]; };
    // 4-point Lagrange through j-1, j, j+1, j+2 (circular within the block).
    const double w0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
    const double w1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
    const double w2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
    const double w3 = (u + 1.0) * u * (u - 1.0) / 6.0;
    return w0 * at(j - 1) + w1 * at(j) + w2 * at(j + 1) + w3 * at(j + 2);
  }

  std::complex<double> unit_gain(std::size_t tap, TrueTime t) {
    const auto g = diffuse(tap, t);
    if (tap == 0 && fading.distribution == FadingDistribution::rice)
      return los_amplitude * los_phasor + diffuse_amplitude * g;
    return g;
  }
};

FadingProcess::FadingProcess(PowerDelayProfile pdp, FadingConfig fading, std::uint64_t seed)
    : impl_(std::make_unique<Impl>(std::move(pdp), fading, seed)) {}
FadingProcess::~FadingProcess() = default;
FadingProcess::FadingProcess(FadingProcess&&) noexcept = default;
FadingProcess& FadingProcess::operator=(FadingProcess&&) noexcept = default;

const PowerDelayProfile& FadingProcess::pdp() const { return impl_->pdp; }
const FadingConfig& FadingProcess::fading() const { return impl_->fading; }

std::complex<double> FadingProcess::unit_gain(std::size_t tap, TrueTime t) {
  if (tap >= impl_->pdp.taps.size()) throw std::out_of_range("tap index");
  return impl_->unit_gain(tap, t);
}

ChannelRealization FadingProcess::realize(TrueTime t) {
  ChannelRealization r;
  r.realized_at = t;
  r.tap_gains.reserve(impl_->pdp.taps.size());
  for (std::size_t k = 0; k < impl_->pdp.taps.size(); ++k)
    r.tap_gains.push_back(impl_->tap_amplitude[k] * impl_->unit_gain(k, t));
  return r;
}

double FadingProcess::model_autocorrelation(double lag_s) const {
  if (impl_->grid_rate_hz == 0.0) return 1.0;
  double r = 0.0;
  for (std::size_t i = 0; i < impl_->bins.size(); ++i) {
    const double f = impl_->bins[i] * impl_->grid_rate_hz / static_cast<double>(kBlockLen);
    r += impl_->bin_power[i] * std::cos(2.0 * std::numbers::pi * f * lag_s);
  }
  return r;
}

ChannelRealization realize_channel(FadingProcess& process, TrueTime t) { return process.realize(t); }

double detect_arrival(const ChannelRealization& realization, const PowerDelayProfile& pdp,
                      const DetectorPolicy& policy) {
  const auto& g = realization.tap_gains;
  if (g.empty()) throw std::invalid_argument("detect_arrival: empty realization");
  if (g.size() != pdp.taps.size())
    throw std::invalid_argument("detect_arrival: realization does not match the profile");
  std::size_t best = 0;
  double best_power = std::norm(g[0]);
  for (std::size_t k = 1; k < g.size(); ++k) {
    const double p = std::norm(g[k]);
    if (p > best_power) {
      best_power = p;
      best = k;
    }
  }
  std::size_t chosen = best;
  if (policy.kind == DetectorPolicy::Kind::first_above_threshold) {
    const double floor = best_power * db_to_linear(-policy.threshold_db);
    for (std::size_t k = 0; k < g.size(); ++k)
      if (std::norm(g[k]) >= floor) {
        chosen = k;
        break;
      }
  }
  return pdp.taps[chosen].delay_ns - pdp.taps.front().delay_ns;
}

double propagation_delay(const LinkGeometry& geom) {
  if (!(geom.distance_m >= 0.0)) throw std::invalid_argument("distance_m must be >= 0");
  if (!(geom.base_delay_ns >= 0.0)) throw std::invalid_argument("base_delay_ns must be >= 0");
  return geom.distance_m / kSpeedOfLightMPerNs + geom.base_delay_ns;
}

}  // namespace hybridsync::chan
