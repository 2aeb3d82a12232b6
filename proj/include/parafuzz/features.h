#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "parafuzz/audio.h"

namespace parafuzz {

inline constexpr std::size_t kNumBands = 8;
inline constexpr double kEnergyFloorDb = -80.0;

/// One analysis window's acoustic observation. Energies are dBFS of the
/// windowed frame; band energies partition the frame energy over equal-width
/// bands from 0 Hz to Nyquist.
struct FeatureFrame {
  double log_energy = kEnergyFloorDb;
  double hf_ratio = 0.0;
  std::array<double, kNumBands> band_energies{};

  FeatureFrame() { band_energies.fill(kEnergyFloorDb); }

  bool operator==(const FeatureFrame&) const = default;
};

using FrameSequence = std::vector<FeatureFrame>;

struct FramingOptions {
  double window_ms = 25.0;
  double hop_ms = 10.0;

  std::size_t window_samples(int sample_rate) const;
  std::size_t hop_samples(int sample_rate) const;
};

struct FeatureOptions {
  FramingOptions framing;
  double hf_cutoff_hz = 2000.0;
};

/// Pause-delimited span [start_frame, end_frame) of an utterance.
struct Segment {
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;
  FrameSequence frames;

  std::size_t size() const { return end_frame - start_frame; }
};

struct EndpointOptions {
  double open_threshold_db = -45.0;
  double close_threshold_db = -55.0;
  double min_gap_ms = 200.0;
  double min_segment_ms = 80.0;
};

/// floor((N - W) / H) + 1, or 0 when N < W.
std::size_t frame_count(std::size_t num_samples, std::size_t window, std::size_t hop);

/// Hamming-windowed frames; the trailing partial window is dropped.
std::vector<std::vector<double>> frame_signal(const AudioClip& clip,
                                              const FramingOptions& opts = {});

/// 20*log10(RMS) of an already windowed frame, floored at kEnergyFloorDb.
double log_energy(std::span<const double> frame);

struct SpectrumFeatures {
  double hf_ratio = 0.0;
  std::array<double, kNumBands> band_energies{};
};

/// Power-spectrum features of a windowed frame. The frame is zero-padded to
/// the next power of two. Band energies are in the same dBFS scale as
/// log_energy, so their linear sum equals the frame energy.
SpectrumFeatures spectrum_features(std::span<const double> frame, int sample_rate,
                                   double hf_cutoff_hz = 2000.0);

/// Fraction of each band's spectral bins at or above the HF cutoff, for the
/// transform size used on frames of the given length.
std::array<double, kNumBands> band_hf_fractions(std::size_t window_samples, int sample_rate,
                                                double hf_cutoff_hz);

FrameSequence extract_features(const AudioClip& clip, const FeatureOptions& opts = {});

/// Hysteresis energy gate: a span opens on a frame at or above the open
/// threshold and covers the surrounding run at or above the close threshold. Gaps shorter than min_gap are bridged, and spans
/// shorter than min_segment are dropped. Output is ordered and disjoint.
std::vector<Segment> endpoint_segments(const FrameSequence& frames,
                                       const EndpointOptions& opts = {},
                                       double hop_ms = 10.0);

}  // namespace parafuzz
