#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

#include "parafuzz/features.h"
#include "parafuzz/fuzzy.h"

namespace parafuzz {

class FilterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Degrees over one linguistic variable plus the crisp value they came from
/// (clamped to the variable's universe).
struct AxisProfile {
  DegreeVector degrees;
  double crisp = 0.0;

  bool operator==(const AxisProfile&) const = default;
};

struct ParalinguisticProfile {
  AxisProfile accent;    // soft, sharp over HF energy ratio
  AxisProfile speed;     // slow, normal, fast over log2(reference / duration)
  AxisProfile emphasis;  // light, medium, heavy over dB offset from the reference level

  bool operator==(const ParalinguisticProfile&) const = default;
};

struct CorrectionWeights {
  double speed = 0.0;
  double emphasis = 0.0;
  double accent = 0.0;
};

struct Corrections {
  double resample_factor = 1.0;
  double gain_shift_db = 0.0;
  double tilt_slope_db = 0.0;  // dB across the full band span
  double target_accent_ratio = 0.45;

  bool operator==(const Corrections&) const = default;
};

/// Side-channel entry for one filtered segment: what was measured, what was
/// removed, and what remains.
struct ParalinguisticRecord {
  std::size_t segment_id = 0;
  std::size_t start_frame = 0;
  std::size_t input_frames = 0;
  std::size_t output_frames = 0;
  double reference_duration_frames = 0.0;
  double reference_energy_db = 0.0;
  ParalinguisticProfile before;
  CorrectionWeights weights;
  Corrections corrections;
  ParalinguisticProfile after;
};

struct FilterOptions {
  double target_accent_ratio = 0.45;
  /// Frames at or below this energy are ignored by the accent measurement.
  double voiced_floor_db = -60.0;
  /// Share of each analysis band above the HF cutoff (16 kHz / 2 kHz layout).
  std::array<double, kNumBands> hf_band_fraction{0, 0, 1, 1, 1, 1, 1, 1};
};

/// Reference point a segment is normalized toward.
struct SegmentReference {
  double duration_frames = 0.0;
  double energy_db = 0.0;
};

/// Optional utterance-level references. A missing duration means each segment
/// is its own speed reference; a missing energy means the mean log-energy over
/// all segment frames of the utterance.
struct UtteranceReference {
  std::optional<double> duration_frames;
  std::optional<double> energy_db;
};

struct FilteredSegment {
  FrameSequence frames;
  ParalinguisticRecord record;
};

struct FilteredUtterance {
  std::vector<Segment> normalized;
  std::vector<ParalinguisticRecord> records;
  std::vector<Segment> original;
};

// Individual normalization steps. Each is an exact no-op when its weight or
// crisp offset is zero.

/// Linear-interpolation resampling of the frame sequence by 2^(v * w).
FrameSequence normalize_speed(const FrameSequence& frames, double v, double w_speed);

/// Subtracts e * w dB from log_energy and every band energy.
FrameSequence normalize_gain(const FrameSequence& frames, double e, double w_emph);

struct TiltResult {
  FrameSequence frames;
  double slope_db = 0.0;
};

/// Applies a linear-in-band-index dB tilt whose slope is found by bisection so
/// that the mean voiced HF ratio moves to crisp + (target - crisp) * w.
TiltResult normalize_tilt(const FrameSequence& frames, double crisp_ratio, double w_acc,
                          double target_ratio = 0.45, const FilterOptions& opts = {});

/// HF ratio implied by a frame's band energies.
double band_hf_ratio(const FeatureFrame& frame,
                     const std::array<double, kNumBands>& hf_band_fraction);

class ParalinguisticFilter {
 public:
  explicit ParalinguisticFilter(VariableSet vars = {}, FilterOptions opts = {});

  const VariableSet& variables() const { return vars_; }
  const FilterOptions& options() const { return opts_; }

  ParalinguisticProfile profile(const FrameSequence& frames, double reference_duration_frames,
                                double reference_energy_db) const;

  CorrectionWeights weights(const ParalinguisticProfile& profile) const;

  /// Speed, then gain, then tilt. Throws FilterError on an empty sequence.
  FilteredSegment filter_segment(const FrameSequence& frames, const SegmentReference& ref,
                                 std::size_t segment_id = 0) const;

  FilteredUtterance filter_utterance(const std::vector<Segment>& segments,
                                     const UtteranceReference& ref = {}) const;

 private:
  double voiced_accent(const FrameSequence& frames) const;

  VariableSet vars_;
  FilterOptions opts_;
  std::size_t normal_, medium_, soft_, sharp_;
};

/// Mean log-energy over all frames of the given segments.
double mean_segment_energy(const std::vector<Segment>& segments);
double mean_log_energy(const FrameSequence& frames);

}  // namespace parafuzz
