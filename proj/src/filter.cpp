#include "parafuzz/filter.h"

#include <algorithm>
#include <cmath>

namespace parafuzz {

namespace {

constexpr double kMaxTiltDb = 24.0;
constexpr int kBisectionSteps = 80;

double band_offset(std::size_t band) {
  return (static_cast<double>(band) - 3.5) / static_cast<double>(kNumBands - 1);
}

double hf_ratio_with_tilt(const FeatureFrame& frame, double slope_db,
                          const std::array<double, kNumBands>& fraction) {
  double total = 0.0, high = 0.0;
  for (std::size_t b = 0; b < kNumBands; ++b) {
    const double p = std::pow(10.0, (frame.band_energies[b] + slope_db * band_offset(b)) / 10.0);
    total += p;
    high += p * fraction[b];
  }
  return total > 0.0 ? std::clamp(high / total, 0.0, 1.0) : 0.0;
}

std::vector<std::size_t> voiced_indices(const FrameSequence& frames, double floor_db) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < frames.size(); ++i)
    if (frames[i].log_energy > floor_db) idx.push_back(i);
  if (idx.empty())
    for (std::size_t i = 0; i < frames.size(); ++i) idx.push_back(i);
  return idx;
}

}  // namespace

double mean_log_energy(const FrameSequence& frames) {
  if (frames.empty()) return kEnergyFloorDb;
  double sum = 0.0;
  for (const auto& f : frames) sum += f.log_energy;
  return sum / static_cast<double>(frames.size());
}

double mean_segment_energy(const std::vector<Segment>& segments) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : segments)
    for (const auto& f : s.frames) {
      sum += f.log_energy;
      ++n;
    }
  return n == 0 ? kEnergyFloorDb : sum / static_cast<double>(n);
}

double band_hf_ratio(const FeatureFrame& frame,
                     const std::array<double, kNumBands>& hf_band_fraction) {
  return hf_ratio_with_tilt(frame, 0.0, hf_band_fraction);
}

FrameSequence normalize_speed(const FrameSequence& frames, double v, double w_speed) {
  const double factor = std::exp2(v * w_speed);
  if (frames.empty() || factor == 1.0) return frames;

  const std::size_t n = frames.size();
  const auto m = static_cast<std::size_t>(
      std::max(1.0, std::round(static_cast<double>(n) * factor)));
  if (m == n) return frames;

  FrameSequence out(m);
  const double step = static_cast<double>(n) / static_cast<double>(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double pos = std::min(static_cast<double>(j) * step, static_cast<double>(n - 1));
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double t = pos - static_cast<double>(lo);
    const auto lerp = [t](double a, double b) { return a + (b - a) * t; };
    const auto& a = frames[lo];
    const auto& b = frames[hi];
    out[j].log_energy = lerp(a.log_energy, b.log_energy);
    out[j].hf_ratio = lerp(a.hf_ratio, b.hf_ratio);
    for (std::size_t k = 0; k < kNumBands; ++k)
      out[j].band_energies[k] = lerp(a.band_energies[k], b.band_energies[k]);
  }
  return out;
}

FrameSequence normalize_gain(const FrameSequence& frames, double e, double w_emph) {
  const double shift = e * w_emph;
  if (shift == 0.0) return frames;
  FrameSequence out = frames;
  for (auto& f : out) {
    f.log_energy = std::max(kEnergyFloorDb, f.log_energy - shift);
    for (auto& b : f.band_energies) b -= shift;
  }
  return out;
}

TiltResult normalize_tilt(const FrameSequence& frames, double crisp_ratio, double w_acc,
                          double target_ratio, const FilterOptions& opts) {
  TiltResult result{frames, 0.0};
  const double desired = crisp_ratio + (target_ratio - crisp_ratio) * w_acc;
  if (frames.empty() || w_acc == 0.0 || desired == crisp_ratio) return result;

  const bool degenerate = std::all_of(frames.begin(), frames.end(), [](const FeatureFrame& f) {
    return std::all_of(f.band_energies.begin(), f.band_energies.end(),
                       [](double b) { return b <= kEnergyFloorDb; });
  });
  if (degenerate) return result;

  const auto voiced = voiced_indices(frames, opts.voiced_floor_db);
  const auto mean_ratio = [&](double slope) {
    double sum = 0.0;
    for (auto i : voiced) sum += hf_ratio_with_tilt(frames[i], slope, opts.hf_band_fraction);
    return sum / static_cast<double>(voiced.size());
  };

  // The mean ratio is non-decreasing in slope: higher bands gain relative to
  // lower ones and the HF share per band is non-decreasing.
  double lo = -kMaxTiltDb, hi = kMaxTiltDb;
  double slope;
  if (desired <= mean_ratio(lo)) {
    slope = lo;
  } else if (desired >= mean_ratio(hi)) {
    slope = hi;
  } else {
    for (int it = 0; it < kBisectionSteps; ++it) {
      const double mid = 0.5 * (lo + hi);
      (mean_ratio(mid) < desired ? lo : hi) = mid;
    }
    slope = 0.5 * (lo + hi);
  }

  result.slope_db = slope;
  for (auto& f : result.frames) {
    for (std::size_t b = 0; b < kNumBands; ++b) f.band_energies[b] += slope * band_offset(b);
    f.hf_ratio = band_hf_ratio(f, opts.hf_band_fraction);
  }
  return result;
}

ParalinguisticFilter::ParalinguisticFilter(VariableSet vars, FilterOptions opts)
    : vars_(std::move(vars)),
      opts_(opts),
      normal_(vars_.speed.index_of("normal")),
      medium_(vars_.emphasis.index_of("medium")),
      soft_(vars_.accent.index_of("soft")),
      sharp_(vars_.accent.index_of("sharp")) {}

double ParalinguisticFilter::voiced_accent(const FrameSequence& frames) const {
  const auto voiced = voiced_indices(frames, opts_.voiced_floor_db);
  double sum = 0.0;
  for (auto i : voiced) sum += frames[i].hf_ratio;
  return sum / static_cast<double>(voiced.size());
}

ParalinguisticProfile ParalinguisticFilter::profile(const FrameSequence& frames,
                                                    double reference_duration_frames,
                                                    double reference_energy_db) const {
  if (frames.empty()) throw FilterError("empty segment");
  if (!(reference_duration_frames > 0.0))
    throw FilterError("reference duration must be positive");

  const double v = std::log2(reference_duration_frames / static_cast<double>(frames.size()));
  const double e = mean_log_energy(frames) - reference_energy_db;
  const double r = voiced_accent(frames);

  ParalinguisticProfile p;
  p.speed.crisp = vars_.speed.universe().clamp(v);
  p.speed.degrees = vars_.speed.fuzzify(p.speed.crisp);
  p.emphasis.crisp = vars_.emphasis.universe().clamp(e);
  p.emphasis.degrees = vars_.emphasis.fuzzify(p.emphasis.crisp);
  p.accent.crisp = vars_.accent.universe().clamp(r);
  p.accent.degrees = vars_.accent.fuzzify(p.accent.crisp);
  return p;
}

CorrectionWeights ParalinguisticFilter::weights(const ParalinguisticProfile& p) const {
  CorrectionWeights w;
  w.speed = 1.0 - p.speed.degrees[normal_];
  w.emphasis = 1.0 - p.emphasis.degrees[medium_];
  w.accent = std::abs(p.accent.degrees[sharp_] - p.accent.degrees[soft_]);
  return w;
}

FilteredSegment ParalinguisticFilter::filter_segment(const FrameSequence& frames,
                                                     const SegmentReference& ref,
                                                     std::size_t segment_id) const {
  FilteredSegment out;
  auto& rec = out.record;
  rec.segment_id = segment_id;
  rec.input_frames = frames.size();
  rec.reference_duration_frames = ref.duration_frames;
  rec.reference_energy_db = ref.energy_db;
  rec.before = profile(frames, ref.duration_frames, ref.energy_db);
  rec.weights = weights(rec.before);
  rec.corrections.target_accent_ratio = opts_.target_accent_ratio;

  auto resampled = normalize_speed(frames, rec.before.speed.crisp, rec.weights.speed);
  rec.corrections.resample_factor =
      static_cast<double>(resampled.size()) / static_cast<double>(frames.size());

  // Interpolation can drift the mean level slightly; fold that drift into the
  // gain step so the residual offset is exactly e * mu_medium.
  const double e = rec.before.emphasis.crisp;
  const double drift = resampled.size() == frames.size()
                           ? 0.0
                           : mean_log_energy(resampled) - mean_log_energy(frames);
  const double shift = e * rec.weights.emphasis + drift;
  auto leveled = normalize_gain(resampled, shift, 1.0);
  rec.corrections.gain_shift_db = shift;

  auto tilted = normalize_tilt(leveled, rec.before.accent.crisp, rec.weights.accent,
                               opts_.target_accent_ratio, opts_);
  rec.corrections.tilt_slope_db = tilted.slope_db;

  out.frames = std::move(tilted.frames);
  rec.output_frames = out.frames.size();
  rec.after = profile(out.frames, ref.duration_frames, ref.energy_db);
  return out;
}

FilteredUtterance ParalinguisticFilter::filter_utterance(const std::vector<Segment>& segments,
                                                         const UtteranceReference& ref) const {
  FilteredUtterance out;
  out.original = segments;
  const double energy = ref.energy_db.value_or(mean_segment_energy(segments));
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& seg = segments[i];
    SegmentReference sref{ref.duration_frames.value_or(static_cast<double>(seg.frames.size())),
                          energy};
    FilteredSegment fs;
    try {
      fs = filter_segment(seg.frames, sref, i);
    } catch (const FilterError& e) {
      throw FilterError("segment " + std::to_string(i) + ": " + e.what());
    }
    fs.record.start_frame = seg.start_frame;
    Segment norm;
    norm.start_frame = seg.start_frame;
    norm.end_frame = seg.start_frame + fs.frames.size();
    norm.frames = std::move(fs.frames);
    out.normalized.push_back(std::move(norm));
    out.records.push_back(fs.record);
  }
  return out;
}

}  // namespace parafuzz
