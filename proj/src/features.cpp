#include "parafuzz/features.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.h"

namespace parafuzz {

namespace {

double to_db(double power) {
  if (!(power > 0.0)) return kEnergyFloorDb;
  return std::max(kEnergyFloorDb, 10.0 * std::log10(power));
}

std::size_t ms_to_samples(double ms, int sample_rate) {
  return static_cast<std::size_t>(std::lround(ms * sample_rate / 1000.0));
}

std::size_t band_of_bin(std::size_t k, std::size_t nfft) {
  // Bin k sits at k * rate / nfft Hz; bands are nyquist / 8 wide.
  const std::size_t band = (k * 2 * kNumBands) / nfft;
  return std::min(band, kNumBands - 1);
}

std::size_t first_hf_bin(std::size_t nfft, int sample_rate, double cutoff_hz) {
  return static_cast<std::size_t>(std::ceil(cutoff_hz * nfft / sample_rate));
}

SpectrumFeatures features_from_power(const std::vector<double>& power, std::size_t window,
                                     int sample_rate, double cutoff_hz) {
  const std::size_t nfft = (power.size() - 1) * 2;
  const std::size_t hf_start = first_hf_bin(nfft, sample_rate, cutoff_hz);
  // One-sided power scaled so the bins sum to the mean squared windowed sample.
  const double norm = 1.0 / (static_cast<double>(nfft) * static_cast<double>(window));

  std::array<double, kNumBands> bands{};
  double total = 0.0, high = 0.0;
  for (std::size_t k = 0; k < power.size(); ++k) {
    const double weight = (k == 0 || k == power.size() - 1) ? 1.0 : 2.0;
    const double p = power[k] * weight * norm;
    bands[band_of_bin(k, nfft)] += p;
    total += p;
    if (k >= hf_start) high += p;
  }

  SpectrumFeatures out;
  out.hf_ratio = total > 0.0 ? std::clamp(high / total, 0.0, 1.0) : 0.0;
  for (std::size_t b = 0; b < kNumBands; ++b) out.band_energies[b] = to_db(bands[b]);
  return out;
}

}  // namespace

std::size_t FramingOptions::window_samples(int sample_rate) const {
  return std::max<std::size_t>(1, ms_to_samples(window_ms, sample_rate));
}

std::size_t FramingOptions::hop_samples(int sample_rate) const {
  return std::max<std::size_t>(1, ms_to_samples(hop_ms, sample_rate));
}

std::size_t frame_count(std::size_t num_samples, std::size_t window, std::size_t hop) {
  if (num_samples < window) return 0;
  return (num_samples - window) / hop + 1;
}

std::vector<std::vector<double>> frame_signal(const AudioClip& clip, const FramingOptions& opts) {
  const std::size_t window = opts.window_samples(clip.sample_rate);
  const std::size_t hop = opts.hop_samples(clip.sample_rate);
  const std::size_t count = frame_count(clip.samples.size(), window, hop);

  std::vector<double> hamming(window, 1.0);
  if (window > 1)
    for (std::size_t n = 0; n < window; ++n)
      hamming[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / (window - 1));

  std::vector<std::vector<double>> frames(count, std::vector<double>(window));
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t n = 0; n < window; ++n)
      frames[i][n] = clip.samples[i * hop + n] * hamming[n];
  return frames;
}

double log_energy(std::span<const double> frame) {
  if (frame.empty()) return kEnergyFloorDb;
  double sum = 0.0;
  for (double s : frame) sum += s * s;
  return to_db(sum / static_cast<double>(frame.size()));
}

SpectrumFeatures spectrum_features(std::span<const double> frame, int sample_rate,
                                   double hf_cutoff_hz) {
  detail::RealFft fft(detail::next_pow2(std::max<std::size_t>(frame.size(), 2)));
  return features_from_power(fft.power(frame), frame.size(), sample_rate, hf_cutoff_hz);
}

std::array<double, kNumBands> band_hf_fractions(std::size_t window_samples, int sample_rate,
                                                double hf_cutoff_hz) {
  const std::size_t nfft = detail::next_pow2(std::max<std::size_t>(window_samples, 2));
  const std::size_t hf_start = first_hf_bin(nfft, sample_rate, hf_cutoff_hz);
  std::array<double, kNumBands> total{}, high{};
  for (std::size_t k = 0; k <= nfft / 2; ++k) {
    const std::size_t b = band_of_bin(k, nfft);
    total[b] += 1.0;
    if (k >= hf_start) high[b] += 1.0;
  }
  std::array<double, kNumBands> out{};
  for (std::size_t b = 0; b < kNumBands; ++b) out[b] = total[b] > 0 ? high[b] / total[b] : 0.0;
  return out;
}

FrameSequence extract_features(const AudioClip& clip, const FeatureOptions& opts) {
  const auto windows = frame_signal(clip, opts.framing);
  FrameSequence out;
  out.reserve(windows.size());
  if (windows.empty()) return out;

  const std::size_t window = windows.front().size();
  detail::RealFft fft(detail::next_pow2(std::max<std::size_t>(window, 2)));
  for (const auto& w : windows) {
    const auto spec = features_from_power(fft.power(w), window, clip.sample_rate,
                                          opts.hf_cutoff_hz);
    FeatureFrame f;
    f.log_energy = log_energy(w);
    f.hf_ratio = spec.hf_ratio;
    f.band_energies = spec.band_energies;
    out.push_back(f);
  }
  return out;
}

std::vector<Segment> endpoint_segments(const FrameSequence& frames, const EndpointOptions& opts,
                                       double hop_ms) {
  struct Span {
    std::size_t start, end;
  };
  std::vector<Span> spans;
  bool open = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const double e = frames[i].log_energy;
    if (!open && e >= opts.open_threshold_db) {
      open = true;
      // Back the onset up to the close threshold, mirroring how spans end.
      const std::size_t floor = spans.empty() ? 0 : spans.back().end;
      start = i;
      while (start > floor && frames[start - 1].log_energy >= opts.close_threshold_db) --start;
    } else if (open && e < opts.close_threshold_db) {
      open = false;
      spans.push_back({start, i});
    }
  }
  if (open) spans.push_back({start, frames.size()});

  std::vector<Span> merged;
  for (const auto& s : spans) {
    if (!merged.empty() &&
        static_cast<double>(s.start - merged.back().end) * hop_ms < opts.min_gap_ms)
      merged.back().end = s.end;
    else
      merged.push_back(s);
  }

  std::vector<Segment> out;
  for (const auto& s : merged) {
    if (static_cast<double>(s.end - s.start) * hop_ms < opts.min_segment_ms) continue;
    Segment seg;
    seg.start_frame = s.start;
    seg.end_frame = s.end;
    seg.frames.assign(frames.begin() + static_cast<std::ptrdiff_t>(s.start),
                      frames.begin() + static_cast<std::ptrdiff_t>(s.end));
    out.push_back(std::move(seg));
  }
  return out;
}

}  // namespace parafuzz
