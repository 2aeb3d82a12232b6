#include "parafuzz/synth.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "fft.h"
#include "parafuzz/log.h"

namespace parafuzz {

namespace {

constexpr double kSilenceMs = 150.0;
/// On/off ramp length as a share of the segment, so retiming scales it too.
constexpr double kRampFraction = 0.1;
constexpr int kPartialsPerBand = 4;
/// RMS of a segment at amplitude 1.
constexpr double kSegmentRms = 0.05;
/// Peak-to-RMS bound of the rendered mixture before scaling.
constexpr double kCrestLimit = 1.6;
/// Frames at or below this level are ignored when re-levelling a tilted clip.
constexpr double kLevelFloorDb = -60.0;

/// Portable uniform draw in [0, 1); std distributions differ across libraries.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combined words.
  std::uint64_t z = a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<double> render_segment(const SynthSegment& seg, int rate, std::mt19937_64& rng) {
  const auto n = static_cast<std::size_t>(std::lround(seg.duration_ms * rate / 1000.0));
  std::vector<double> out(n, 0.0), band(n, 0.0);
  const double band_width = rate / 2.0 / kNumBands;
  for (std::size_t b = 0; b < kNumBands; ++b) {
    // Draw for every band so the random stream does not depend on the profile.
    double freqs[kPartialsPerBand], phases[kPartialsPerBand];
    for (int p = 0; p < kPartialsPerBand; ++p) {
      freqs[p] = (static_cast<double>(b) + 0.15 + 0.7 * unit(rng)) * band_width;
      phases[p] = 2.0 * std::numbers::pi * unit(rng);
    }
    if (seg.band_profile[b] <= kSilentBandDb || n == 0) continue;
    std::fill(band.begin(), band.end(), 0.0);
    for (int p = 0; p < kPartialsPerBand; ++p) {
      const double w = 2.0 * std::numbers::pi * freqs[p] / rate;
      for (std::size_t t = 0; t < n; ++t) band[t] += std::sin(w * t + phases[p]);
    }
    // Beating partials leave a duration-dependent level; pin each band's RMS
    // to its profile so retimed renderings share one spectrum.
    double energy = 0.0;
    for (double v : band) energy += v * v;
    if (energy <= 0.0) continue;
    const double gain = std::pow(10.0, seg.band_profile[b] / 20.0) / std::sqrt(energy / n);
    for (std::size_t t = 0; t < n; ++t) out[t] += gain * band[t];
  }

  const auto rms_of = [&] {
    double energy = 0.0;
    for (double s : out) energy += s * s;
    return n ? std::sqrt(energy / n) : 0.0;
  };
  // Soft peak limit keeps headroom for gain perturbations.
  if (const double r = rms_of(); r > 0.0) {
    const double limit = kCrestLimit * r;
    for (double& s : out) s = limit * std::tanh(s / limit);
  }
  const double rms = rms_of();
  const double scale = rms > 0.0 ? seg.amplitude * kSegmentRms / rms : 0.0;

  const auto ramp = std::min(n / 2, static_cast<std::size_t>(std::lround(kRampFraction * n)));
  for (std::size_t t = 0; t < n; ++t) {
    double g = 1.0;
    if (t < ramp) g = 0.5 - 0.5 * std::cos(std::numbers::pi * (t + 0.5) / ramp);
    if (t >= n - ramp) g = 0.5 - 0.5 * std::cos(std::numbers::pi * (n - t - 0.5) / ramp);
    out[t] *= scale * g;
  }
  return out;
}

std::string format_number(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

std::vector<double> parse_list(std::string_view axis, std::string_view text) {
  std::vector<double> out;
  std::string buf(text);
  std::replace(buf.begin(), buf.end(), ',', ' ');
  std::istringstream in(buf);
  double v;
  while (in >> v) out.push_back(v);
  if (!in.eof() || out.empty())
    throw SynthError("grid axis '" + std::string(axis) + "': expected a comma-separated list");
  return out;
}

}  // namespace

void validate(const WordSpec& spec) {
  if (spec.label.empty()) throw SynthError("label: must not be empty");
  if (spec.sample_rate <= 0) throw SynthError("sample_rate: must be positive");
  if (spec.segments.empty()) throw SynthError("segments: at least one segment required");
  double total = 0.0;
  bool audible = false;
  for (std::size_t i = 0; i < spec.segments.size(); ++i) {
    const auto& s = spec.segments[i];
    const std::string where = "segments[" + std::to_string(i) + "].";
    if (!(s.duration_ms > 0.0)) throw SynthError(where + "duration_ms: must be positive");
    if (!(s.amplitude >= 0.0 && s.amplitude <= 1.0))
      throw SynthError(where + "amplitude: must lie in [0, 1]");
    for (double b : s.band_profile)
      if (!std::isfinite(b) || b > 0.0)
        throw SynthError(where + "band_profile: entries must be finite and <= 0 dB");
    const bool any_band = std::any_of(s.band_profile.begin(), s.band_profile.end(),
                                      [](double b) { return b > kSilentBandDb; });
    audible = audible || (s.amplitude > 0.0 && any_band);
    total += s.duration_ms;
  }
  if (total < 120.0) throw SynthError("segments: total duration must be at least 120 ms");
  if (!audible) throw SynthError("amplitude: word has no audible segment");
}

void validate(const PerturbationSpec& p) {
  if (!(p.stretch >= 0.25 && p.stretch <= 4.0))
    throw SynthError("stretch " + format_number(p.stretch) + " outside [0.25, 4]");
  if (!(std::abs(p.gain_db) <= 24.0))
    throw SynthError("gain_db " + format_number(p.gain_db) + " outside [-24, 24]");
  if (!(std::abs(p.tilt_db_per_band) <= 6.0))
    throw SynthError("tilt " + format_number(p.tilt_db_per_band) + " outside [-6, 6]");
}

AudioClip make_word(const WordSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  const auto silence =
      static_cast<std::size_t>(std::lround(kSilenceMs * spec.sample_rate / 1000.0));

  AudioClip clip;
  clip.sample_rate = spec.sample_rate;
  clip.samples.assign(silence, 0.0);
  for (const auto& seg : spec.segments) {
    const auto rendered = render_segment(seg, spec.sample_rate, rng);
    clip.samples.insert(clip.samples.end(), rendered.begin(), rendered.end());
  }
  clip.samples.insert(clip.samples.end(), silence, 0.0);
  return clip;
}

AudioClip time_stretch(const AudioClip& clip, double factor) {
  validate(PerturbationSpec{factor, 0.0, 0.0});
  if (factor == 1.0 || clip.samples.empty()) return clip;

  const auto& x = clip.samples;
  const auto n_in = static_cast<long long>(x.size());
  const auto n_out = static_cast<long long>(std::llround(static_cast<double>(n_in) * factor));
  const long long frame = std::max<long long>(4, 2 * std::llround(0.010 * clip.sample_rate));
  const long long hop = frame / 2;
  const long long tolerance = std::llround(0.0075 * clip.sample_rate);

  const auto at = [&](long long i) { return i >= 0 && i < n_in ? x[static_cast<std::size_t>(i)] : 0.0; };

  std::vector<double> window(static_cast<std::size_t>(frame));
  for (long long i = 0; i < frame; ++i)
    window[static_cast<std::size_t>(i)] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / frame);

  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.samples.assign(static_cast<std::size_t>(n_out), 0.0);

  long long prev_start = 0;
  bool first = true;
  for (long long out_start = -hop; out_start < n_out; out_start += hop) {
    const long long nominal = std::llround(static_cast<double>(out_start) / factor);
    long long start = nominal;
    if (!first) {
      // Pick the offset whose frame best continues the previously copied one.
      const long long continuation = prev_start + hop;
      double best = -std::numeric_limits<double>::infinity();
      long long best_abs = 0;
      for (long long d = -tolerance; d <= tolerance; ++d) {
        double corr = 0.0;
        for (long long i = 0; i < frame; ++i) corr += at(nominal + d + i) * at(continuation + i);
        const long long mag = d < 0 ? -d : d;
        if (corr > best || (corr == best && mag < best_abs)) {
          best = corr;
          best_abs = mag;
          start = nominal + d;
        }
      }
    }
    for (long long i = 0; i < frame; ++i) {
      const long long o = out_start + i;
      if (o < 0 || o >= n_out) continue;
      out.samples[static_cast<std::size_t>(o)] += window[static_cast<std::size_t>(i)] * at(start + i);
    }
    prev_start = start;
    first = false;
  }
  return out;
}

AudioClip apply_gain(const AudioClip& clip, double gain_db, std::size_t* clipped) {
  AudioClip out = clip;
  std::size_t count = 0;
  if (gain_db != 0.0) {
    const double g = std::pow(10.0, gain_db / 20.0);
    for (auto& s : out.samples) {
      s *= g;
      if (s > 1.0 || s < -1.0) {
        s = std::clamp(s, -1.0, 1.0);
        ++count;
      }
    }
  }
  if (count > 0) warn("gain " + format_number(gain_db) + " dB clipped " + std::to_string(count) + " samples");
  if (clipped) *clipped = count;
  return out;
}

AudioClip apply_tilt(const AudioClip& clip, double tilt_db_per_band) {
  if (tilt_db_per_band == 0.0 || clip.samples.empty()) return clip;
  const std::size_t n = clip.samples.size();
  detail::RealFft fft(detail::next_pow2(2 * n));
  auto spec = fft.forward(clip.samples);
  const std::size_t nfft = fft.size();
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const std::size_t band = std::min(kNumBands - 1, (k * 2 * kNumBands) / nfft);
    const double db = tilt_db_per_band * (static_cast<double>(band) - 3.5);
    spec[k] *= std::pow(10.0, db / 20.0);
  }
  const auto y = fft.inverse(spec);

  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.samples.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
  for (auto& s : out.samples) s /= static_cast<double>(nfft);

  // Match the mean dB of the frames that were audible before tilting.
  FeatureOptions opts;
  const auto before = extract_features(clip, opts);
  const auto after = extract_features(out, opts);
  double shift = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (before[i].log_energy <= kLevelFloorDb || after[i].log_energy <= kEnergyFloorDb) continue;
    shift += before[i].log_energy - after[i].log_energy;
    ++count;
  }
  if (count > 0) {
    const double scale = std::pow(10.0, shift / static_cast<double>(count) / 20.0);
    for (auto& s : out.samples) s *= scale;
  }
  return out;
}

WordSpec retimed(const WordSpec& spec, double factor) {
  validate(PerturbationSpec{factor, 0.0, 0.0});
  WordSpec out = spec;
  for (auto& seg : out.segments) seg.duration_ms *= factor;
  return out;
}

AudioClip render(const WordSpec& spec, const PerturbationSpec& p, std::size_t* clipped) {
  validate(p);
  return apply_gain(apply_tilt(make_word(retimed(spec, p.stretch)), p.tilt_db_per_band), p.gain_db,
                    clipped);
}

AudioClip perturb(const AudioClip& clip, const PerturbationSpec& p, std::size_t* clipped) {
  validate(p);
  return apply_gain(apply_tilt(time_stretch(clip, p.stretch), p.tilt_db_per_band), p.gain_db,
                    clipped);
}

PerturbationGrid parse_grid(std::string_view text) {
  if (text.empty() || text == "default") return {};
  PerturbationGrid grid{{1.0}, {0.0}, {0.0}};
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto semi = rest.find(';');
    const auto part = rest.substr(0, semi);
    rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) throw SynthError("grid: expected axis=values");
    const auto axis = part.substr(0, eq);
    auto values = parse_list(axis, part.substr(eq + 1));
    if (axis == "stretch")
      grid.stretch = std::move(values);
    else if (axis == "gain")
      grid.gain_db = std::move(values);
    else if (axis == "tilt")
      grid.tilt = std::move(values);
    else
      throw SynthError("grid: unknown axis '" + std::string(axis) + "'");
  }
  for (double s : grid.stretch) validate(PerturbationSpec{s, 0.0, 0.0});
  for (double g : grid.gain_db) validate(PerturbationSpec{1.0, g, 0.0});
  for (double t : grid.tilt) validate(PerturbationSpec{1.0, 0.0, t});
  return grid;
}

namespace {

using Profile = std::array<double, kNumBands>;

// Band profiles of the phone-like building blocks of the default lexicon.
constexpr Profile kA{0, -4, -12, -20, -28, -34, -40, -46};
constexpr Profile kE{-8, 0, -6, -16, -24, -30, -36, -42};
constexpr Profile kI{-4, -14, -6, 0, -12, -24, -32, -40};
constexpr Profile kU{0, -16, -30, -40, -50, -60, -70, -80};
constexpr Profile kS{-50, -45, -36, -24, -12, -4, 0, -2};
constexpr Profile kF{-18, -16, -14, -12, -10, -8, -6, -4};
constexpr Profile kN{0, -2, -30, -40, -48, -56, -64, -72};
constexpr Profile kT{-36, -30, -20, -10, -6, 0, -6, -14};
constexpr Profile kR{-2, -10, 0, -14, -20, -28, -36, -44};

SynthSegment seg(const Profile& p, double ms, double amp) { return {ms, p, amp}; }

}  // namespace

std::vector<WordSpec> default_lexicon() {
  std::vector<WordSpec> words{
      {"zero", {seg(kS, 90, 0.8), seg(kI, 110, 1.0), seg(kR, 90, 0.9), seg(kU, 130, 1.0)}},
      {"one", {seg(kU, 110, 1.0), seg(kA, 150, 1.0), seg(kN, 110, 0.9)}},
      {"two", {seg(kT, 70, 0.8), seg(kU, 210, 1.0)}},
      {"three", {seg(kF, 100, 0.8), seg(kR, 70, 0.9), seg(kI, 170, 1.0)}},
      {"four", {seg(kF, 100, 0.8), seg(kA, 140, 1.0), seg(kR, 120, 0.9)}},
      {"five", {seg(kF, 90, 0.8), seg(kA, 110, 1.0), seg(kI, 90, 1.0), seg(kF, 100, 0.8)}},
      {"six", {seg(kS, 110, 0.8), seg(kI, 100, 1.0), seg(kT, 50, 0.8), seg(kS, 120, 0.8)}},
      {"seven",
       {seg(kS, 110, 0.8), seg(kE, 100, 1.0), seg(kF, 70, 0.8), seg(kE, 70, 1.0),
        seg(kN, 100, 0.9)}},
      {"eight", {seg(kE, 150, 1.0), seg(kI, 90, 1.0), seg(kT, 70, 0.8)}},
      {"nine", {seg(kN, 90, 0.9), seg(kA, 130, 1.0), seg(kI, 90, 1.0), seg(kN, 100, 0.9)}},
  };
  for (std::size_t i = 0; i < words.size(); ++i) words[i].seed = 1000 + i;
  return words;
}

std::vector<WordSpec> homophone_pair() {
  WordSpec tail{"tail", {seg(kT, 70, 0.8), seg(kE, 120, 1.0), seg(kI, 80, 1.0), seg(kN, 90, 0.9)}, 2024};
  WordSpec tale = tail;
  tale.label = "tale";
  return {tail, tale};
}

WordSpec seeded(const WordSpec& spec, std::uint64_t corpus_seed) {
  WordSpec out = spec;
  out.seed = mix(spec.seed, corpus_seed);
  return out;
}

std::string corpus_filename(const std::string& label, const PerturbationSpec& p) {
  return label + "__s" + format_number(p.stretch) + "_g" + format_number(p.gain_db) + "_t" +
         format_number(p.tilt_db_per_band) + ".wav";
}

Corpus build_eval_corpus(const std::vector<WordSpec>& lexicon, const PerturbationGrid& grid,
                         std::uint64_t seed) {
  if (lexicon.size() < 2) throw SynthError("lexicon: at least two words required");
  for (double s : grid.stretch) validate(PerturbationSpec{s, 0.0, 0.0});
  for (double g : grid.gain_db) validate(PerturbationSpec{1.0, g, 0.0});
  for (double t : grid.tilt) validate(PerturbationSpec{1.0, 0.0, t});

  Corpus corpus;
  for (const auto& word : lexicon) {
    const WordSpec spec = seeded(word, seed);
    corpus.enrollment.push_back({word.label + ".wav", word.label, {}, make_word(spec)});
    for (double s : grid.stretch) {
      const AudioClip stretched = make_word(retimed(spec, s));
      for (double g : grid.gain_db) {
        for (double t : grid.tilt) {
          PerturbationSpec p{s, g, t};
          corpus.items.push_back({corpus_filename(word.label, p), word.label, p,
                                  apply_gain(apply_tilt(stretched, t), g)});
        }
      }
    }
  }
  return corpus;
}

}  // namespace parafuzz
