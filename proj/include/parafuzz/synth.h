#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "parafuzz/audio.h"
#include "parafuzz/features.h"

namespace parafuzz {

class SynthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One steady stretch of a synthetic word.
struct SynthSegment {
  double duration_ms = 100.0;
  /// Relative level per analysis band in dB (0 = loudest). Bands at or below
  /// kSilentBandDb contribute nothing.
  std::array<double, kNumBands> band_profile{};
  double amplitude = 1.0;
};

inline constexpr double kSilentBandDb = -90.0;

struct WordSpec {
  std::string label;
  std::vector<SynthSegment> segments;
  std::uint64_t seed = 0;
  int sample_rate = 16000;
};

/// Throws SynthError naming the offending field.
void validate(const WordSpec& spec);

struct PerturbationSpec {
  double stretch = 1.0;
  double gain_db = 0.0;
  double tilt_db_per_band = 0.0;

  bool is_identity() const { return stretch == 1.0 && gain_db == 0.0 && tilt_db_per_band == 0.0; }
};

void validate(const PerturbationSpec& p);

/// Renders a word: per-segment mixtures of seeded partials inside each band,
/// raised-cosine ramps over a tenth of each segment, and 150 ms of silence on
/// both sides.
AudioClip make_word(const WordSpec& spec);

/// Pitch-preserving overlap-add time-scale modification (WSOLA). Output length
/// is round(N * factor); factor 1 returns the input unchanged.
AudioClip time_stretch(const AudioClip& clip, double factor);

/// Multiplies by 10^(gain/20) and hard-clips to [-1, 1]. The number of
/// clipped samples is reported through `clipped` when non-null, and a warning
/// is logged.
AudioClip apply_gain(const AudioClip& clip, double gain_db, std::size_t* clipped = nullptr);

/// Zero-phase band-gain filter lifting band b by tilt * (b - 3.5) dB, then
/// rescaled so frames above -60 dB keep their mean log energy.
AudioClip apply_tilt(const AudioClip& clip, double tilt_db_per_band);

/// stretch -> tilt -> gain.
AudioClip perturb(const AudioClip& clip, const PerturbationSpec& p, std::size_t* clipped = nullptr);

/// The same word spoken `factor` times as long: every segment duration is
/// scaled, partials and silences are unchanged.
WordSpec retimed(const WordSpec& spec, double factor);

/// Renders a perturbed word the way the corpus does: retimed rendering, then
/// tilt, then gain. Unlike time_stretch, the spectrum is untouched by stretch.
AudioClip render(const WordSpec& spec, const PerturbationSpec& p, std::size_t* clipped = nullptr);

struct PerturbationGrid {
  std::vector<double> stretch{0.5, 0.75, 1.0, 1.25, 1.5};
  std::vector<double> gain_db{-12.0, -6.0, 0.0, 6.0, 12.0};
  std::vector<double> tilt{-2.0, 0.0, 2.0};

  std::size_t size() const { return stretch.size() * gain_db.size() * tilt.size(); }
};

/// "default" or "stretch=0.5,1;gain=0,6;tilt=0". Axes left out keep {identity}.
PerturbationGrid parse_grid(std::string_view text);

/// Ten words with pairwise-distinct band profiles.
std::vector<WordSpec> default_lexicon();
/// The same spec under the labels "tail" and "tale".
std::vector<WordSpec> homophone_pair();

/// Spec with its seed mixed with a corpus seed.
WordSpec seeded(const WordSpec& spec, std::uint64_t corpus_seed);

struct CorpusItem {
  std::string filename;
  std::string label;
  PerturbationSpec perturbation;
  AudioClip clip;
};

struct Corpus {
  std::vector<CorpusItem> items;
  /// Unperturbed rendering of each lexicon word, in lexicon order.
  std::vector<CorpusItem> enrollment;
};

Corpus build_eval_corpus(const std::vector<WordSpec>& lexicon, const PerturbationGrid& grid,
                         std::uint64_t seed);

std::string corpus_filename(const std::string& label, const PerturbationSpec& p);

}  // namespace parafuzz
