#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "parafuzz/config.h"
#include "parafuzz/records.h"
#include "parafuzz/synth.h"

namespace py = pybind11;
using namespace parafuzz;

namespace {

AudioClip clip_from(py::array_t<double, py::array::c_style | py::array::forcecast> samples,
                    int sample_rate) {
  if (samples.ndim() != 1) throw py::value_error("samples must be one-dimensional");
  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.assign(samples.data(), samples.data() + samples.size());
  return clip;
}

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::array_t<double> frame_matrix(const FrameSequence& frames) {
  py::array_t<double> out({static_cast<py::ssize_t>(frames.size()),
                           static_cast<py::ssize_t>(2 + kNumBands)});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto r = static_cast<py::ssize_t>(i);
    m(r, 0) = frames[i].log_energy;
    m(r, 1) = frames[i].hf_ratio;
    for (std::size_t b = 0; b < kNumBands; ++b)
      m(r, static_cast<py::ssize_t>(2 + b)) = frames[i].band_energies[b];
  }
  return out;
}

const LinguisticVariable& variable(const VariableSet& set, const std::string& name) {
  if (name == "accent") return set.accent;
  if (name == "speed") return set.speed;
  if (name == "emphasis") return set.emphasis;
  throw py::value_error("unknown variable '" + name + "'");
}

WordSpec lexicon_word(const std::string& label) {
  auto words = default_lexicon();
  for (auto& w : homophone_pair()) words.push_back(w);
  for (auto& w : words)
    if (w.label == label) return w;
  throw py::key_error(label);
}

/// Template store bundled with the pipeline it was enrolled through.
class Recognizer {
 public:
  explicit Recognizer(const std::string& config_text)
      : config_(parse_config(config_text)), pipeline_(config_.pipeline()) {}

  void enroll_word(const std::string& word, py::array_t<double> samples, int sample_rate) {
    enroll(word, {clip_from(samples, sample_rate)}, store_, pipeline_);
  }

  std::string recognize_json(py::array_t<double> samples, int sample_rate, bool filter) const {
    RecognizerConfig rc = config_.recognizer;
    rc.filter_enabled = filter;
    Json out = Json::array();
    for (const auto& r : recognize(clip_from(samples, sample_rate), store_, pipeline_, rc))
      out.push_back(to_json(r));
    return out.dump();
  }

  std::string analyze_json(py::array_t<double> samples, int sample_rate) const {
    const auto clip = clip_from(samples, sample_rate);
    UtteranceReference ref;
    if (!store_.empty()) ref = {store_.mean_duration_frames(), store_.mean_energy_db()};
    Json out = Json::array();
    for (const auto& r :
         pipeline_.filter_for(sample_rate).filter_utterance(pipeline_.segments(clip), ref).records)
      out.push_back(to_json(r));
    return out.dump();
  }

  std::vector<std::string> words() const { return store_.words(); }
  std::size_t size() const { return store_.size(); }
  void save(const std::string& path) const { save_store(path, store_); }
  void load(const std::string& path) { store_ = load_store(path); }

 private:
  Config config_;
  Pipeline pipeline_;
  TemplateStore store_;
};

}  // namespace

PYBIND11_MODULE(_parafuzz, m) {
  m.doc() = "Isolated-word recognition with fuzzy paralinguistic normalization";

  py::register_exception<FuzzyError>(m, "FuzzyError", PyExc_ValueError);
  py::register_exception<AudioError>(m, "AudioError", PyExc_ValueError);
  py::register_exception<DtwError>(m, "DtwError", PyExc_ValueError);
  py::register_exception<SynthError>(m, "SynthError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<RecognizerError>(m, "RecognizerError", PyExc_RuntimeError);

  m.def("lexicon", [] {
    std::vector<std::string> labels;
    for (const auto& w : default_lexicon()) labels.push_back(w.label);
    return labels;
  }, "Labels of the default synthetic lexicon.");

  m.def("synth_word", [](const std::string& label, std::uint64_t seed, double stretch,
                         double gain_db, double tilt) {
    const auto spec = seeded(lexicon_word(label), seed);
    const AudioClip clip = render(spec, {stretch, gain_db, tilt});
    return to_array(clip.samples);
  }, py::arg("label"), py::arg("seed") = 7, py::arg("stretch") = 1.0, py::arg("gain_db") = 0.0,
        py::arg("tilt") = 0.0,
        "Render a lexicon word (tail/tale included) as the corpus does, optionally perturbed. 16 kHz.");

  m.def("features", [](py::array_t<double> samples, int sample_rate) {
    return frame_matrix(extract_features(clip_from(samples, sample_rate)));
  }, py::arg("samples"), py::arg("sample_rate") = 16000,
        "Frame features as an (n, 10) array: log_energy, hf_ratio, 8 band energies.");

  m.def("segments", [](py::array_t<double> samples, int sample_rate) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& s : endpoint_segments(extract_features(clip_from(samples, sample_rate))))
      out.emplace_back(s.start_frame, s.end_frame);
    return out;
  }, py::arg("samples"), py::arg("sample_rate") = 16000,
        "Endpointed [start, end) frame ranges.");

  m.def("fuzzify", [](const std::string& name, double x) {
    const VariableSet set;
    const auto& var = variable(set, name);
    const auto degrees = var.fuzzify(x);
    py::dict out;
    for (std::size_t i = 0; i < var.size(); ++i) out[py::str(var.terms()[i].label)] = degrees[i];
    return out;
  }, py::arg("variable"), py::arg("x"), "Membership degrees of x in accent, speed or emphasis.");

  m.def("defuzzify", [](const std::string& name, const std::vector<double>& degrees) {
    const VariableSet set;
    return centroid_defuzzify(variable(set, name), degrees);
  }, py::arg("variable"), py::arg("degrees"));

  m.def("dtw", [](const std::vector<double>& a, const std::vector<double>& b,
                  std::optional<std::size_t> band) {
    const auto cost = CostMatrix::from_scalars(a, b);
    const auto r = dtw(cost, band ? BandConstraint::width(*band) : BandConstraint::unbounded());
    return py::make_tuple(r.total_cost, r.path);
  }, py::arg("a"), py::arg("b"), py::arg("band") = py::none(),
        "Scalar DTW with |x - y| cost: (total_cost, path).");

  m.def("brute_force_dtw", [](const std::vector<double>& a, const std::vector<double>& b) {
    return brute_force_dtw(CostMatrix::from_scalars(a, b)).total_cost;
  }, py::arg("a"), py::arg("b"));

  py::class_<Recognizer>(m, "Recognizer")
      .def(py::init<const std::string&>(), py::arg("config") = "")
      .def("enroll", &Recognizer::enroll_word, py::arg("word"), py::arg("samples"),
           py::arg("sample_rate") = 16000)
      .def("_recognize", &Recognizer::recognize_json, py::arg("samples"),
           py::arg("sample_rate") = 16000, py::arg("filter") = true)
      .def("_analyze", &Recognizer::analyze_json, py::arg("samples"),
           py::arg("sample_rate") = 16000)
      .def_property_readonly("words", &Recognizer::words)
      .def("__len__", &Recognizer::size)
      .def("save", &Recognizer::save)
      .def("load", &Recognizer::load);
}
