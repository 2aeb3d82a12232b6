"""Isolated-word recognition with fuzzy paralinguistic normalization."""

import json

from ._parafuzz import (
    AudioError,
    ConfigError,
    DtwError,
    FuzzyError,
    RecognizerError,
    SynthError,
    brute_force_dtw,
    defuzzify,
    dtw,
    features,
    fuzzify,
    lexicon,
    segments,
    synth_word,
)
from ._parafuzz import Recognizer as _Recognizer

__all__ = [
    "AudioError",
    "ConfigError",
    "DtwError",
    "FuzzyError",
    "Recognizer",
    "RecognizerError",
    "SynthError",
    "brute_force_dtw",
    "defuzzify",
    "dtw",
    "features",
    "fuzzify",
    "lexicon",
    "segments",
    "synth_word",
]


class Recognizer(_Recognizer):
    """Template store plus front end. `config` is key=value text."""

    def recognize(self, samples, sample_rate=16000, filter=True):
        """One result dict per endpointed segment."""
        return json.loads(self._recognize(samples, sample_rate, filter))

    def analyze(self, samples, sample_rate=16000):
        """Paralinguistic side-channel record per segment."""
        return json.loads(self._analyze(samples, sample_rate))
