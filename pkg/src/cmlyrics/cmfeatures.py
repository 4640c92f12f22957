"""The four code-mixed features of a tagged song, plus train-fold scaling.

s1: count of English-tagged word tokens; s2: their mean character length;
s3: count of non-Telugu sentences (majority of word tokens tagged English);
s4: mean word-token count of those sentences. Punctuation/number tokens are
excluded from every numerator and denominator.
"""

from dataclasses import dataclass

import numpy as np

from .textproc import WORD
from .langid.crf import TAG_EN


@dataclass
class CodeMixFeatures:
    s1: int
    s2: float
    s3: int
    s4: float

    def as_vector(self):
        return np.array([self.s1, self.s2, self.s3, self.s4], dtype=np.float64)


def extract_code_mixed_features(tagged):
    """Compute (s1, s2, s3, s4) from tagged sentences; empty input -> zeros."""
    en_words = []
    nt_sentence_lens = []
    for ts in tagged:
        words = [(tok, tag) for tok, tag in zip(ts.tokens, ts.tags)
                 if tok.kind == WORD]
        en = [tok for tok, tag in words if tag == TAG_EN]
        en_words.extend(en)
        if words and len(en) / len(words) > 0.5:
            nt_sentence_lens.append(len(words))
    s1 = len(en_words)
    s2 = sum(len(t.surface) for t in en_words) / s1 if s1 else 0.0
    s3 = len(nt_sentence_lens)
    s4 = sum(nt_sentence_lens) / s3 if s3 else 0.0
    return CodeMixFeatures(s1=s1, s2=s2, s3=s3, s4=s4)


@dataclass
class FeatureScaler:
    mean: np.ndarray
    stdev: np.ndarray


def fit_scaler(features):
    """Per-component mean / population stdev over training-fold songs;
    degenerate components (stdev < 1e-12) get stdev 1."""
    if not features:
        raise ValueError("cannot fit scaler on empty feature list")
    m = np.stack([f.as_vector() for f in features])
    mean = m.mean(axis=0)
    stdev = m.std(axis=0)
    stdev = np.where(stdev < 1e-12, 1.0, stdev)
    return FeatureScaler(mean=mean, stdev=stdev)


def scale(scaler, f):
    return (f.as_vector() - scaler.mean) / scaler.stdev
