"""tf-idf vectorization and the Naive Bayes / linear SVM baselines.

tf-idf variant: raw term frequency times smoothed idf ln((1+N)/(1+df)) + 1,
L2 normalized. NB is multinomial over tf-idf mass with Laplace smoothing;
the four continuous code-mix features get per-class Gaussians. The SVM is
primal Pegasos-style subgradient descent on the hinge loss, with the scaled
code-mix features appended as dense dimensions. Ties break to "exciting"
everywhere.
"""

import json
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .corpus import EXCITING, NON_EXCITING
from .textproc import word_tokens

CLASSES = (EXCITING, NON_EXCITING)

MODEL_FORMAT_VERSION = 1


@dataclass
class Vocab:
    term_index: dict
    doc_freq: np.ndarray
    n_docs: int
    min_count: int

    def __len__(self):
        return len(self.term_index)


@dataclass
class SparseVec:
    indices: np.ndarray
    values: np.ndarray

    @property
    def nnz(self):
        return len(self.indices)

    def norm(self):
        return float(np.sqrt((self.values ** 2).sum()))


def build_vocab(train_songs, min_count=2):
    """Vocabulary over lowercased word tokens of the training songs only;
    terms in fewer than min_count documents are dropped."""
    if not train_songs:
        raise ValueError("no training songs")
    df = Counter()
    for song in train_songs:
        df.update(set(word_tokens(song.text)))
    terms = sorted(t for t, c in df.items() if c >= min_count)
    if not terms:
        raise ValueError("empty vocabulary after min_count filtering")
    return Vocab(term_index={t: i for i, t in enumerate(terms)},
                 doc_freq=np.array([df[t] for t in terms], dtype=np.int64),
                 n_docs=len(train_songs), min_count=min_count)


def tfidf(vocab, song):
    """L2-normalized tf-idf vector of one song; all-OOV songs come out empty."""
    counts = Counter(word_tokens(song.text))
    idx_val = []
    for term, c in counts.items():
        i = vocab.term_index.get(term)
        if i is not None:
            idf = math.log((1 + vocab.n_docs) / (1 + vocab.doc_freq[i])) + 1.0
            idx_val.append((i, c * idf))
    idx_val.sort()
    indices = np.array([i for i, _ in idx_val], dtype=np.int64)
    values = np.array([v for _, v in idx_val], dtype=np.float64)
    nrm = np.sqrt((values ** 2).sum())
    if nrm > 0:
        values = values / nrm
    return SparseVec(indices=indices, values=values)


# ---------------------------------------------------------------------------
# Naive Bayes

@dataclass
class NbModel:
    classes: tuple
    class_log_prior: np.ndarray        # (C,)
    term_log_likelihood: np.ndarray    # (C, V)
    alpha: float
    cm_mean: np.ndarray | None = None  # (C, 4)
    cm_stdev: np.ndarray | None = None

    @property
    def use_cm(self):
        return self.cm_mean is not None


def train_nb(vectors, labels, n_terms, cm=None, alpha=1.0):
    """Multinomial NB over tf-idf mass, Laplace-smoothed; optional per-class
    Gaussians on the raw code-mix features (stdev floored at 1e-6)."""
    n = len(vectors)
    if n == 0 or len(labels) != n:
        raise ValueError("vectors and labels must align and be non-empty")
    for c in CLASSES:
        if c not in labels:
            raise ValueError(f"class {c!r} absent from training data")
    mass = np.zeros((len(CLASSES), n_terms))
    prior = np.zeros(len(CLASSES))
    for vec, lab in zip(vectors, labels):
        ci = CLASSES.index(lab)
        prior[ci] += 1
        mass[ci, vec.indices] += vec.values
    loglik = np.log(mass + alpha) - np.log((mass + alpha).sum(axis=1, keepdims=True))
    model = NbModel(classes=CLASSES, class_log_prior=np.log(prior / n),
                    term_log_likelihood=loglik, alpha=alpha)
    if cm is not None:
        feats = np.stack([f.as_vector() for f in cm])
        model.cm_mean = np.zeros((len(CLASSES), 4))
        model.cm_stdev = np.zeros((len(CLASSES), 4))
        for ci, c in enumerate(CLASSES):
            rows = feats[[lab == c for lab in labels]]
            model.cm_mean[ci] = rows.mean(axis=0)
            model.cm_stdev[ci] = np.maximum(rows.std(axis=0), 1e-6)
    return model


def nb_class_scores(model, vector, cm=None):
    if (cm is not None) != model.use_cm:
        raise ValueError("code-mix feature presence does not match training")
    scores = model.class_log_prior.copy()
    if vector.nnz:
        scores = scores + model.term_log_likelihood[:, vector.indices] @ vector.values
    if cm is not None:
        x = cm.as_vector()
        z = (x[None, :] - model.cm_mean) / model.cm_stdev
        scores = scores - 0.5 * (z ** 2).sum(axis=1) \
            - np.log(model.cm_stdev).sum(axis=1) - 2 * 0.5 * math.log(2 * math.pi)
    return scores


def predict_nb(model, vector, cm=None):
    """Returns (label, posterior pair); argmax ties go to the first class."""
    scores = nb_class_scores(model, vector, cm)
    mx = scores.max()
    post = np.exp(scores - mx)
    post = post / post.sum()
    return model.classes[int(np.argmax(scores))], tuple(post)


# ---------------------------------------------------------------------------
# Linear SVM (Pegasos subgradient)

@dataclass
class SvmTrainConfig:
    lambda_: float = 1e-4
    epochs: int = 20
    seed: int = 0


@dataclass
class SvmModel:
    weights: np.ndarray
    bias: float
    lambda_: float
    n_terms: int
    use_cm: bool

    def decision(self, vector, cm=None):
        if (cm is not None) != self.use_cm:
            raise ValueError("code-mix feature presence does not match training")
        s = self.bias
        if vector.nnz:
            s += float(self.weights[vector.indices] @ vector.values)
        if cm is not None:
            s += float(self.weights[self.n_terms:] @ np.asarray(cm, dtype=np.float64))
        return s


def _sign_label(label):
    return 1.0 if label == EXCITING else -1.0


def train_svm(vectors, labels, n_terms, cm=None, cfg=None):
    """Pegasos: step 1/(lambda*t), shrink-then-update on margin violations.
    cm, when given, is a list of scaled 4-vectors appended as dense dims."""
    cfg = cfg or SvmTrainConfig()
    n = len(vectors)
    if n == 0 or len(labels) != n:
        raise ValueError("vectors and labels must align and be non-empty")
    if len(set(labels)) < 2:
        raise ValueError("training data contains a single class")
    use_cm = cm is not None
    dim = n_terms + (4 if use_cm else 0)
    w = np.zeros(dim)
    b = 0.0
    y = np.array([_sign_label(lab) for lab in labels])
    dense_cm = [np.asarray(v, dtype=np.float64) for v in cm] if use_cm else None
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    t = 0
    for _epoch in range(cfg.epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (cfg.lambda_ * t)
            vec = vectors[i]
            margin = b
            if vec.nnz:
                margin += float(w[vec.indices] @ vec.values)
            if use_cm:
                margin += float(w[n_terms:] @ dense_cm[i])
            margin *= y[i]
            w *= (1.0 - eta * cfg.lambda_)
            if margin < 1.0:
                if vec.nnz:
                    w[vec.indices] += eta * y[i] * vec.values
                if use_cm:
                    w[n_terms:] += eta * y[i] * dense_cm[i]
                b += eta * y[i]
    return SvmModel(weights=w, bias=b, lambda_=cfg.lambda_,
                    n_terms=n_terms, use_cm=use_cm)


def predict_svm(model, vector, cm=None):
    """sign(w.x + b); zero decides Exciting."""
    return EXCITING if model.decision(vector, cm) >= 0.0 else NON_EXCITING


def svm_objective(model, vectors, labels, cm=None):
    """lambda/2 ||w||^2 + mean hinge loss, for convergence tracking."""
    total = 0.0
    for i, (vec, lab) in enumerate(zip(vectors, labels)):
        margin = _sign_label(lab) * model.decision(vec, cm[i] if cm is not None else None)
        total += max(0.0, 1.0 - margin)
    reg = 0.5 * model.lambda_ * float(model.weights @ model.weights)
    return reg + total / len(vectors)


# ---------------------------------------------------------------------------
# Model files

def save_nb(model, path):
    doc = {
        "format": "cmlyrics-nb", "version": MODEL_FORMAT_VERSION,
        "classes": list(model.classes), "alpha": model.alpha,
        "class_log_prior": model.class_log_prior.tolist(),
        "term_log_likelihood": model.term_log_likelihood.tolist(),
        "cm_mean": None if model.cm_mean is None else model.cm_mean.tolist(),
        "cm_stdev": None if model.cm_stdev is None else model.cm_stdev.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def load_nb(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != "cmlyrics-nb" or doc.get("version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"not a supported NB model file: {path}")
    return NbModel(
        classes=tuple(doc["classes"]), alpha=doc["alpha"],
        class_log_prior=np.array(doc["class_log_prior"]),
        term_log_likelihood=np.array(doc["term_log_likelihood"]),
        cm_mean=None if doc["cm_mean"] is None else np.array(doc["cm_mean"]),
        cm_stdev=None if doc["cm_stdev"] is None else np.array(doc["cm_stdev"]),
    )


def save_svm(model, path):
    doc = {
        "format": "cmlyrics-svm", "version": MODEL_FORMAT_VERSION,
        "weights": model.weights.tolist(), "bias": model.bias,
        "lambda": model.lambda_, "n_terms": model.n_terms,
        "use_cm": model.use_cm,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def load_svm(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != "cmlyrics-svm" or doc.get("version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"not a supported SVM model file: {path}")
    return SvmModel(weights=np.array(doc["weights"]), bias=doc["bias"],
                    lambda_=doc["lambda"], n_terms=doc["n_terms"],
                    use_cm=doc["use_cm"])
