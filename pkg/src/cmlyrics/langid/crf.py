"""Linear-chain CRF for token-level language identification.

Training maximizes the conditional log-likelihood (minus an L2 penalty) by
minibatch stochastic gradient ascent; gradients come from forward-backward
in log space, decoding from Viterbi. Both lattice passes live in the
kernels backend.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from ..kernels import backend as K
from ..textproc import Token, Sentence, WORD, _kind_of
from .features import extract_token_features

TAGS = ("te", "en", "other")
TAG_TE, TAG_EN, TAG_OTHER = TAGS

MODEL_FORMAT_VERSION = 1


@dataclass
class TaggedSentence:
    tokens: list[Token]
    tags: list[str]

    def __post_init__(self):
        if len(self.tokens) != len(self.tags):
            raise ValueError("tokens and tags must align")

    def sentence(self):
        return Sentence(self.tokens)


@dataclass
class CrfModel:
    tagset: tuple = TAGS
    feature_index: dict = field(default_factory=dict)
    emission_weights: np.ndarray = None  # (n_features, K)
    transition_weights: np.ndarray = None  # (K+1, K); row K = BOS
    l2: float = 1e-4

    def __post_init__(self):
        k = len(self.tagset)
        if self.emission_weights is None:
            self.emission_weights = np.zeros((len(self.feature_index), k))
        if self.transition_weights is None:
            self.transition_weights = np.zeros((k + 1, k))

    @property
    def n_params(self):
        return self.emission_weights.size + self.transition_weights.size

    def get_params(self):
        return np.concatenate([self.emission_weights.ravel(),
                               self.transition_weights.ravel()])

    def set_params(self, vec):
        ne = self.emission_weights.size
        self.emission_weights = vec[:ne].reshape(self.emission_weights.shape).copy()
        self.transition_weights = vec[ne:].reshape(self.transition_weights.shape).copy()

    def featurize(self, sent, res, grow=False):
        """Active known-feature index arrays per token; grow=True registers
        unseen features (training-time vocabulary building)."""
        rows = []
        for i in range(len(sent.tokens)):
            idxs = []
            for f in sorted(extract_token_features(sent, i, res)):
                j = self.feature_index.get(f)
                if j is None and grow:
                    j = len(self.feature_index)
                    self.feature_index[f] = j
                if j is not None:
                    idxs.append(j)
            rows.append(np.array(idxs, dtype=np.int64))
        return rows

    def emission_scores(self, feat_rows):
        k = len(self.tagset)
        phi = np.zeros((len(feat_rows), k))
        for t, idxs in enumerate(feat_rows):
            if idxs.size:
                phi[t] = self.emission_weights[idxs].sum(axis=0)
        return phi


def _sentence_of(item):
    return item.sentence() if isinstance(item, TaggedSentence) else item


def crf_log_likelihood_grad(model, batch, res):
    """Batch conditional log-likelihood with its analytic gradient.

    Returns (ll, grad) where ll = sum_sent log P(y|x) - l2*||w||^2 and grad
    is a flat vector aligned with model.get_params() (observed minus
    expected feature counts minus 2*l2*w).
    """
    k = len(model.tagset)
    tag_idx = {t: i for i, t in enumerate(model.tagset)}
    demit = np.zeros_like(model.emission_weights)
    dtrans = np.zeros_like(model.transition_weights)
    ll = 0.0
    for ts in batch:
        sent = ts.sentence()
        feat_rows = model.featurize(sent, res)
        phi = model.emission_scores(feat_rows)
        y = [tag_idx[t] for t in ts.tags]
        log_z, marg, pair = K.crf_forward_backward(phi, model.transition_weights)
        score = model.transition_weights[k, y[0]] + phi[0, y[0]]
        for t in range(1, len(y)):
            score += model.transition_weights[y[t - 1], y[t]] + phi[t, y[t]]
        ll += score - log_z
        for t, idxs in enumerate(feat_rows):
            if idxs.size:
                demit[idxs, y[t]] += 1.0
                demit[idxs] -= marg[t]
        dtrans[k, y[0]] += 1.0
        for t in range(1, len(y)):
            dtrans[y[t - 1], y[t]] += 1.0
        dtrans -= pair
    w = model.get_params()
    ll -= model.l2 * float(w @ w)
    grad = np.concatenate([demit.ravel(), dtrans.ravel()]) - 2.0 * model.l2 * w
    if not (np.isfinite(ll) and np.all(np.isfinite(grad))):
        raise FloatingPointError("non-finite CRF log-likelihood or gradient")
    return ll, grad


@dataclass
class CrfTrainConfig:
    l2: float = 1e-4
    epochs: int = 10
    learning_rate: float = 0.5
    decay: float = 0.05
    batch_size: int = 8
    seed: int = 0


def train_crf(data, res, cfg=None, dev=None):
    """Fit a CRF on tagged sentences; deterministic given cfg.seed.

    Step size follows lr/(1 + decay*t) over global minibatch count t. With a
    dev set, the per-epoch snapshot with the best dev tag accuracy is
    returned (ties favor the earlier epoch); otherwise the final model.
    """
    if not data:
        raise ValueError("no training data")
    cfg = cfg or CrfTrainConfig()
    model = CrfModel(l2=cfg.l2)
    for ts in data:
        model.featurize(ts.sentence(), res, grow=True)
    model.emission_weights = np.zeros((len(model.feature_index), len(model.tagset)))

    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    best = (-1.0, None)
    step = 0
    for _epoch in range(cfg.epochs):
        order = rng.permutation(len(data))
        for start in range(0, len(data), cfg.batch_size):
            batch = [data[i] for i in order[start:start + cfg.batch_size]]
            _, grad = crf_log_likelihood_grad(model, batch, res)
            lr = cfg.learning_rate / (1.0 + cfg.decay * step) / len(batch)
            model.set_params(model.get_params() + lr * grad)
            step += 1
        if dev is not None:
            acc = tag_accuracy(model, dev, res)
            if acc > best[0]:
                best = (acc, model.get_params())
    if dev is not None and best[1] is not None:
        model.set_params(best[1])
    return model


def viterbi_decode(model, sent, res):
    """Best tag sequence for one sentence; unseen features contribute 0,
    score ties resolve to the lowest tag index."""
    if not sent.tokens:
        raise ValueError("empty sentence")
    feat_rows = model.featurize(sent, res)
    phi = model.emission_scores(feat_rows)
    path = K.crf_viterbi(phi, model.transition_weights)
    return [model.tagset[i] for i in path]


def tag_song(model, song, res):
    """Tag a cleaned song sentence by sentence. Punct/Number tokens are
    forced to the 'other' tag regardless of the decoder."""
    from ..textproc import sentences_of
    out = []
    for sent in sentences_of(song.text):
        tags = viterbi_decode(model, sent, res)
        tags = [t if tok.kind == WORD else TAG_OTHER
                for tok, t in zip(sent.tokens, tags)]
        out.append(TaggedSentence(sent.tokens, tags))
    return out


def tag_accuracy(model, gold, res):
    """Token-level Viterbi accuracy against gold tagged sentences."""
    if not gold:
        raise ValueError("no gold data")
    hits = total = 0
    for ts in gold:
        pred = viterbi_decode(model, ts.sentence(), res)
        hits += sum(1 for p, g in zip(pred, ts.tags) if p == g)
        total += len(ts.tags)
    return hits / total


def read_tagged(path):
    """Read the one-token-per-line "surface<TAB>tag" format (blank line
    between sentences)."""
    sentences = []
    tokens, tags = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                if tokens:
                    sentences.append(TaggedSentence(tokens, tags))
                    tokens, tags = [], []
                continue
            parts = line.split("\t")
            if len(parts) != 2 or parts[1] not in TAGS:
                raise ValueError(f"{path}:{lineno}: bad tagged line {line!r}")
            tokens.append(Token(parts[0], _kind_of(parts[0])))
            tags.append(parts[1])
    if tokens:
        sentences.append(TaggedSentence(tokens, tags))
    return sentences


def write_tagged(sentences, path):
    with open(path, "w", encoding="utf-8") as fh:
        for ts in sentences:
            for tok, tag in zip(ts.tokens, ts.tags):
                fh.write(f"{tok.surface}\t{tag}\n")
            fh.write("\n")


def save_model(model, path):
    doc = {
        "format": "cmlyrics-crf",
        "version": MODEL_FORMAT_VERSION,
        "tagset": list(model.tagset),
        "l2": model.l2,
        "features": list(model.feature_index.keys()),
        "emission_weights": model.emission_weights.tolist(),
        "transition_weights": model.transition_weights.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False)


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != "cmlyrics-crf" or doc.get("version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"not a supported CRF model file: {path}")
    model = CrfModel(
        tagset=tuple(doc["tagset"]),
        feature_index={f: i for i, f in enumerate(doc["features"])},
        emission_weights=np.array(doc["emission_weights"], dtype=np.float64).reshape(
            len(doc["features"]), len(doc["tagset"])),
        transition_weights=np.array(doc["transition_weights"], dtype=np.float64),
        l2=doc["l2"],
    )
    return model
