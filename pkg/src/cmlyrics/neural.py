"""CNN / LSTM / CMNN classifiers with hand-derived backpropagation.

The CMNN path is embedding -> width-3 conv -> LSTM -> temporal mean pool ->
concat with the scaled code-mix features -> hidden layer -> softmax. The CNN
and LSTM baselines drop the respective other sequence stage. All math is
float64; the conv and LSTM inner loops run in the kernels backend.

Sequences are truncated to valid_len before the kernels: PAD embeddings are
zero and the pool ignores padded positions, so results are identical to
computing over the padded length.
"""

import json
from dataclasses import dataclass

import numpy as np

from .corpus import EXCITING, NON_EXCITING
from .embeddings import PAD_IDX, UNK_IDX
from .kernels import backend as K

ARCH_CNN = "cnn"
ARCH_LSTM = "lstm"
ARCH_CMNN = "cmnn"
ARCHS = (ARCH_CNN, ARCH_LSTM, ARCH_CMNN)

MODEL_FORMAT_VERSION = 1


@dataclass
class SequenceInput:
    indices: np.ndarray
    valid_len: int


@dataclass
class TrainConfig:
    epochs: int = 10
    batch_size: int = 32
    learning_rate: float = 0.05
    seed: int = 0
    clip_norm: float = 5.0


@dataclass
class NeuralModel:
    arch: str
    use_cm: bool
    activation: str
    max_len: int
    vocab: dict
    emb: np.ndarray                  # (V, d); PAD row pinned at zero
    w_h: np.ndarray                  # (pool_dim [+4], hidden)
    b_h: np.ndarray
    w_out: np.ndarray                # (hidden, 2)
    b_out: np.ndarray
    conv_filt: np.ndarray | None = None  # (3, d, F)
    conv_bias: np.ndarray | None = None
    wx: np.ndarray | None = None     # (lstm_in, 4H)
    wh: np.ndarray | None = None     # (H, 4H)
    b_lstm: np.ndarray | None = None

    def param_dict(self):
        p = {"emb": self.emb, "w_h": self.w_h, "b_h": self.b_h,
             "w_out": self.w_out, "b_out": self.b_out}
        if self.conv_filt is not None:
            p["conv_filt"] = self.conv_filt
            p["conv_bias"] = self.conv_bias
        if self.wx is not None:
            p["wx"] = self.wx
            p["wh"] = self.wh
            p["b_lstm"] = self.b_lstm
        return p

    def copy(self):
        return NeuralModel(
            arch=self.arch, use_cm=self.use_cm, activation=self.activation,
            max_len=self.max_len, vocab=dict(self.vocab),
            **{k: (None if getattr(self, k) is None else getattr(self, k).copy())
               for k in ("emb", "w_h", "b_h", "w_out", "b_out",
                         "conv_filt", "conv_bias", "wx", "wh", "b_lstm")})


def pad_sequence(tokens, max_len, table):
    """Map words to table indices (UNK if unseen), keep the first max_len,
    pad the rest with PAD."""
    if not tokens:
        raise ValueError("cannot pad an empty token list")
    idx = np.full(max_len, PAD_IDX, dtype=np.int64)
    valid = min(len(tokens), max_len)
    for i in range(valid):
        idx[i] = table.vocab.get(tokens[i].lower(), UNK_IDX)
    return SequenceInput(indices=idx, valid_len=valid)


def conv1d_forward(x, filters, bias):
    """relu of a width-3 same-padded 1-D convolution."""
    if x.shape[1] != filters.shape[1] or filters.shape[0] != 3:
        raise ValueError("conv dimension mismatch")
    return np.maximum(K.conv1d_w3(x, filters, bias), 0.0)


def lstm_forward(x, wx, wh, b, valid_len=None):
    """Hidden states h_1..h_L (computed for every position; the caller masks
    padded positions in the pooling stage)."""
    if x.shape[1] != wx.shape[0] or wx.shape[1] != 4 * wh.shape[0]:
        raise ValueError("lstm dimension mismatch")
    h, _c, _g = K.lstm_forward(x, wx, wh, b)
    return h


def mean_pool(h, valid_len):
    """Mean of the first valid_len rows."""
    if valid_len < 1:
        raise ValueError("valid_len must be >= 1")
    return h[:valid_len].mean(axis=0)


def init_model(arch, use_cm, table, n_filters=64, hidden_size=64,
               fusion_size=32, activation="relu", max_len=64, seed=0):
    """Seeded uniform(-0.08, 0.08) init; forget-gate bias 1, PAD row zero.
    The embedding table is copied and fine-tuned during training."""
    if arch not in ARCHS:
        raise ValueError(f"unknown architecture {arch!r}")
    rng = np.random.Generator(np.random.PCG64(seed))

    def u(*shape):
        return rng.uniform(-0.08, 0.08, size=shape)

    d = table.d
    emb = table.vectors.copy()
    emb[PAD_IDX] = 0.0
    conv_filt = conv_bias = wx = wh = b_lstm = None
    if arch in (ARCH_CNN, ARCH_CMNN):
        conv_filt = u(3, d, n_filters)
        conv_bias = u(n_filters)
    if arch in (ARCH_LSTM, ARCH_CMNN):
        lstm_in = n_filters if arch == ARCH_CMNN else d
        wx = u(lstm_in, 4 * hidden_size)
        wh = u(hidden_size, 4 * hidden_size)
        b_lstm = u(4 * hidden_size)
        b_lstm[hidden_size:2 * hidden_size] = 1.0
    pool_dim = n_filters if arch == ARCH_CNN else hidden_size
    fuse_in = pool_dim + (4 if use_cm else 0)
    return NeuralModel(
        arch=arch, use_cm=use_cm, activation=activation, max_len=max_len,
        vocab=dict(table.vocab), emb=emb,
        conv_filt=conv_filt, conv_bias=conv_bias,
        wx=wx, wh=wh, b_lstm=b_lstm,
        w_h=u(fuse_in, fusion_size), b_h=u(fusion_size),
        w_out=u(fusion_size, 2), b_out=u(2))


def _act(model, z):
    return np.maximum(z, 0.0) if model.activation == "relu" else np.tanh(z)


def _forward_cache(model, seq, cm):
    if (cm is not None) != model.use_cm:
        raise ValueError("code-mix feature presence does not match the model")
    T = seq.valid_len
    idx = seq.indices[:T]
    xe = model.emb[idx]
    cache = {"idx": idx, "xe": xe}
    if model.arch in (ARCH_CNN, ARCH_CMNN):
        pre = K.conv1d_w3(xe, model.conv_filt, model.conv_bias)
        a = np.maximum(pre, 0.0)
        cache["conv_pre"] = pre
        cache["conv_out"] = a
        seq_repr = a
    else:
        seq_repr = xe
    if model.arch in (ARCH_LSTM, ARCH_CMNN):
        h, c, gates = K.lstm_forward(seq_repr, model.wx, model.wh, model.b_lstm)
        cache["lstm"] = (seq_repr, h, c, gates)
        pooled = h.mean(axis=0)
    else:
        pooled = seq_repr.mean(axis=0)
    z = np.concatenate([pooled, cm]) if model.use_cm else pooled
    hpre = z @ model.w_h + model.b_h
    hh = _act(model, hpre)
    logits = hh @ model.w_out + model.b_out
    mx = logits.max()
    ex = np.exp(logits - mx)
    probs = ex / ex.sum()
    cache.update(pooled=pooled, z=z, hpre=hpre, hh=hh, probs=probs)
    return probs, cache


def forward(model, seq, cm=None):
    """Class probability pair (exciting, non-exciting)."""
    probs, _ = _forward_cache(model, seq, cm)
    return probs


def predict(model, seq, cm=None):
    p = forward(model, seq, cm)
    return EXCITING if p[0] >= p[1] else NON_EXCITING


def _label_index(label):
    return 0 if label == EXCITING else 1


def loss_and_grads(model, seq, cm, label):
    """Cross-entropy loss of one example and gradients for every parameter
    group (embedding gradient is dense over the vocabulary)."""
    probs, cache = _forward_cache(model, seq, cm)
    y = _label_index(label)
    loss = -float(np.log(max(probs[y], 1e-300)))
    grads = {k: np.zeros_like(v) for k, v in model.param_dict().items()}

    dlogits = cache["probs"].copy()
    dlogits[y] -= 1.0
    grads["w_out"] += np.outer(cache["hh"], dlogits)
    grads["b_out"] += dlogits
    dhh = model.w_out @ dlogits
    if model.activation == "relu":
        dhpre = dhh * (cache["hpre"] > 0.0)
    else:
        dhpre = dhh * (1.0 - cache["hh"] ** 2)
    grads["w_h"] += np.outer(cache["z"], dhpre)
    grads["b_h"] += dhpre
    dz = model.w_h @ dhpre
    pool_dim = cache["pooled"].shape[0]
    dpooled = dz[:pool_dim]

    T = cache["idx"].shape[0]
    if model.arch in (ARCH_LSTM, ARCH_CMNN):
        seq_repr, h, c, gates = cache["lstm"]
        dh = np.tile(dpooled / T, (T, 1))
        dseq, dwx, dwh, dbl = K.lstm_backward(
            seq_repr, model.wx, model.wh, h, c, gates, dh)
        grads["wx"] += dwx
        grads["wh"] += dwh
        grads["b_lstm"] += dbl
    else:
        dseq = np.tile(dpooled / T, (T, 1))

    if model.arch in (ARCH_CNN, ARCH_CMNN):
        dpre = dseq * (cache["conv_pre"] > 0.0)
        dxe, dfilt, dbias = K.conv1d_w3_backward(cache["xe"], model.conv_filt, dpre)
        grads["conv_filt"] += dfilt
        grads["conv_bias"] += dbias
    else:
        dxe = dseq
    for t, w_idx in enumerate(cache["idx"]):
        if w_idx != PAD_IDX:
            grads["emb"][w_idx] += dxe[t]
    return loss, grads


def evaluate_accuracy(model, data):
    """data: list of (SequenceInput, cm-or-None, label)."""
    hits = sum(1 for seq, cm, lab in data if predict(model, seq, cm) == lab)
    return hits / len(data)


def train_model(arch, use_cm, train, dev, table, cfg=None, **model_kwargs):
    """Minibatch SGD with gradient-norm clipping; returns the epoch snapshot
    with the best dev accuracy (ties favor the earlier epoch).

    train/dev: lists of (word list, cm 4-vector or None, label). The pad
    length is the maximum training-sequence length.
    """
    cfg = cfg or TrainConfig()
    if not train or not dev:
        raise ValueError("train and dev must be non-empty")
    if cfg.epochs < 1:
        raise ValueError("epochs must be >= 1")
    max_len = max(len(toks) for toks, _, _ in train)
    model = init_model(arch, use_cm, table, max_len=max_len,
                       seed=cfg.seed, **model_kwargs)

    def prep(rows):
        return [(pad_sequence(toks, max_len, table),
                 None if cm is None else np.asarray(cm, dtype=np.float64), lab)
                for toks, cm, lab in rows]

    train_p = prep(train)
    dev_p = prep(dev)
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    best_acc, best_model = -1.0, None
    for epoch in range(cfg.epochs):
        order = rng.permutation(len(train_p))
        for start in range(0, len(order), cfg.batch_size):
            batch = [train_p[i] for i in order[start:start + cfg.batch_size]]
            agg = None
            total = 0.0
            for seq, cm, lab in batch:
                loss, grads = loss_and_grads(model, seq, cm, lab)
                total += loss
                if agg is None:
                    agg = grads
                else:
                    for k in agg:
                        agg[k] += grads[k]
            if not np.isfinite(total):
                raise FloatingPointError(f"non-finite loss at epoch {epoch}")
            norm = np.sqrt(sum(float((g ** 2).sum()) for g in agg.values())) / len(batch)
            scale = cfg.learning_rate / len(batch)
            if norm > cfg.clip_norm:
                scale *= cfg.clip_norm / norm
            params = model.param_dict()
            for k in agg:
                params[k] -= scale * agg[k]
            model.emb[PAD_IDX] = 0.0
        acc = evaluate_accuracy(model, dev_p)
        if acc > best_acc:
            best_acc, best_model = acc, model.copy()
    return best_model


def save_model(model, path):
    doc = {"format": "cmlyrics-neural", "version": MODEL_FORMAT_VERSION,
           "arch": model.arch, "use_cm": model.use_cm,
           "activation": model.activation, "max_len": model.max_len,
           "vocab": list(model.vocab.keys())}
    for k, v in model.param_dict().items():
        doc[k] = v.tolist()
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False)


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != "cmlyrics-neural" or doc.get("version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"not a supported neural model file: {path}")

    def arr(key):
        return np.array(doc[key], dtype=np.float64) if key in doc else None

    return NeuralModel(
        arch=doc["arch"], use_cm=doc["use_cm"], activation=doc["activation"],
        max_len=doc["max_len"], vocab={w: i for i, w in enumerate(doc["vocab"])},
        emb=arr("emb"), w_h=arr("w_h"), b_h=arr("b_h"),
        w_out=arr("w_out"), b_out=arr("b_out"),
        conv_filt=arr("conv_filt"), conv_bias=arr("conv_bias"),
        wx=arr("wx"), wh=arr("wh"), b_lstm=arr("b_lstm"))
