"""Skip-gram word embeddings with negative sampling, trained on the
training-fold lyrics.

Index 0 is PAD (all-zero row, never updated), index 1 is UNK; tokens below
min_count map to UNK and train its row. Negatives are drawn from the
unigram^0.75 distribution. Pairs and negative samples for an epoch are
built up front with a seeded PCG64 stream so the numba and numpy update
kernels see identical work.
"""

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .kernels import backend as K
from .textproc import word_tokens

PAD = "<pad>"
UNK = "<unk>"
PAD_IDX = 0
UNK_IDX = 1


@dataclass
class EmbeddingTable:
    vocab: dict
    vectors: np.ndarray
    d: int

    def __len__(self):
        return len(self.vocab)


@dataclass
class EmbeddingConfig:
    d: int = 100
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    min_count: int = 2
    seed: int = 0
    step: float = 0.025


def lookup(table, word):
    """Row for a (lowercased) word; unknown words get the UNK row."""
    idx = table.vocab.get(word.lower(), UNK_IDX)
    return table.vectors[idx]


def _loss_terms(v, u_pos, u_negs):
    def sig(z):
        return 1.0 / (1.0 + math.exp(-z)) if z >= 0 else \
            math.exp(z) / (1.0 + math.exp(z))
    loss = -math.log(max(sig(float(v @ u_pos)), 1e-12))
    for u in u_negs:
        loss -= math.log(max(1.0 - sig(float(v @ u)), 1e-12))
    return loss


def sgns_pair_loss(v_center, u_context, u_negs):
    """Negative-sampling loss of one (center, context, negatives) triple and
    its gradients w.r.t. all vectors. Reference implementation for gradient
    checks; the training loop uses the kernel backend."""
    def sig(z):
        return 1.0 / (1.0 + math.exp(-z)) if z >= 0 else \
            math.exp(z) / (1.0 + math.exp(z))
    loss = _loss_terms(v_center, u_context, u_negs)
    s = sig(float(v_center @ u_context))
    dv = (s - 1.0) * u_context
    du_pos = (s - 1.0) * v_center
    du_negs = np.zeros_like(u_negs)
    for j in range(u_negs.shape[0]):
        sn = sig(float(v_center @ u_negs[j]))
        dv = dv + sn * u_negs[j]
        du_negs[j] = sn * v_center
    return loss, dv, du_pos, du_negs


def _song_sequences(train_songs):
    return [word_tokens(s.text) for s in train_songs]


def train_embeddings(train_songs, cfg=None):
    """Train a table on the given songs; deterministic given cfg.seed."""
    table, _losses = train_embeddings_with_losses(train_songs, cfg)
    return table


def train_embeddings_with_losses(train_songs, cfg=None):
    cfg = cfg or EmbeddingConfig()
    seqs = _song_sequences(train_songs)
    counts = Counter(w for seq in seqs for w in seq)
    kept = sorted(w for w, c in counts.items() if c >= cfg.min_count)
    if not kept:
        raise ValueError("empty vocabulary after min_count filtering")
    vocab = {PAD: PAD_IDX, UNK: UNK_IDX}
    for w in kept:
        vocab[w] = len(vocab)
    V = len(vocab)

    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    vectors = (rng.random((V, cfg.d)) - 0.5) / cfg.d
    vectors[PAD_IDX] = 0.0
    w_out = np.zeros((V, cfg.d))

    # unigram^0.75 negative-sampling distribution over real indices (PAD excluded)
    freq = np.zeros(V)
    for seq in seqs:
        for w in seq:
            freq[vocab.get(w, UNK_IDX)] += 1
    probs = freq ** 0.75
    probs[PAD_IDX] = 0.0
    probs = probs / probs.sum()

    index_seqs = [np.array([vocab.get(w, UNK_IDX) for w in seq], dtype=np.int64)
                  for seq in seqs if seq]
    centers, contexts = [], []
    for seq in index_seqs:
        for i in range(len(seq)):
            lo = max(0, i - cfg.window)
            hi = min(len(seq), i + cfg.window + 1)
            for j in range(lo, hi):
                if j != i:
                    centers.append(seq[i])
                    contexts.append(seq[j])
    centers = np.array(centers, dtype=np.int64)
    contexts = np.array(contexts, dtype=np.int64)

    losses = []
    for _epoch in range(cfg.epochs):
        order = rng.permutation(len(centers))
        negs = rng.choice(V, size=(len(centers), cfg.negatives), p=probs)
        loss = K.sgns_update(vectors, w_out, centers[order], contexts[order],
                             negs.astype(np.int64), cfg.step)
        vectors[PAD_IDX] = 0.0
        losses.append(float(loss))
    return EmbeddingTable(vocab=vocab, vectors=vectors, d=cfg.d), losses


def save_embeddings(table, path):
    """word2vec-style text format: "<|V|> <d>" header, one word per line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(table.vocab)} {table.d}\n")
        for word, idx in table.vocab.items():
            vals = " ".join(repr(float(x)) for x in table.vectors[idx])
            fh.write(f"{word} {vals}\n")


def load_embeddings(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        n, d = int(header[0]), int(header[1])
        vocab = {}
        vectors = np.zeros((n, d))
        for line in fh:
            parts = line.rstrip("\n").split(" ")
            word = parts[0]
            vocab[word] = len(vocab)
            vectors[vocab[word]] = [float(x) for x in parts[1:]]
    if vocab.get(PAD) != PAD_IDX or vocab.get(UNK) != UNK_IDX:
        raise ValueError(f"embedding file {path} missing PAD/UNK sentinels")
    return EmbeddingTable(vocab=vocab, vectors=vectors, d=d)
