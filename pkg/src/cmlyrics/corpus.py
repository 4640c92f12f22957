"""Song corpus handling: loading, cleaning, fold construction, annotator agreement.

Corpus files are UTF-8 JSON lines, one object per line with fields
{"id", "title", "lyrics", "label"}; label is "exciting" / "non-exciting"
or absent for unannotated songs.
"""

import html
import json
import re
from dataclasses import dataclass, field

import numpy as np

EXCITING = "exciting"
NON_EXCITING = "non-exciting"
LABELS = (EXCITING, NON_EXCITING)

_BR_RE = re.compile(r"<\s*br\s*/?\s*>", re.IGNORECASE)
_TAG_RE = re.compile(r"<[a-zA-Z/!][^>]*>")
_WS_RE = re.compile(r"[ \t]+")


class CorpusError(ValueError):
    pass


@dataclass
class Song:
    id: str
    title: str
    raw_text: str
    text: str
    label: str | None = None


@dataclass
class Corpus:
    songs: list[Song] = field(default_factory=list)

    def __len__(self):
        return len(self.songs)

    def __iter__(self):
        return iter(self.songs)

    def by_id(self, song_id):
        for s in self.songs:
            if s.id == song_id:
                return s
        raise KeyError(song_id)

    def label_counts(self):
        counts = {EXCITING: 0, NON_EXCITING: 0}
        for s in self.songs:
            if s.label is not None:
                counts[s.label] += 1
        return counts


@dataclass
class FoldSplit:
    fold_index: int
    train: list[str]
    dev: list[str]
    test: list[str]


def _strip_tags(s):
    s = _BR_RE.sub("\n", s)
    return _TAG_RE.sub("", s)


def clean_text(raw):
    """Strip HTML tags (<br> family becomes newline), decode entities and
    normalize whitespace. Idempotent: entity decoding and tag stripping are
    iterated to a fixed point so encoded markup cannot survive one pass and
    reappear on the next."""
    s = raw
    while True:
        nxt = _strip_tags(html.unescape(_strip_tags(s)))
        if nxt == s:
            break
        s = nxt
    lines = [_WS_RE.sub(" ", ln).strip() for ln in s.split("\n")]
    return "\n".join(lines).strip("\n")


def load_corpus(path):
    """Read a JSON-lines corpus file; lyrics are cleaned on load."""
    songs = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorpusError(f"line {lineno}: malformed record: {e}") from e
            if not isinstance(rec, dict) or "id" not in rec or "lyrics" not in rec:
                raise CorpusError(f"line {lineno}: record must have 'id' and 'lyrics'")
            sid = str(rec["id"])
            if sid in seen:
                raise CorpusError(f"duplicate song id {sid!r}")
            seen.add(sid)
            label = rec.get("label")
            if label is not None and label not in LABELS:
                raise CorpusError(f"line {lineno}: bad label {label!r}")
            raw = rec["lyrics"]
            songs.append(Song(id=sid, title=rec.get("title", ""),
                              raw_text=raw, text=clean_text(raw), label=label))
    return Corpus(songs)


def save_corpus(corpus, path):
    """Write a corpus back to the JSON-lines format (raw lyrics preserved,
    so load -> save -> load round-trips exactly)."""
    with open(path, "w", encoding="utf-8") as fh:
        for s in corpus.songs:
            rec = {"id": s.id, "title": s.title, "lyrics": s.raw_text}
            if s.label is not None:
                rec["label"] = s.label
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def make_folds(corpus, k, seed):
    """Seeded k-fold split with a per-fold 64/16/20 train/dev/test layout.

    Ids are shuffled once with numpy's PCG64 generator (documented, portable
    given the same numpy stream), then sliced into k contiguous test blocks;
    each fold's remainder is split 80/20 into train/dev, dev rounded down.
    """
    n = len(corpus)
    if k < 2:
        raise CorpusError(f"k must be >= 2, got {k}")
    if n < k:
        raise CorpusError(f"corpus of {n} songs too small for k={k}")
    ids = [s.id for s in corpus.songs]
    rng = np.random.Generator(np.random.PCG64(seed))
    shuffled = [ids[i] for i in rng.permutation(n)]
    base, extra = divmod(n, k)
    folds = []
    start = 0
    for f in range(k):
        size = base + (1 if f < extra else 0)
        test = shuffled[start:start + size]
        rem = shuffled[:start] + shuffled[start + size:]
        n_dev = int(len(rem) * 0.2)
        folds.append(FoldSplit(fold_index=f, train=rem[n_dev:],
                               dev=rem[:n_dev], test=test))
        start += size
    return folds


def cohen_kappa(a, b):
    """Chance-corrected agreement between two annotation sequences."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    if not a:
        raise ValueError("empty annotation lists")
    n = len(a)
    labels = sorted(set(a) | set(b), key=str)
    p_o = sum(1 for x, y in zip(a, b) if x == y) / n
    p_e = 0.0
    for lab in labels:
        p_e += (sum(1 for x in a if x == lab) / n) * (sum(1 for y in b if y == lab) / n)
    if p_e == 1.0:
        return 1.0 if p_o == 1.0 else 0.0
    return (p_o - p_e) / (1.0 - p_e)
