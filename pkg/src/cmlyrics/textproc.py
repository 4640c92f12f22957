"""Sentence segmentation and tokenization for romanized code-mixed lyrics.

Lyric lines act as sentence boundaries even without punctuation; within a
line, sentence-final punctuation (. ! ? … and the danda) also splits. Tokens
keep internal apostrophes/hyphens; other leading/trailing punctuation is
peeled off into separate Punct tokens.
"""

import re
from dataclasses import dataclass

WORD = "word"
PUNCT = "punct"
NUMBER = "number"

_FINAL_PUNCT = ".!?…।"
_SENT_RE = re.compile(r"[^.!?…।]*[.!?…।]+|[^.!?…।]+")
_LETTER_RE = re.compile(r"[^\W\d_]")
_DIGIT_RE = re.compile(r"\d")
_KEEP_INTERNAL = "'-’"


@dataclass
class Token:
    surface: str
    kind: str


@dataclass
class Sentence:
    tokens: list[Token]

    def __len__(self):
        return len(self.tokens)

    def words(self):
        return [t for t in self.tokens if t.kind == WORD]

    def surfaces(self):
        return [t.surface for t in self.tokens]


def split_sentences(text):
    """Cleaned text -> list of sentence strings; empty segments dropped."""
    out = []
    for line in text.split("\n"):
        for seg in _SENT_RE.findall(line):
            seg = seg.strip()
            if seg and not all(ch in _FINAL_PUNCT or ch.isspace() for ch in seg):
                out.append(seg)
            elif seg and out:
                # stray punctuation run glues onto the previous sentence
                out[-1] = out[-1] + seg
    return out


def _kind_of(surface):
    if _LETTER_RE.search(surface):
        return WORD
    if _DIGIT_RE.search(surface):
        return NUMBER
    return PUNCT


def _is_punct_char(ch):
    return not (ch.isalnum() or ch.isspace())


def tokenize(sentence):
    """One sentence string -> Sentence of Word/Punct/Number tokens."""
    chunks = sentence.split()
    if not chunks:
        raise ValueError("cannot tokenize all-whitespace input")
    tokens = []
    for chunk in chunks:
        lead = []
        while chunk and _is_punct_char(chunk[0]):
            lead.append(chunk[0])
            chunk = chunk[1:]
        trail = []
        while chunk and _is_punct_char(chunk[-1]) and chunk[-1] not in _KEEP_INTERNAL:
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        # words may end in an apostrophe-like mark only when letters remain
        while chunk and _is_punct_char(chunk[-1]) and not _LETTER_RE.search(chunk) \
                and not _DIGIT_RE.search(chunk):
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        for ch in lead:
            tokens.append(Token(ch, PUNCT))
        if chunk:
            tokens.append(Token(chunk, _kind_of(chunk)))
        for ch in reversed(trail):
            tokens.append(Token(ch, PUNCT))
    if not tokens:
        raise ValueError(f"no tokens in segment {sentence!r}")
    return Sentence(tokens)


def sentences_of(text):
    """Convenience: cleaned text -> list of tokenized Sentences."""
    return [tokenize(s) for s in split_sentences(text)]


def word_tokens(text):
    """Lowercased Word-token surfaces of a cleaned text, in order."""
    return [t.surface.lower() for s in sentences_of(text)
            for t in s.tokens if t.kind == WORD]
