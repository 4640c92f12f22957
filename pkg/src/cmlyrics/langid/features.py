"""Token feature extraction for the language-ID CRF.

Features per token (surfaces lowercased): the word itself, prefixes and
suffixes up to length 4, all substrings of length 2-3, postposition-suffix
flag, neighbor words and their affixes up to length 2, word length, English
dictionary membership and the token kind. Affix bounds keep the feature
space finite; Telugu's agglutinative suffixes make the affix families do
most of the work.
"""

from dataclasses import dataclass
from importlib import resources as importlib_resources

BOS = "BOS"
EOS = "EOS"


def _load_wordlist(path):
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            w = line.strip().lower()
            if w and not w.startswith("#"):
                words.add(w)
    return words


@dataclass
class LangResources:
    english_lexicon: set
    telugu_postpositions: set

    @classmethod
    def load(cls, lexicon_path=None, postpos_path=None):
        """Load from plain-text word lists; defaults to the shipped files."""
        res_dir = importlib_resources.files("cmlyrics") / "resources"
        if lexicon_path is None:
            lexicon_path = str(res_dir / "english_words.txt")
        if postpos_path is None:
            postpos_path = str(res_dir / "telugu_postpositions.txt")
        return cls(english_lexicon=_load_wordlist(lexicon_path),
                   telugu_postpositions=_load_wordlist(postpos_path))


def extract_token_features(sent, i, res):
    """Feature set ("name=value" strings) for token i of a sentence."""
    tokens = sent.tokens
    if not 0 <= i < len(tokens):
        raise IndexError(f"token index {i} out of range for sentence of {len(tokens)}")
    word = tokens[i].surface.lower()
    n = len(word)
    feats = {f"w={word}", f"len={n}", f"kind={tokens[i].kind}"}
    for a in range(1, min(4, n) + 1):
        feats.add(f"p{a}={word[:a]}")
        feats.add(f"s{a}={word[-a:]}")
    for size in (2, 3):
        for start in range(0, n - size + 1):
            feats.add(f"inf={word[start:start + size]}")
    if any(word.endswith(pp) for pp in res.telugu_postpositions):
        feats.add("postpos=1")
    if word in res.english_lexicon:
        feats.add("dict=1")
    if i > 0:
        prev = tokens[i - 1].surface.lower()
        feats.add(f"prev={prev}")
        for a in range(1, min(2, len(prev)) + 1):
            feats.add(f"prevp{a}={prev[:a]}")
            feats.add(f"prevs{a}={prev[-a:]}")
    else:
        feats.add(f"prev={BOS}")
    if i < len(tokens) - 1:
        nxt = tokens[i + 1].surface.lower()
        feats.add(f"next={nxt}")
        for a in range(1, min(2, len(nxt)) + 1):
            feats.add(f"nextp{a}={nxt[:a]}")
            feats.add(f"nexts{a}={nxt[-a:]}")
    else:
        feats.add(f"next={EOS}")
    return feats
