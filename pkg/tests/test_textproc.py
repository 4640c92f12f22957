import pytest
from hypothesis import given, settings, strategies as st

from cmlyrics.textproc import (
    NUMBER, PUNCT, WORD, sentences_of, split_sentences, tokenize, word_tokens,
)


class TestSplitSentences:
    def test_newline_boundary(self):
        assert split_sentences("hello world\nbye") == ["hello world", "bye"]

    def test_punct_boundary(self):
        assert split_sentences("I love you! chali chali ga") == \
            ["I love you!", "chali chali ga"]

    def test_empty(self):
        assert split_sentences("") == []

    def test_multiple_terminators(self):
        assert split_sentences("wow!! nijama? avunu.") == \
            ["wow!!", "nijama?", "avunu."]

    @given(st.text(max_size=120))
    @settings(max_examples=150, deadline=None)
    def test_never_empty_sentence(self, text):
        for s in split_sentences(text):
            assert s.strip()


class TestTokenize:
    def test_trailing_punct(self):
        toks = tokenize("nuvvu super, ga!").tokens
        assert [(t.surface, t.kind) for t in toks] == [
            ("nuvvu", WORD), ("super", WORD), (",", PUNCT),
            ("ga", WORD), ("!", PUNCT)]

    def test_number(self):
        toks = tokenize("100 crores").tokens
        assert [(t.surface, t.kind) for t in toks] == \
            [("100", NUMBER), ("crores", WORD)]

    def test_internal_marks_kept(self):
        toks = tokenize("o'range-u").tokens
        assert [(t.surface, t.kind) for t in toks] == [("o'range-u", WORD)]

    def test_whitespace_only_rejected(self):
        with pytest.raises(ValueError):
            tokenize("   ")

    def test_kind_invariants(self):
        for tok in tokenize("abc 12 ?! a1 'ello (hi)").tokens:
            if tok.kind == WORD:
                assert any(c.isalpha() for c in tok.surface)
            elif tok.kind == PUNCT:
                assert not any(c.isalnum() for c in tok.surface)

    @given(st.text(alphabet="abc '!?.-,x9", min_size=1, max_size=60))
    @settings(max_examples=200, deadline=None)
    def test_retokenization_stable(self, s):
        if not s.split():
            return
        first = tokenize(s).tokens
        again = tokenize(" ".join(t.surface for t in first)).tokens
        assert [(t.surface, t.kind) for t in first] == \
            [(t.surface, t.kind) for t in again]


def test_sentences_of_and_word_tokens():
    text = "I love you!\nchali chali ga 100"
    sents = sentences_of(text)
    assert len(sents) == 2
    assert word_tokens(text) == ["i", "love", "you", "chali", "chali", "ga"]
