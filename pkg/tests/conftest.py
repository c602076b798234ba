import numpy as np
import pytest

from lscd import TokenizedCorpus, build_vocabulary


@pytest.fixture
def tiny_corpus():
    sentences = [
        (1755, ["der", "Hund", "bellen"]),
        (1760, ["der", "Hund", "laufen"]),
        (1770, ["die", "Katze", "laufen"]),
        (1780, ["der", "Hund", "und", "die", "Katze"]),
    ]
    return TokenizedCorpus("t1", (1750, 1799), sentences)


@pytest.fixture
def tiny_vocab(tiny_corpus):
    return build_vocabulary(tiny_corpus, 1)


def random_corpus(seed, n_sentences=60, vocab_size=25, max_len=9, years=(1750, 1799)):
    rng = np.random.default_rng(seed)
    words = [f"w{i}" for i in range(vocab_size)]
    sentences = []
    for _ in range(n_sentences):
        length = int(rng.integers(1, max_len + 1))
        tokens = [words[int(rng.integers(vocab_size))] for _ in range(length)]
        sentences.append((int(rng.integers(years[0], years[1] + 1)), tokens))
    return TokenizedCorpus("t1", years, sentences)
