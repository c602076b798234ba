"""Skip-gram with negative sampling over a tokenized corpus.

For every (center, context) pair inside the window the trainer ascends
``log sigmoid(u_w . v_c) + sum_i log sigmoid(-u_w . v_n_i)`` by SGD, with
negatives drawn from the unigram distribution raised to an exponent. The
learning rate decays linearly to a floor over all planned tokens.

The inner loop runs in the compiled kernel (``lscd._sgns_inner``) when the
extension is built, otherwise in a pure numpy fallback selected at import
time. Training is bit-deterministic for a fixed seed within a backend.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass

import numpy as np

from . import _sgns_pure
from .corpus import TokenizedCorpus, Vocabulary
from .errors import ParameterError
from .spaces import VectorSpace

try:
    from . import _sgns_inner
except ImportError:  # extension not built; pure fallback stays in charge
    _sgns_inner = None

HAVE_COMPILED_KERNEL = _sgns_inner is not None

log = logging.getLogger(__name__)

MAX_EXP = _sgns_pure.MAX_EXP
EXP_TABLE_SIZE = 1000
UNIGRAM_TABLE_DOMAIN = 2**31 - 1
LEARNING_RATE_FLOOR_FACTOR = 1e-4
_MASK64 = (1 << 64) - 1

# lookup tables shared by both kernels so they quantize identically
_grid = (np.arange(EXP_TABLE_SIZE, dtype=np.float64) / EXP_TABLE_SIZE * 2.0 - 1.0) * MAX_EXP
SIGMOID_TABLE = 1.0 / (1.0 + np.exp(-_grid))
LOG_SIGMOID_TABLE = np.log(SIGMOID_TABLE)


def default_backend() -> str:
    return "compiled" if HAVE_COMPILED_KERNEL else "pure"


def _kernel(backend: str | None):
    if backend is None:
        backend = default_backend()
    if backend == "compiled":
        if not HAVE_COMPILED_KERNEL:
            raise ParameterError("compiled kernel requested but the extension is not built")
        return _sgns_inner, "compiled"
    if backend == "pure":
        return _sgns_pure, "pure"
    raise ParameterError(f"unknown sgns backend {backend!r}")


@dataclass(frozen=True)
class SgnsHyperparameters:
    dimension: int = 100
    window: int = 10
    negative_samples: int = 1
    epochs: int = 5
    initial_learning_rate: float = 0.025
    unigram_exponent: float = 0.75
    seed: int = 1

    def __post_init__(self):
        if self.dimension < 1:
            raise ParameterError(f"dimension must be >= 1, got {self.dimension}")
        if self.window < 1:
            raise ParameterError(f"window must be >= 1, got {self.window}")
        if self.negative_samples < 1:
            raise ParameterError(
                f"negative_samples must be >= 1, got {self.negative_samples}"
            )
        # epochs = 0 is legal: it turns training into an initialization
        # pass-through, which vector-initialization alignment relies on
        if self.epochs < 0:
            raise ParameterError(f"epochs must be >= 0, got {self.epochs}")
        if self.initial_learning_rate <= 0:
            raise ParameterError("initial_learning_rate must be positive")


def unigram_cumulative_table(vocab: Vocabulary, exponent: float) -> np.ndarray:
    """Cumulative sampling table over ``count**exponent``, scaled to a fixed
    integer domain. A draw is the first index whose entry exceeds a uniform
    integer below the domain."""
    weights = vocab.counts.astype(np.float64) ** exponent
    cumulative = np.cumsum(weights)
    if cumulative.size == 0 or cumulative[-1] <= 0:
        raise ParameterError("no sampling mass in vocabulary")
    return np.rint(cumulative / cumulative[-1] * UNIGRAM_TABLE_DOMAIN).astype(np.uint32)


def seeded_init_row(word: str, seed: int, dimension: int) -> np.ndarray:
    """Deterministic small uniform init noise in [-0.5, 0.5)/dimension.

    Keyed on the word string rather than the vocabulary id, so a word keeps
    its init vector across corpora with different vocabularies; that couples
    independently trained periods through common random numbers.
    """
    digest = hashlib.blake2b(word.encode("utf-8"), digest_size=8).digest()
    rng = np.random.default_rng([seed & _MASK64, int.from_bytes(digest, "little")])
    return (rng.random(dimension) - 0.5) / dimension


def _flatten(corpus: TokenizedCorpus, vocab: Vocabulary):
    get = vocab.word_to_id.get
    tokens = np.fromiter(
        (get(t, -1) for t in corpus.iter_tokens()),
        dtype=np.int32,
        count=corpus.token_total,
    )
    offsets = np.zeros(len(corpus.sentences) + 1, dtype=np.int64)
    np.cumsum(
        np.fromiter((len(t) for _, t in corpus.sentences), dtype=np.int64),
        out=offsets[1:],
    )
    return tokens, offsets


def train_sgns(
    corpus: TokenizedCorpus,
    vocab: Vocabulary,
    hyper: SgnsHyperparameters,
    init: VectorSpace | None = None,
    *,
    shuffle_sentences: bool = False,
    compute_objective: bool = False,
    backend: str | None = None,
) -> VectorSpace:
    """Train word and context matrices of shape (V, dimension).

    Rows for words covered by ``init`` start from the init values (context
    rows too when the init carries a context matrix); all other word rows
    start from seeded word-keyed uniform noise and context rows from zero.
    ``compute_objective`` records the mean per-pair objective of each epoch
    on the resulting space's ``epoch_objectives``.
    """
    size = len(vocab)
    if size < hyper.negative_samples + 1:
        raise ParameterError(
            f"vocabulary size {size} is smaller than negative_samples+1 "
            f"({hyper.negative_samples + 1})"
        )
    if init is not None:
        if init.space_kind != "sgns":
            raise ParameterError(f"init space must be sgns, got {init.space_kind}")
        if init.dims != hyper.dimension:
            raise ParameterError(
                f"init dimension {init.dims} != hyperparameter dimension {hyper.dimension}"
            )
        unknown = [w for w in init.row_index if w not in vocab]
        if unknown:
            raise ParameterError(
                f"{len(unknown)} init rows are not in the vocabulary "
                f"(e.g. {unknown[:3]})"
            )

    seed64 = hyper.seed & _MASK64
    w = np.empty((size, hyper.dimension))
    for word, i in vocab.word_to_id.items():
        w[i] = seeded_init_row(word, seed64, hyper.dimension)
    c = np.zeros((size, hyper.dimension))
    if init is not None:
        for word, row in init.row_index.items():
            w[vocab.word_to_id[word]] = init.matrix[row]
        if init.context_matrix is not None:
            for word, row in init.row_index.items():
                c[vocab.word_to_id[word]] = init.context_matrix[row]

    objectives: list[float] = []
    if hyper.epochs > 0 and corpus.token_total > 0:
        kernel, kernel_name = _kernel(backend)
        tokens, offsets = _flatten(corpus, vocab)
        cum_table = unigram_cumulative_table(vocab, hyper.unigram_exponent)
        floor = hyper.initial_learning_rate * LEARNING_RATE_FLOOR_FACTOR
        total_planned = float(hyper.epochs * corpus.token_total + 1)
        shuffle_rng = np.random.default_rng([seed64, 1]) if shuffle_sentences else None
        state = seed64
        tokens_done = 0
        n_sent = len(corpus.sentences)
        for epoch in range(hyper.epochs):
            if shuffle_rng is not None:
                order = shuffle_rng.permutation(n_sent).astype(np.int64)
            else:
                order = np.arange(n_sent, dtype=np.int64)
            objective, pairs, tokens_done, state = kernel.train_epoch(
                w, c, tokens, offsets, order, cum_table,
                SIGMOID_TABLE, LOG_SIGMOID_TABLE,
                hyper.window, hyper.negative_samples,
                hyper.initial_learning_rate, floor,
                total_planned, tokens_done, state, compute_objective,
            )
            if compute_objective:
                mean = objective / pairs if pairs else 0.0
                objectives.append(mean)
                log.info(
                    "sgns epoch %d/%d (%s): %d pairs, mean objective %.6f",
                    epoch + 1, hyper.epochs, kernel_name, pairs, mean,
                )
            else:
                log.info(
                    "sgns epoch %d/%d (%s): %d pairs",
                    epoch + 1, hyper.epochs, kernel_name, pairs,
                )

    row_index = {word: i for i, word in enumerate(vocab.id_to_word)}
    space = VectorSpace(row_index, w, "sgns", context_matrix=c)
    space.epoch_objectives = objectives if compute_objective else None
    return space
