"""Word vector spaces per time period.

Three space kinds: raw co-occurrence counts and their PPMI transform
(sparse, with explicit context columns) and SGNS embeddings (dense, with a
context matrix; training lives in :mod:`lscd.sgns`).
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy.sparse as sp

from .corpus import TokenizedCorpus, Vocabulary
from .errors import DegenerateDistributionError, EmptySpaceError, FormatError, ParameterError

log = logging.getLogger(__name__)

SPACE_KINDS = ("count", "ppmi", "sgns")


class VectorSpace:
    """Row-indexed word matrix.

    Sparse (CSR) for count/ppmi kinds, which also carry ``column_labels``;
    dense float64 for sgns, which may carry a same-shaped ``context_matrix``.
    """

    def __init__(self, row_index, matrix, space_kind, column_labels=None, context_matrix=None):
        if space_kind not in SPACE_KINDS:
            raise ParameterError(f"unknown space kind {space_kind!r}")
        if matrix.shape[0] != len(row_index):
            raise ParameterError(
                f"matrix has {matrix.shape[0]} rows for {len(row_index)} indexed words"
            )
        if sp.issparse(matrix):
            data = matrix.data
        else:
            matrix = np.asarray(matrix, dtype=np.float64)
            data = matrix
        if data.size and not np.all(np.isfinite(data)):
            raise ParameterError("matrix contains NaN or infinite entries")
        if space_kind == "ppmi" and data.size and data.min() < 0:
            raise ParameterError("ppmi space has negative entries")
        if space_kind in ("count", "ppmi"):
            if column_labels is None:
                raise ParameterError(f"{space_kind} space requires column labels")
            column_labels = tuple(column_labels)
            if len(column_labels) != matrix.shape[1]:
                raise ParameterError("column label count does not match matrix width")
            if len(set(column_labels)) != len(column_labels):
                raise ParameterError("duplicate column labels")
        elif column_labels is not None:
            raise ParameterError("sgns spaces carry no column labels")
        if context_matrix is not None:
            if space_kind != "sgns":
                raise ParameterError("context matrix only valid for sgns spaces")
            context_matrix = np.asarray(context_matrix, dtype=np.float64)
            if context_matrix.shape != matrix.shape:
                raise ParameterError("context matrix shape differs from word matrix")
        self.row_index: dict[str, int] = dict(row_index)
        self.matrix = matrix
        self.space_kind = space_kind
        self.column_labels = column_labels
        self.context_matrix = context_matrix
        self.epoch_objectives: list[float] | None = None

    @property
    def dims(self) -> int:
        return self.matrix.shape[1]

    @property
    def words(self) -> tuple[str, ...]:
        out = [None] * len(self.row_index)
        for w, i in self.row_index.items():
            out[i] = w
        return tuple(out)

    def __contains__(self, word: str) -> bool:
        return word in self.row_index

    def __len__(self) -> int:
        return len(self.row_index)

    def row(self, word: str) -> np.ndarray:
        """Dense row vector for ``word``."""
        i = self.row_index[word]
        if sp.issparse(self.matrix):
            return np.asarray(self.matrix[i].todense()).ravel()
        return self.matrix[i]

    def dense(self) -> np.ndarray:
        if sp.issparse(self.matrix):
            return np.asarray(self.matrix.todense())
        return self.matrix

    # --- persistence -----------------------------------------------------
    # Text format: line 1 "kind dims"; for sparse kinds line 2 lists the
    # context columns; then one "word v1 ... vd" row per word with 17
    # significant digits. Dense round-trips are exact. A context matrix is
    # stored next to the main file with suffix ".ctx".

    def save(self, path) -> None:
        path = str(path)
        with open(path, "w", encoding="utf-8") as out:
            out.write(f"{self.space_kind} {self.dims}\n")
            if self.column_labels is not None:
                out.write("#columns " + " ".join(self.column_labels) + "\n")
            dense = self.dense()
            for word in self.words:
                row = dense[self.row_index[word]]
                out.write(word + " " + " ".join(f"{v:.17g}" for v in row) + "\n")
        if self.context_matrix is not None:
            with open(path + ".ctx", "w", encoding="utf-8") as out:
                out.write(f"{self.space_kind} {self.dims}\n")
                for word in self.words:
                    row = self.context_matrix[self.row_index[word]]
                    out.write(word + " " + " ".join(f"{v:.17g}" for v in row) + "\n")

    @classmethod
    def load(cls, path) -> "VectorSpace":
        path = str(path)
        words, rows, column_labels = [], [], None
        with open(path, encoding="utf-8") as handle:
            header = handle.readline().split()
            if len(header) != 2 or header[0] not in SPACE_KINDS:
                raise FormatError(f"{path}: bad header line")
            kind, dims = header[0], int(header[1])
            for lineno, line in enumerate(handle, start=2):
                fields = line.split()
                if not fields:
                    continue
                if fields[0] == "#columns":
                    column_labels = tuple(fields[1:])
                    continue
                if len(fields) != dims + 1:
                    raise FormatError(f"{path}: line {lineno}: expected {dims} values")
                words.append(fields[0])
                rows.append([float(v) for v in fields[1:]])
        matrix = np.array(rows, dtype=np.float64).reshape(len(words), dims)
        if kind in ("count", "ppmi"):
            matrix = sp.csr_matrix(matrix)
        row_index = {w: i for i, w in enumerate(words)}
        context = None
        try:
            with open(path + ".ctx", encoding="utf-8") as handle:
                handle.readline()
                ctx_rows = {}
                for line in handle:
                    fields = line.split()
                    if fields:
                        ctx_rows[fields[0]] = [float(v) for v in fields[1:]]
            context = np.array([ctx_rows[w] for w in words], dtype=np.float64)
        except FileNotFoundError:
            pass
        return cls(row_index, matrix, kind, column_labels, context)


def _token_ids(corpus: TokenizedCorpus, vocab: Vocabulary):
    """Flatten the corpus to id arrays; out-of-vocabulary tokens become -1."""
    get = vocab.word_to_id.get
    ids = np.fromiter(
        (get(tok, -1) for tok in corpus.iter_tokens()),
        dtype=np.int64,
        count=corpus.token_total,
    )
    lengths = np.fromiter((len(t) for _, t in corpus.sentences), dtype=np.int64)
    sent_of = np.repeat(np.arange(len(lengths)), lengths)
    return ids, sent_of, lengths


def _count_pairs(ids, sent_of, window, size):
    rows, cols = [], []
    for dist in range(1, window + 1):
        if dist >= ids.size:
            break
        left, right = ids[:-dist], ids[dist:]
        mask = (sent_of[:-dist] == sent_of[dist:]) & (left >= 0) & (right >= 0)
        lm, rm = left[mask], right[mask]
        rows.append(lm)
        cols.append(rm)
        rows.append(rm)
        cols.append(lm)
    if not rows:
        return sp.csr_matrix((size, size), dtype=np.float64)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    out = sp.coo_matrix(
        (np.ones(rows.size, dtype=np.float64), (rows, cols)), shape=(size, size)
    ).tocsr()
    out.sum_duplicates()
    return out


def build_count_matrix(
    corpus: TokenizedCorpus, vocab: Vocabulary, window: int, workers: int = 1
) -> VectorSpace:
    """Symmetric co-occurrence counts within ``window`` positions, truncated
    at sentence boundaries. Rows and columns are both indexed by the
    vocabulary. Distances are measured over the raw token positions; pairs
    count only when both endpoints are in the vocabulary.

    ``workers`` splits the corpus into sentence chunks accumulated
    independently; integer addition makes the merged result exactly equal to
    the sequential one.
    """
    if len(vocab) == 0:
        raise EmptySpaceError("cannot build a count space over an empty vocabulary")
    if window < 1:
        raise ParameterError(f"window must be >= 1, got {window}")
    ids, sent_of, lengths = _token_ids(corpus, vocab)
    size = len(vocab)
    if workers <= 1 or len(lengths) < 2 * workers:
        matrix = _count_pairs(ids, sent_of, window, size)
    else:
        bounds = np.linspace(0, len(lengths), workers + 1, dtype=np.int64)
        starts = np.concatenate(([0], np.cumsum(lengths)))
        chunks = []
        for b in range(workers):
            s0, s1 = bounds[b], bounds[b + 1]
            chunks.append((ids[starts[s0] : starts[s1]], sent_of[starts[s0] : starts[s1]]))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(lambda c: _count_pairs(c[0], c[1], window, size), chunks)
            )
        matrix = parts[0]
        for part in parts[1:]:
            matrix = matrix + part
    row_index = {w: i for i, w in enumerate(vocab.id_to_word)}
    return VectorSpace(row_index, matrix, "count", column_labels=vocab.id_to_word)


def ppmi_transform(
    space: VectorSpace, shift_k: float = 1.0, context_smoothing: float = 0.75
) -> VectorSpace:
    """Positive pointwise mutual information of a count space.

    Cell (w, c) becomes ``max(0, log(P(w,c) / (P(w) * P_a(c))) - log shift_k)``
    where P(w,c) is the pair count over the total pair mass, P(w) the row
    marginal and P_a(c) the context marginal raised to ``context_smoothing``
    and renormalized. Zero-count cells stay zero.
    """
    if space.space_kind != "count":
        raise ParameterError(f"ppmi transform needs a count space, got {space.space_kind}")
    if shift_k < 1.0:
        raise ParameterError(f"shift_k must be >= 1, got {shift_k}")
    if not 0.0 < context_smoothing <= 1.0:
        raise ParameterError(f"context smoothing must lie in (0, 1], got {context_smoothing}")
    counts = space.matrix.tocoo()
    total = counts.data.sum()
    if total == 0:
        raise DegenerateDistributionError("all-zero count matrix")
    row_sums = np.asarray(space.matrix.sum(axis=1)).ravel()
    col_sums = np.asarray(space.matrix.sum(axis=0)).ravel()
    col_alpha = col_sums**context_smoothing
    col_p = col_alpha / col_alpha.sum()
    p_wc = counts.data / total
    p_w = row_sums[counts.row] / total
    pmi = np.log(p_wc / (p_w * col_p[counts.col])) - math.log(shift_k)
    data = np.maximum(0.0, pmi)
    out = sp.coo_matrix((data, (counts.row, counts.col)), shape=counts.shape).tocsr()
    out.eliminate_zeros()
    return VectorSpace(dict(space.row_index), out, "ppmi", column_labels=space.column_labels)


def tfidf_select_contexts(
    corpus: TokenizedCorpus, vocab: Vocabulary, top_n: int
) -> dict[str, frozenset[str]]:
    """Pick each word's ``top_n`` most relevant context words by tf-idf.

    Documents are year-slices (all sentences of one year). The term
    frequency of context c for word w is the number of same-sentence
    co-occurrences; idf is ``log(D / df(c))`` over the year documents.
    Ranking key: tf-idf desc, then tf desc, then lexicographic, so a word
    occurring in every document (idf 0) never beats a positive-idf context
    and a single-document corpus degrades to term-frequency order.
    """
    if top_n < 1:
        raise ParameterError(f"top_n must be >= 1, got {top_n}")
    in_vocab = vocab.word_to_id.__contains__
    doc_words: dict[int, set[str]] = {}
    profiles: dict[str, Counter[str]] = {w: Counter() for w in vocab.id_to_word}
    for year, tokens in corpus.sentences:
        kept = [t for t in tokens if in_vocab(t)]
        if not kept:
            continue
        doc_words.setdefault(year, set()).update(kept)
        sent_counts = Counter(kept)
        for w, n_w in sent_counts.items():
            profile = profiles[w]
            for c, n_c in sent_counts.items():
                profile[c] += n_w * n_c if c != w else n_w * (n_w - 1)
    n_docs = len(doc_words)
    df: Counter[str] = Counter()
    for words in doc_words.values():
        df.update(words)
    idf = {c: math.log(n_docs / df[c]) for c in df}
    selection = {}
    for w, profile in profiles.items():
        scored = sorted(
            ((tf * idf[c], tf, c) for c, tf in profile.items() if tf > 0),
            key=lambda t: (-t[0], -t[1], t[2]),
        )
        selection[w] = frozenset(c for _, _, c in scored[:top_n])
    return selection


def apply_context_selection(
    space: VectorSpace, selection: dict[str, frozenset[str]]
) -> VectorSpace:
    """Zero out count cells whose context column was not selected for the
    row word. Rows without a selection entry keep all their contexts."""
    if space.space_kind not in ("count", "ppmi"):
        raise ParameterError("context selection applies to sparse spaces")
    col_of = {c: j for j, c in enumerate(space.column_labels)}
    masked = space.matrix.tolil(copy=True)
    for word, i in space.row_index.items():
        if word not in selection:
            continue
        allowed = {col_of[c] for c in selection[word] if c in col_of}
        row_cols = masked.rows[i]
        keep = [(j, v) for j, v in zip(row_cols, masked.data[i]) if j in allowed]
        masked.rows[i] = [j for j, _ in keep]
        masked.data[i] = [v for _, v in keep]
    return VectorSpace(
        dict(space.row_index), masked.tocsr(), space.space_kind, space.column_labels
    )


def binarize(space: VectorSpace, threshold: str = "column_mean") -> VectorSpace:
    """Map each entry to 1 if it exceeds its column's threshold, else 0.

    ``column_mean`` thresholds at the per-column mean over all rows, which
    keeps the step meaningful for the roughly zero-centered sgns entries and
    the non-negative count/ppmi entries alike; ``zero`` thresholds at 0.
    The space kind is preserved; a context matrix is dropped.
    """
    if threshold not in ("column_mean", "zero"):
        raise ParameterError(f"unknown binarize threshold {threshold!r}")
    if sp.issparse(space.matrix):
        matrix = space.matrix.tocsr(copy=True)
        if threshold == "column_mean":
            # column means over all rows are >= 0, so implicit zeros stay 0
            means = np.asarray(space.matrix.sum(axis=0)).ravel() / space.matrix.shape[0]
            matrix.data = (matrix.data > means[matrix.indices]).astype(np.float64)
        else:
            matrix.data = (matrix.data > 0).astype(np.float64)
        matrix.eliminate_zeros()
    else:
        cutoff = space.matrix.mean(axis=0) if threshold == "column_mean" else 0.0
        matrix = (space.matrix > cutoff).astype(np.float64)
    return VectorSpace(dict(space.row_index), matrix, space.space_kind, space.column_labels)
