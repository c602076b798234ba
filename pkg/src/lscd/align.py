"""Placing two period spaces into a comparable coordinate system.

Five routes: column intersection for sparse spaces, orthogonal Procrustes
(plain, anchored, noise-aware) for embeddings, vector initialization (the
second period trains from the first period's model), word injection (one
joint space over the merged corpora with period-marked targets), and KNN
second-order vectors, which need no matrix alignment at all.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .corpus import TokenizedCorpus, Vocabulary
from .errors import (
    AlignmentError,
    MissingWordError,
    NumericalError,
    ParameterError,
    UndefinedDistanceError,
)
from .sgns import SgnsHyperparameters, train_sgns
from .spaces import VectorSpace

log = logging.getLogger(__name__)

ORTHOGONALITY_TOLERANCE = 1e-10
MARK_SUFFIX = "_"


@dataclass
class AlignedPair:
    """Two spaces sharing a coordinate system, plus their common row words."""

    space_a: VectorSpace
    space_b: VectorSpace
    shared_rows: tuple[str, ...]
    method_tag: str  # CI | OP | VI | WI | KNN
    report: dict | None = None

    def __post_init__(self):
        if self.space_a.dims != self.space_b.dims:
            raise AlignmentError("aligned spaces must share dimensionality")
        if not self.shared_rows:
            raise AlignmentError("aligned pair has no shared rows")


@dataclass(frozen=True)
class OpOptions:
    """Options for orthogonal Procrustes fitting.

    ``mean_center`` and ``length_normalize`` apply to the anchor rows before
    fitting only; the fitted rotation is then applied to raw rows.
    ``anchor_policy`` is one of all_shared, top_frequency (ranked by the
    minimum of the two period counts) or word_list.
    """

    mean_center: bool = True
    length_normalize: bool = True
    anchor_policy: str = "all_shared"
    anchor_top_n: int = 5000
    anchor_word_path: str | None = None
    noise_aware: bool = False
    noise_drop_fraction: float = 0.15
    noise_max_rounds: int = 5


def column_intersection(a: VectorSpace, b: VectorSpace) -> AlignedPair:
    """Restrict both sparse spaces to their shared context columns, in
    lexicographic column order. Rows are untouched."""
    if a.column_labels is None or b.column_labels is None:
        raise ParameterError("column intersection needs spaces with explicit context columns")
    shared_cols = sorted(set(a.column_labels) & set(b.column_labels))
    if not shared_cols:
        raise AlignmentError("the two spaces share no context columns")

    def restrict(space: VectorSpace) -> VectorSpace:
        col_of = {label: j for j, label in enumerate(space.column_labels)}
        idx = np.array([col_of[label] for label in shared_cols], dtype=np.int64)
        matrix = space.matrix.tocsc()[:, idx].tocsr()
        return VectorSpace(dict(space.row_index), matrix, space.space_kind, tuple(shared_cols))

    shared_rows = tuple(sorted(set(a.row_index) & set(b.row_index)))
    if not shared_rows:
        raise AlignmentError("the two spaces share no row words")
    return AlignedPair(restrict(a), restrict(b), shared_rows, "CI")


def _read_word_list(path) -> list[str]:
    with open(path, encoding="utf-8") as handle:
        return list(dict.fromkeys(line.strip() for line in handle if line.strip()))


def _select_anchors(
    shared: tuple[str, ...],
    opts: OpOptions,
    vocab_a: Vocabulary | None,
    vocab_b: Vocabulary | None,
) -> list[str]:
    if opts.anchor_policy == "all_shared":
        return list(shared)
    if opts.anchor_policy == "top_frequency":
        if vocab_a is None or vocab_b is None:
            raise ParameterError("top_frequency anchor policy needs both vocabularies")
        if opts.anchor_top_n < 1:
            raise ParameterError("anchor_top_n must be >= 1")
        ranked = sorted(shared, key=lambda w: (-min(vocab_a.count(w), vocab_b.count(w)), w))
        return ranked[: opts.anchor_top_n]
    if opts.anchor_policy == "word_list":
        if not opts.anchor_word_path:
            raise ParameterError("word_list anchor policy needs anchor_word_path")
        wanted = _read_word_list(opts.anchor_word_path)
        shared_set = set(shared)
        anchors = [w for w in wanted if w in shared_set]
        if len(anchors) < len(wanted):
            log.info(
                "%d of %d anchor-list words are not shared by both spaces",
                len(wanted) - len(anchors), len(wanted),
            )
        return anchors
    raise ParameterError(f"unknown anchor policy {opts.anchor_policy!r}")


def _prepare_anchor_rows(matrix: np.ndarray, opts: OpOptions) -> np.ndarray:
    m = matrix.astype(np.float64, copy=True)
    if opts.length_normalize:
        norms = np.linalg.norm(m, axis=1, keepdims=True)
        nonzero = norms[:, 0] > 0
        m[nonzero] /= norms[nonzero]
    if opts.mean_center:
        m -= m.mean(axis=0, keepdims=True)
    return m


def orthogonal_procrustes(
    a: VectorSpace,
    b: VectorSpace,
    opts: OpOptions = OpOptions(),
    *,
    vocab_a: Vocabulary | None = None,
    vocab_b: Vocabulary | None = None,
) -> AlignedPair:
    """Rotate space ``a`` onto space ``b``.

    Fits the orthogonal Q minimizing ||A_anchor Q - B_anchor||_F via SVD of
    ``A_anchor^T B_anchor`` and applies Q to all rows of ``a`` (and to its
    context matrix, when present). With ``noise_aware`` the fit repeats:
    rank anchors by residual row norm, drop the worst ``noise_drop_fraction``,
    refit, until ``noise_max_rounds`` or the anchor set is stable.
    """
    if a.space_kind != "sgns" or b.space_kind != "sgns":
        raise ParameterError(
            "orthogonal alignment expects dense sgns spaces; intersect sparse "
            "spaces by columns instead"
        )
    if a.dims != b.dims:
        raise ParameterError(f"dimensionality differs: {a.dims} vs {b.dims}")
    shared = tuple(sorted(set(a.row_index) & set(b.row_index)))
    if not shared:
        raise AlignmentError("the two spaces share no words to anchor on")
    anchors = _select_anchors(shared, opts, vocab_a, vocab_b)
    if not anchors:
        raise AlignmentError("anchor set is empty after filtering")
    if len(anchors) < a.dims:
        log.warning(
            "only %d anchors for %d dimensions; the fit is underdetermined",
            len(anchors), a.dims,
        )
    if opts.noise_aware:
        if not 0.0 < opts.noise_drop_fraction < 0.5:
            raise ParameterError("noise_drop_fraction must lie in (0, 0.5)")
        if opts.noise_max_rounds < 1:
            raise ParameterError("noise_max_rounds must be >= 1")

    mat_a, mat_b = a.matrix, b.matrix

    def fit(words: list[str]):
        fit_a = _prepare_anchor_rows(mat_a[[a.row_index[w] for w in words]], opts)
        fit_b = _prepare_anchor_rows(mat_b[[b.row_index[w] for w in words]], opts)
        u, _, vt = np.linalg.svd(fit_a.T @ fit_b)
        q = u @ vt
        residuals = np.linalg.norm(fit_a @ q - fit_b, axis=1)
        return q, residuals

    current = list(anchors)
    q, residuals = fit(current)
    rounds = [{"anchors": len(current), "residual": float(np.linalg.norm(residuals))}]
    log.info("op\tround=1\tanchors=%d\tresidual=%.6g", len(current), rounds[-1]["residual"])
    if opts.noise_aware:
        for round_no in range(2, opts.noise_max_rounds + 2):
            n_drop = int(opts.noise_drop_fraction * len(current))
            if n_drop == 0 or n_drop >= len(current):
                break
            worst = set(np.argsort(-residuals, kind="stable")[:n_drop].tolist())
            current = [w for i, w in enumerate(current) if i not in worst]
            q, residuals = fit(current)
            rounds.append({"anchors": len(current), "residual": float(np.linalg.norm(residuals))})
            log.info(
                "op\tround=%d\tanchors=%d\tresidual=%.6g",
                round_no, len(current), rounds[-1]["residual"],
            )

    defect = float(np.abs(q.T @ q - np.eye(a.dims)).max())
    if defect >= ORTHOGONALITY_TOLERANCE:
        raise NumericalError(f"fitted transform is not orthogonal (defect {defect:.3e})")
    rotated = VectorSpace(
        dict(a.row_index),
        mat_a @ q,
        "sgns",
        context_matrix=a.context_matrix @ q if a.context_matrix is not None else None,
    )
    report = {
        "method": "OP",
        "anchor_policy": opts.anchor_policy,
        "anchor_count": len(current),
        "rounds": rounds,
        "orthogonality_defect": defect,
    }
    return AlignedPair(rotated, b, shared, "OP", report)


def vector_initialization_align(
    corpus_b: TokenizedCorpus,
    model_a: VectorSpace,
    vocab_b: Vocabulary,
    hyper: SgnsHyperparameters,
    mode: str = "word_only",
    *,
    shuffle_sentences: bool = False,
    compute_objective: bool = False,
    backend: str | None = None,
) -> AlignedPair:
    """Train the second period's space starting from the first period's
    vectors, which leaves the pair coordinate-compatible by construction.

    ``word_only`` seeds only the word matrix; ``full_model`` seeds word and
    context matrices and requires ``model_a`` to carry a context matrix.
    """
    if model_a.space_kind != "sgns":
        raise ParameterError("vector initialization needs an sgns model for period a")
    if mode not in ("word_only", "full_model"):
        raise ParameterError(f"unknown vector-initialization mode {mode!r}")
    if mode == "full_model" and model_a.context_matrix is None:
        raise ParameterError("full_model initialization needs a context matrix on model_a")
    if model_a.dims != hyper.dimension:
        raise ParameterError(
            f"model_a dimension {model_a.dims} != hyperparameter dimension {hyper.dimension}"
        )
    covered = sorted(w for w in model_a.row_index if w in vocab_b)
    rows = [model_a.row_index[w] for w in covered]
    init = VectorSpace(
        {w: i for i, w in enumerate(covered)},
        model_a.matrix[rows].copy(),
        "sgns",
        context_matrix=(
            model_a.context_matrix[rows].copy() if mode == "full_model" else None
        ),
    )
    space_b = train_sgns(
        corpus_b,
        vocab_b,
        hyper,
        init=init,
        shuffle_sentences=shuffle_sentences,
        compute_objective=compute_objective,
        backend=backend,
    )
    shared = tuple(sorted(set(model_a.row_index) & set(space_b.row_index)))
    return AlignedPair(model_a, space_b, shared, "VI", {"mode": mode})


def word_injection_merge(
    corpus_a: TokenizedCorpus,
    corpus_b: TokenizedCorpus,
    targets,
    *,
    mark: str = "b",
    suffix: str = MARK_SUFFIX,
) -> TokenizedCorpus:
    """Concatenate both corpora, rewriting every target occurrence in the
    marked corpus to its suffixed twin, so one joint space holds both period
    variants of each target."""
    targets = set(targets)
    if not targets:
        raise ParameterError("word injection needs a non-empty target set")
    if mark not in ("a", "b"):
        raise ParameterError(f"mark must be 'a' or 'b', got {mark!r}")
    marked = {w: w + suffix for w in targets}
    for word, twin in marked.items():
        if corpus_a.count(twin) or corpus_b.count(twin):
            raise ParameterError(
                f"marked token {twin!r} already occurs in a corpus; "
                "choose a different suffix"
            )

    def rewrite(sentences):
        for year, tokens in sentences:
            yield year, tuple(marked.get(t, t) for t in tokens)

    if mark == "b":
        sentences = list(corpus_a.sentences) + list(rewrite(corpus_b.sentences))
    else:
        sentences = list(rewrite(corpus_a.sentences)) + list(corpus_b.sentences)
    lo = min(corpus_a.year_range[0], corpus_b.year_range[0])
    hi = max(corpus_a.year_range[1], corpus_b.year_range[1])
    label = f"{corpus_a.period_label}+{corpus_b.period_label}"
    return TokenizedCorpus(label, (lo, hi), sentences)


def word_injection_pair(
    space: VectorSpace, targets, *, suffix: str = MARK_SUFFIX
) -> AlignedPair:
    """View a joint word-injection space as an aligned pair: side a maps each
    target to its plain row, side b to its suffixed row."""
    targets = sorted(set(targets))
    present = [w for w in targets if w in space.row_index and (w + suffix) in space.row_index]
    if not present:
        raise AlignmentError("no target has both period variants in the joint space")

    def view(words_to_rows):
        idx = {w: i for i, (w, _) in enumerate(words_to_rows)}
        rows = [r for _, r in words_to_rows]
        matrix = space.matrix[rows]
        return VectorSpace(idx, matrix, space.space_kind, space.column_labels)

    side_a = view([(w, space.row_index[w]) for w in present])
    side_b = view([(w, space.row_index[w + suffix]) for w in present])
    return AlignedPair(side_a, side_b, tuple(present), "WI")


def knn_local_neighborhood(
    a: VectorSpace, b: VectorSpace, word: str, k: int
) -> tuple[np.ndarray, np.ndarray]:
    """Second-order similarity vectors of ``word`` against the union of its
    k nearest neighbors in each space, in identical (lexicographic) member
    order. Works across unaligned spaces of any kind."""
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    if word not in a.row_index or word not in b.row_index:
        raise MissingWordError(f"{word!r} is not present in both spaces")
    shared = sorted(set(a.row_index) & set(b.row_index))

    def similarities(space: VectorSpace):
        own = space.row(word)
        own_norm = np.linalg.norm(own)
        if own_norm == 0:
            raise UndefinedDistanceError(f"{word!r} has a zero vector")
        sims = {}
        for other in shared:
            if other == word:
                continue
            vec = space.row(other)
            norm = np.linalg.norm(vec)
            if norm == 0:
                continue  # zero rows can be neither neighbors nor members
            sims[other] = float(np.dot(own, vec) / (own_norm * norm))
        return sims

    sims_a = similarities(a)
    sims_b = similarities(b)
    candidates = sorted(set(sims_a) & set(sims_b))
    if not candidates:
        raise AlignmentError(f"{word!r} has no usable shared neighbors")
    top_a = sorted(candidates, key=lambda w: (-sims_a[w], w))[:k]
    top_b = sorted(candidates, key=lambda w: (-sims_b[w], w))[:k]
    members = sorted(set(top_a) | set(top_b))
    vec_a = np.array([sims_a[m] for m in members])
    vec_b = np.array([sims_b[m] for m in members])
    return vec_a, vec_b
