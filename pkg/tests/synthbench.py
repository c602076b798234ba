"""Synthetic change benchmark: two desk-scale corpora with injected,
graded context change.

Every target word gets a private context topic and a paired donor word
with its own topic. Corpus B starts as a copy of corpus A; for a target
with change degree gamma, the target and donor tokens are exchanged in the
first ``round(gamma * n)`` of their sentences, so the target inherits the
donor's contexts there (and vice versa) while every word count and context
marginal stays exactly preserved. Five "changed" targets get large gammas;
the fifteen near-stable targets get small graded gammas, because a gold
ranking with a 15-way tie caps the Spearman score of any system producing
distinct values at about .76, below what good pipelines should demonstrate.
Target token counts in corpus B additionally get a tiny uncorrelated
occurrence jitter so a frequency-only baseline has signal to rank on.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

SEED = 42
N_TARGETS = 20
N_CHANGED = 5
SENTENCES_PER_WORD = 120
SENTENCE_LEN = 10
TOPIC_SIZE = 25
FILLER_VOCAB = 50
FILLER_SENTENCES = 200
CHANGED_GAMMAS = (1.0, 0.9, 0.8, 0.7, 0.6)
STABLE_MAX_GAMMA = 0.30


@dataclass(frozen=True)
class Benchmark:
    corpus_a: Path
    corpus_b: Path
    targets_path: Path
    gold_path: Path
    targets: tuple[str, ...]
    gold: dict[str, float]


def _write_corpus(path: Path, years, sentences) -> None:
    with open(path, "w", encoding="utf-8") as out:
        for year, tokens in zip(years, sentences):
            out.write(f"{year}\t{' '.join(tokens)}\n")


def build_benchmark(root: Path, seed: int = SEED) -> Benchmark:
    rng = np.random.default_rng(seed)
    n_stable = N_TARGETS - N_CHANGED
    targets = [f"w{i:02d}" for i in range(N_TARGETS)]
    donors = [f"d{i:02d}" for i in range(N_TARGETS)]
    topics = {
        w: [f"c{i:02d}x{j:02d}" for j in range(TOPIC_SIZE)]
        for i, w in enumerate(targets + donors)
    }
    fillers = [f"g{k:02d}" for k in range(FILLER_VOCAB)]
    gammas = list(CHANGED_GAMMAS) + list(np.linspace(STABLE_MAX_GAMMA, 0.0, n_stable))
    gold = dict(zip(targets, (float(g) for g in gammas)))

    sentences_a: list[list[str]] = []
    for center in targets + donors:
        for _ in range(SENTENCES_PER_WORD):
            ctx = rng.choice(topics[center], size=SENTENCE_LEN - 1).tolist()
            pos = int(rng.integers(0, SENTENCE_LEN))
            sentences_a.append(ctx[:pos] + [center] + ctx[pos:])
    for _ in range(FILLER_SENTENCES):
        sentences_a.append(rng.choice(fillers, size=SENTENCE_LEN).tolist())
    order = rng.permutation(len(sentences_a))
    sentences_a = [sentences_a[i] for i in order]

    position_of: dict[str, list[int]] = {w: [] for w in targets + donors}
    for idx, sent in enumerate(sentences_a):
        for token in sent:
            if token in position_of:
                position_of[token].append(idx)
                break

    sentences_b = [list(sent) for sent in sentences_a]
    for i, target in enumerate(targets):
        donor = donors[i]
        swaps = round(gammas[i] * SENTENCES_PER_WORD)
        for k in range(swaps):
            si, sj = position_of[target][k], position_of[donor][k]
            sentences_b[si][sentences_b[si].index(target)] = donor
            sentences_b[sj][sentences_b[sj].index(donor)] = target

    # occurrence jitter so the frequency baseline is well-defined but
    # uncorrelated with the injected change
    extras = rng.integers(0, 6, size=N_TARGETS)
    for i, target in enumerate(targets):
        for _ in range(int(extras[i])):
            sentences_b.append([target, fillers[int(rng.integers(0, FILLER_VOCAB))]])

    years_a = rng.integers(1750, 1800, size=len(sentences_a)).tolist()
    years_b = rng.integers(1850, 1900, size=len(sentences_b)).tolist()

    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    corpus_a = root / "corpus_a.txt"
    corpus_b = root / "corpus_b.txt"
    targets_path = root / "targets.txt"
    gold_path = root / "gold.tsv"
    _write_corpus(corpus_a, years_a, sentences_a)
    _write_corpus(corpus_b, years_b, sentences_b)
    targets_path.write_text("".join(f"{w}\n" for w in targets), encoding="utf-8")
    gold_path.write_text(
        "".join(f"{w}\t{score:.6f}\n" for w, score in gold.items()), encoding="utf-8"
    )
    return Benchmark(corpus_a, corpus_b, targets_path, gold_path, tuple(targets), gold)
