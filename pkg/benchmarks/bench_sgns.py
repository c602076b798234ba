#!/usr/bin/env python3
"""Benchmark the compiled SGNS kernel against the pure numpy fallback.

Trains one epoch over a synthetic corpus with each backend and reports
tokens/second, the speedup, and the largest deviation between the two
resulting models (they share RNG, update order and sigmoid tables, so any
difference is last-ulp dot-product rounding).

Usage: python benchmarks/bench_sgns.py [--tokens 200000] [--dim 100]
"""

import argparse
import time

import numpy as np

from lscd import (
    HAVE_COMPILED_KERNEL,
    SgnsHyperparameters,
    TokenizedCorpus,
    build_vocabulary,
    train_sgns,
)


def synthetic_corpus(n_tokens: int, vocab_size: int = 2000, sentence_len: int = 20,
                     seed: int = 0) -> TokenizedCorpus:
    rng = np.random.default_rng(seed)
    weights = 1.0 / np.arange(1, vocab_size + 1)  # Zipf-ish unigram shape
    weights /= weights.sum()
    words = [f"w{i}" for i in range(vocab_size)]
    sentences = []
    for _ in range(n_tokens // sentence_len):
        ids = rng.choice(vocab_size, size=sentence_len, p=weights)
        sentences.append((1760, [words[i] for i in ids]))
    return TokenizedCorpus("bench", (1750, 1799), sentences)


def run(backend: str, corpus, vocab, hyper) -> tuple[float, object]:
    start = time.perf_counter()
    space = train_sgns(corpus, vocab, hyper, backend=backend)
    return time.perf_counter() - start, space


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tokens", type=int, default=200_000)
    parser.add_argument("--dim", type=int, default=100)
    parser.add_argument("--window", type=int, default=10)
    parser.add_argument("--negative", type=int, default=1)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    corpus = synthetic_corpus(args.tokens, seed=args.seed)
    vocab = build_vocabulary(corpus, 1)
    hyper = SgnsHyperparameters(
        dimension=args.dim, window=args.window, negative_samples=args.negative,
        epochs=1, seed=args.seed,
    )
    print(f"corpus: {corpus.token_total} tokens, vocabulary {len(vocab)}, "
          f"dim {args.dim}, window {args.window}, negatives {args.negative}")

    t_pure, space_pure = run("pure", corpus, vocab, hyper)
    print(f"pure:     {t_pure:8.2f} s   {corpus.token_total / t_pure:10.0f} tokens/s")

    if not HAVE_COMPILED_KERNEL:
        print("compiled: extension not built (pip install -e . --no-build-isolation)")
        return

    t_comp, space_comp = run("compiled", corpus, vocab, hyper)
    print(f"compiled: {t_comp:8.2f} s   {corpus.token_total / t_comp:10.0f} tokens/s")
    print(f"speedup:  {t_pure / t_comp:.1f}x")
    dev_w = float(np.abs(space_pure.matrix - space_comp.matrix).max())
    dev_c = float(np.abs(space_pure.context_matrix - space_comp.context_matrix).max())
    print(f"max |word matrix deviation|:    {dev_w:.3e}")
    print(f"max |context matrix deviation|: {dev_c:.3e}")


if __name__ == "__main__":
    main()
