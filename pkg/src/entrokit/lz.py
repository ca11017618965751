"""Lempel-Ziv complexity and the match-length entropy-rate estimator.

Two distinct quantities live here:

* ``lz76_complexity`` counts distinct phrases in a left-to-right
  incremental parse (each phrase is the shortest word not seen as an
  earlier phrase).
* ``lz_entropy_rate`` is the match-length estimator
  n*log2(n) / sum(Lambda_i), where Lambda_i is the length of the shortest
  substring starting at position i that does not occur anywhere inside the
  prefix before i.
"""

from __future__ import annotations

from dataclasses import dataclass

import math

from .series import EntropyEstimate, SymbolSequence

__all__ = ["LzParse", "MatchLengths", "lz76_complexity", "match_lengths", "lz_entropy_rate"]


@dataclass(frozen=True)
class LzParse:
    phrases: tuple[tuple[int, int], ...]  # (start index, length)
    complexity: int


@dataclass(frozen=True)
class MatchLengths:
    lambdas: tuple[int, ...]
    n: int


def lz76_complexity(seq: SymbolSequence) -> LzParse:
    """Count distinct phrases in a left-to-right incremental parse.

    Each phrase is grown one symbol at a time until it differs from every
    previously recorded phrase.  A final phrase that repeats an earlier one
    (because the input ended) still counts as one phrase.
    """
    syms = seq.symbols
    n = len(syms)
    if n == 0:
        raise ValueError("empty sequence")
    seen: set[tuple[int, ...]] = set()
    phrases: list[tuple[int, int]] = []
    start = 0
    while start < n:
        length = 1
        while tuple(syms[start : start + length]) in seen and start + length < n:
            length += 1
        phrase = tuple(syms[start : start + length])
        seen.add(phrase)
        phrases.append((start, length))
        start += length
    return LzParse(phrases=tuple(phrases), complexity=len(phrases))


def _to_text(seq: SymbolSequence) -> str:
    # chr offset keeps this valid for any alphabet the toolkit produces
    return "".join(chr(48 + s) for s in seq.symbols)


def match_lengths(seq: SymbolSequence) -> MatchLengths:
    """Shortest-unseen-substring lengths Lambda_i for every position.

    Lambda_i = L_i + 1 where L_i is the length of the longest prefix of
    seq[i:] occurring (entirely) inside seq[:i].  When every substring that
    fits in the remaining input has been seen, this evaluates to
    (remaining length) + 1, i.e. longest match plus one as if one more
    symbol were available.
    """
    n = len(seq)
    if n == 0:
        raise ValueError("empty sequence")
    text = _to_text(seq)
    lambdas: list[int] = []
    for i in range(n):
        # longest L in [0, n-i] with text[i:i+L] contained in text[:i];
        # containment is monotone in L, so bisect
        lo, hi = 0, n - i
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if text.find(text[i : i + mid], 0, i) != -1:
                lo = mid
            else:
                hi = mid - 1
        lambdas.append(lo + 1)
    return MatchLengths(lambdas=tuple(lambdas), n=n)


def lz_entropy_rate(seq: SymbolSequence) -> EntropyEstimate:
    """Match-length estimate n*log2(n) / sum(Lambda_i), in bits per symbol."""
    n = len(seq)
    if n < 2:
        raise ValueError("need at least 2 symbols")
    ml = match_lengths(seq)
    estimate = n * math.log2(n) / sum(ml.lambdas)
    return EntropyEstimate(
        bits_per_symbol=estimate,
        estimator="lz",
        sample_size=n,
        params={"alphabet_size": seq.alphabet_size},
    )
