"""Binary Context Tree Weighting probability assignment and entropy rate.

The tree mixes, exactly and in O(n*D) time, the Bayesian posterior over
every binary suffix-set source of depth <= D, with Krichevsky-Trofimov
(Dirichlet(1/2,1/2)) estimators at the leaves.  All probabilities are kept
in the log2 domain; products over tens of thousands of bits underflow any
linear-domain representation.

Multi-symbol sequences are handled by fixed-width binary expansion (MSB
first) and the per-bit entropy is scaled back to bits per symbol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .series import EntropyEstimate, SymbolSequence

__all__ = [
    "CtwParams",
    "CtwResult",
    "ContextTree",
    "symbols_to_bits",
    "kt_log_probability",
    "ctw_log_mixture",
    "ctw_entropy_rate",
    "DEFAULT_DEPTH",
]

DEFAULT_DEPTH = 20  # bits; 10 four-state symbols of context

_LN2 = math.log(2.0)
_LGAMMA_HALF = math.lgamma(0.5)


@dataclass(frozen=True)
class CtwParams:
    depth_D: int
    bits_per_symbol: int = 1

    def __post_init__(self) -> None:
        if self.depth_D < 0 or self.depth_D > 48:
            raise ValueError(f"depth_D must be in [0, 48], got {self.depth_D}")
        if self.bits_per_symbol < 1:
            raise ValueError("bits_per_symbol must be >= 1")


@dataclass(frozen=True)
class CtwResult:
    log2_mixture_probability: float
    n_bits: int
    entropy_bits_per_symbol: float
    node_count: int


def symbols_to_bits(seq: SymbolSequence) -> list[int]:
    """Expand each symbol to ceil(log2 A) bits, most-significant first."""
    a = seq.alphabet_size
    if a & (a - 1) != 0:
        raise ValueError(
            f"alphabet size {a} is not a power of two; re-discretize into a "
            "power-of-two number of states before CTW estimation"
        )
    width = a.bit_length() - 1
    bits: list[int] = []
    for s in seq.symbols:
        for shift in range(width - 1, -1, -1):
            bits.append((s >> shift) & 1)
    return bits


def kt_log_probability(count_zero: int, count_one: int) -> float:
    """log2 of the KT block probability for (a zeros, b ones).

    Closed form of the sequential product of (c + 1/2)/(a + b + 1) updates:
    Gamma(a+1/2)Gamma(b+1/2) / (pi * Gamma(a+b+1)).
    """
    if count_zero < 0 or count_one < 0:
        raise ValueError("counts must be nonnegative")
    if count_zero == 0 and count_one == 0:
        return 0.0
    ln = (
        math.lgamma(count_zero + 0.5)
        + math.lgamma(count_one + 0.5)
        - math.lgamma(count_zero + count_one + 1)
        - 2.0 * _LGAMMA_HALF
    )
    return ln / _LN2


def _log2_avg(x: float, y: float) -> float:
    """log2((2^x + 2^y) / 2), numerically stable."""
    if x < y:
        x, y = y, x
    return x - 1.0 + math.log1p(2.0 ** (y - x)) / _LN2


class _Node:
    __slots__ = ("a", "b", "log_pe", "log_pw", "children")

    def __init__(self) -> None:
        self.a = 0
        self.b = 0
        self.log_pe = 0.0
        self.log_pw = 0.0
        self.children: list[_Node | None] = [None, None]


class ContextTree:
    """Sequential CTW updater for one bit stream; not safe to share."""

    def __init__(self, depth: int):
        self.depth = depth
        self.root = _Node()
        self.node_count = 1

    def update(self, bit: int, context: list[int]) -> None:
        """Feed one bit whose preceding bits (most recent first) are ``context``."""
        path = [self.root]
        node = self.root
        for d in range(self.depth):
            c = context[d]
            child = node.children[c]
            if child is None:
                child = _Node()
                node.children[c] = child
                self.node_count += 1
            path.append(child)
            node = child
        # KT update at every node on the path, then re-weight bottom-up
        for node in path:
            count = node.a if bit == 0 else node.b
            node.log_pe += math.log2((count + 0.5) / (node.a + node.b + 1.0))
            if bit == 0:
                node.a += 1
            else:
                node.b += 1
        for node in reversed(path):
            if node is path[-1]:
                node.log_pw = node.log_pe
            else:
                child_sum = sum(c.log_pw for c in node.children if c is not None)
                node.log_pw = _log2_avg(node.log_pe, child_sum)

    @property
    def log2_probability(self) -> float:
        return self.root.log_pw


def ctw_log_mixture(bits: list[int], params: CtwParams) -> CtwResult:
    """Exact log2 mixture probability of ``bits`` under the depth-D prior.

    The D bits of context before the first input bit are taken as copies of
    the first input bit, so all n bits contribute to the estimate (no
    burn-in discard) and complementing the input leaves the probability
    unchanged.
    """
    n = len(bits)
    if n == 0:
        raise ValueError("empty bit sequence")
    depth = params.depth_D
    tree = ContextTree(depth)
    history = [bits[0]] * depth  # most recent first
    for bit in bits:
        tree.update(bit, history)
        if depth > 0:
            history.pop()
            history.insert(0, bit)
    log_p = tree.log2_probability
    entropy_per_bit = -log_p / n
    return CtwResult(
        log2_mixture_probability=log_p,
        n_bits=n,
        entropy_bits_per_symbol=entropy_per_bit * params.bits_per_symbol,
        node_count=tree.node_count,
    )


def ctw_entropy_rate(seq: SymbolSequence, depth_D: int = DEFAULT_DEPTH) -> EntropyEstimate:
    """CTW entropy-rate estimate in bits per symbol."""
    if len(seq) < 2:
        raise ValueError("need at least 2 symbols")
    width = seq.alphabet_size.bit_length() - 1
    bits = symbols_to_bits(seq)
    result = ctw_log_mixture(bits, CtwParams(depth_D=depth_D, bits_per_symbol=width))
    return EntropyEstimate(
        bits_per_symbol=result.entropy_bits_per_symbol,
        estimator="ctw",
        sample_size=len(seq),
        params={"depth_D": depth_D, "alphabet_size": seq.alphabet_size},
    )
