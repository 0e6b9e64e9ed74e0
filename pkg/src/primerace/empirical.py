"""Sieve-based ground truth at small x: exact prime counts per residue
class, the normalized error term, and logarithmic-density estimates of
ordering sets.  A sanity harness for the analytic densities, not a
measurement tool (convergence of the race densities is far too slow).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .characters import euler_phi, reduced_residues
from .errors import RangeError, ResourceLimitError

_SEGMENT = 1 << 24
_MAX_X = 10 ** 9


def _primes_up_to(X: int) -> np.ndarray:
    """Segmented sieve of Eratosthenes, ascending primes <= X."""
    if X < 2:
        return np.empty(0, dtype=np.int64)
    root = int(math.isqrt(X))
    base = np.ones(root + 1, dtype=bool)
    base[:2] = False
    for p in range(2, int(math.isqrt(root)) + 1):
        if base[p]:
            base[p * p::p] = False
    small = np.nonzero(base)[0]
    chunks = [small]
    lo = root + 1
    while lo <= X:
        hi = min(lo + _SEGMENT, X + 1)
        seg = np.ones(hi - lo, dtype=bool)
        for p in small:
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start >= hi:
                continue
            seg[start - lo::p] = False
        chunks.append(np.nonzero(seg)[0] + lo)
        lo = hi
    return np.concatenate(chunks).astype(np.int64)


@dataclass(frozen=True)
class RaceTrace:
    """Exact per-residue prime counts at every prime transition up to X."""

    q: int
    X: int
    primes: np.ndarray                # all primes <= X, ascending
    residue_classes: tuple[int, ...]  # reduced residues mod q
    counts: np.ndarray                # shape (len(residue_classes), len(primes))

    def pi(self, x: float) -> int:
        """pi(x): all primes <= x, including those dividing q."""
        return int(np.searchsorted(self.primes, x, side="right"))

    def counts_at(self, x: float) -> dict[int, int]:
        k = self.pi(x)
        if k == 0:
            return {a: 0 for a in self.residue_classes}
        return {a: int(self.counts[i, k - 1])
                for i, a in enumerate(self.residue_classes)}


def sieve_race(q: int, X: int) -> RaceTrace:
    """Exact counts pi(x;q,a) for all reduced a at every prime up to X."""
    if X > _MAX_X:
        raise ResourceLimitError(f"X={X} exceeds the sieve cap {_MAX_X}")
    primes = _primes_up_to(X)
    classes = tuple(int(a) for a in reduced_residues(q))
    if len(primes) == 0:
        counts = np.zeros((len(classes), 0), dtype=np.int64)
        return RaceTrace(q=q, X=X, primes=primes, residue_classes=classes,
                         counts=counts)
    res = primes % q
    counts = np.empty((len(classes), len(primes)), dtype=np.int64)
    for i, a in enumerate(classes):
        counts[i] = np.cumsum(res == a)
    counts.setflags(write=False)
    primes.setflags(write=False)
    return RaceTrace(q=q, X=X, primes=primes, residue_classes=classes,
                     counts=counts)


def normalized_error(trace: RaceTrace, a: int, x: float) -> float:
    """E(x;q,a) = (log x / sqrt x) (phi(q) pi(x;q,a) - pi(x))."""
    if x < 2 or x > trace.X:
        raise RangeError(f"x must lie in [2, {trace.X}]")
    a = int(a) % trace.q
    if a not in trace.residue_classes:
        raise RangeError(f"{a} is not a reduced residue mod {trace.q}")
    counts = trace.counts_at(x)
    phi = euler_phi(trace.q)
    return (math.log(x) / math.sqrt(x)) * (phi * counts[a] - trace.pi(x))


def log_density_estimate(trace: RaceTrace, condition) -> float:
    """Measure of {x in [2, X] : ordering holds} in dt/t, over log(X/2).

    ``condition`` is either an ordered tuple of residues, meaning
    pi(x;q,a1) > pi(x;q,a2) > ... (ties excluded, they carry no measure in
    the limit), or a callable receiving the per-class count dict at x.
    Counts are constant between prime transitions, so each piece integral
    log(p_{k+1}) - log(p_k) is exact.
    """
    primes = trace.primes
    if len(primes) == 0:
        return 0.0
    if callable(condition):
        idx = {a: i for i, a in enumerate(trace.residue_classes)}
        truth = np.array([
            condition({a: int(trace.counts[idx[a], k]) for a in trace.residue_classes})
            for k in range(len(primes))
        ], dtype=bool)
    else:
        order = [int(a) % trace.q for a in condition]
        if len(set(order)) != len(order):
            raise ValueError("ordering condition needs distinct residues")
        rows = []
        idx = {a: i for i, a in enumerate(trace.residue_classes)}
        for a in order:
            if a not in idx:
                raise ValueError(f"{a} is not a reduced residue mod {trace.q}")
            rows.append(trace.counts[idx[a]])
        truth = np.ones(len(primes), dtype=bool)
        for upper, lower in zip(rows[:-1], rows[1:]):
            truth &= upper > lower

    edges = np.log(np.concatenate([primes.astype(float), [float(trace.X)]]))
    lengths = edges[1:] - edges[:-1]
    measure = float(np.sum(lengths[truth]))
    return measure / math.log(trace.X / 2.0)


def dump_csv(trace: RaceTrace, stream) -> None:
    """Write ``x,residue,count`` rows at every prime transition."""
    stream.write("x,residue,count\n")
    for k, p in enumerate(trace.primes):
        for i, a in enumerate(trace.residue_classes):
            stream.write(f"{int(p)},{a},{int(trace.counts[i, k])}\n")
