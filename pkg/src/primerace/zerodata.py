"""Ingestion and summary of Dirichlet L-function zero tables.

A zero file is UTF-8 text: a header line ``q=<int> key=<D or idx>
height=<decimal> prec=<int>`` followed by one positive ordinate per line in
ascending order; ``#`` lines are comments.  Files are named
``q<q>_<key>.zeros`` where q is the conductor of the L-function.  Real
characters are keyed by their fundamental discriminant.  For a complex
conjugate pair (q in {5,7,9,11}) the positive ordinates of both L(s,chi)
and L(s,chibar) are stored merged under one key (the smaller canonical
index of the pair), since the two zero sets are reflections of each other;
the tail coefficient of either member is taken as half the merged value.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .characters import Character, character_group, matching_discriminant
from .errors import (
    CorruptDataError,
    EmptyTableError,
    InsufficientZerosError,
    MissingConstantError,
    WrongCharacterError,
)

#: Sum over gamma>0 of 1/(1/4+gamma^2) for the five characters with
#: published 6-decimal constants, keyed by (conductor, discriminant).
TABLE2_FULL_SUMS: dict[tuple[int, int], float] = {
    (8, -8): 0.158037,
    (8, 8): 0.117716,
    (4, -4): 0.077784,
    (3, -3): 0.056615,
    (12, 12): 0.165083,
}


@dataclass(frozen=True)
class ZeroTable:
    """Validated ascending positive ordinates of one L-function (or merged pair)."""

    q: int                 # conductor of the underlying L-function(s)
    key: int               # discriminant (real) or canonical pair index (complex)
    height: float          # certified coverage: every zero below this is present
    prec: int              # stated decimal accuracy of the ordinates
    gammas: np.ndarray     # ascending, > 0, none above height
    members: int = 1       # 1 for a single character, 2 for a merged pair

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=float)
        g.setflags(write=False)
        object.__setattr__(self, "gammas", g)

    @property
    def character_key(self) -> tuple[int, int]:
        return (self.q, self.key)

    def count_below(self, T: float) -> int:
        return int(np.searchsorted(self.gammas, T, side="left"))


def load_zero_table(source, expected_key: tuple[int, int] | None = None,
                    members: int = 1) -> ZeroTable:
    """Parse and validate a zero file.

    ``source`` may be a path, a text stream, or bytes.  ``expected_key`` is
    an optional (q, key) pair; a mismatch raises WrongCharacterError.
    """
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    elif isinstance(source, bytes):
        text = source.decode("utf-8")
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")

    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise EmptyTableError("zero file has no content")

    header = _parse_header(lines[0])
    q, key, height, prec = header
    if expected_key is not None and (q, key) != tuple(expected_key):
        raise WrongCharacterError(
            f"file is for q={q} key={key}, expected q={expected_key[0]} key={expected_key[1]}")

    vals = []
    for ln in lines[1:]:
        try:
            vals.append(float(ln))
        except ValueError as exc:
            raise CorruptDataError(f"unparsable ordinate line: {ln!r}") from exc
    if not vals:
        raise EmptyTableError(f"no ordinates in table q={q} key={key}")
    g = np.array(vals, dtype=float)
    if not np.all(g > 0):
        raise CorruptDataError("ordinates must be positive")
    if not np.all(np.diff(g) > 0):
        bad = int(np.argmin(np.diff(g)))
        raise CorruptDataError(f"ordinates not strictly increasing near index {bad}")
    if g[-1] > height:
        raise CorruptDataError(f"ordinate {g[-1]} exceeds stated height {height}")
    return ZeroTable(q=q, key=key, height=height, prec=prec, gammas=g, members=members)


def _parse_header(line: str) -> tuple[int, int, float, int]:
    fields = {}
    for tok in line.split():
        if "=" not in tok:
            raise CorruptDataError(f"bad header token {tok!r}")
        k, v = tok.split("=", 1)
        fields[k] = v
    try:
        q = int(fields["q"])
        key = int(fields.get("key", fields.get("D")))
        height = float(fields["height"])
        prec = int(fields.get("prec", 12))
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptDataError(f"bad header line {line!r}") from exc
    return q, key, height, prec


def serialize_zero_table(zt: ZeroTable) -> str:
    """Inverse of load_zero_table, lossless at the stated precision."""
    out = io.StringIO()
    height = f"{zt.height:g}"
    out.write(f"q={zt.q} key={zt.key} height={height} prec={zt.prec}\n")
    for g in zt.gammas:
        out.write(f"{g:.{zt.prec}f}\n")
    return out.getvalue()


@dataclass(frozen=True)
class SanityReport:
    count: int
    expected: float
    deviation: float
    flagged: bool
    note: str


def zero_count_sanity(zt: ZeroTable) -> SanityReport:
    """Compare the table's zero count against the counting main term.

    The number of zeros of one L(s,chi) with |gamma| <= T is asymptotically
    (T/pi) log(qT/2 pi e); a table holding only the upper half-plane zeros
    of a single character therefore carries half of that, while a merged
    conjugate-pair table carries the full amount.  Deviation beyond
    2 + 5% of the expectation is flagged as suspicious.
    """
    T = zt.height
    if len(zt.gammas) == 0 or T <= 1:
        return SanityReport(0, 0.0, 0.0, False, "insufficient data")
    expected = zt.members * (T / (2 * math.pi)) * math.log(zt.q * T / (2 * math.pi * math.e))
    count = zt.count_below(T + 1e-12)
    deviation = abs(count - expected)
    flagged = deviation > 2 + 0.05 * expected
    note = "count deviates from main term; table may be missing zeros" if flagged else "ok"
    return SanityReport(count, expected, deviation, flagged, note)


def full_reciprocal_sum(character_key: tuple[int, int],
                        overrides: dict | None = None) -> float:
    """The constant sum over gamma>0 of 1/(1/4+gamma^2) for this character.

    Returns the published constant for the five tabulated real characters;
    anything else must be supplied via ``overrides`` (for a merged pair the
    override is the pair total).  Keys in ``overrides`` may be (q, key)
    tuples or "q<q>_<key>" strings.
    """
    key = tuple(character_key)
    if overrides:
        if key in overrides:
            return float(overrides[key])
        name = f"q{key[0]}_{key[1]}"
        if name in overrides:
            return float(overrides[name])
    if key in TABLE2_FULL_SUMS:
        return TABLE2_FULL_SUMS[key]
    raise MissingConstantError(
        f"no tail-sum constant for character q={key[0]} key={key[1]}; "
        f"supply one via configuration (--full-sum q{key[0]}_{key[1]}=<value>)")


def b1(zt: ZeroTable, T: float, full_sum: float) -> float:
    """Tail coefficient b1(T) = sum_{gamma<T} 1/(1/4+gamma^2) - full_sum <= 0.

    Computed with exact compensated summation.  For a merged pair table
    this is the pair total; each member's coefficient is half of it.
    """
    if T > zt.height:
        raise InsufficientZerosError(
            f"T={T} exceeds table height {zt.height} for q={zt.q} key={zt.key}")
    partial = partial_reciprocal_sum(zt, T)
    return partial - full_sum


def partial_reciprocal_sum(zt: ZeroTable, T: float) -> float:
    g = zt.gammas[zt.gammas < T]
    return math.fsum(1.0 / (0.25 + gamma * gamma) for gamma in g)


# ---------------------------------------------------------------------------
# Bundled data and character -> table resolution

def bundled_zeros_dir() -> Path:
    return Path(resources.files("primerace").joinpath("data", "zeros"))


def bundled_full_sums() -> dict[str, float]:
    """High-precision tail-sum constants shipped as the default configuration."""
    path = resources.files("primerace").joinpath("data", "full_sums.json")
    with resources.as_file(path) as p:
        if not Path(p).exists():
            return {}
        return json.loads(Path(p).read_text())


def table_key_for(chi: Character) -> tuple[int, int, int]:
    """(conductor, file key, members) of the zero table backing a character.

    Real characters resolve to the discriminant of the matching Kronecker
    symbol (so an imprimitive character finds the table of the primitive
    character inducing it); complex characters resolve to the merged-pair
    table of their conjugate pair, keyed by the smaller canonical index.
    """
    if chi.is_principal:
        raise ValueError("principal character has no zero table")
    if chi.is_real:
        D = matching_discriminant(chi)
        return abs(D), D, 1
    if chi.q not in (5, 7, 9, 11):
        raise ValueError(
            f"complex characters are only supported for q in 5,7,9,11 (got q={chi.q})")
    return chi.q, min(chi.index, chi.conjugate_index), 2


def load_tables_for_modulus(q: int, zeros_dir: Path | str | None = None
                            ) -> dict[int, ZeroTable]:
    """Zero tables for every nonprincipal character mod q, keyed by index.

    Conjugate pairs share one merged table object (both indices map to it).
    """
    directory = Path(zeros_dir) if zeros_dir is not None else bundled_zeros_dir()
    tables: dict[int, ZeroTable] = {}
    cache: dict[tuple[int, int], ZeroTable] = {}
    for chi in character_group(q):
        if chi.is_principal:
            continue
        cond, key, members = table_key_for(chi)
        if (cond, key) not in cache:
            path = directory / f"q{cond}_{key}.zeros"
            if not path.exists():
                raise FileNotFoundError(
                    f"missing zero file {path} for character index {chi.index} mod {q}")
            cache[(cond, key)] = load_zero_table(path, expected_key=(cond, key),
                                                 members=members)
        tables[chi.index] = cache[(cond, key)]
    return tables
