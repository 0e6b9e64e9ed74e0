"""Density assembly: the characteristic-function product rho_hat and the
offset-odd-lattice principal-value sums that realize the general density
formula

    delta = 2^{-(r-1)} ( 1 + sum_{B nonempty} (i/pi)^{|B|} P.V. int rho_hat(B) prod dη/η ).

Each principal-value integral is approximated by a sum over the lattice of
odd multiples of epsilon/2 inside [-C, C]^{|B|}; the symmetric offset keeps
every sample away from the coordinate hyperplanes, so no singular points
ever need special-casing.  Sums pair (m, ...) with (-m, ...) to halve work
and make the real/imaginary structure of every subset term exact.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, permutations

import numpy as np

from .characters import Character, RaceTuple, character_group
from .errors import (
    NumericalInconsistencyError,
    ParameterOutOfRangeError,
    RangeError,
)
from .special import FProfile, build_profile, query_profile
from .zerodata import (
    ZeroTable,
    bundled_full_sums,
    full_reciprocal_sum,
    load_tables_for_modulus,
)

IMAG_TOL = 1e-9
CLAMP_TOL = 1e-9


@dataclass(frozen=True)
class GridSpec:
    """Lattice spacing, truncation half-width and zero-product height."""

    epsilon: float
    C: float
    T: float

    def __post_init__(self):
        if not 0.0 < self.epsilon < 0.2:
            raise ParameterOutOfRangeError(
                f"need 0 < epsilon < 1/5, got {self.epsilon}")
        if self.C <= 0 or self.T <= 0:
            raise ParameterOutOfRangeError("C and T must be positive")

    @property
    def m_max(self) -> int:
        """Largest odd m with |m| epsilon/2 <= C."""
        m = int(math.floor(2.0 * self.C / self.epsilon + 1e-9))
        return m if m % 2 == 1 else m - 1


def default_grid(r: int, T: float = 10000.0) -> GridSpec:
    """epsilon=1/20, C=15 for r <= 3; coarser lattice for the 3-D sums at r=4."""
    if r <= 3:
        return GridSpec(epsilon=0.05, C=15.0, T=T)
    return GridSpec(epsilon=1.0 / 12.0, C=10.0, T=T)


@dataclass(frozen=True)
class Factor:
    """One profile-backed factor of rho_hat: a real character or merged pair."""

    char: Character            # representative member (min index for a pair)
    profile: FProfile
    pair: bool


@dataclass(frozen=True)
class FactorSystem:
    """Everything needed to evaluate rho_hat for tuples to one modulus."""

    q: int
    grid: GridSpec
    factors: tuple[Factor, ...]
    coverage: float

    def factor_diffs(self, t: RaceTuple, positions: tuple[int, ...]):
        """Per-factor difference coefficients chi(a_j) - chi(a_{j+1}).

        ``positions`` are the 1-based eta indices (the subset B).
        """
        out = []
        for f in self.factors:
            ds = [f.char(t.residues[j - 1]) - f.char(t.residues[j]) for j in positions]
            out.append(np.array(ds, dtype=complex))
        return out


def build_factor_system(q: int, grid: GridSpec, r_max: int,
                        zeros_dir=None, full_sum_overrides: dict | None = None,
                        tables: dict[int, ZeroTable] | None = None,
                        ) -> FactorSystem:
    """Load zero tables and precompute profiles covering tuples up to r_max.

    The worst-case profile argument is sum_j |chi(a_j)-chi(a_{j+1})| * C
    <= 2 (r_max - 1) C, so every profile is sampled out to that coverage.
    """
    if tables is None:
        tables = load_tables_for_modulus(q, zeros_dir)
    overrides = dict(bundled_full_sums())
    if full_sum_overrides:
        overrides.update(full_sum_overrides)

    coverage = 2.0 * (r_max - 1) * grid.C
    factors = []
    for chi in character_group(q):
        if chi.is_principal:
            continue
        if not chi.is_real and chi.conjugate_index < chi.index:
            continue  # one factor per conjugate pair
        zt = tables[chi.index]
        fs = full_reciprocal_sum(zt.character_key, overrides=overrides)
        prof = build_profile(zt, grid.T, grid.epsilon, coverage, full_sum=fs)
        factors.append(Factor(char=chi, profile=prof, pair=(zt.members == 2)))
    return FactorSystem(q=q, grid=grid, factors=tuple(factors), coverage=coverage)


def rho_hat(t: RaceTuple, eta, system: FactorSystem) -> complex:
    """exp(i sum (c_j - c_{j+1}) eta_j) * prod over factors of F_T(|...|).

    ``eta`` has r-1 entries.  A merged-pair factor already contains both
    conjugate F's (their arguments coincide), so it is multiplied in once.
    """
    eta = np.asarray(eta, dtype=float)
    if eta.shape != (t.r - 1,):
        raise ValueError(f"eta must have {t.r - 1} entries")
    cs = t.c_values
    phase_arg = sum((cs[j] - cs[j + 1]) * eta[j] for j in range(t.r - 1))
    out = complex(math.cos(phase_arg), math.sin(phase_arg))
    for f in system.factors:
        w = sum((f.char(t.residues[j]) - f.char(t.residues[j + 1])) * eta[j]
                for j in range(t.r - 1))
        out *= query_profile(f.profile, abs(w))
    return out


@dataclass(frozen=True)
class DensityEstimate:
    """A computed density with its subset-term breakdown."""

    value: float
    tuple: RaceTuple
    grid: GridSpec | None
    subset_terms: dict
    budget: object = None          # ErrorBudget, attached by the rigor layer
    clamped: bool = False
    imag_residual: float = 0.0
    exact: bool = False            # True for the no-quadrature 1/2 path


def _check_coverage(system: FactorSystem, diffs, m_max: int):
    step = system.grid.epsilon / 2.0
    for f, d in zip(system.factors, diffs):
        reach = float(np.sum(np.abs(d))) * m_max * step
        if reach > f.profile.grid_max + 1e-9:
            raise RangeError(
                f"lattice needs factor arguments to {reach:.2f} but profile "
                f"for {f.profile.character_key} covers {f.profile.grid_max:.2f}")


def _block_term(system: FactorSystem, diffs, cdiffs, meshes, denom):
    """rho_hat(B)/prod(m) summed over one block of lattice points."""
    step = system.grid.epsilon / 2.0
    val = None
    for f, d in zip(system.factors, diffs):
        if np.all(d == 0):
            continue  # factor is identically F(0)=1 on this subset
        if np.all(d.imag == 0):
            u = d.real.astype(np.int64)
            if np.all(u == np.round(d.real)):
                idx = np.zeros(denom.shape, dtype=np.int64)
                for coef, mesh in zip(u, meshes):
                    if coef:
                        idx = idx + coef * mesh
                sam = f.profile.samples[np.abs(idx)]
            else:
                pos = np.zeros(denom.shape)
                for coef, mesh in zip(d.real, meshes):
                    if coef:
                        pos = pos + coef * mesh
                sam = _lerp(f.profile.samples, np.abs(pos))
        else:
            w = np.zeros(denom.shape, dtype=complex)
            for coef, mesh in zip(d, meshes):
                if coef != 0:
                    w = w + coef * mesh
            sam = _lerp(f.profile.samples, np.abs(w))
        val = sam if val is None else val * sam
    if val is None:
        val = np.ones(denom.shape)
    if any(cdiffs):
        theta = np.zeros(denom.shape)
        for c, mesh in zip(cdiffs, meshes):
            if c:
                theta = theta + (c * step) * mesh
        val = val * (np.cos(theta) + 1j * np.sin(theta))
    return np.sum(val / denom)


def _lerp(samples: np.ndarray, pos: np.ndarray):
    i0 = pos.astype(np.int64)
    frac = pos - i0
    return samples[i0] * (1.0 - frac) + samples[i0 + 1] * frac


def lattice_sum(t: RaceTuple, B, grid: GridSpec, system: FactorSystem,
                threads: int = 1) -> complex:
    """S_B = sum over odd lattice points of rho_hat(B at m eps/2) / prod m.

    This is the direct generalization of the published two-dimensional sum
    S(epsilon, C, T); the principal-value integral over the subset B is
    2^{|B|} S_B.  Work is halved by pairing each point with its negation,
    which also forces the exact real (|B| even) or imaginary (|B| odd)
    structure of the result.
    """
    B = tuple(sorted(B))
    if not B or any(not 1 <= j <= t.r - 1 for j in B):
        raise ValueError(f"B must be a nonempty subset of 1..{t.r - 1}")
    if grid is not system.grid and grid != system.grid:
        raise ValueError("grid must match the factor system's grid")
    k = len(B)
    m_max = grid.m_max
    step = grid.epsilon / 2.0

    diffs = system.factor_diffs(t, B)
    _check_coverage(system, diffs, m_max)
    cs = t.c_values
    cdiffs = [cs[j - 1] - cs[j] for j in B]

    half = np.arange(1, m_max + 1, 2, dtype=np.int64)
    full = np.arange(-m_max, m_max + 1, 2, dtype=np.int64)

    # scale profile-index meshes by the eta positions: mesh j carries m_j
    block_rows = {1: len(half), 2: 64, 3: 4, 4: 1}.get(k, 1)
    blocks = [half[i:i + block_rows] for i in range(0, len(half), block_rows)]

    def run_block(rows):
        shape = [1] * k
        meshes = []
        arrs = [rows] + [full] * (k - 1)
        for axis, arr in enumerate(arrs):
            sh = shape.copy()
            sh[axis] = len(arr)
            meshes.append(arr.reshape(sh))
        denom = np.ones((1,) * k, dtype=np.float64)
        for mesh in meshes:
            denom = denom * mesh
        return _block_term(system, diffs, cdiffs, meshes, denom)

    if threads <= 1:
        partials = [run_block(rows) for rows in blocks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(run_block, blocks))

    s_half = complex(math.fsum(p.real for p in partials),
                     math.fsum(p.imag for p in partials))
    if k % 2 == 0:
        return complex(2.0 * s_half.real, 0.0)
    return complex(0.0, 2.0 * s_half.imag)


def density_two_way(t: RaceTuple, grid: GridSpec | None, system: FactorSystem | None,
                    threads: int = 1) -> DensityEstimate:
    """delta for r=2; exactly 1/2 with no quadrature when c(q,a1)=c(q,a2)."""
    if t.r != 2:
        raise ValueError("density_two_way needs a 2-tuple")
    cs = t.c_values
    if cs[0] == cs[1]:
        return DensityEstimate(value=0.5, tuple=t, grid=grid, subset_terms={},
                               exact=True)
    return density_general(t, grid, system, threads=threads)


def density_general(t: RaceTuple, grid: GridSpec, system: FactorSystem,
                    threads: int = 1) -> DensityEstimate:
    """Assemble all 2^{r-1}-1 subset terms of the general density formula."""
    r = t.r
    subset_terms = {}
    total = complex(1.0, 0.0)
    for k in range(1, r):
        for B in combinations(range(1, r), k):
            S = lattice_sum(t, B, grid, system, threads=threads)
            subset_terms[B] = S
            total += (2j / math.pi) ** k * S
    total /= 2 ** (r - 1)

    if abs(total.imag) > IMAG_TOL:
        raise NumericalInconsistencyError(
            f"imaginary part {total.imag:.3e} of assembled density exceeds {IMAG_TOL}")
    value = total.real
    clamped = False
    if -CLAMP_TOL <= value < 0.0:
        value, clamped = 0.0, True
    if value < 0.0 or value > 1.0 + CLAMP_TOL:
        raise NumericalInconsistencyError(f"density {value} outside [0,1]")
    value = min(value, 1.0)
    return DensityEstimate(value=value, tuple=t, grid=grid,
                           subset_terms=subset_terms, clamped=clamped,
                           imag_residual=abs(total.imag))


def permutation_table(q: int, residue_set, grid: GridSpec, system: FactorSystem,
                      threads: int = 1) -> dict[tuple, DensityEstimate]:
    """Densities of every ordering of a residue set, sharing one factor system."""
    residues = sorted(set(int(a) % q for a in residue_set))
    out = {}
    for perm in permutations(residues):
        t = RaceTuple(q, perm)
        if t.r == 2:
            out[perm] = density_two_way(t, grid, system, threads=threads)
        else:
            out[perm] = density_general(t, grid, system, threads=threads)
    return out
