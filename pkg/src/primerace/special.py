"""Special-function kernel: J0, the zero weights alpha_gamma, truncated
Bessel products with quadratic tail correction, sampled grid profiles,
power-law decay constants, and the product-remainder bound.

Products over thousands of zeros are accumulated in double-double
arithmetic (Dekker splitting, no fma needed) so the relative drift stays
far below the 1e-12 the downstream density targets require.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import j0 as _scipy_j0

from .errors import (
    BoundInvalidError,
    InsufficientZerosError,
    InvalidOrdinateError,
    RangeError,
)
from .zerodata import ZeroTable

_J0_MAX_ARG = 1e8


def bessel_j0(x):
    """Bessel function of order zero on the real line.

    Backed by the Cephes implementation (series below 5, Hankel asymptotic
    beyond), absolute error below 1e-15 for |x| <= 500.  Arguments beyond
    1e8 lose the argument reduction and are rejected.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(np.abs(arr) >= _J0_MAX_ARG):
        raise RangeError(f"|x| must be < {_J0_MAX_ARG:g}")
    out = _scipy_j0(arr)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def alpha(gamma: float) -> float:
    """alpha_gamma = 2 / sqrt(1/4 + gamma^2), in (0, 4) for gamma > 0."""
    if gamma <= 0:
        raise InvalidOrdinateError(f"ordinate must be positive, got {gamma}")
    return 2.0 / math.sqrt(0.25 + gamma * gamma)


def alphas(zt: ZeroTable, T: float | None = None) -> np.ndarray:
    g = zt.gammas if T is None else zt.gammas[zt.gammas < T]
    return 2.0 / np.sqrt(0.25 + g * g)


# -- double-double product helpers (Dekker splitting) -----------------------

_SPLITTER = 134217729.0  # 2**27 + 1


def _two_prod(a, b):
    p = a * b
    ah = _SPLITTER * a
    ah = ah - (ah - a)
    al = a - ah
    bh = _SPLITTER * b
    bh = bh - (bh - b)
    bl = b - bh
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def dd_product(factors: np.ndarray, axis: int | None = None) -> np.ndarray:
    """Product of float factors with a double-double running accumulator.

    ``factors`` is iterated along ``axis`` (the last axis by default); the
    other axes are vectorized.  Returns the correctly rounded high word.
    """
    f = np.asarray(factors, dtype=float)
    if axis is None:
        axis = f.ndim - 1
    f = np.moveaxis(f, axis, -1)
    hi = np.ones(f.shape[:-1])
    lo = np.zeros(f.shape[:-1])
    for k in range(f.shape[-1]):
        b = f[..., k]
        p, err = _two_prod(hi, b)
        err = err + lo * b
        hi = p + err
        lo = err - (hi - p)
    return hi + lo


def f_truncated(z: float, zt: ZeroTable, T: float, b1: float) -> float:
    """F_T(z) = (prod over 0<gamma<T of J0(alpha_gamma z)) * (1 + b1 z^2).

    Even in z; exactly 1 at z = 0.  Warns when |b1| z^2 >= 1 (the quadratic
    tail correction is then untrustworthy and the caller should enlarge T).
    """
    if T > zt.height:
        raise InsufficientZerosError(
            f"T={T} exceeds table height {zt.height} for q={zt.q} key={zt.key}")
    if abs(b1) * z * z >= 1.0:
        warnings.warn(f"|b1| z^2 = {abs(b1) * z * z:.3g} >= 1; tail correction unreliable",
                      RuntimeWarning, stacklevel=2)
    if z == 0.0:
        return 1.0
    a = alphas(zt, T)
    prod = float(dd_product(bessel_j0(a * abs(z))))
    return prod * (1.0 + b1 * z * z)


@dataclass(frozen=True)
class DecayBound:
    """Constants in |F(x)| <= d |x|^{-e}, from the first J zeros."""

    d: float
    e: float
    J: int


def decay_constants(zt: ZeroTable, gamma_cap: float = 30.0) -> DecayBound:
    """Power-law bound constants d, e with e = J/2, J = #{gamma < gamma_cap}.

    d = pi^{-J/2} * prod_{j<=J} (1/4+gamma_j^2)^{1/4}; every dropped factor
    has modulus <= 1, so the bound holds for the full product as well.
    """
    if zt.height < gamma_cap:
        raise InsufficientZerosError(
            f"table only certified to {zt.height} < gamma_cap={gamma_cap}")
    g = zt.gammas[zt.gammas < gamma_cap]
    J = len(g)
    if J == 0:
        raise InsufficientZerosError("no zeros below gamma_cap")
    log_d = -0.5 * J * math.log(math.pi) + 0.25 * math.fsum(
        math.log(0.25 + gamma * gamma) for gamma in g)
    return DecayBound(d=math.exp(log_d), e=J / 2.0, J=J)


def delta_t_bound(x: float, b1: float) -> float:
    """Remainder bound |Delta_T(x)| < b1^2 x^4 / (2 (1-|b1| x^2)^2).

    Requires |b1| x^2 < 1; the published fixed-T special case is recovered
    by instantiating b1 with the profile's own tail coefficient.
    """
    t = abs(b1) * x * x
    if t >= 1.0:
        raise BoundInvalidError(
            f"|b1| x^2 = {t:.3g} >= 1: enlarge T or shrink the range")
    return (b1 * b1) * (x ** 4) / (2.0 * (1.0 - t) ** 2)


@dataclass(frozen=True)
class FProfile:
    """Samples of one truncated-product factor on a uniform half-grid.

    For a merged conjugate pair the samples hold the two-factor product
    prod J0 * (1 + (b1/2) z^2)^2 with b1 the merged tail coefficient, so a
    pair profile enters a density product exactly once.
    """

    character_key: tuple[int, int]
    T: float
    b1: float
    grid_step: float
    grid_max: float
    samples: np.ndarray
    pair: bool
    decay: DecayBound
    delta_bound_params: tuple[float, float]  # (b1^2/2, |b1|) of D(x)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)


def build_profile(zt: ZeroTable, T: float, epsilon: float, grid_max: float,
                  full_sum: float, gamma_cap: float = 30.0) -> FProfile:
    """Sample the truncated factor on {0, eps/2, eps, ...} up to grid_max.

    One guard sample beyond grid_max keeps interpolation from extrapolating.
    Deterministic: zeros ascending, double-double accumulation, fixed grid.
    """
    from .zerodata import b1 as _b1  # local import to avoid cycle at import time

    step = epsilon / 2.0
    n = int(math.floor(grid_max / step + 1e-9)) + 2  # cover grid_max plus guard
    grid = step * np.arange(n)
    tail = _b1(zt, T, full_sum)
    a = alphas(zt, T)

    # running double-double product over zero chunks, vectorized over the grid
    hi = np.ones(n)
    lo = np.zeros(n)
    chunk = 512
    for k0 in range(0, len(a), chunk):
        block = bessel_j0(np.outer(grid, a[k0:k0 + chunk]))
        for j in range(block.shape[1]):
            b = block[:, j]
            p, err = _two_prod(hi, b)
            err = err + lo * b
            hi = p + err
            lo = err - (hi - p)
    prod = hi + lo

    z2 = grid * grid
    if zt.members == 2:
        poly = (1.0 + 0.5 * tail * z2) ** 2
        half = 0.5 * tail
        dparams = (half * half / 2.0, abs(half))
        pair = True
    else:
        poly = 1.0 + tail * z2
        dparams = (tail * tail / 2.0, abs(tail))
        pair = False
    samples = prod * poly
    samples[0] = 1.0  # exact: J0(0)=1 and the polynomial factor is 1 at 0

    return FProfile(
        character_key=zt.character_key,
        T=T,
        b1=tail,
        grid_step=step,
        grid_max=grid[-2],
        samples=samples,
        pair=pair,
        decay=decay_constants(zt, gamma_cap),
        delta_bound_params=dparams,
    )


def query_profile(p: FProfile, z) -> float | np.ndarray:
    """Evaluate the profile at |z| by exact hit or linear interpolation."""
    zz = np.abs(np.asarray(z, dtype=float))
    if np.any(zz > p.grid_max + 1e-12):
        raise RangeError(f"|z| up to {zz.max():g} exceeds profile coverage {p.grid_max:g}")
    pos = zz / p.grid_step
    i0 = np.minimum(pos.astype(int), len(p.samples) - 2)
    frac = pos - i0
    out = p.samples[i0] * (1.0 - frac) + p.samples[i0 + 1] * frac
    return float(out) if np.isscalar(z) or out.ndim == 0 else out


def profile_delta_bound(p: FProfile, x) -> np.ndarray:
    """D(x) for this profile: coef x^4 / (1 - |b1_eff| x^2)^2, vectorized.

    b1_eff is the profile's own tail coefficient (half the merged value for
    a pair profile, in which case the caller applies (1+D)^2 for the two
    identical factors of the pair).
    """
    coef, babs = p.delta_bound_params
    x = np.asarray(x, dtype=float)
    t = babs * x * x
    if np.any(t >= 1.0):
        raise BoundInvalidError("(|b1| x^2 >= 1 inside requested range)")
    return coef * x ** 4 / (1.0 - t) ** 2
