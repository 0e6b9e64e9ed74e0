"""Float64 evaluation of Dirichlet L-functions on the critical line.

Offline tooling for the zero-table generator: not part of the installed
package (the library ingests zeros, it does not find them).

The evaluator uses Euler-Maclaurin summation of the Hurwitz-zeta
decomposition  L(s,chi) = sum_{m<qN} chi(m) m^{-s} + per-residue tails,
vectorized over arrays of t.  A Hardy-style rotation built from the Gauss
sum and loggamma turns L(1/2+it) into a real function Z(t) whose sign
changes locate the zeros.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import loggamma

# B_{2j}/(2j)! for j = 1..16
_BERN = [
    8.333333333333333e-02, -1.3888888888888889e-03, 3.306878306878307e-05,
    -8.267195767195768e-07, 2.08767569878681e-08, -5.284190138687493e-10,
    1.3382536530684679e-11, -3.3896802963225827e-13, 8.586062056277845e-15,
    -2.174868698558062e-16, 5.50900282836023e-18, -1.3954464685812523e-19,
    3.534707039629467e-21, -8.953517427037546e-23, 2.2679524523376831e-24,
    -5.74479066887220e-26,
]


@dataclass
class LFunction:
    """One primitive Dirichlet character's L-function on Re(s)=1/2."""

    q: int
    values: np.ndarray           # chi(0..q-1) as complex128
    parity: int                  # 0 if chi(-1)=1 else 1
    label: str = ""
    _phase_const: complex = field(init=False, default=0j)

    def __post_init__(self):
        tau = sum(self.values[a % self.q] * np.exp(2j * np.pi * a / self.q)
                  for a in range(1, self.q))
        root_q = math.sqrt(self.q)
        assert abs(abs(tau) - root_q) < 1e-8 * root_q, \
            f"|Gauss sum| != sqrt(q); character mod {self.q} not primitive?"
        eps = tau / ((1j ** self.parity) * root_q)
        self._phase_const = np.exp(-0.5j * np.angle(eps))

    # -- L(1/2+it) ---------------------------------------------------------

    def l_on_line(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        tmax = float(t.max(initial=0.0))
        N = int(math.ceil(max(32.0, tmax / 4.0 + 20.0)))
        s = 0.5 + 1j * t

        mmax = self.q * N  # direct sum over m < mmax
        m = np.arange(1, mmax)
        w = self.values[m % self.q] * m ** (-0.5)
        lnm = np.log(m)

        total = np.zeros(len(t), dtype=complex)
        mchunk = 8192
        tchunk = 512
        for i0 in range(0, len(t), tchunk):
            ti = t[i0:i0 + tchunk]
            acc = np.zeros(len(ti), dtype=complex)
            for j0 in range(0, len(m), mchunk):
                ang = np.outer(ti, lnm[j0:j0 + mchunk])
                acc += (np.cos(ang) - 1j * np.sin(ang)) @ w[j0:j0 + mchunk]
            total[i0:i0 + tchunk] = acc

        # Euler-Maclaurin tails per residue class
        for a in range(1, self.q):
            chi_a = self.values[a]
            if chi_a == 0:
                continue
            M = self.q * N + a
            lnM = math.log(M)
            Mpow = np.exp(-s * lnM)          # M^{-s}
            tail = M * Mpow / (self.q * (s - 1.0))   # M^{1-s}/(q(s-1))
            tail += 0.5 * Mpow
            # term_j = B_{2j}/(2j)! * s(s+1)...(s+2j-2) * q^{2j-1} * M^{1-s-2j}
            qM = self.q / M
            mul = np.ones_like(s)
            powfac = None
            for j, coef in enumerate(_BERN, start=1):
                if j == 1:
                    mul = s
                    powfac = self.q * (Mpow / M)   # q^1 * M^{-s-1}
                else:
                    mul = mul * (s + (2 * j - 3)) * (s + (2 * j - 2))
                    powfac = powfac * (qM * qM)
                tail += coef * mul * powfac
            total += chi_a * tail
        return total

    # -- Hardy Z -----------------------------------------------------------

    def z_phase(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        z = (0.5 + self.parity) / 2.0 + 0.5j * t
        return self._phase_const * np.exp(
            1j * (0.5 * t * math.log(self.q / math.pi) + loggamma(z).imag))

    def z(self, t: np.ndarray) -> np.ndarray:
        """Real rotated L; sign changes are the critical-line zeros."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        val = self.z_phase(t) * self.l_on_line(t)
        imag_scale = np.max(np.abs(val.imag))
        real_scale = np.max(np.abs(val.real)) + 1e-300
        if imag_scale > 1e-6 * max(1.0, real_scale):
            raise AssertionError(
                f"rotated L not real (|Im| ~ {imag_scale:.2e}); check character data")
        return val.real


def lfunction_for(chi) -> LFunction:
    """Build an LFunction from a package Character (must be primitive)."""
    vals = np.zeros(chi.q, dtype=complex)
    for a in range(chi.q):
        t = chi.angle(a)
        if t is not None:
            vals[a] = np.exp(2j * np.pi * float(t))
    parity = 0 if abs(vals[(chi.q - 1) % chi.q] - 1.0) < 1e-12 else 1
    return LFunction(q=chi.q, values=vals, parity=parity,
                     label=f"q{chi.q}.{chi.index}")


# -- zero finding -----------------------------------------------------------

def _ridders(zfun, lo, hi, flo, fhi, tol=5e-13, max_iter=60):
    """Vectorized Ridders root refinement on sign-changing brackets.

    Iterates on the unconverged subset only; the bisection point
    guarantees at least halving per round, so max_iter=60 always suffices.
    """
    lo = lo.copy(); hi = hi.copy(); flo = flo.copy(); fhi = fhi.copy()
    active = np.arange(len(lo))
    for _ in range(max_iter):
        if len(active) == 0:
            break
        a = lo[active]; b = hi[active]
        fa = flo[active]; fb = fhi[active]
        mid = 0.5 * (a + b)
        fm = zfun(mid)
        disc = np.sqrt(np.maximum(fm * fm - fa * fb, 1e-300))
        new = np.clip(mid + (mid - a) * np.sign(fa - fb) * fm / disc, a, b)
        fn = zfun(new)
        for xa, fxa in ((mid, fm), (new, fn)):
            exact = fxa == 0.0
            take_lo = ((fa * fxa > 0) & (xa > a) & (xa < b)) | exact
            take_hi = ((fb * fxa > 0) & (xa > a) & (xa < b)) | exact
            a = np.where(take_lo, xa, a)
            fa = np.where(take_lo, fxa, fa)
            b = np.where(take_hi, xa, b)
            fb = np.where(take_hi, fxa, fb)
        lo[active] = a; hi[active] = b
        flo[active] = fa; fhi[active] = fb
        active = active[(b - a) > tol]
    if len(active):
        raise AssertionError(f"{len(active)} brackets failed to converge")
    return 0.5 * (lo + hi)


def expected_gap(q: int, t: float, members: int) -> float:
    dens = members * math.log(max(q * t, 8.0) / (2 * math.pi)) / (2 * math.pi)
    return 1.0 / max(dens, 1e-3)


def find_zeros(lf: LFunction, t_hi: float, t_lo: float = 0.01,
               step: float | None = None, members_hint: int = 1,
               verbose: bool = False) -> np.ndarray:
    """All zeros of Z in (t_lo, t_hi), located to ~1e-10.

    Scans a uniform grid for sign changes, refines the brackets with
    vectorized Ridders, then re-scans any suspiciously long inter-zero gap
    at a finer step until no new zeros appear.
    """
    if step is None:
        step = 0.12 * expected_gap(lf.q, t_hi, 1)

    def scan(a, b, h):
        n = max(int(math.ceil((b - a) / h)) + 1, 3)
        grid = np.linspace(a, b, n)
        vals = np.empty(n)
        block = 16384
        for i0 in range(0, n, block):
            vals[i0:i0 + block] = lf.z(grid[i0:i0 + block])
        sign = np.sign(vals)
        sign[sign == 0] = 1.0
        idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
        if len(idx) == 0:
            return np.empty(0)
        return _ridders(lf.z, grid[idx], grid[idx + 1], vals[idx], vals[idx + 1])

    zeros = scan(t_lo, t_hi, step)
    if verbose:
        print(f"  initial scan: {len(zeros)} zeros")

    # gap-driven rescan: a missed close pair leaves a double-length gap
    for _ in range(4):
        pts = np.concatenate(([t_lo], zeros, [t_hi]))
        new = []
        for a, b in zip(pts[:-1], pts[1:]):
            mid = 0.5 * (a + b)
            if (b - a) > 1.6 * expected_gap(lf.q, max(mid, 10.0), 1) or (a < 12.0 <= b):
                found = scan(a + 1e-9, b - 1e-9, (b - a) / 40.0)
                new.extend(x for x in found
                           if np.all(np.abs(zeros - x) > 1e-7))
        if not new:
            break
        zeros = np.sort(np.concatenate([zeros, new]))
        if verbose:
            print(f"  rescan added {len(new)} zeros")
    return np.sort(zeros)
