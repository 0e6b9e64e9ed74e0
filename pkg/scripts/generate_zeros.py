#!/usr/bin/env python3
"""Generate the bundled zero tables and tail-sum constants.

Offline data oracle: finds critical-line zeros of the Dirichlet
L-functions behind every character for race moduli 3..12, validates the
lists (counting main term, gap rescans, mpmath spot checks), and writes

  src/primerace/data/zeros/q<cond>_<key>.zeros     desk tables
  data/zeros10000/q<cond>_<key>.zeros              deep tables (Theorem-1 set)
  src/primerace/data/full_sums.json                high-precision constants

Run from the repository root:  python3 scripts/generate_zeros.py
Roughly half an hour single-threaded; --only limits to matching keys.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent))

import mpmath as mp

from primerace.characters import Character, character_group, matching_discriminant
from lfunc import LFunction, find_zeros, lfunction_for

ROOT = Path(__file__).resolve().parents[1]
DESK_DIR = ROOT / "src" / "primerace" / "data" / "zeros"
DEEP_DIR = ROOT / "data" / "zeros10000"
SUMS_PATH = ROOT / "src" / "primerace" / "data" / "full_sums.json"

DESK_HEIGHTS = {3: 4000.0, 4: 4000.0, 5: 6000.0, 7: 2560.0, 8: 2560.0,
                9: 2560.0, 11: 2560.0, 12: 2560.0}
DEEP_KEYS = [(3, -3), (4, -4), (8, -8), (8, 8), (12, 12)]
PREC = 9


def real_char(cond: int, D: int) -> Character:
    for chi in character_group(cond):
        if chi.is_principal or not chi.is_real:
            continue
        if matching_discriminant(chi) == D:
            return chi
    raise LookupError(f"no real character with discriminant {D} mod {cond}")


def plan_tables():
    """(cond, key, members, [characters to scan]) for every bundled table."""
    plan = []
    for cond in (3, 4, 5, 7, 8, 9, 11, 12):
        for chi in character_group(cond):
            if chi.is_principal:
                continue
            if chi.is_real:
                D = matching_discriminant(chi)
                if abs(D) != cond:
                    continue  # induced from a smaller conductor; covered there
                plan.append((cond, D, 1, [chi]))
            elif chi.index < chi.conjugate_index:
                conj = character_group(cond)[chi.conjugate_index]
                plan.append((cond, chi.index, 2, [chi, conj]))
    return plan


# ----------------------------------------------------------------------------
# mpmath reference machinery

def l_mp(chi: Character, s):
    tot = mp.mpc(0)
    for a in range(1, chi.q):
        ang = chi.angle(a)
        if ang is None:
            continue
        val = mp.e ** (2j * mp.pi * mp.mpf(ang.numerator) / ang.denominator)
        tot += val * mp.zeta(s, mp.mpf(a) / chi.q)
    return mp.mpf(chi.q) ** (-s) * tot


def spot_check(lf: LFunction, chi: Character, zeros: np.ndarray, tol=2e-9):
    """Refine a sample of zeros with the independent mpmath route."""
    picks = list(zeros[:3])
    mid = np.searchsorted(zeros, 150.0)
    if 0 < mid < len(zeros):
        picks.append(zeros[mid])
    for g in picks:
        f = lambda t: float((lf.z_phase(np.array([float(t)]))[0]
                             * complex(l_mp(chi, mp.mpf('0.5') + 1j * mp.mpf(float(t))))).real)
        root = mp.findroot(f, mp.mpf(float(g)), solver="secant", tol=1e-24)
        delta = abs(float(root) - g)
        if delta > tol:
            raise AssertionError(
                f"zero {g:.6f} of q={chi.q} idx={chi.index} off by {delta:.2e}")


def count_check(cond, members, zeros, height):
    expected = members * (height / (2 * math.pi)) * math.log(
        cond * height / (2 * math.pi * math.e))
    count = int(np.searchsorted(zeros, height))
    dev = abs(count - expected)
    limit = max(4.0, 0.004 * expected)
    status = "ok" if dev <= limit else "SUSPICIOUS"
    print(f"    count {count} vs main term {expected:.1f} (dev {dev:.1f}) {status}")
    if dev > limit:
        raise AssertionError(f"zero count deviates by {dev:.1f} (limit {limit:.1f})")


# ----------------------------------------------------------------------------
# tail-sum constants

def full_sum_real(chi: Character) -> mp.mpf:
    q = chi.q
    L1, dL1 = _l_and_deriv_at_1(chi)
    parity_even = abs(complex(_chi_val(chi, q - 1)) - 1) < 1e-12
    term = mp.log(mp.mpf(q) / mp.pi) / 2 - mp.euler / 2
    if parity_even:
        term -= mp.log(2)
    return term + (dL1 / L1).real


def full_sum_pair(chi: Character) -> mp.mpf:
    q = chi.q
    L1, dL1 = _l_and_deriv_at_1(chi)
    parity_even = abs(complex(_chi_val(chi, q - 1)) - 1) < 1e-12
    psi_val = mp.digamma(mp.mpf(1) / 2) if parity_even else mp.digamma(1)
    return mp.log(mp.mpf(q) / mp.pi) + psi_val + 2 * (dL1 / L1).real


def _chi_val(chi: Character, a: int):
    ang = chi.angle(a)
    if ang is None:
        return mp.mpc(0)
    return mp.e ** (2j * mp.pi * mp.mpf(ang.numerator) / ang.denominator)


def _l_and_deriv_at_1(chi: Character):
    """L(1,chi) and L'(1,chi) from generalized Stieltjes constants."""
    q = chi.q
    L1 = mp.mpc(0)
    S1 = mp.mpc(0)
    for a in range(1, q):
        v = _chi_val(chi, a)
        if v == 0:
            continue
        x = mp.mpf(a) / q
        L1 += v * mp.stieltjes(0, x)
        S1 += v * mp.stieltjes(1, x)
    L1 = L1 / q
    dL1 = -mp.log(q) * L1 - S1 / q
    return L1, dL1


KNOWN_L1 = {
    (8, -8): lambda: mp.pi / (2 * mp.sqrt(2)),
    (8, 8): lambda: mp.log(1 + mp.sqrt(2)) / mp.sqrt(2),
    (4, -4): lambda: mp.pi / 4,
    (3, -3): lambda: mp.pi / (3 * mp.sqrt(3)),
    (12, 12): lambda: mp.log(2 + mp.sqrt(3)) / mp.sqrt(3),
}
TABLE2 = {(8, -8): 0.158037, (8, 8): 0.117716, (4, -4): 0.077784,
          (3, -3): 0.056615, (12, 12): 0.165083}


def compute_full_sums(plan) -> dict[str, float]:
    mp.mp.dps = 40
    out = {}
    for cond, key, members, chars in plan:
        chi = chars[0]
        if members == 1:
            val = full_sum_real(chi)
            L1, _ = _l_and_deriv_at_1(chi)
            if (cond, key) in KNOWN_L1:
                ref = KNOWN_L1[(cond, key)]()
                assert abs(L1 - ref) < mp.mpf('1e-30'), f"L(1) mismatch for {cond},{key}"
            if (cond, key) in TABLE2:
                assert abs(float(val) - TABLE2[(cond, key)]) < 5.2e-7, \
                    f"full sum for {cond},{key} disagrees with published constant"
        else:
            val = full_sum_pair(chi)
        out[f"q{cond}_{key}"] = float(val)
        print(f"  full sum q{cond}_{key} = {float(val):.12f}")
    return out


# ----------------------------------------------------------------------------

def generate_table(cond, key, members, chars, height, out_path, full_sum=None):
    t0 = time.time()
    print(f"  scanning q={cond} key={key} ({members} member(s)) to {height} ...")
    all_zeros = []
    for chi in chars:
        lf = lfunction_for(chi)
        zs = find_zeros(lf, height + 0.4)
        spot_check(lf, chi, zs)
        all_zeros.append(zs)
    merged = np.sort(np.concatenate(all_zeros))
    merged = merged[merged <= height]
    if len(merged) > 1 and np.min(np.diff(merged)) < 1e-7:
        raise AssertionError("duplicate or near-duplicate ordinates; scan bug")
    count_check(cond, members, merged, height)
    if full_sum is not None:
        partial = float(np.sum(1.0 / (0.25 + merged * merged)))
        tail = full_sum - partial
        est = members * math.log(cond * height / (2 * math.pi)) / (2 * math.pi * height)
        print(f"    tail {tail:.3e} vs density estimate {est:.3e}")
        if not (0.6 * est < tail < 1.5 * est):
            raise AssertionError(
                f"partial sum inconsistent with tail constant (tail {tail:.3e}, est {est:.3e})")

    lines = [f"q={cond} key={key} height={height:g} prec={PREC}"]
    lines += [f"{g:.{PREC}f}" for g in merged]
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"    wrote {out_path.name}: {len(merged)} zeros in {time.time() - t0:.0f}s")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--only", default=None, help="substring filter on q<cond>_<key>")
    ap.add_argument("--skip-desk", action="store_true")
    ap.add_argument("--skip-deep", action="store_true")
    ap.add_argument("--skip-sums", action="store_true")
    args = ap.parse_args()

    plan = plan_tables()
    if not args.skip_sums:
        print("computing tail-sum constants ...")
        sums = compute_full_sums(plan)
        SUMS_PATH.parent.mkdir(parents=True, exist_ok=True)
        SUMS_PATH.write_text(json.dumps(sums, indent=2, sort_keys=True) + "\n")
    else:
        sums = json.loads(SUMS_PATH.read_text())

    if not args.skip_desk:
        print("desk tables ...")
        for cond, key, members, chars in plan:
            name = f"q{cond}_{key}"
            if args.only and args.only not in name:
                continue
            generate_table(cond, key, members, chars, DESK_HEIGHTS[cond],
                           DESK_DIR / f"{name}.zeros", full_sum=sums.get(name))

    if not args.skip_deep:
        print("deep tables (height 10000) ...")
        for cond, key in DEEP_KEYS:
            name = f"q{cond}_{key}"
            if args.only and args.only not in name:
                continue
            chi = real_char(cond, key)
            generate_table(cond, key, 1, [chi], 10000.0,
                           DEEP_DIR / f"{name}.zeros", full_sum=sums.get(name))
    print("done.")


if __name__ == "__main__":
    main()
