"""Executable symmetry and inequality theorems for race densities.

Generates the provable-equality classes of ordered tuples (inversion,
multiplication under matching square type, reversal, and
reversal-with-multiplication under opposite type), verifies computed
tables against them, checks the strict inequalities relating mixed-type
orderings, and groups unordered tuples into isomorphic race games.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations

from .characters import RaceTuple, c_value, reduced_residues
from .errors import PrimeRaceError


class IncompleteTableError(PrimeRaceError, KeyError):
    """A symmetry class is only partially covered by the supplied table."""


@dataclass(frozen=True)
class SymmetryClass:
    """Ordered tuples provably sharing one density value."""

    representative: tuple[int, ...]
    members: frozenset[tuple[int, ...]]
    generators: tuple[str, ...]

    def __len__(self):
        return len(self.members)


def _rule_images(q: int, tup: tuple[int, ...], residues, cvals):
    """All tuples reachable from ``tup`` by a single equality rule."""
    r = len(tup)
    cs = [cvals[a] for a in tup]
    images = [(tuple(pow(a, -1, q) for a in tup), "invert")]
    same_type = len(set(cs)) == 1
    all_square = all(c == cvals[1] for c in cs)
    if same_type:
        images.append((tuple(reversed(tup)), "reverse"))
    for b in residues:
        if b == 1:
            continue
        mapped = tuple((b * a) % q for a in tup)
        if all(cvals[a] == cvals[(b * a) % q] for a in tup):
            images.append((mapped, f"mult b={b}"))
        elif all_square:
            images.append((mapped, f"mult-any b={b}"))
        if all(cvals[a] != cvals[(b * a) % q] for a in tup):
            images.append((tuple(reversed(mapped)), f"flip b={b}"))
    return images


def symmetry_closure(q: int, r: int) -> list[SymmetryClass]:
    """Partition all ordered r-tuples of distinct reduced residues mod q
    into classes closed under the equality rules, iterated to fixpoint."""
    residues = [int(a) for a in reduced_residues(q)]
    if not 2 <= r <= len(residues):
        raise ValueError(f"need 2 <= r <= phi(q)={len(residues)}")
    cvals = {a: c_value(q, a) for a in residues}

    parent: dict[tuple, tuple] = {}

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    all_tuples = [tup for combo in combinations(residues, r)
                  for tup in permutations(combo)]
    for tup in all_tuples:
        parent[tup] = tup

    used_rules: dict[tuple, set] = {tup: set() for tup in all_tuples}
    changed = True
    while changed:
        changed = False
        for tup in all_tuples:
            for image, rule in _rule_images(q, tup, residues, cvals):
                if find(image) != find(tup):
                    union(image, tup)
                    changed = True
                used_rules[find(tup)] = used_rules.get(find(tup), set())
                used_rules[find(tup)].add(rule)

    groups: dict[tuple, set] = {}
    for tup in all_tuples:
        groups.setdefault(find(tup), set()).add(tup)
    classes = []
    for root in sorted(groups):
        members = frozenset(groups[root])
        rep = min(members)
        gens = tuple(sorted(used_rules.get(root, ())))
        classes.append(SymmetryClass(representative=rep, members=members,
                                     generators=gens))
    return classes


@dataclass(frozen=True)
class SymmetryReport:
    checked_classes: int
    max_deviation: float
    worst_class: tuple | None
    failures: tuple
    passed: bool


def verify_table_symmetries(table: dict[tuple, float],
                            classes: list[SymmetryClass],
                            tol: float) -> SymmetryReport:
    """Max pairwise deviation inside each class; pass iff all within tol.

    Classes absent from the table are skipped; a class only partially
    present raises, since a partial check would silently prove nothing.
    """
    worst = 0.0
    worst_class = None
    failures = []
    checked = 0
    for cls in classes:
        present = [m for m in cls.members if m in table]
        if not present:
            continue
        if len(present) != len(cls.members):
            missing = sorted(cls.members - set(present))[:3]
            raise IncompleteTableError(
                f"table misses members of class {cls.representative}: {missing}")
        vals = [table[m] for m in cls.members]
        dev = max(vals) - min(vals)
        checked += 1
        if dev > worst:
            worst, worst_class = dev, cls.representative
        if dev > tol:
            failures.append((cls.representative, dev))
    return SymmetryReport(checked_classes=checked, max_deviation=worst,
                          worst_class=worst_class, failures=tuple(failures),
                          passed=not failures)


@dataclass(frozen=True)
class InequalityReport:
    checks: tuple
    failures: tuple
    min_margin: float
    passed: bool


def check_inequalities(q: int, table2: dict[tuple, float],
                       table3: dict[tuple, float],
                       identity_tol: float = 1e-4) -> InequalityReport:
    """Strict ordering inequalities plus the two-way/three-way identity.

    Checks every instance the supplied tables cover: N,N',S orderings
    beat their reversals; N,S,S' beat theirs; the middle-fixed swaps are
    equivalent to the corresponding two-way comparisons; and
    delta(a1,a2) = delta(a3,a1,a2) + delta(a1,a3,a2) + delta(a1,a2,a3).
    """
    residues = [int(a) for a in reduced_residues(q)]
    cvals = {a: c_value(q, a) for a in residues}
    sq = [a for a in residues if cvals[a] != -1]
    ns = [a for a in residues if cvals[a] == -1]

    checks = []
    failures = []
    margin = math.inf

    def record(name, ok, m):
        nonlocal margin
        checks.append((name, ok, m))
        margin = min(margin, m)
        if not ok:
            failures.append((name, m))

    for n1 in ns:
        for n2 in ns:
            if n1 == n2:
                continue
            for s in sq:
                a, b = (n1, n2, s), (s, n2, n1)
                if a in table3 and b in table3:
                    m = table3[a] - table3[b]
                    record(f"NN'S {a} > {b}", m > 0, m)
    for n in ns:
        for s1 in sq:
            for s2 in sq:
                if s1 == s2:
                    continue
                a, b = (n, s1, s2), (s2, s1, n)
                if a in table3 and b in table3:
                    m = table3[a] - table3[b]
                    record(f"NSS' {a} > {b}", m > 0, m)
    for n1 in ns:
        for n2 in ns:
            if n1 == n2:
                continue
            for s in sq:
                a, b = (n1, s, n2), (n2, s, n1)
                if a in table3 and b in table3 and (n1, s) in table2 and (n2, s) in table2:
                    lhs = table3[a] > table3[b]
                    rhs = table2[(n1, s)] > table2[(n2, s)]
                    m = min(abs(table3[a] - table3[b]), abs(table2[(n1, s)] - table2[(n2, s)]))
                    record(f"NSN' swap {a} vs 2-way", lhs == rhs, m if lhs == rhs else -m)
    for s1 in sq:
        for s2 in sq:
            if s1 == s2:
                continue
            for n in ns:
                a, b = (s1, n, s2), (s2, n, s1)
                if a in table3 and b in table3 and (s1, n) in table2 and (s2, n) in table2:
                    lhs = table3[a] > table3[b]
                    rhs = table2[(s1, n)] > table2[(s2, n)]
                    m = min(abs(table3[a] - table3[b]), abs(table2[(s1, n)] - table2[(s2, n)]))
                    record(f"SNS' swap {a} vs 2-way", lhs == rhs, m if lhs == rhs else -m)

    for (a1, a2) in list(table2):
        for a3 in residues:
            if a3 in (a1, a2):
                continue
            needed = [(a3, a1, a2), (a1, a3, a2), (a1, a2, a3)]
            if all(k in table3 for k in needed):
                total = sum(table3[k] for k in needed)
                err = abs(table2[(a1, a2)] - total)
                record(f"split {(a1, a2)} via {a3}", err < identity_tol,
                       identity_tol - err)

    return InequalityReport(checks=tuple(checks), failures=tuple(failures),
                            min_margin=margin, passed=not failures)


def isomorphism_classes(q: int, r: int) -> list[frozenset]:
    """Group unordered tuples whose race games are isomorphic.

    Two sets are joined when an elementwise bijection induced by the
    equality rules (inversion; multiplication by b under the matching,
    all-square, or everywhere-opposite c conditions) maps one onto the
    other.
    """
    residues = [int(a) for a in reduced_residues(q)]
    cvals = {a: c_value(q, a) for a in residues}

    sets = [frozenset(c) for c in combinations(residues, r)]
    parent = {s: s for s in sets}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry, key=sorted)] = min(rx, ry, key=sorted)

    for s in sets:
        union(s, frozenset(pow(a, -1, q) for a in s))
        all_square = all(cvals[a] != -1 for a in s)
        for b in residues:
            if b == 1:
                continue
            mapped = frozenset((b * a) % q for a in s)
            if all_square or all(cvals[a] == cvals[(b * a) % q] for a in s) \
                    or all(cvals[a] != cvals[(b * a) % q] for a in s):
                union(s, mapped)

    groups: dict[frozenset, list] = {}
    for s in sets:
        groups.setdefault(find(s), []).append(s)
    return [frozenset(v) for _, v in
            sorted(groups.items(), key=lambda kv: sorted(min(kv[1], key=sorted)))]
