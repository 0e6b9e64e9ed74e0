"""Modular arithmetic substrate: reduced residues, Kronecker symbols, the
Dirichlet character group for small moduli, square classification and the
square-count weight c(q,a), and bias factors of ordered residue tuples.

Character values are stored as exact rational angles (a value exp(2*pi*i*t)
is stored as the Fraction t in [0,1)), so conjugation pairing, reality and
orthogonality can be tested exactly; conversion to floating complex happens
only at evaluation time.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import InvalidModulusError, NotReducedError

MAX_MODULUS = 100


def reduced_residues(q: int) -> list["Residue"]:
    """All residues a in [1,q) with gcd(a,q)=1, ascending."""
    if q < 2:
        raise InvalidModulusError(f"modulus must be >= 2, got {q}")
    return [Residue(q, a) for a in range(1, q) if math.gcd(a, q) == 1]


def euler_phi(q: int) -> int:
    return sum(1 for a in range(1, q) if math.gcd(a, q) == 1)


@dataclass(frozen=True, order=True)
class Residue:
    """A reduced residue class a mod q, stored with its canonical representative."""

    q: int
    a: int

    def __post_init__(self):
        if self.q < 2:
            raise InvalidModulusError(f"modulus must be >= 2, got {self.q}")
        object.__setattr__(self, "a", self.a % self.q)
        if math.gcd(self.a, self.q) != 1:
            raise NotReducedError(f"gcd({self.a},{self.q}) != 1")

    def inverse(self) -> "Residue":
        return Residue(self.q, pow(self.a, -1, self.q))

    def __int__(self) -> int:
        return self.a

    def __index__(self) -> int:
        return self.a


def _jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n."""
    assert n > 0 and n % 2 == 1
    a %= n
    result = 1
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n), extending the Jacobi symbol to all integers.

    Conventions for the completed symbol: (D/0) = 1 if D = +-1 else 0;
    (D/-1) = -1 if D < 0 else 1; (D/2) = 0 for even D and +1/-1 for
    D = +-1 / +-3 mod 8.  Completely multiplicative in n.
    """
    if n == 0:
        return 1 if D in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if D < 0:
            result = -result
    # factor out powers of two
    while n % 2 == 0:
        n //= 2
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5):
            result = -result
    return result * _jacobi(D, n)


FUNDAMENTAL_DISCRIMINANTS = [d for d in range(-100, 101) if d != 0]


def is_fundamental_discriminant(D: int) -> bool:
    """D = 1 is excluded; otherwise the usual squarefree conditions."""
    if D == 1 or D == 0:
        return False
    if D % 4 == 1 or D % 4 == -3:
        return _squarefree(abs(D))
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3, -2, -1) and _squarefree(abs(m))
    return False


def _squarefree(n: int) -> bool:
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class Character:
    """A Dirichlet character mod q with exact root-of-unity value table.

    ``angles[i]`` is the Fraction t with chi(a_i) = exp(2*pi*i*t) for the
    i-th ascending reduced residue a_i; chi vanishes off the reduced classes.
    """

    q: int
    index: int
    angles: tuple[Fraction, ...]
    order: int
    is_principal: bool
    is_real: bool
    conjugate_index: int
    _lookup: dict = field(repr=False, hash=False, compare=False, default=None)

    def angle(self, n: int) -> Fraction | None:
        """Exact angle of chi(n), or None when gcd(n,q) > 1."""
        return self._lookup.get(n % self.q)

    def __call__(self, n: int) -> complex:
        t = self.angle(n)
        if t is None:
            return 0j
        return _root_of_unity(t)

    def values(self) -> dict[int, complex]:
        return {a: _root_of_unity(t) for a, t in self._lookup.items()}


def _root_of_unity(t: Fraction) -> complex:
    # exact values for the angles that occur as real/quartic characters
    if t == 0:
        return complex(1.0, 0.0)
    if t == Fraction(1, 2):
        return complex(-1.0, 0.0)
    if t == Fraction(1, 4):
        return complex(0.0, 1.0)
    if t == Fraction(3, 4):
        return complex(0.0, -1.0)
    return cmath.exp(2j * math.pi * float(t))


def _cyclic_factors(q: int) -> list[tuple[int, int]]:
    """Generators and orders of the cyclic factors of (Z/qZ)* via CRT.

    Each entry (g, n) is a residue mod q generating a cyclic factor of
    order n; the factors together generate the whole group.
    """
    factors = []
    m = q
    prime_powers = []
    p = 2
    while m > 1:
        if m % p == 0:
            pk = 1
            while m % p == 0:
                m //= p
                pk *= p
            prime_powers.append((p, pk))
        p += 1
    for p, pk in prime_powers:
        if p == 2:
            if pk == 2:
                continue  # trivial factor
            if pk == 4:
                local = [(3, 2)]
            else:
                local = [(pk - 1, 2), (5, pk // 4)]
        else:
            g = _primitive_root(pk)
            local = [(g, euler_phi(pk))]
        # lift each local generator to a residue mod q that is 1 mod q/pk
        other = q // pk
        for g, n in local:
            if other == 1:
                factors.append((g % q, n))
            else:
                # CRT: x = g mod pk, x = 1 mod other
                inv = pow(other, -1, pk)
                x = (1 + other * ((g - 1) * inv % pk)) % q
                factors.append((x, n))
    return factors


def _primitive_root(pk: int) -> int:
    phi = euler_phi(pk)
    prime_divs = set()
    m, d = phi, 2
    while d * d <= m:
        if m % d == 0:
            prime_divs.add(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        prime_divs.add(m)
    for g in range(2, pk):
        if math.gcd(g, pk) != 1:
            continue
        if all(pow(g, phi // d, pk) != 1 for d in prime_divs):
            return g
    raise InvalidModulusError(f"no primitive root mod {pk}")


@lru_cache(maxsize=None)
def character_group(q: int) -> tuple[Character, ...]:
    """The full group of Dirichlet characters mod q.

    Characters are indexed deterministically: the principal character gets
    index 0, the rest are sorted by (order, exact angle table).  The group
    is closed under conjugation and every nonprincipal real character
    matches a Kronecker symbol chi_D on the reduced residues.
    """
    if not 2 <= q <= MAX_MODULUS:
        raise InvalidModulusError(f"supported moduli are 2..{MAX_MODULUS}, got {q}")
    residues = [r.a for r in reduced_residues(q)]
    gens = _cyclic_factors(q)

    # discrete logs by enumeration of the generator lattice
    dlog: dict[int, tuple[int, ...]] = {}

    def extend(i, x, expo):
        if i == len(gens):
            dlog[x] = tuple(expo)
            return
        g, n = gens[i]
        y = x
        for e in range(n):
            extend(i + 1, y, expo + [e])
            y = (y * g) % q

    extend(0, 1, [])
    assert len(dlog) == len(residues)

    orders = [n for _, n in gens]
    raw = []
    for ch_expo in _exponent_tuples(orders):
        angle_by_res = {}
        for a in residues:
            t = sum(Fraction(e * d, n) for e, d, n in zip(ch_expo, dlog[a], orders))
            angle_by_res[a] = t % 1
        angles = tuple(angle_by_res[a] for a in residues)
        order = 1
        for t in angles:
            order = order * t.denominator // math.gcd(order, t.denominator)
        raw.append((angles, order, angle_by_res))

    principal = [r for r in raw if r[1] == 1]
    others = sorted((r for r in raw if r[1] > 1), key=lambda r: (r[1], r[0]))
    ordered = principal + others

    # conjugate pairing by negated angle tables
    table_to_index = {r[0]: i for i, r in enumerate(ordered)}
    chars = []
    for i, (angles, order, angle_by_res) in enumerate(ordered):
        conj = tuple((-t) % 1 for t in angles)
        chars.append(
            Character(
                q=q,
                index=i,
                angles=angles,
                order=order,
                is_principal=(order == 1),
                is_real=(angles == conj),
                conjugate_index=table_to_index[conj],
                _lookup=dict(angle_by_res),
            )
        )
    return tuple(chars)


def _exponent_tuples(orders):
    if not orders:
        yield ()
        return
    for head in range(orders[0]):
        for tail in _exponent_tuples(orders[1:]):
            yield (head,) + tail


def matching_discriminant(chi: Character) -> int:
    """Fundamental discriminant D with chi = kronecker(D, .) on reduced residues.

    Only nonprincipal real characters have one; the match is by value-table
    comparison over the divisor-supported candidates, so zero files keyed by
    discriminant attach unambiguously.
    """
    if chi.is_principal or not chi.is_real:
        raise ValueError("only nonprincipal real characters match a Kronecker symbol")
    residues = [r.a for r in reduced_residues(chi.q)]
    for D in sorted(FUNDAMENTAL_DISCRIMINANTS, key=abs):
        if not is_fundamental_discriminant(D):
            continue
        if chi.q % abs(D) != 0:
            continue
        if all(kronecker(D, a) == int(chi(a).real) for a in residues):
            return D
    raise ValueError(f"no Kronecker symbol matches character {chi.index} mod {chi.q}")


def square_root_count(q: int, a: int) -> int:
    """#{1 <= b <= q : b^2 = a mod q}."""
    if math.gcd(a, q) != 1:
        raise NotReducedError(f"gcd({a},{q}) != 1")
    a %= q
    return sum(1 for b in range(1, q + 1) if (b * b) % q == a)


def c_value(q: int, a: int) -> int:
    """c(q,a) = -1 + #square roots of a mod q; -1 exactly for nonsquares."""
    return -1 + square_root_count(q, a)


def is_square(q: int, a: int) -> bool:
    return square_root_count(q, a) > 0


@dataclass(frozen=True)
class RaceTuple:
    """An ordered tuple of distinct reduced residues mod q."""

    q: int
    residues: tuple[int, ...]

    def __post_init__(self):
        if self.q < 2:
            raise InvalidModulusError(f"modulus must be >= 2, got {self.q}")
        canon = tuple(a % self.q for a in self.residues)
        object.__setattr__(self, "residues", canon)
        phi = euler_phi(self.q)
        if not 2 <= len(canon) <= phi:
            raise ValueError(f"need 2 <= r <= phi(q)={phi}, got r={len(canon)}")
        if len(set(canon)) != len(canon):
            raise ValueError(f"residues must be pairwise distinct: {canon}")
        for a in canon:
            if math.gcd(a, self.q) != 1:
                raise NotReducedError(f"gcd({a},{self.q}) != 1")

    @property
    def r(self) -> int:
        return len(self.residues)

    @property
    def c_values(self) -> tuple[int, ...]:
        return tuple(c_value(self.q, a) for a in self.residues)

    @property
    def bias(self) -> int:
        return bias_factor(self)

    def all_same_type(self) -> bool:
        return len(set(self.c_values)) == 1

    def all_nonsquare(self) -> bool:
        return all(c == -1 for c in self.c_values)

    def all_square(self) -> bool:
        return all(c == c_value(self.q, 1) for c in self.c_values)

    def reversed(self) -> "RaceTuple":
        return RaceTuple(self.q, tuple(reversed(self.residues)))

    def inverse(self) -> "RaceTuple":
        return RaceTuple(self.q, tuple(pow(a, -1, self.q) for a in self.residues))


def bias_factor(t: RaceTuple) -> int:
    """Signed count of nonsquare-before-square pairs minus the reverse.

    Equals (1/(c(q,1)+1)) * sum_j (2j-r-1) c(q,a_j); always an integer.
    """
    r = t.r
    cs = t.c_values
    total = Fraction(sum((2 * (j + 1) - r - 1) * c for j, c in enumerate(cs)),
                     c_value(t.q, 1) + 1)
    assert total.denominator == 1
    return int(total)
