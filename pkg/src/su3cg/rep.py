"""SU(3) irreps, occupation-basis states, weights and tensor-product decomposition."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .exact import HalfInt, to_twice

__all__ = [
    "IrrepLabel",
    "StateLabel",
    "Decomposition",
    "DecompositionEntry",
    "NotInProduct",
    "dimension",
    "enumerate_states",
    "highest_weight",
    "decompose_product",
    "decompose_by_peeling",
    "grade",
    "weight_multiplicities",
]


class NotInProduct(ValueError):
    """The target irrep does not occur in the requested tensor product."""


@dataclass(frozen=True, order=True)
class IrrepLabel:
    lam: int
    mu: int

    def __post_init__(self):
        if self.lam < 0 or self.mu < 0:
            raise ValueError(f"irrep labels must be non-negative, got ({self.lam},{self.mu})")

    @property
    def n_quanta(self) -> int:
        """Total occupation lambda + 2 mu."""
        return self.lam + 2 * self.mu

    @property
    def dim(self) -> int:
        return dimension(self)

    def conjugate(self) -> "IrrepLabel":
        return IrrepLabel(self.mu, self.lam)

    def __str__(self) -> str:
        return f"({self.lam},{self.mu})"


def irrep(x) -> IrrepLabel:
    if isinstance(x, IrrepLabel):
        return x
    lam, mu = x
    return IrrepLabel(int(lam), int(mu))


@dataclass(frozen=True)
class StateLabel:
    """|(lam,mu) nu1 nu2 nu3; I>.  ``tI`` is twice the su(2) label I."""

    irrep: IrrepLabel
    nu: tuple[int, int, int]
    tI: int

    @classmethod
    def make(cls, irr, nu, I) -> "StateLabel":
        return cls(irrep(irr), tuple(int(x) for x in nu), to_twice(I))

    @property
    def I(self) -> HalfInt:
        return HalfInt.from_twice(self.tI)

    @property
    def weight(self) -> tuple[int, int]:
        n1, n2, n3 = self.nu
        return (n1 - n2, n2 - n3)

    @property
    def tM(self) -> int:
        """Twice the su(2) projection (nu2 - nu3)/2."""
        return self.nu[1] - self.nu[2]

    def is_valid(self) -> bool:
        return is_valid_state(self.irrep, self.nu, self.tI)

    def __str__(self) -> str:
        n1, n2, n3 = self.nu
        return f"|{self.irrep} {n1},{n2},{n3}; {self.I}>"


def _tri(ta: int, tb: int, tc: int) -> bool:
    return abs(ta - tb) <= tc <= ta + tb and (ta + tb + tc) % 2 == 0


def is_valid_state(irr: IrrepLabel, nu, tI: int) -> bool:
    n1, n2, n3 = nu
    if min(n1, n2, n3) < 0 or n1 + n2 + n3 != irr.n_quanta or tI < 0:
        return False
    return _tri(n2, n3, tI) and _tri(tI, n1, irr.lam)


def dimension(irr) -> int:
    irr = irrep(irr)
    lam, mu = irr.lam, irr.mu
    return (lam + 1) * (mu + 1) * (lam + mu + 2) // 2


def su2_labels(irr: IrrepLabel, nu1: int) -> list[int]:
    """Twice the allowed I values of the multiplets at u(1) label nu1, descending."""
    rest = irr.n_quanta - nu1
    if nu1 < 0 or rest < 0:
        return []
    hi = min(rest, nu1 + irr.lam)
    lo = abs(nu1 - irr.lam)
    out = [t for t in range(hi, lo - 1, -1) if (t - rest) % 2 == 0 and (t + nu1 + irr.lam) % 2 == 0]
    return out


@lru_cache(maxsize=4096)
def _states(irr: IrrepLabel) -> tuple[StateLabel, ...]:
    out = []
    N = irr.n_quanta
    for n1 in range(irr.lam + irr.mu, -1, -1):
        rest = N - n1
        for n2 in range(rest, -1, -1):
            n3 = rest - n2
            for tI in range(n2 + n3, abs(n2 - n3) - 1, -2):
                if _tri(tI, n1, irr.lam):
                    out.append(StateLabel(irr, (n1, n2, n3), tI))
    return tuple(out)


def enumerate_states(irr) -> list[StateLabel]:
    """All basis states, ordered by (nu1 desc, nu2 desc, I desc)."""
    return list(_states(irrep(irr)))


def highest_weight(irr) -> StateLabel:
    irr = irrep(irr)
    return StateLabel(irr, (irr.lam + irr.mu, irr.mu, 0), irr.mu)


def weight_multiplicities(irr) -> Counter:
    return Counter(s.weight for s in _states(irrep(irr)))


def grade(a, b, target) -> int:
    """Grade k: number of determinant factors separating the product from the target."""
    a, b, target = irrep(a), irrep(b), irrep(target)
    num = a.lam + b.lam - target.lam + 2 * (a.mu + b.mu - target.mu)
    if num % 3 or num < 0:
        raise NotInProduct(f"{target} cannot occur in {a} x {b}: grade {num}/3")
    return num // 3


@dataclass(frozen=True)
class DecompositionEntry:
    irrep: IrrepLabel
    multiplicity: int
    k: int


class Decomposition(tuple):
    """Sorted tuple of :class:`DecompositionEntry`, ordered by (k, p2 descending)."""

    def multiplicity(self, target) -> int:
        target = irrep(target)
        for e in self:
            if e.irrep == target:
                return e.multiplicity
        return 0

    def as_dict(self) -> dict[IrrepLabel, int]:
        return {e.irrep: e.multiplicity for e in self}

    def total_dimension(self) -> int:
        return sum(e.multiplicity * dimension(e.irrep) for e in self)

    def is_multiplicity_free(self) -> bool:
        return all(e.multiplicity == 1 for e in self)


def _make_decomposition(a: IrrepLabel, b: IrrepLabel, counts: Counter) -> Decomposition:
    entries = [DecompositionEntry(t, m, grade(a, b, t)) for t, m in counts.items() if m]
    entries.sort(key=lambda e: (e.k, -e.irrep.lam, -e.irrep.mu))
    return Decomposition(entries)


def _reflect_dominant(x: int, y: int) -> tuple[int, int, int]:
    """Weyl-reflect a rho-shifted Dynkin weight into the dominant chamber.

    Returns (sign, x, y); sign 0 when the weight lies on a chamber wall.
    """
    sign = 1
    while True:
        if x == 0 or y == 0:
            return 0, x, y
        if x < 0:
            x, y = -x, x + y
            sign = -sign
        elif y < 0:
            x, y = x + y, -y
            sign = -sign
        else:
            return sign, x, y


@lru_cache(maxsize=1024)
def _decompose(a: IrrepLabel, b: IrrepLabel) -> Decomposition:
    big, small = (a, b) if dimension(a) >= dimension(b) else (b, a)
    counts: Counter = Counter()
    for (w1, w2), m in weight_multiplicities(small).items():
        s, x, y = _reflect_dominant(big.lam + w1 + 1, big.mu + w2 + 1)
        if s:
            counts[IrrepLabel(x - 1, y - 1)] += s * m
    if any(v < 0 for v in counts.values()):
        raise AssertionError("negative multiplicity in Brauer-Klimyk sum")
    return _make_decomposition(a, b, counts)


def decompose_product(a, b) -> Decomposition:
    """Decompose a x b into irreps with multiplicities and grades.

    Uses the Brauer-Klimyk sum over the weights of the smaller factor.
    """
    return _decompose(irrep(a), irrep(b))


def decompose_by_peeling(a, b) -> Decomposition:
    """Independent decomposition: convolve characters, peel highest dominant weights."""
    a, b = irrep(a), irrep(b)
    wa, wb = weight_multiplicities(a), weight_multiplicities(b)
    prod: Counter = Counter()
    for (x1, y1), m1 in wa.items():
        for (x2, y2), m2 in wb.items():
            prod[(x1 + x2, y1 + y2)] += m1 * m2
    counts: Counter = Counter()
    while True:
        live = [w for w, m in prod.items() if m]
        if not live:
            break
        # highest weight: maximal in the partial order, pick by largest height 2x+y... tie-safe
        top = max(live, key=lambda w: (2 * w[0] + w[1], w[0] + 2 * w[1]))
        if top[0] < 0 or top[1] < 0:
            raise AssertionError("non-dominant top weight while peeling")
        m = prod[top]
        t = IrrepLabel(*top)
        counts[t] += m
        for w, mw in weight_multiplicities(t).items():
            prod[w] -= m * mw
    return _make_decomposition(a, b, counts)


def iter_targets(a, b) -> Iterator[DecompositionEntry]:
    yield from decompose_product(a, b)
