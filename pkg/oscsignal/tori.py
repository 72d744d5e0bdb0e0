from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np

from .errors import NotCyclic
from .field import PrimeModulus, half, legendre_table, primitive_root
from .weil import SL2Element

logger = logging.getLogger(__name__)

SPLIT = "split"
NONSPLIT = "non-split"

_KIND_ALIASES = {
    "split": SPLIT,
    "non-split": NONSPLIT,
    "nonsplit": NONSPLIT,
    "ns": NONSPLIT,
}

Matrix = Tuple[int, int, int, int]


def normalize_kind(kind: str) -> str:
    try:
        return _KIND_ALIASES[kind.lower()]
    except KeyError as exc:
        raise ValueError(f"Unsupported torus kind '{kind}'. Choose from: split, non-split.") from exc


# ────────────────────────────────────────────────
# Element classification
# ────────────────────────────────────────────────
def discriminant(g: SL2Element) -> int:
    return (g.trace * g.trace - 4) % g.p


def classify_element(g: SL2Element) -> str:
    """central / unipotent-type / split-regular / nonsplit-regular by sigma(tr^2 - 4)."""
    if g.is_central():
        return "central"
    sign = legendre_table(g.p)[discriminant(g)]
    if sign == 0:
        return "unipotent-type"
    return "split-regular" if sign == 1 else "nonsplit-regular"


def _mul(m: Matrix, n: Matrix, p: int) -> Matrix:
    a, b, c, d = m
    e, f, g, h = n
    return ((a * e + b * g) % p, (a * f + b * h) % p, (c * e + d * g) % p, (c * f + d * h) % p)


def _order(m: Matrix, p: int, limit: int) -> int:
    identity = (1, 0, 0, 1)
    current, n = m, 1
    while current != identity:
        if n > limit:
            return -1
        current = _mul(current, m, p)
        n += 1
    return n


# ────────────────────────────────────────────────
# Tori
# ────────────────────────────────────────────────
Direction = Tuple[int, int, int]


def _canonical_direction(x: int, y: int, z: int, p: int) -> Optional[Direction]:
    x, y, z = x % p, y % p, z % p
    lead = x or y or z
    if not lead:
        return None
    scale = pow(lead, p - 2, p)
    return (x * scale % p, y * scale % p, z * scale % p)


def direction_of(g: SL2Element) -> Optional[Direction]:
    """Traceless part g - tr(g)/2 I, as (x, y, z) for [[x, y], [z, -x]] up to scalar."""
    p = g.p
    return _canonical_direction((g.a - g.d) * half(p), g.b, g.c, p)


def traceless_directions(p: int) -> List[Direction]:
    """Projective points (1, y, z), (0, 1, z), (0, 0, 1) with x^2 + yz != 0."""
    candidates = [(1, y, z) for y in range(p) for z in range(p)]
    candidates += [(0, 1, z) for z in range(p)] + [(0, 0, 1)]
    return [d for d in candidates if (d[0] * d[0] + d[1] * d[2]) % p]


@lru_cache(maxsize=None)
def _norm_one(D: int, p: int) -> np.ndarray:
    """All (s, u) with s^2 - D u^2 = 1."""
    s, u = np.meshgrid(np.arange(p), np.arange(p), indexing="ij")
    mask = (s * s - D * u * u - 1) % p == 0
    out = np.stack([s[mask], u[mask]], axis=1)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Torus:
    """A maximal torus {sI + uX : det = 1} of SL2(F_p) with its chosen cyclic generator."""

    torus_id: int
    kind: str
    p: int
    direction: Direction
    matrices: np.ndarray = field(repr=False)
    generator: SL2Element = field(default=None)  # type: ignore[assignment]

    @property
    def order(self) -> int:
        return int(self.matrices.shape[0])

    @cached_property
    def elements(self) -> Tuple[SL2Element, ...]:
        return tuple(SL2Element(*row, self.p) for row in self.matrices.tolist())

    @cached_property
    def codes(self) -> FrozenSet[int]:
        p = self.p
        m = self.matrices
        return frozenset((((m[:, 0] * p + m[:, 1]) * p + m[:, 2]) * p + m[:, 3]).tolist())

    def __contains__(self, g: SL2Element) -> bool:
        return g.code in self.codes

    def __len__(self) -> int:
        return self.order

    def to_dict(self) -> Dict[str, object]:
        return {
            "torus": self.torus_id,
            "kind": self.kind,
            "order": self.order,
            "direction": list(self.direction),
            "generator": list(self.generator.as_tuple()),
        }


def _build_torus(torus_id: int, direction: Direction, p: int) -> Torus:
    x, y, z = direction
    D = (x * x + y * z) % p
    kind = SPLIT if legendre_table(p)[D] == 1 else NONSPLIT
    su = _norm_one(D, p)
    s, u = su[:, 0], su[:, 1]
    matrices = np.stack([(s + u * x) % p, (u * y) % p, (u * z) % p, (s - u * x) % p], axis=1)
    order = np.lexsort(matrices.T[::-1])
    matrices = matrices[order]
    matrices.setflags(write=False)
    expected = p - 1 if kind == SPLIT else p + 1
    if matrices.shape[0] != expected:
        raise NotCyclic(f"torus along {direction} has {matrices.shape[0]} elements, expected {expected}")
    torus = Torus(torus_id, kind, p, direction, matrices)
    return replace(torus, generator=torus_generator(torus))


def torus_generator(torus: Torus) -> SL2Element:
    """Smallest element (lexicographic in a, b, c, d) of exact order |T|."""
    order = torus.order
    for row in torus.matrices.tolist():
        if _order(tuple(row), torus.p, order) == order:
            return SL2Element(*row, torus.p)
    raise NotCyclic(f"torus along {torus.direction} over F_{torus.p} has no element of order {order}")


class TorusCatalog:
    """
    All maximal tori of SL2(F_p), split ones first, each in canonical
    direction order. Regular elements are located through their traceless
    direction, so no element table is kept.
    """

    def __init__(self, p: int) -> None:
        self.p = PrimeModulus(p).p
        built = [_build_torus(0, d, p) for d in traceless_directions(p)]
        split = [t for t in built if t.kind == SPLIT]
        nonsplit = [t for t in built if t.kind == NONSPLIT]
        self.tori: List[Torus] = [
            Torus(i, t.kind, p, t.direction, t.matrices, t.generator)
            for i, t in enumerate(split + nonsplit)
        ]
        self._by_direction: Dict[Direction, Torus] = {t.direction: t for t in self.tori}
        logger.debug("SL2(F_%d): %d split and %d non-split tori", p, len(split), len(nonsplit))

    def __len__(self) -> int:
        return len(self.tori)

    def __iter__(self):
        return iter(self.tori)

    def __getitem__(self, torus_id: int) -> Torus:
        return self.tori[torus_id]

    def by_kind(self, kind: str) -> List[Torus]:
        if kind in ("both", "all"):
            return list(self.tori)
        kind = normalize_kind(kind)
        return [t for t in self.tori if t.kind == kind]

    @property
    def split(self) -> List[Torus]:
        return self.by_kind(SPLIT)

    @property
    def nonsplit(self) -> List[Torus]:
        return self.by_kind(NONSPLIT)

    def torus_of(self, g: SL2Element) -> Optional[Torus]:
        """The unique maximal torus containing a regular element; None for central or unipotent-type g."""
        if classify_element(g) not in ("split-regular", "nonsplit-regular"):
            return None
        return self._by_direction[direction_of(g)]

    def conjugate(self, torus: Torus, g: SL2Element) -> Torus:
        """g T g^-1."""
        image = self.torus_of(torus.generator.conjugate(g))
        assert image is not None
        return image

    def standard_torus(self) -> Torus:
        torus = self.torus_of(SL2Element.diagonal(primitive_root(self.p), self.p))
        if torus is None:  # p = 3: diag(2, 2) = -I is central
            return self._by_direction[(1, 0, 0)]
        return torus

    def weyl_torus(self) -> Torus:
        torus = self.torus_of(SL2Element.weyl(self.p))
        assert torus is not None
        return torus

    def form_preserving_torus(self) -> Optional[Torus]:
        """SO(B) for B = tt' + ww'; reported only when -1 is a non-square, where it is non-split."""
        if legendre_table(self.p)[self.p - 1] != -1:
            return None
        elements = form_preserving_elements(self.p)
        torus = self.weyl_torus()
        if frozenset(g.code for g in elements) != torus.codes:
            raise NotCyclic(f"the B-preserving subgroup over F_{self.p} is not a catalogued torus")
        return torus

    def table(self) -> List[Dict[str, object]]:
        return [t.to_dict() for t in self.tori]


@lru_cache(maxsize=8)
def torus_catalog(p: int) -> TorusCatalog:
    return TorusCatalog(p)


def enumerate_tori(p: int, kind: str) -> List[Torus]:
    return torus_catalog(p).by_kind(kind)


# ────────────────────────────────────────────────
# Brute-force oracles
# ────────────────────────────────────────────────
@lru_cache(maxsize=8)
def group_array(p: int) -> np.ndarray:
    """Every element of SL2(F_p) as rows (a, b, c, d) in lexicographic order."""
    inv = np.array([0] + [pow(x, p - 2, p) for x in range(1, p)], dtype=np.int64)
    # a != 0: d = (1 + bc) / a
    a, b, c = (m.ravel() for m in np.meshgrid(np.arange(1, p), np.arange(p), np.arange(p), indexing="ij"))
    regular = np.stack([a, b, c, (1 + b * c) * inv[a] % p], axis=1)
    # a == 0: c = -1 / b, d free
    b, d = (m.ravel() for m in np.meshgrid(np.arange(1, p), np.arange(p), indexing="ij"))
    anti = np.stack([np.zeros_like(b), b, (-inv[b]) % p, d], axis=1)
    out = np.concatenate([anti, regular])
    out = out[np.lexsort(out.T[::-1])]
    out.setflags(write=False)
    return out


def enumerate_group(p: int) -> List[SL2Element]:
    return [SL2Element(*row, p) for row in group_array(p).tolist()]


def _codes(rows: np.ndarray, p: int) -> FrozenSet[int]:
    return frozenset((((rows[:, 0] * p + rows[:, 1]) * p + rows[:, 2]) * p + rows[:, 3]).tolist())


def centralizer_bruteforce(g: SL2Element) -> FrozenSet[int]:
    """Codes of every x in SL2(F_p) with xg = gx, by a full group scan."""
    p = g.p
    G = group_array(p)
    a, b, c, d = G[:, 0], G[:, 1], G[:, 2], G[:, 3]
    # xg and gx entrywise
    xg = np.stack([a * g.a + b * g.c, a * g.b + b * g.d, c * g.a + d * g.c, c * g.b + d * g.d], axis=1) % p
    gx = np.stack([g.a * a + g.b * c, g.a * b + g.b * d, g.c * a + g.d * c, g.c * b + g.d * d], axis=1) % p
    return _codes(G[np.all(xg == gx, axis=1)], p)


def tori_bruteforce(p: int) -> Dict[str, set]:
    """Centralizers of all regular elements, deduplicated, keyed by kind."""
    found: Dict[str, set] = {SPLIT: set(), NONSPLIT: set()}
    assigned: set = set()
    for g in enumerate_group(p):
        kind = classify_element(g)
        if kind not in ("split-regular", "nonsplit-regular") or g.code in assigned:
            continue
        cent = centralizer_bruteforce(g)
        assigned |= cent
        found[SPLIT if kind == "split-regular" else NONSPLIT].add(cent)
    return found


def form_preserving_elements(p: int) -> List[SL2Element]:
    """g in SL2(F_p) with B(gu, gv) = B(u, v) for B = tt' + ww', i.e. g^T g = I.

    Orthonormal columns with determinant 1 force g = [[a, -c], [c, a]] with a^2 + c^2 = 1.
    """
    a, c = np.meshgrid(np.arange(p), np.arange(p), indexing="ij")
    mask = (a * a + c * c) % p == 1
    return sorted(SL2Element(int(x), -int(y), int(y), int(x), p) for x, y in zip(a[mask], c[mask]))
