"""Finite root systems with exact arithmetic.

Weights are stored in fundamental-weight coordinates, so the pairing with
the i-th simple coroot is literally `coords[i]`. Roots, the invariant form,
reflections and the Weyl dimension formula are all computed in exact
rationals; Weyl groups are enumerated on demand by breadth-first closure
of the generating reflections, with a hard element cap.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from . import linalg
from .errors import ComputationRefused, InvalidInput

DEFAULT_WEYL_CAP = 10**7


def weyl_element_cap() -> int:
    """Enumeration cap for reflection groups; SYMVAR_MAX_WEYL overrides it."""
    raw = os.environ.get("SYMVAR_MAX_WEYL")
    if raw is None:
        return DEFAULT_WEYL_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise InvalidInput(f"SYMVAR_MAX_WEYL is not an integer: {raw!r}") from exc
    if cap <= 0:
        raise InvalidInput("SYMVAR_MAX_WEYL must be positive")
    return cap


class Weight:
    """A lattice or rational weight in fundamental-weight coordinates."""

    __slots__ = ("coords",)

    def __init__(self, coords: Iterable):
        self.coords = tuple(Fraction(c) for c in coords)

    def __add__(self, other: "Weight") -> "Weight":
        return Weight(linalg.vadd(self.coords, other.coords))

    def __sub__(self, other: "Weight") -> "Weight":
        return Weight(linalg.vsub(self.coords, other.coords))

    def __neg__(self) -> "Weight":
        return Weight(tuple(-c for c in self.coords))

    def __mul__(self, scalar) -> "Weight":
        return Weight(linalg.vscale(Fraction(scalar), self.coords))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, Weight) and self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def __lt__(self, other: "Weight") -> bool:
        return self.coords < other.coords

    def __repr__(self) -> str:
        return f"Weight({list(self.coords)})"

    @property
    def rank(self) -> int:
        return len(self.coords)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def is_dominant(self) -> bool:
        return all(c >= 0 for c in self.coords)

    def int_coords(self) -> tuple[int, ...]:
        if not self.is_integral():
            raise InvalidInput(f"weight {self} is not integral")
        return tuple(int(c) for c in self.coords)


def zero_weight(rank: int) -> Weight:
    return Weight((0,) * rank)


@dataclass(frozen=True)
class CartanDatum:
    """A finite-type Cartan matrix with its minimal positive symmetrizers.

    Symmetrizers are normalized so that short roots in every irreducible
    component have squared length 2 under the invariant form
    kappa(alpha_i, alpha_j) = d_i * A_ij.
    """

    rank: int
    cartan_matrix: tuple[tuple[int, ...], ...]
    symmetrizers: tuple[int, ...]

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[int]]) -> "CartanDatum":
        a = tuple(tuple(int(v) for v in row) for row in matrix)
        n = len(a)
        if any(len(row) != n for row in a):
            raise InvalidInput("cartan matrix is not square")
        for i in range(n):
            if a[i][i] != 2:
                raise InvalidInput(f"cartan matrix has A[{i}][{i}] != 2")
            for j in range(n):
                if i != j:
                    if a[i][j] > 0:
                        raise InvalidInput(f"cartan matrix has positive off-diagonal A[{i}][{j}]")
                    if (a[i][j] == 0) != (a[j][i] == 0):
                        raise InvalidInput(f"cartan matrix has asymmetric zero at ({i},{j})")
        d = _symmetrizers(a)
        gram = [[d[i] * a[i][j] for j in range(n)] for i in range(n)]
        if not _positive_definite(gram):
            raise InvalidInput("cartan matrix is not of finite type (symmetrization not positive definite)")
        return cls(rank=n, cartan_matrix=a, symmetrizers=d)

    @classmethod
    def from_type(cls, name: str) -> "CartanDatum":
        """Build a datum from a type string like "A2", "G2" or "A1xA1"."""
        blocks = [_type_cartan(part.strip()) for part in name.split("x")]
        n = sum(len(b) for b in blocks)
        a = [[0] * n for _ in range(n)]
        offset = 0
        for b in blocks:
            for i, row in enumerate(b):
                for j, v in enumerate(row):
                    a[offset + i][offset + j] = v
            offset += len(b)
        return cls.from_matrix(a)


def _type_cartan(name: str) -> list[list[int]]:
    if len(name) < 2 or name[0] not in "ABCDEFG":
        raise InvalidInput(f"unknown cartan type {name!r}")
    letter, n = name[0], int(name[1:])
    if n < 1:
        raise InvalidInput(f"rank must be positive in {name!r}")
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for i in range(n - 1):
        a[i][i + 1] = a[i + 1][i] = -1
    if letter == "A":
        return a
    if letter == "B" and n >= 2:
        a[n - 1][n - 2] = -2  # last node short
        return a
    if letter == "C" and n >= 2:
        a[n - 2][n - 1] = -2  # last node long
        return a
    if letter == "D" and n >= 3:
        a[n - 1][n - 2] = a[n - 2][n - 1] = 0
        a[n - 1][n - 3] = a[n - 3][n - 1] = -1
        return a
    if letter == "E" and n in (6, 7, 8):
        a[n - 1][n - 2] = a[n - 2][n - 1] = 0
        a[n - 1][2] = a[2][n - 1] = -1
        return a
    if letter == "F" and n == 4:
        a[2][1] = -2
        a[1][2] = -1
        return a
    if letter == "G" and n == 2:
        a[0][1] = -3
        a[1][0] = -1
        return a
    raise InvalidInput(f"unknown cartan type {name!r}")


def _symmetrizers(a: tuple[tuple[int, ...], ...]) -> tuple[int, ...]:
    n = len(a)
    d: list[Fraction | None] = [None] * n
    for start in range(n):
        if d[start] is not None:
            continue
        d[start] = Fraction(1)
        stack = [start]
        component = [start]
        while stack:
            i = stack.pop()
            for j in range(n):
                if i != j and a[i][j] != 0:
                    ratio = Fraction(a[j][i], a[i][j])  # d_i/d_j
                    val = d[i] / ratio
                    if d[j] is None:
                        d[j] = val
                        stack.append(j)
                        component.append(j)
                    elif d[j] != val:
                        raise InvalidInput("cartan matrix admits no symmetrizer")
        low = min(d[k] for k in component)
        for k in component:
            d[k] = d[k] / low
    if any(v is None or v.denominator != 1 for v in d):
        raise InvalidInput("cartan matrix admits no integer symmetrizer")
    return tuple(int(v) for v in d)


def _positive_definite(gram: Sequence[Sequence[int]]) -> bool:
    n = len(gram)
    for k in range(1, n + 1):
        minor = [row[:k] for row in gram[:k]]
        if linalg.det(minor) <= 0:
            return False
    return True


class RootSystem:
    """All roots of a finite-type datum, closed under the simple reflections."""

    def __init__(self, datum: CartanDatum, roots: tuple[Weight, ...]):
        self.datum = datum
        self.rank = datum.rank
        self.roots = roots
        self._root_set = frozenset(roots)
        self.simple_roots = tuple(
            Weight(tuple(datum.cartan_matrix[i][j] for i in range(datum.rank)))
            for j in range(datum.rank)
        )
        self.positive_roots = tuple(
            r for r in roots if all(c >= 0 for c in self.root_coordinates(r))
        )

    @cached_property
    def inverse_cartan(self) -> tuple[tuple[Fraction, ...], ...]:
        return linalg.invert(self.datum.cartan_matrix)

    def root_coordinates(self, w: Weight) -> tuple[Fraction, ...]:
        """Coordinates of w in the simple-root basis."""
        return linalg.mat_vec(self.inverse_cartan, w.coords)

    def kappa(self, x: Weight, y: Weight) -> Fraction:
        """Weyl-invariant form, normalized so short simple roots have norm 2."""
        ry = self.root_coordinates(y)
        d = self.datum.symmetrizers
        return sum(d[j] * x.coords[j] * ry[j] for j in range(self.rank))

    def coroot_pairing(self, lam: Weight, alpha: Weight) -> Fraction:
        """Pairing 2*kappa(lam, alpha)/kappa(alpha, alpha)."""
        return 2 * self.kappa(lam, alpha) / self.kappa(alpha, alpha)

    def reflect(self, i: int, w: Weight) -> Weight:
        return Weight(
            linalg.vsub(w.coords, linalg.vscale(w.coords[i], self.simple_roots[i].coords))
        )

    def reflection_matrix(self, i: int) -> tuple[tuple[int, ...], ...]:
        """Matrix of the i-th simple reflection on fundamental-weight coordinates."""
        a = self.datum.cartan_matrix
        n = self.rank
        return tuple(
            tuple((1 if k == j else 0) - (a[k][i] if j == i else 0) for j in range(n))
            for k in range(n)
        )

    def is_root(self, w: Weight) -> bool:
        return w in self._root_set

    @cached_property
    def weyl_order(self) -> int:
        """Order of the Weyl group (orbit size of a regular dominant weight)."""
        rho = Weight((1,) * self.rank)
        gens = [self.reflection_matrix(i) for i in range(self.rank)]
        return len(orbit_of_vector(gens, rho.int_coords()))

    def fundamental_weight(self, i: int) -> Weight:
        return Weight(tuple(1 if j == i else 0 for j in range(self.rank)))


def build_root_system(datum: CartanDatum) -> RootSystem:
    """Reflection closure of the simple roots; rejects non-finite-type data."""
    simple = [
        Weight(tuple(datum.cartan_matrix[i][j] for i in range(datum.rank)))
        for j in range(datum.rank)
    ]
    seen: set[Weight] = set(simple) | {-s for s in simple}
    frontier = list(seen)
    while frontier:
        nxt = []
        for w in frontier:
            for i in range(datum.rank):
                img = Weight(
                    linalg.vsub(w.coords, linalg.vscale(w.coords[i], simple[i].coords))
                )
                if img not in seen:
                    seen.add(img)
                    nxt.append(img)
        frontier = nxt
    roots = tuple(sorted(seen))
    rs = RootSystem(datum, roots)
    if 2 * len(rs.positive_roots) != len(roots):
        raise InvalidInput("reflection closure is not symmetric; datum is invalid")
    return rs


def orbit_of_vector(generators: Sequence[Sequence[Sequence[int]]],
                    seed: Sequence[int],
                    cap: int | None = None) -> set[tuple[int, ...]]:
    """BFS orbit of an integer vector under a list of integer matrices."""
    cap = weyl_element_cap() if cap is None else cap
    start = tuple(int(v) for v in seed)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for v in frontier:
            for g in generators:
                img = tuple(int(x) for x in linalg.mat_vec(g, v))
                if img not in seen:
                    seen.add(img)
                    if len(seen) > cap:
                        raise ComputationRefused(
                            f"orbit exceeds the enumeration cap of {cap} elements"
                        )
                    nxt.append(img)
        frontier = nxt
    return seen


def matrix_group_elements(generators: Sequence[Sequence[Sequence[int]]],
                          cap: int | None = None) -> set[tuple[tuple[int, ...], ...]]:
    """BFS closure of integer matrices under multiplication, including identity."""
    cap = weyl_element_cap() if cap is None else cap
    if not generators:
        return set()
    n = len(generators[0])
    gens = [tuple(tuple(int(v) for v in row) for row in g) for g in generators]
    elements = {linalg.identity(n)}
    frontier = list(elements)
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                prod = linalg.mat_mul(g, m)
                if prod not in elements:
                    elements.add(prod)
                    if len(elements) > cap:
                        raise ComputationRefused(
                            f"group closure exceeds the enumeration cap of {cap} elements"
                        )
                    nxt.append(prod)
        frontier = nxt
    return elements


def weyl_dim(rs: RootSystem, mu: Weight) -> int:
    """Dimension of the Weyl module of highest weight mu (exact product formula)."""
    if not mu.is_dominant():
        raise InvalidInput(f"weight {mu} is not dominant")
    if not mu.is_integral():
        raise InvalidInput(f"weight {mu} is not integral")
    result = Fraction(1)
    d = rs.datum.symmetrizers
    for alpha in rs.positive_roots:
        c = rs.root_coordinates(alpha)
        denom = sum(d[j] * c[j] for j in range(rs.rank))
        numer = sum(d[j] * c[j] * (mu.coords[j] + 1) for j in range(rs.rank))
        result *= Fraction(numer, denom)
    if result.denominator != 1 or result <= 0:
        raise InvalidInput("weyl dimension did not evaluate to a positive integer")
    return int(result)


def leq_restricted(lhs: Weight, rhs: Weight, simple_restricted: Sequence[Weight]) -> bool:
    """Whether rhs - lhs is a nonnegative integer combination of the given roots.

    The combination is solved exactly; False when the difference leaves the
    rational span or has a negative or fractional coefficient.
    """
    diff = (rhs - lhs).coords
    coeffs = linalg.solve_in_span([w.coords for w in simple_restricted], diff)
    if coeffs is None:
        return False
    return all(c >= 0 and c.denominator == 1 for c in coeffs)


def fundamental_weight_decomposition(
    rs: RootSystem, j: int, roots_part: Iterable[int]
) -> tuple[dict[int, Fraction], dict[int, Fraction]]:
    """Split a fundamental weight across a root span and a weight span.

    Returns exact rationals (a, b) with
        omega_j = sum_{h in roots_part} a[h]*alpha_h + sum_{k not in roots_part} b[k]*omega_k,
    the orthogonal decomposition against span{alpha_h} and span{omega_k}.
    All coefficients are nonnegative, and the a[h] are strictly positive when
    roots_part covers every node of an irreducible datum.
    """
    n = rs.rank
    k_set = sorted(set(roots_part))
    if j not in range(n) or any(h not in range(n) for h in k_set):
        raise InvalidInput("node index out of range")
    rest = [k for k in range(n) if k not in k_set]
    columns = [rs.simple_roots[h].coords for h in k_set] + [
        rs.fundamental_weight(k).coords for k in rest
    ]
    target = rs.fundamental_weight(j).coords
    coeffs = linalg.solve_in_span(columns, target)
    if coeffs is None:
        raise InvalidInput("decomposition system is inconsistent")
    a = {h: coeffs[idx] for idx, h in enumerate(k_set)}
    b = {k: coeffs[len(k_set) + idx] for idx, k in enumerate(rest)}
    return a, b
