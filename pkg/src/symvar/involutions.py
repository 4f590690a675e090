"""Involutions of a weight lattice and their restricted root data.

An involution is a rank x rank integer matrix acting on fundamental-weight
coordinates, compatible with the root system and the Borel convention that
positive roots not fixed by the involution map to negative roots. From it we
derive the (possibly non-reduced) restricted root system, the exceptional
simple roots, and the tower of spherical weight lattices.

Lattices are handled as integer basis matrices in Hermite normal form; every
membership or sandwich test is an exact integer computation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from . import linalg
from .errors import InvalidInput
from .roots import (
    RootSystem,
    Weight,
    matrix_group_elements,
    zero_weight,
)

IMat = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class InvolutionDatum:
    """A validated lattice involution together with its derived diagram data.

    `sigma` acts on fundamental-weight coordinates; `delta0` is the set of
    simple roots fixed pointwise, `delta1` its complement, `sigma_bar` the
    induced involution of delta1, and `exceptional` the simple roots alpha
    with sigma_bar(alpha) != alpha and kappa(sigma(alpha), alpha) != 0.
    """

    rs: RootSystem
    sigma: IMat
    delta0: tuple[int, ...]
    delta1: tuple[int, ...]
    sigma_bar: tuple[tuple[int, int], ...]
    exceptional: tuple[int, ...]

    def apply(self, w: Weight) -> Weight:
        return Weight(linalg.mat_vec(self.sigma, w.coords))

    def sigma_bar_map(self) -> dict[int, int]:
        return dict(self.sigma_bar)

    def is_anti_invariant(self, w: Weight) -> bool:
        return self.apply(w) == -w


def longest_parabolic_element(rs: RootSystem, subset: Iterable[int]) -> IMat:
    """Matrix of the longest element of the parabolic Weyl subgroup W_subset."""
    nodes = sorted(set(subset))
    n = rs.rank
    m = linalg.identity(n)
    x = [Fraction(1) if i in nodes else Fraction(0) for i in range(n)]
    while True:
        i = next((i for i in nodes if x[i] > 0), None)
        if i is None:
            return tuple(tuple(int(v) for v in row) for row in m)
        s = rs.reflection_matrix(i)
        m = linalg.mat_mul(s, m)
        x = list(linalg.mat_vec(s, x))


def build_involution(rs: RootSystem, delta0: Iterable[int],
                     diagram_auto: Sequence[int]) -> InvolutionDatum:
    """Involution in normal form: minus (longest parabolic element) o (diagram map).

    `diagram_auto` is a permutation of the nodes that must preserve the Cartan
    matrix and stabilize delta0 setwise.
    """
    n = rs.rank
    delta0 = tuple(sorted(set(delta0)))
    perm = tuple(int(p) for p in diagram_auto)
    if sorted(perm) != list(range(n)):
        raise InvalidInput("diagram_auto is not a permutation of the nodes")
    a = rs.datum.cartan_matrix
    for i in range(n):
        for j in range(n):
            if a[perm[i]][perm[j]] != a[i][j]:
                raise InvalidInput("diagram_auto does not preserve the cartan matrix")
    if set(perm[i] for i in delta0) != set(delta0):
        raise InvalidInput("delta0 is not stable under diagram_auto")
    psi = tuple(tuple(1 if k == perm[j] else 0 for j in range(n)) for k in range(n))
    w0 = longest_parabolic_element(rs, delta0)
    sigma = tuple(tuple(-v for v in row) for row in linalg.mat_mul(w0, psi))
    return involution_from_matrix(rs, sigma, expected_delta0=delta0)


def involution_from_matrix(rs: RootSystem, sigma: Sequence[Sequence[int]],
                           expected_delta0: tuple[int, ...] | None = None) -> InvolutionDatum:
    """Validate a raw involution matrix and derive its diagram data."""
    n = rs.rank
    mat = tuple(tuple(int(v) for v in row) for row in sigma)
    if len(mat) != n or any(len(row) != n for row in mat):
        raise InvalidInput("sigma matrix has wrong shape")
    if linalg.mat_mul(mat, mat) != linalg.identity(n):
        raise InvalidInput("sigma is not an involution (sigma^2 != identity)")

    def apply(w: Weight) -> Weight:
        return Weight(linalg.mat_vec(mat, w.coords))

    for alpha in rs.roots:
        if not rs.is_root(apply(alpha)):
            raise InvalidInput("sigma does not permute the roots")
    for i in range(n):
        for j in range(i, n):
            x, y = rs.simple_roots[i], rs.simple_roots[j]
            if rs.kappa(apply(x), apply(y)) != rs.kappa(x, y):
                raise InvalidInput("sigma is not an isometry of the invariant form")

    delta0 = tuple(i for i in range(n) if apply(rs.simple_roots[i]) == rs.simple_roots[i])
    if expected_delta0 is not None and delta0 != expected_delta0:
        raise InvalidInput(
            f"fixed simple roots {list(delta0)} differ from the requested delta0 "
            f"{list(expected_delta0)}"
        )
    delta1 = tuple(i for i in range(n) if i not in delta0)

    # fixed roots must lie in the span of delta0, and moved positive roots
    # must go strictly negative
    for alpha in rs.positive_roots:
        img = apply(alpha)
        rc = rs.root_coordinates(alpha)
        if img == alpha:
            if any(rc[i] != 0 for i in delta1):
                raise InvalidInput(
                    "a fixed positive root lies outside the span of delta0"
                )
        else:
            img_rc = rs.root_coordinates(img)
            if any(c > 0 for c in img_rc):
                raise InvalidInput(
                    "sigma sends a moved positive root to a positive root "
                    "(borel convention violated)"
                )

    sigma_bar = []
    for i in delta1:
        target = apply(rs.simple_roots[i])
        matches = []
        for j in delta1:
            total = target + rs.simple_roots[j]
            rc = rs.root_coordinates(total)
            if all(rc[k] == 0 for k in delta1):
                matches.append(j)
        if len(matches) != 1:
            raise InvalidInput(
                f"induced diagram involution is ill-defined at node {i}"
            )
        sigma_bar.append((i, matches[0]))
    bar = dict(sigma_bar)
    if any(bar[bar[i]] != i for i in bar):
        raise InvalidInput("induced diagram map is not an involution")

    exceptional = tuple(
        i for i in delta1
        if bar[i] != i and rs.kappa(apply(rs.simple_roots[i]), rs.simple_roots[i]) != 0
    )
    if any(bar[i] not in exceptional for i in exceptional):
        raise InvalidInput("exceptional set is not stable under the diagram map")

    return InvolutionDatum(
        rs=rs,
        sigma=mat,
        delta0=delta0,
        delta1=delta1,
        sigma_bar=tuple(sigma_bar),
        exceptional=exceptional,
    )


class RestrictedRootSystem:
    """The restricted root system of an involution.

    Restricted roots are the differences alpha - sigma(alpha) over moved
    roots; the system may be non-reduced (type BC). The simple basis keeps
    the shorter representative when both t and 2t occur, and the
    `fundamental` weights are the primitive generators of the rays of the
    dominant cone inside the spherical weight lattice, so they generate the
    monoid of dominant spherical weights freely.
    """

    def __init__(self, inv: InvolutionDatum):
        self.inv = inv
        rs = inv.rs
        if not inv.delta1:
            raise InvalidInput("restricted rank is 0: every simple root is fixed")

        by_root: dict[Weight, None] = {}
        positive: dict[Weight, None] = {}
        for alpha in rs.roots:
            img = inv.apply(alpha)
            if img == alpha:
                continue
            t = alpha - img
            by_root.setdefault(t, None)
            if alpha in rs.positive_roots:
                positive.setdefault(t, None)
        self.restricted_roots = tuple(sorted(by_root))
        self.positive_restricted = tuple(sorted(positive))
        root_set = set(self.restricted_roots)
        if set(-t for t in root_set) != root_set:
            raise InvalidInput("restricted roots are not symmetric under negation")
        if len(self.restricted_roots) != 2 * len(self.positive_restricted):
            raise InvalidInput("restricted positive roots do not halve the system")

        # simple basis from the simple moved roots, shorter representative only
        candidates: list[Weight] = []
        delta1_images: dict[int, Weight] = {}
        for i in inv.delta1:
            t = rs.simple_roots[i] - inv.apply(rs.simple_roots[i])
            delta1_images[i] = t
            if t not in candidates:
                candidates.append(t)
        halves = {2 * t for t in candidates}
        self.simple = tuple(t for t in candidates if t not in halves)
        self.rank = len(self.simple)
        if linalg.rank([t.coords for t in self.simple]) != self.rank:
            raise InvalidInput("restricted simple roots are not linearly independent")

        self._delta1_to_simple: dict[int, int] = {}
        for i, t in delta1_images.items():
            if t in self.simple:
                self._delta1_to_simple[i] = self.simple.index(t)
            elif Weight(linalg.vscale(Fraction(1, 2), t.coords)) in self.simple:
                self._delta1_to_simple[i] = self.simple.index(
                    Weight(linalg.vscale(Fraction(1, 2), t.coords))
                )
            else:  # pragma: no cover - excluded by the basis checks below
                raise InvalidInput("a simple moved root does not restrict to the basis")

        self._validate_root_system()
        self.reduced = not any(2 * t in root_set for t in root_set)
        self.spherical_basis = self._spherical_lattice()
        self.fundamental = self._fundamental_weights()
        self.wtilde_generators = tuple(
            self._reflection_matrix(t) for t in self.simple
        )

        bar = inv.sigma_bar_map()
        self.exceptional_simple = tuple(sorted({
            self._delta1_to_simple[i] for i in inv.exceptional
        }))
        self.non_exceptional_simple = tuple(
            k for k in range(self.rank) if k not in self.exceptional_simple
        )
        # exceptional pairs restrict onto a single node
        for i in inv.exceptional:
            if self._delta1_to_simple[i] != self._delta1_to_simple[bar[i]]:
                raise InvalidInput("an exceptional pair restricts to two distinct nodes")

    # -- structure checks ------------------------------------------------

    def _validate_root_system(self) -> None:
        rs = self.inv.rs
        root_set = set(self.restricted_roots)
        for t in self.restricted_roots:
            for u in self.restricted_roots:
                pairing = 2 * rs.kappa(u, t) / rs.kappa(t, t)
                if pairing.denominator != 1:
                    raise InvalidInput(
                        "restricted roots fail integrality: the datum is not a "
                        "valid involution of the root system"
                    )
                refl = u - Weight(linalg.vscale(pairing, t.coords))
                if refl not in root_set:
                    raise InvalidInput(
                        "restricted roots are not closed under reflections"
                    )
        for t in self.positive_restricted:
            coeffs = linalg.solve_in_span([s.coords for s in self.simple], t.coords)
            if coeffs is None or any(c < 0 or c.denominator != 1 for c in coeffs):
                raise InvalidInput(
                    "a positive restricted root is not a nonnegative integer "
                    "combination of the simple basis"
                )

    # -- invariant form on the restricted side ----------------------------

    def kappa(self, x: Weight, y: Weight) -> Fraction:
        return self.inv.rs.kappa(x, y)

    def coroot_pairing(self, lam: Weight, t: Weight) -> Fraction:
        return 2 * self.kappa(lam, t) / self.kappa(t, t)

    def is_dominant(self, w: Weight) -> bool:
        """Dominance against the restricted simple roots."""
        return all(self.kappa(w, t) >= 0 for t in self.simple)

    def is_strictly_dominant(self, w: Weight) -> bool:
        return all(self.kappa(w, t) > 0 for t in self.simple)

    def _reflection_matrix(self, t: Weight) -> tuple[tuple[Fraction, ...], ...]:
        rs = self.inv.rs
        n = rs.rank
        d = rs.datum.symmetrizers
        rc = rs.root_coordinates(t)
        form_row = tuple(d[j] * rc[j] for j in range(n))  # x -> kappa(x, t)
        scale = Fraction(2) / rs.kappa(t, t)
        return tuple(
            tuple(
                (Fraction(1) if k == j else Fraction(0)) - scale * t.coords[k] * form_row[j]
                for j in range(n)
            )
            for k in range(n)
        )

    def reflect(self, t: Weight, w: Weight) -> Weight:
        return w - Weight(linalg.vscale(self.coroot_pairing(w, t), t.coords))

    # -- the spherical weight lattice -------------------------------------

    def _spherical_lattice(self) -> tuple[tuple[int, ...], ...]:
        """HNF basis of {lambda : sigma(lambda) = -lambda, pairings integral}."""
        inv = self.inv
        n = inv.rs.rank
        sigma_plus_id = tuple(
            tuple(inv.sigma[i][j] + (1 if i == j else 0) for j in range(n))
            for i in range(n)
        )
        anti = linalg.integer_kernel(sigma_plus_id)
        if not anti:
            raise InvalidInput("involution has no anti-invariant weights")
        forms = []
        for t in self.positive_restricted:
            norm = self.kappa(t, t)
            forms.append([2 * self.kappa(Weight(b), t) / norm for b in anti])
        denom = 1
        for row in forms:
            for v in row:
                denom = denom * v.denominator // linalg.gcd_int(denom, v.denominator)
        nrows = len(forms)
        ncols = len(anti)
        scaled = [[int(v * denom) for v in row] for row in forms]
        # z with scaled.z = 0 (mod denom): project the kernel of [scaled | -denom*I]
        block = [
            tuple(scaled[r]) + tuple(-denom if r == k else 0 for k in range(nrows))
            for r in range(nrows)
        ]
        kernel = linalg.integer_kernel(block)
        zs = [row[:ncols] for row in kernel]
        coords = linalg.lattice_basis(zs)
        rows = [linalg.mat_vec(linalg.transpose(anti), z) for z in coords]
        return linalg.lattice_basis([tuple(int(v) for v in r) for r in rows])

    def spherical_contains(self, w: Weight) -> bool:
        if not w.is_integral():
            return False
        return linalg.lattice_contains(self.spherical_basis, w.int_coords())

    def _fundamental_weights(self) -> tuple[Weight, ...]:
        """Primitive dominant generators of the spherical monoid, one per node."""
        gram = [[self.kappa(s, t) for t in self.simple] for s in self.simple]
        out = []
        for i in range(self.rank):
            rhs = [
                self.kappa(self.simple[i], self.simple[i]) / 2 if k == i else Fraction(0)
                for k in range(self.rank)
            ]
            coeffs = linalg.solve(gram, rhs)
            base = zero_weight(self.inv.rs.rank)
            for c, t in zip(coeffs, self.simple):
                base = base + Weight(linalg.vscale(c, t.coords))
            in_omega = linalg.solve_in_span(self.spherical_basis, base.coords)
            if in_omega is None:
                raise InvalidInput("fundamental direction leaves the spherical span")
            scale = 1
            for c in in_omega:
                scale = scale * c.denominator // linalg.gcd_int(scale, c.denominator)
            out.append(scale * base)
        return tuple(out)

    @cached_property
    def wtilde_order(self) -> int:
        """Order of the restricted Weyl group, by closure of its generators."""
        return len(matrix_group_elements(self.generator_matrices_on_basis(self.spherical_basis)))

    def generator_matrices_on_basis(self, basis: Sequence[Sequence[int]]) -> list[IMat]:
        """Integer matrices of the simple restricted reflections on a stable lattice."""
        mats = []
        for t in self.simple:
            rows = []
            for b in basis:
                img = self.reflect(t, Weight(b))
                coords = linalg.solve_in_span(basis, img.coords)
                if coords is None or any(c.denominator != 1 for c in coords):
                    raise InvalidInput("reflection does not preserve the given lattice")
                rows.append(tuple(int(c) for c in coords))
            mats.append(linalg.transpose(rows))
        return mats

    def coords_on(self, basis: Sequence[Sequence[int]], w: Weight) -> tuple[Fraction, ...]:
        coords = linalg.solve_in_span(basis, w.coords)
        if coords is None:
            raise InvalidInput("weight lies outside the restricted span")
        return coords

    def fundamental_coordinates(self, w: Weight) -> tuple[Fraction, ...]:
        """Coordinates of an anti-invariant weight in the fundamental basis."""
        coords = linalg.solve_in_span([f.coords for f in self.fundamental], w.coords)
        if coords is None:
            raise InvalidInput("weight lies outside the span of the restricted system")
        return coords

    def support(self, w: Weight) -> tuple[int, ...]:
        """Indices of the nonzero fundamental coordinates of w."""
        return tuple(i for i, c in enumerate(self.fundamental_coordinates(w)) if c != 0)


def restricted_root_system(inv: InvolutionDatum) -> RestrictedRootSystem:
    return RestrictedRootSystem(inv)


@dataclass(frozen=True)
class SphericalLatticeFamily:
    """The nested lattices attached to an involution.

    Basis matrices (rows in fundamental-weight coordinates, HNF-canonical):
    `adjoint` is the lattice of restricted roots, `spherical` the full lattice
    of spherical weights, `intermediate` a chosen lattice between them, and
    `quasi_spherical` adds the fundamental weights of exceptional roots.
    `restriction_kernel` spans the weights invisible to the anisotropic torus.
    """

    inv: InvolutionDatum
    rrs: RestrictedRootSystem
    adjoint: tuple[tuple[int, ...], ...]
    spherical: tuple[tuple[int, ...], ...]
    intermediate: tuple[tuple[int, ...], ...]
    quasi_spherical: tuple[tuple[int, ...], ...]
    restriction_kernel: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return self.rrs.rank

    def contains(self, basis, w: Weight) -> bool:
        if not w.is_integral():
            return False
        if not basis:
            return w.is_zero()
        return linalg.lattice_contains(basis, w.int_coords())

    def in_adjoint(self, w: Weight) -> bool:
        return self.contains(self.adjoint, w)

    def in_spherical(self, w: Weight) -> bool:
        return self.contains(self.spherical, w)

    def in_intermediate(self, w: Weight) -> bool:
        return self.contains(self.intermediate, w)

    def in_quasi_spherical(self, w: Weight) -> bool:
        return self.contains(self.quasi_spherical, w)

    @cached_property
    def spherical_over_intermediate_exponent(self) -> int:
        """Smallest e with e * spherical contained in intermediate."""
        rows = [
            linalg.solve_in_span(self.spherical, b) for b in self.intermediate
        ]
        mat = [[int(c) for c in row] for row in rows]
        factors = linalg.invariant_factors(mat)
        return max(factors, default=1)

    def weight_from_intermediate_coords(self, coords: Sequence[int]) -> Weight:
        base = zero_weight(self.inv.rs.rank)
        for c, row in zip(coords, self.intermediate, strict=True):
            base = base + int(c) * Weight(row)
        return base


def spherical_lattice_family(
    inv: InvolutionDatum,
    omega_h_basis: Sequence[Sequence[int]] | None = None,
    rrs: RestrictedRootSystem | None = None,
) -> SphericalLatticeFamily:
    """Assemble the lattice tower, validating the sandwich condition."""
    rrs = rrs if rrs is not None else restricted_root_system(inv)
    spherical = rrs.spherical_basis
    adjoint = linalg.lattice_basis([t.int_coords() for t in rrs.positive_restricted])
    if not linalg.lattice_leq(adjoint, spherical):
        raise InvalidInput("restricted root lattice is not inside the spherical lattice")
    if omega_h_basis is None:
        intermediate = spherical
    else:
        intermediate = linalg.lattice_basis(
            [tuple(int(v) for v in row) for row in omega_h_basis]
        )
        if not linalg.lattice_leq(intermediate, spherical):
            raise InvalidInput("omega_H is not contained in the spherical lattice")
        if not linalg.lattice_leq(adjoint, intermediate):
            raise InvalidInput("omega_H does not contain the restricted root lattice")
    exceptional_weights = [
        inv.rs.fundamental_weight(i).int_coords() for i in inv.exceptional
    ]
    quasi = linalg.lattice_basis(list(spherical) + exceptional_weights)

    n = inv.rs.rank
    sigma_t = linalg.transpose(inv.sigma)
    sigma_t_plus_id = tuple(
        tuple(sigma_t[i][j] + (1 if i == j else 0) for j in range(n))
        for i in range(n)
    )
    anti_coweights = linalg.integer_kernel(sigma_t_plus_id)
    kernel = linalg.integer_kernel(anti_coweights) if anti_coweights else \
        tuple(linalg.identity(n))

    fam = SphericalLatticeFamily(
        inv=inv,
        rrs=rrs,
        adjoint=adjoint,
        spherical=spherical,
        intermediate=intermediate,
        quasi_spherical=quasi,
        restriction_kernel=kernel,
    )
    # r must be injective on the spherical lattice
    combined = list(kernel) + list(spherical)
    if linalg.rank(combined) != len(kernel) + len(spherical):
        raise InvalidInput("restriction kernel meets the spherical lattice")
    return fam


def is_spherical_weight(fam: SphericalLatticeFamily, lam: Weight) -> bool:
    """Vust's criterion: anti-invariant and restricting into the chosen lattice."""
    if not fam.inv.is_anti_invariant(lam):
        return False
    if not lam.is_integral():
        return False
    modulus = linalg.lattice_basis(
        list(fam.intermediate) + list(fam.restriction_kernel)
    )
    return linalg.lattice_contains(modulus, lam.int_coords())


@dataclass(frozen=True)
class ComponentGroup:
    """Finite abelian quotient of the intermediate lattice by the root lattice."""

    invariant_factors: tuple[int, ...]
    cosets: tuple[Weight, ...]

    @property
    def order(self) -> int:
        out = 1
        for f in self.invariant_factors:
            out *= f
        return out


def component_group(fam: SphericalLatticeFamily) -> ComponentGroup:
    """Invariant factors and coset representatives of Omega_H / Z[restricted roots]."""
    rows = []
    for b in fam.adjoint:
        coords = linalg.solve_in_span(fam.intermediate, b)
        rows.append(tuple(int(c) for c in coords))
    factors = linalg.invariant_factors(rows)
    reps = linalg.quotient_representatives(rows)
    weights = sorted(
        fam.weight_from_intermediate_coords(r) for r in reps
    )
    return ComponentGroup(invariant_factors=factors, cosets=tuple(weights))
