"""Fans of rational cones subdividing the dominant cochamber.

The cochamber C lives in the dual of the chosen intermediate spherical
lattice; it is cut out by the simple restricted roots. A fan here is a set
of full-dimensional simplicial cones inside C together with all their
faces. Validation, smoothness, completeness and the face/orbit dictionary
are all exact: membership and separation questions reduce to integer
determinants and rational linear programs.

Maximal cones are required to be simplicial (exactly rank-many independent
rays). Smooth cones are automatically simplicial, so this only restricts
fans that the downstream operations would refuse anyway.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from . import linalg
from .errors import ComputationRefused, InvalidInput
from .involutions import SphericalLatticeFamily
from .roots import Weight, matrix_group_elements

IVec = tuple[int, ...]


def cochamber_rays(fam: SphericalLatticeFamily) -> tuple[IVec, ...]:
    """Primitive generators of the extremal rays of the cochamber C.

    Ray i pairs to zero with every simple restricted root except the i-th,
    expressed as an integer covector against the intermediate lattice basis.
    """
    rrs = fam.rrs
    simple_rows = [rrs.coords_on(fam.intermediate, t) for t in rrs.simple]
    inv = linalg.invert(simple_rows)
    cols = linalg.transpose(inv)
    out = []
    for i in range(rrs.rank):
        denom = 1
        for v in cols[i]:
            denom = denom * Fraction(v).denominator // linalg.gcd_int(
                denom, Fraction(v).denominator
            )
        out.append(linalg.primitive([int(v * denom) for v in cols[i]]))
    return tuple(out)


@dataclass(frozen=True)
class FaceRef:
    """A face of the fan, identified by the set of rays it contains."""

    fan: "CochamberFan" = field(compare=False, repr=False)
    ray_indices: tuple[int, ...] = ()
    dim: int = 0

    def rays(self) -> tuple[IVec, ...]:
        return tuple(self.fan.rays[i] for i in self.ray_indices)


class CochamberFan:
    """A validated fan of simplicial cones inside the cochamber."""

    def __init__(self, fam: SphericalLatticeFamily, rays: Sequence[IVec],
                 max_cones: Sequence[tuple[int, ...]], complete_over_c: bool,
                 smooth: bool):
        self.fam = fam
        self.basis = fam.intermediate
        self.rank = fam.rank
        self.rays = tuple(rays)
        self.max_cones = tuple(max_cones)
        self.complete_over_C = complete_over_c
        self.smooth = smooth
        face_sets = {()}
        for cone in self.max_cones:
            for mask in range(1, 1 << len(cone)):
                face_sets.add(tuple(
                    cone[k] for k in range(len(cone)) if mask >> k & 1
                ))
        self.faces = tuple(
            FaceRef(self, idx, len(idx))
            for idx in sorted(face_sets, key=lambda s: (len(s), s))
        )

    # -- pairings ----------------------------------------------------------

    def weight_coords(self, w: Weight) -> tuple[Fraction, ...]:
        coords = linalg.solve_in_span(self.basis, w.coords)
        if coords is None:
            raise InvalidInput("weight lies outside the span of the fan lattice")
        return coords

    def pairing(self, w: Weight, ray: Sequence[int]) -> Fraction:
        return linalg.vdot(self.weight_coords(w), ray)

    @cached_property
    def simple_pairings(self) -> tuple[tuple[Fraction, ...], ...]:
        """Row per simple restricted root: its pairing with every ray."""
        rrs = self.fam.rrs
        return tuple(
            tuple(self.pairing(t, ray) for ray in self.rays)
            for t in rrs.simple
        )

    def face(self, ray_indices: Iterable[int]) -> FaceRef:
        idx = tuple(sorted(set(ray_indices)))
        for f in self.faces:
            if f.ray_indices == idx:
                return f
        raise InvalidInput(f"rays {list(idx)} do not span a face of the fan")

    def cones_containing(self, face: FaceRef) -> tuple[tuple[int, ...], ...]:
        s = set(face.ray_indices)
        return tuple(c for c in self.max_cones if s.issubset(c))

    def cone_member_coefficients(self, cone: tuple[int, ...],
                                 vec: Sequence[int]) -> tuple[Fraction, ...] | None:
        """Coefficients of vec over the cone's rays if all nonnegative, else None."""
        cols = [self.rays[i] for i in cone]
        coeffs = linalg.solve_in_span(cols, vec)
        if coeffs is None or any(c < 0 for c in coeffs):
            return None
        return coeffs

    def cone_containing(self, vec: Sequence[int]) -> tuple[int, ...] | None:
        for cone in self.max_cones:
            if self.cone_member_coefficients(cone, vec) is not None:
                return cone
        return None

    # -- restricted Weyl group on the dual side -----------------------------

    @cached_property
    def weyl_matrices(self) -> tuple:
        gens = self.fam.rrs.generator_matrices_on_basis(self.basis)
        return tuple(sorted(matrix_group_elements(gens)))

    def face_translates(self, face: FaceRef) -> int:
        """Number of distinct images of the face in the full (Weyl-saturated) fan."""
        gens = [linalg.transpose(m)
                for m in self.fam.rrs.generator_matrices_on_basis(self.basis)]
        start = frozenset(face.rays())
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for f in frontier:
                for g in gens:
                    img = frozenset(tuple(int(x) for x in linalg.mat_vec(g, v)) for v in f)
                    if img not in seen:
                        seen.add(img)
                        nxt.append(img)
            frontier = nxt
        return len(seen)

    def face_stabilizer_order(self, face: FaceRef) -> int:
        target = frozenset(face.rays())
        count = 0
        for m in self.weyl_matrices:
            mt = linalg.transpose(m)
            img = frozenset(tuple(int(x) for x in linalg.mat_vec(mt, v)) for v in target)
            if img == target:
                count += 1
        return count

    def face_stabilizer_matrices(self, face: FaceRef) -> tuple:
        """All Weyl elements on the lattice that fix the face setwise."""
        target = frozenset(face.rays())
        out = []
        for m in self.weyl_matrices:
            mt = linalg.transpose(m)
            img = frozenset(tuple(int(x) for x in linalg.mat_vec(mt, v)) for v in target)
            if img == target:
                out.append(m)
        return tuple(out)


def _primitivize_rays(rays: Sequence[Sequence[int]]) -> list[IVec]:
    out = []
    for ray in rays:
        v = tuple(int(x) for x in ray)
        if not any(v):
            raise InvalidInput("zero vector given as a ray")
        p = linalg.primitive(v)
        if p != v:
            warnings.warn(f"ray {list(v)} is not primitive; using {list(p)}",
                          stacklevel=3)
        if p in out:
            raise InvalidInput(f"duplicate ray {list(p)}")
        out.append(p)
    return out


def build_cochamber_fan(rays: Sequence[Sequence[int]],
                        max_cones: Sequence[Sequence[int]],
                        fam: SphericalLatticeFamily) -> CochamberFan:
    """Validate rays and cones and assemble the fan.

    Rejects rays outside the cochamber, non-simplicial or degenerate cones,
    and pairs of cones whose intersection is not a common face. Completeness
    over C is decided by comparing exact cross-section volumes.
    """
    ell = fam.rank
    prim = _primitivize_rays(rays)

    cones: list[tuple[int, ...]] = []
    for cone in max_cones:
        idx = tuple(sorted(set(int(i) for i in cone)))
        if len(idx) != len(tuple(cone)):
            raise InvalidInput(f"cone {list(cone)} repeats a ray")
        if any(i not in range(len(prim)) for i in idx):
            raise InvalidInput(f"cone {list(cone)} references an unknown ray")
        if len(idx) != ell:
            raise InvalidInput(
                f"maximal cone {list(idx)} does not have {ell} rays "
                "(only simplicial full-dimensional cones are supported)"
            )
        if linalg.det([prim[i] for i in idx]) == 0:
            raise InvalidInput(f"maximal cone {list(idx)} is degenerate")
        if idx in cones:
            raise InvalidInput(f"duplicate maximal cone {list(idx)}")
        cones.append(idx)
    cones.sort()
    if not cones:
        raise InvalidInput("fan has no maximal cones")
    used = {i for c in cones for i in c}
    if used != set(range(len(prim))):
        raise InvalidInput("every ray must belong to some maximal cone")

    rrs = fam.rrs
    simple_rows = [rrs.coords_on(fam.intermediate, t) for t in rrs.simple]
    for v in prim:
        pairings = [linalg.vdot(row, v) for row in simple_rows]
        if any(p < 0 for p in pairings):
            raise InvalidInput(f"ray {list(v)} lies outside the cochamber")

    _check_pairwise_faces(prim, cones)

    h = [sum(row[j] for row in simple_rows) for j in range(ell)]

    def section_volume(ray_set: Sequence[IVec]) -> Fraction:
        vol = abs(linalg.det(ray_set))
        for v in ray_set:
            vol /= linalg.vdot(h, v)
        return vol

    total = sum(section_volume([prim[i] for i in c]) for c in cones)
    complete = total == section_volume(cochamber_rays(fam))

    smooth = all(abs(linalg.det([prim[i] for i in c])) == 1 for c in cones)
    return CochamberFan(fam, prim, tuple(cones), complete, smooth)


def _check_pairwise_faces(rays: Sequence[IVec], cones: Sequence[tuple[int, ...]]) -> None:
    """Exact check that any two cones meet in the cone on their shared rays."""
    facet_rows = {}
    for c in cones:
        facet_rows[c] = linalg.invert(linalg.transpose([rays[i] for i in c]))
    for a in range(len(cones)):
        for b in range(a + 1, len(cones)):
            ca, cb = cones[a], cones[b]
            shared = set(ca) & set(cb)
            ineqs = [tuple(-v for v in row) for row in facet_rows[ca]]
            ineqs += [tuple(-v for v in row) for row in facet_rows[cb]]
            zeros = [0] * len(ineqs)
            for cone, other in ((ca, cb), (cb, ca)):
                for pos, i in enumerate(cone):
                    if i in shared:
                        continue
                    functional = facet_rows[cone][pos]
                    if linalg.lp_feasible(ineqs, zeros, [functional], [1]):
                        raise InvalidInput(
                            f"maximal cones {list(ca)} and {list(cb)} intersect "
                            "in a non-face (their interiors may overlap)"
                        )


def wonderful_fan(fam: SphericalLatticeFamily) -> CochamberFan:
    """The one-cone fan whose unique maximal cone is the whole cochamber."""
    rays = cochamber_rays(fam)
    return build_cochamber_fan(rays, [tuple(range(fam.rank))], fam)


def is_smooth(fan: CochamberFan) -> bool:
    """Every maximal cone's rays form part of a basis of the dual lattice."""
    return fan.smooth


def face_support(face: FaceRef) -> tuple[int, ...]:
    """Indices of the simple restricted roots not identically zero on the face."""
    fan = face.fan
    out = []
    for i in range(fan.fam.rank):
        if any(fan.simple_pairings[i][r] > 0 for r in face.ray_indices):
            out.append(i)
    return tuple(out)


@dataclass(frozen=True)
class FaceOrbitEntry:
    """One face of the fan with its orbit bookkeeping."""

    face: FaceRef
    support: tuple[int, ...]
    dim: int
    orbit_codim: int
    translates: int
    stabilizer_order: int
    facets: tuple[tuple[int, ...], ...]


def orbit_poset(fan: CochamberFan) -> tuple[FaceOrbitEntry, ...]:
    """The face lattice with supports, codimensions and Weyl translate counts."""
    if not fan.complete_over_C:
        raise ComputationRefused("orbit poset requires a fan complete over the cochamber")
    order = len(fan.weyl_matrices)
    entries = []
    for face in fan.faces:
        translates = fan.face_translates(face)
        stab = fan.face_stabilizer_order(face)
        if translates * stab != order:
            raise InvalidInput("orbit-stabilizer bookkeeping failed")  # pragma: no cover
        facets = tuple(
            g.ray_indices for g in fan.faces
            if g.dim == face.dim - 1 and set(g.ray_indices) <= set(face.ray_indices)
        )
        entries.append(FaceOrbitEntry(
            face=face,
            support=face_support(face),
            dim=face.dim,
            orbit_codim=face.dim,
            translates=translates,
            stabilizer_order=stab,
            facets=facets,
        ))
    return tuple(entries)
