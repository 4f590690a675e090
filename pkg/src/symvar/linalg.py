"""Exact linear algebra over the rationals and over integer lattices.

All vectors are tuples, all matrices are tuples of row tuples, and all
arithmetic is done in `fractions.Fraction` or arbitrary-precision ints.
Nothing in this module (or this package) ever touches a float.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form

Q = Fraction
QVec = tuple[Fraction, ...]
IVec = tuple[int, ...]


def qvec(xs: Iterable) -> QVec:
    return tuple(Fraction(x) for x in xs)


def vadd(x: Sequence, y: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(x, y, strict=True))


def vsub(x: Sequence, y: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(x, y, strict=True))


def vscale(c, x: Sequence) -> tuple:
    return tuple(c * a for a in x)


def vdot(x: Sequence, y: Sequence):
    return sum(a * b for a, b in zip(x, y, strict=True))


def mat_vec(m: Sequence[Sequence], x: Sequence) -> tuple:
    return tuple(vdot(row, x) for row in m)


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple:
    bt = transpose(b)
    return tuple(tuple(vdot(row, col) for col in bt) for row in a)


def transpose(m: Sequence[Sequence]) -> tuple:
    return tuple(zip(*m)) if m else ()


def identity(n: int) -> tuple:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def is_integral(x) -> bool:
    return Fraction(x).denominator == 1


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form in place; returns (rows, pivot columns)."""
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = Fraction(1) / rows[r][c]
        rows[r] = [inv * v for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [v - f * w for v, w in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(m: Sequence[Sequence]) -> int:
    rows = [[Fraction(v) for v in row] for row in m]
    _, pivots = _rref(rows)
    return len(pivots)


def det(m: Sequence[Sequence]) -> Fraction:
    n = len(m)
    rows = [[Fraction(v) for v in row] for row in m]
    sign = 1
    result = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            sign = -sign
        result *= rows[c][c]
        inv = Fraction(1) / rows[c][c]
        for i in range(c + 1, n):
            if rows[i][c] != 0:
                f = rows[i][c] * inv
                rows[i] = [v - f * w for v, w in zip(rows[i], rows[c])]
    return sign * result


def invert(m: Sequence[Sequence]) -> tuple:
    n = len(m)
    rows = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
            for i, row in enumerate(m)]
    rows, pivots = _rref(rows)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return tuple(tuple(row[n:]) for row in rows)


def solve(m: Sequence[Sequence], b: Sequence) -> QVec | None:
    """One exact solution x of m·x = b, or None if inconsistent.

    Free coordinates are set to zero, so the answer is unique whenever the
    columns of m are linearly independent.
    """
    rows = [[Fraction(v) for v in row] + [Fraction(bv)]
            for row, bv in zip(m, b, strict=True)]
    ncols = len(m[0]) if m else 0
    rows, pivots = _rref(rows)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for r, c in enumerate(pivots):
        x[c] = rows[r][ncols]
    return tuple(x)


def solve_in_span(vectors: Sequence[Sequence], target: Sequence) -> QVec | None:
    """Coefficients c with Σ c_i vectors[i] = target, or None if outside the span."""
    if not vectors:
        return () if all(v == 0 for v in target) else None
    return solve(transpose(vectors), target)


def rational_kernel(m: Sequence[Sequence]) -> list[QVec]:
    """Basis of the rational null space {x : m·x = 0}."""
    if not m:
        return []
    ncols = len(m[0])
    rows = [[Fraction(v) for v in row] for row in m]
    rows, pivots = _rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r, c in enumerate(pivots):
            x[c] = -rows[r][f]
        basis.append(tuple(x))
    return basis


# -- integer lattice routines -------------------------------------------------

def vec_gcd(v: Sequence[int]) -> int:
    g = 0
    for a in v:
        g = gcd_int(g, a)
    return g


def gcd_int(a: int, b: int) -> int:
    a, b = abs(a), abs(b)
    while b:
        a, b = b, a % b
    return a


def primitive(v: Sequence[int]) -> IVec:
    """Divide an integer vector by the gcd of its entries (zero stays zero)."""
    g = vec_gcd(v)
    if g == 0:
        return tuple(int(a) for a in v)
    return tuple(int(a) // g for a in v)


def row_hnf_transform(m: Sequence[Sequence[int]]) -> tuple[tuple, tuple]:
    """Row Hermite normal form with transform: returns (H, U) with U·m = H.

    H is in row echelon form with positive pivots and entries above each
    pivot reduced into [0, pivot); U is unimodular. Zero rows of H sit at
    the bottom, and the matching rows of U span the left integer kernel.
    """
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    h = [[int(v) for v in row] for row in m]
    u = [[int(i == j) for j in range(nrows)] for i in range(nrows)]
    r = 0
    for c in range(ncols):
        # gcd-eliminate column c below row r
        while True:
            nz = [i for i in range(r, nrows) if h[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(h[i][c]))
            h[r], h[i0] = h[i0], h[r]
            u[r], u[i0] = u[i0], u[r]
            done = True
            for i in range(r + 1, nrows):
                if h[i][c] != 0:
                    q = h[i][c] // h[r][c]
                    h[i] = [a - q * b for a, b in zip(h[i], h[r])]
                    u[i] = [a - q * b for a, b in zip(u[i], u[r])]
                    if h[i][c] != 0:
                        done = False
            if done:
                break
        if r < nrows and h[r][c] != 0:
            if h[r][c] < 0:
                h[r] = [-a for a in h[r]]
                u[r] = [-a for a in u[r]]
            for i in range(r):
                q = h[i][c] // h[r][c]
                if q:
                    h[i] = [a - q * b for a, b in zip(h[i], h[r])]
                    u[i] = [a - q * b for a, b in zip(u[i], u[r])]
            r += 1
            if r == nrows:
                break
    return tuple(tuple(row) for row in h), tuple(tuple(row) for row in u)


def lattice_basis(generators: Sequence[Sequence[int]]) -> tuple[IVec, ...]:
    """Canonical (HNF) basis of the lattice spanned by the generator rows."""
    if not generators:
        return ()
    h, _ = row_hnf_transform(generators)
    return tuple(row for row in h if any(row))


def integer_kernel(m: Sequence[Sequence[int]]) -> tuple[IVec, ...]:
    """Basis of the saturated lattice {x ∈ Z^n : m·x = 0}."""
    if not m:
        return ()
    mt = transpose(m)
    h, u = row_hnf_transform(mt)
    kernel = [u[i] for i in range(len(h)) if not any(h[i])]
    return lattice_basis(kernel) if kernel else ()


def solve_integer(basis: Sequence[Sequence[int]], v: Sequence[int]) -> IVec | None:
    """Integer coefficients y with y·basis = v, or None if v is not in the lattice."""
    if not basis:
        return () if all(a == 0 for a in v) else None
    coeffs = solve_in_span(basis, v)
    if coeffs is None or any(not is_integral(c) for c in coeffs):
        return None
    return tuple(int(c) for c in coeffs)


def lattice_contains(basis: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    return solve_integer(basis, v) is not None


def lattice_leq(sub: Sequence[Sequence[int]], sup: Sequence[Sequence[int]]) -> bool:
    """Whether every row of `sub` lies in the lattice spanned by `sup`."""
    return all(lattice_contains(sup, row) for row in sub)


def invariant_factors(m: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Nontrivial invariant factors (>1) of an integer matrix, via Smith form."""
    if not m or not m[0]:
        return ()
    d = smith_normal_form(Matrix([list(row) for row in m]))
    factors = [abs(int(d[i, i])) for i in range(min(d.rows, d.cols))]
    return tuple(f for f in factors if f not in (0, 1))


def quotient_representatives(sub_in_sup: Sequence[Sequence[int]]) -> list[IVec]:
    """Coset representatives of Z^n modulo the row lattice of a full-rank matrix.

    Representatives are the box [0, h_00) × … × [0, h_(n-1)(n-1)) read off the
    row HNF; they are pairwise inequivalent and complete.
    """
    h, _ = row_hnf_transform(sub_in_sup)
    n = len(h[0])
    if any(not any(row) for row in h) or len(h) != n:
        raise ValueError("sublattice is not of finite index")
    import itertools

    diag = [h[i][i] for i in range(n)]
    return [tuple(x) for x in itertools.product(*(range(d) for d in diag))]


def fraction_floor(x: Fraction) -> int:
    return x.numerator // x.denominator


# -- exact feasibility of linear systems ---------------------------------------

def lp_feasible(a_le=None, b_le=None, a_eq=None, b_eq=None) -> bool:
    """Whether {x free : a_le·x ≤ b_le, a_eq·x = b_eq} is nonempty.

    Decided exactly by Gaussian substitution of the equalities followed by
    Fourier-Motzkin elimination of the inequalities. Fine for the small
    systems that fan validation produces; not meant for large programs.
    """
    ineqs: list[tuple[QVec, Fraction]] = []
    if a_le:
        for row, rhs in zip(a_le, b_le, strict=True):
            ineqs.append((qvec(row), Fraction(rhs)))
    eqs: list[tuple[QVec, Fraction]] = []
    if a_eq:
        for row, rhs in zip(a_eq, b_eq, strict=True):
            eqs.append((qvec(row), Fraction(rhs)))

    # substitute equalities away one variable at a time
    while eqs:
        row, rhs = eqs.pop()
        k = next((i for i, v in enumerate(row) if v != 0), None)
        if k is None:
            if rhs != 0:
                return False
            continue
        inv = Fraction(1) / row[k]
        coeff = tuple(-v * inv for v in row)  # x_k = coeff·x + rhs*inv (coeff_k ignored)
        off = rhs * inv

        def subst(r: QVec, c: Fraction) -> tuple[QVec, Fraction]:
            f = r[k]
            if f == 0:
                return r, c
            new = tuple(
                v + f * coeff[i] if i != k else Fraction(0) for i, v in enumerate(r)
            )
            return new, c - f * off

        eqs = [subst(r, c) for r, c in eqs]
        ineqs = [subst(r, c) for r, c in ineqs]

    nvar = len(ineqs[0][0]) if ineqs else 0
    for k in range(nvar):
        pos = [(r, c) for r, c in ineqs if r[k] > 0]
        neg = [(r, c) for r, c in ineqs if r[k] < 0]
        rest = [(r, c) for r, c in ineqs if r[k] == 0]
        for rp, cp in pos:
            for rn, cn in neg:
                # eliminate x_k between rp·x <= cp and rn·x <= cn
                row = tuple(
                    rp[i] * (-rn[k]) + rn[i] * rp[k] for i in range(nvar)
                )
                rest.append((row, cp * (-rn[k]) + cn * rp[k]))
        ineqs = rest
    return all(c >= 0 for _, c in ineqs)
