"""K-theory bookkeeping: Smith normal form over the integers, finitely
generated abelian groups in invariant-factor form, a solver for the
six-term sequence of a Cuntz-Pimsner algebra with torsion-free input data,
and builders for the circle families."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidInputError, UndecidedError

__all__ = [
    "IntegerMatrix",
    "AbelianGroupPresentation",
    "PimsnerInput",
    "smith_normal_form",
    "cokernel",
    "kernel",
    "pimsner_solve",
    "monomial_family_input",
    "product_family_input",
    "kgroup_table",
]


@dataclass(frozen=True)
class IntegerMatrix:
    """Dense integer matrix; rows x cols, viewed as a map Z^cols -> Z^rows
    acting on column vectors."""

    entries: tuple  # of row tuples

    @staticmethod
    def of(rows: Sequence[Sequence[int]]) -> "IntegerMatrix":
        data = tuple(tuple(int(x) for x in row) for row in rows)
        if data and len({len(r) for r in data}) != 1:
            raise InvalidInputError("ragged matrix")
        return IntegerMatrix(entries=data)

    @staticmethod
    def zero(rows: int, cols: int) -> "IntegerMatrix":
        return IntegerMatrix(entries=tuple((0,) * cols for _ in range(rows)))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise InvalidInputError("shape mismatch in product")
        return IntegerMatrix(
            entries=tuple(
                tuple(
                    sum(self.entries[i][t] * other.entries[t][j] for t in range(self.cols))
                    for j in range(other.cols)
                )
                for i in range(self.rows)
            )
        )

    def det(self) -> int:
        if self.rows != self.cols:
            raise InvalidInputError("determinant needs a square matrix")
        n = self.rows
        # fraction-free Gaussian elimination (Bareiss)
        from fractions import Fraction

        m = [[Fraction(x) for x in row] for row in self.entries]
        sign = 1
        for col in range(n):
            pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
            if pivot is None:
                return 0
            if pivot != col:
                m[col], m[pivot] = m[pivot], m[col]
                sign = -sign
            for r in range(col + 1, n):
                factor = m[r][col] / m[col][col]
                for c in range(col, n):
                    m[r][c] -= factor * m[col][c]
        out = Fraction(sign)
        for i in range(n):
            out *= m[i][i]
        assert out.denominator == 1
        return out.numerator


def smith_normal_form(M: IntegerMatrix):
    """(U, D, V) with M = U @ D @ V, U and V unimodular, D diagonal with
    d_1 | d_2 | ... >= 0."""
    rows, cols = M.rows, M.cols
    D = [list(r) for r in M.entries]
    U = [[int(i == j) for j in range(rows)] for i in range(rows)]
    V = [[int(i == j) for j in range(cols)] for i in range(cols)]

    # elementary row ops applied to D are mirrored inversely on U so that
    # U @ D stays constant; same for columns and V

    def row_swap(i, j):
        D[i], D[j] = D[j], D[i]
        for r in range(rows):
            U[r][i], U[r][j] = U[r][j], U[r][i]

    def row_add(i, j, q):  # row_i += q * row_j
        for c in range(cols):
            D[i][c] += q * D[j][c]
        for r in range(rows):
            U[r][j] -= q * U[r][i]

    def row_neg(i):
        for c in range(cols):
            D[i][c] = -D[i][c]
        for r in range(rows):
            U[r][i] = -U[r][i]

    def col_swap(i, j):
        for r in range(rows):
            D[r][i], D[r][j] = D[r][j], D[r][i]
        V[i], V[j] = V[j], V[i]

    def col_add(i, j, q):  # col_i += q * col_j
        for r in range(rows):
            D[r][i] += q * D[r][j]
        for c in range(cols):
            V[j][c] -= q * V[i][c]

    def col_neg(i):
        for r in range(rows):
            D[r][i] = -D[r][i]
        for c in range(cols):
            V[i][c] = -V[i][c]

    def pivot_at(k):
        # clear row k and column k using the pivot at (k, k)
        while True:
            # find smallest nonzero entry in the remaining block, move to (k,k)
            best = None
            for i in range(k, rows):
                for j in range(k, cols):
                    if D[i][j] != 0 and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return False
            i, j = best
            if i != k:
                row_swap(k, i)
            if j != k:
                col_swap(k, j)
            done = True
            for i in range(k + 1, rows):
                q = D[i][k] // D[k][k]
                if q:
                    row_add(i, k, -q)
                if D[i][k]:
                    done = False
            for j in range(k + 1, cols):
                q = D[k][j] // D[k][k]
                if q:
                    col_add(j, k, -q)
                if D[k][j]:
                    done = False
            if done:
                return True

    def diagonalize():
        k = 0
        while k < min(rows, cols):
            if not pivot_at(k):
                break
            k += 1
        for i in range(min(rows, cols)):
            if D[i][i] < 0:
                row_neg(i)

    diagonalize()
    changed = True
    while changed:
        changed = False
        for i in range(min(rows, cols) - 1):
            a, b = D[i][i], D[i + 1][i + 1]
            if b and (a == 0 or b % a):
                # pull gcd(a, b) to the front, then rediagonalize fully
                col_add(i, i + 1, 1)
                diagonalize()
                changed = True
                break
    Um = IntegerMatrix.of(U)
    Dm = IntegerMatrix.of(D)
    Vm = IntegerMatrix.of(V)
    assert (Um @ Dm @ Vm).entries == M.entries
    return Um, Dm, Vm


@dataclass(frozen=True)
class AbelianGroupPresentation:
    """Z^rank (+) Z/d_1 (+) ... with d_1 | d_2 | ..., each d_i >= 2."""

    rank: int
    torsion: tuple = ()

    def __post_init__(self):
        if self.rank < 0 or any(d < 2 for d in self.torsion):
            raise InvalidInputError("bad group presentation")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise InvalidInputError("torsion must form a divisibility chain")

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    @property
    def is_free(self) -> bool:
        return not self.torsion

    def render(self) -> str:
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " (+) ".join(parts) if parts else "0"

    def direct_sum(self, other: "AbelianGroupPresentation") -> "AbelianGroupPresentation":
        if not other.torsion:
            return AbelianGroupPresentation(self.rank + other.rank, self.torsion)
        if not self.torsion:
            return AbelianGroupPresentation(self.rank + other.rank, other.torsion)
        # merge torsion via prime-power multiset, then rebuild the chain
        powers = {}
        for d in self.torsion + other.torsion:
            for q, e in _factor(d).items():
                powers.setdefault(q, []).append(e)
        height = max(len(v) for v in powers.values())
        chain = []
        for level in range(height):
            d = 1
            for q, exps in powers.items():
                exps_sorted = sorted(exps, reverse=True)
                if level < len(exps_sorted):
                    d *= q ** exps_sorted[level]
            chain.append(d)
        chain = tuple(sorted(x for x in chain if x >= 2))
        return AbelianGroupPresentation(self.rank + other.rank, chain)


def _factor(n: int) -> dict:
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _diagonal(M: IntegerMatrix):
    _, D, _ = smith_normal_form(M)
    return [D.entries[i][i] for i in range(min(D.rows, D.cols))]


def cokernel(M: IntegerMatrix) -> AbelianGroupPresentation:
    """Z^rows / im(M) for M : Z^cols -> Z^rows."""
    diag = _diagonal(M)
    nonzero = [d for d in diag if d]
    return AbelianGroupPresentation(
        rank=M.rows - len(nonzero),
        torsion=tuple(d for d in nonzero if d >= 2),
    )


def kernel(M: IntegerMatrix) -> AbelianGroupPresentation:
    """ker(M) <= Z^cols; always free."""
    nonzero = len([d for d in _diagonal(M) if d])
    return AbelianGroupPresentation(rank=M.cols - nonzero)


@dataclass(frozen=True)
class PimsnerInput:
    """Data of the six-term sequence: the groups of the ideal and the base
    algebra in both degrees, and the maps j^* - phi^* on each degree.
    Torsion-free inputs only."""

    K0_IX: AbelianGroupPresentation
    K1_IX: AbelianGroupPresentation
    K0_A: AbelianGroupPresentation
    K1_A: AbelianGroupPresentation
    map0: IntegerMatrix
    map1: IntegerMatrix
    label: str = ""

    def __post_init__(self):
        for g in (self.K0_IX, self.K1_IX, self.K0_A, self.K1_A):
            if g.torsion:
                raise InvalidInputError("solver accepts torsion-free input groups only")
        if self.map0.rows != self.K0_A.rank or self.map0.cols != self.K0_IX.rank:
            raise InvalidInputError("map0 shape must be rank K0(A) x rank K0(I_X)")
        if self.map1.rows != self.K1_A.rank or self.map1.cols != self.K1_IX.rank:
            raise InvalidInputError("map1 shape must be rank K1(A) x rank K1(I_X)")


def pimsner_solve(inp: PimsnerInput):
    """(K_0, K_1) of the quotient algebra from the six-term sequence:

        K_0 fits in 0 -> coker(map0) -> K_0 -> ker(map1) -> 0
        K_1 fits in 0 -> coker(map1) -> K_1 -> ker(map0) -> 0

    Kernels of integer matrices are free, so both extensions split; the
    solver asserts that and refuses otherwise."""
    k0 = _solve_extension(cokernel(inp.map0), kernel(inp.map1))
    k1 = _solve_extension(cokernel(inp.map1), kernel(inp.map0))
    return k0, k1


def _solve_extension(sub, quot):
    if not quot.is_free:
        raise UndecidedError(
            "extension ambiguous: quotient piece has torsion, cannot split"
        )
    return sub.direct_sum(quot)


def monomial_family_input(m: int, n: int) -> PimsnerInput:
    """Six-term data for z^m = w^n on the circle: the ideal is the whole
    base algebra (no branched points on the circle), both K-groups are Z,
    and the maps are 1 - m in degree 0 and 1 - n in degree 1."""
    if m < 1 or n < 1:
        raise InvalidInputError("exponents must be >= 1")
    Z = AbelianGroupPresentation(rank=1)
    return PimsnerInput(
        K0_IX=Z,
        K1_IX=Z,
        K0_A=Z,
        K1_A=Z,
        map0=IntegerMatrix.of([[1 - m]]),
        map1=IntegerMatrix.of([[1 - n]]),
        label=f"monomial({m},{n})",
    )


def product_family_input(exponents: Sequence[int]) -> PimsnerInput:
    """Six-term data for prod_i (w - z^{m_i}) on the circle with r >= 2
    distinct exponents.  The ideal sits over the b branched points on the
    circle: K_0(I_X) = 0, K_1(I_X) = Z^b.  In degree 1 the inclusion sums
    the coordinates and the left action multiplies by r (each branched point
    is an r-fold coincidence), so the map is the row (1-r, ..., 1-r)."""
    exps = [int(e) for e in exponents]
    if len(exps) < 2:
        raise InvalidInputError("need at least two exponents")
    if len(set(exps)) != len(exps):
        raise InvalidInputError("duplicate exponents give a non-squarefree product")
    if min(exps) < 1:
        raise InvalidInputError("exponents must be >= 1")
    from .polyalg import BivariatePolynomial as BP
    from .correspondence import Correspondence

    factors = [BP.graph_of_power(e) for e in exps]
    corr = Correspondence(BP.product(factors), factors=factors)
    b = len(corr.branched_sets(restrict_to="circle").branch_points)
    r = len(exps)
    Z = AbelianGroupPresentation(rank=1)
    return PimsnerInput(
        K0_IX=AbelianGroupPresentation(rank=0),
        K1_IX=AbelianGroupPresentation(rank=b),
        K0_A=Z,
        K1_A=Z,
        map0=IntegerMatrix.zero(1, 0),
        map1=IntegerMatrix.of([[1 - r] * b]),
        label=f"product({','.join(map(str, exps))})",
    )


def kgroup_table(max_m: int, max_n: int):
    """Rows (m, n, K_0, K_1) for the monomial family over the full grid."""
    if max_m > 20 or max_n > 20:
        raise InvalidInputError("table bounds capped at 20")
    rows = []
    for m in range(1, max_m + 1):
        for n in range(1, max_n + 1):
            k0, k1 = pimsner_solve(monomial_family_input(m, n))
            rows.append((m, n, k0, k1))
    return rows
