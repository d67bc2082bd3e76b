"""Dynamics of a correspondence: path spaces, invariant sets, reachable-set
propagation, expansiveness and freeness machinery.

The circle families (z^m = w^n and products of power graphs) get exact
treatment: subsets of the circle are finite unions of half-open arcs with
rational endpoints, so "the propagated set equals the whole circle" is a
decidable statement.  Everything else is numerical sampling over fibers.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .correspondence import (
    Correspondence,
    SpherePoint,
    WeightedFiber,
    chordal_distance,
)
from .errors import InvalidInputError, ResourceLimitError

__all__ = [
    "PathSample",
    "ArcSet",
    "CircleCorrespondence",
    "GPReport",
    "GPSampleReport",
    "path_space",
    "paths_ending_at",
    "invariant_check",
    "propagate_finite",
    "propagate_arcs",
    "expansive_decide",
    "expansive_oracle",
    "covering_step",
    "component_count",
    "component_count_oracle",
    "free_decide",
    "gp_enumerate",
    "gp_sample",
    "circle_sampler",
    "sphere_sampler",
    "limit_set_sample",
]

ARC_CAP = 10**6


# ---------------------------------------------------------------------------
# path spaces over a general correspondence


@dataclass(frozen=True)
class PathSample:
    """A chain (z_1, ..., z_{n+1}) with consecutive pairs on the
    correspondence; weight is the product of the branch indices."""

    points: tuple  # of SpherePoint
    weight: int

    @property
    def length(self) -> int:
        return len(self.points) - 1

    @property
    def start(self) -> SpherePoint:
        return self.points[0]

    @property
    def end(self) -> SpherePoint:
        return self.points[-1]


def path_space(
    corr: Correspondence,
    start_set: Sequence[SpherePoint],
    n: int,
    tol: float = 1e-6,
):
    """All length-n forward paths starting in start_set."""
    if n < 1:
        raise InvalidInputError("path length must be >= 1")
    paths = [PathSample(points=(p,), weight=1) for p in start_set]
    for _ in range(n):
        nxt = []
        for path in paths:
            for w, e in corr.forward_fiber(path.end, tol).points:
                nxt.append(PathSample(points=path.points + (w,), weight=path.weight * e))
        paths = nxt
    return paths


def paths_ending_at(
    corr: Correspondence, w: SpherePoint, n: int, tol: float = 1e-6
):
    """All length-n paths (z_1, ..., z_n, w); built by iterated backward
    fibers from the endpoint."""
    if n < 0:
        raise InvalidInputError("path length must be >= 0")
    paths = [PathSample(points=(w,), weight=1)]
    for _ in range(n):
        nxt = []
        for path in paths:
            for z, e in corr.backward_fiber(path.start, tol).points:
                nxt.append(
                    PathSample(points=(z,) + path.points, weight=path.weight * e)
                )
        paths = nxt
    return paths


def invariant_check(
    corr: Correspondence, points: Sequence[SpherePoint], tol: float = 1e-7
):
    """Whether the finite set is invariant under fibers in both directions.
    Returns (True, None) or (False, (base, escaping_point))."""
    pts = list(points)

    def inside(q):
        return any(chordal_distance(q, p) <= tol for p in pts)

    for p in pts:
        for w, _ in corr.forward_fiber(p).points:
            if not inside(w):
                return False, (p, w)
        for z, _ in corr.backward_fiber(p).points:
            if not inside(z):
                return False, (p, z)
    return True, None


def propagate_finite(
    corr: Correspondence,
    start: Sequence[SpherePoint],
    n: int,
    tol: float = 1e-7,
):
    """The set reachable from start in exactly n forward steps."""
    current = list(start)
    for _ in range(n):
        nxt = []
        for p in current:
            for w, _ in corr.forward_fiber(p).points:
                if all(chordal_distance(w, q) > tol for q in nxt):
                    nxt.append(w)
        current = nxt
    return current


# ---------------------------------------------------------------------------
# exact arc arithmetic on the circle R/Z


@dataclass(frozen=True)
class ArcSet:
    """Finite union of half-open arcs [a, b) on R/Z with rational endpoints,
    normalized: 0 <= a < b <= 1, sorted, pairwise disjoint, adjacent arcs
    merged."""

    arcs: tuple  # of (Fraction, Fraction)

    @staticmethod
    def from_arcs(raw) -> "ArcSet":
        """Normalize a list of (a, b) with b > a; arcs of length >= 1 mean
        the full circle; endpoints are reduced mod 1."""
        segments = []
        for a, b in raw:
            a, b = Fraction(a), Fraction(b)
            length = b - a
            if length <= 0:
                raise InvalidInputError(f"empty or reversed arc [{a}, {b})")
            if length >= 1:
                return ArcSet(arcs=((Fraction(0), Fraction(1)),))
            a -= math.floor(a)
            b = a + length
            if b <= 1:
                segments.append((a, b))
            else:
                segments.append((a, Fraction(1)))
                segments.append((Fraction(0), b - 1))
        segments.sort()
        merged = []
        for a, b in segments:
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        return ArcSet(arcs=tuple(merged))

    @staticmethod
    def full() -> "ArcSet":
        return ArcSet(arcs=((Fraction(0), Fraction(1)),))

    @staticmethod
    def empty() -> "ArcSet":
        return ArcSet(arcs=())

    @property
    def measure(self) -> Fraction:
        return sum((b - a for a, b in self.arcs), Fraction(0))

    @property
    def is_full(self) -> bool:
        return self.measure == 1

    def contains_point(self, x) -> bool:
        x = Fraction(x)
        x -= math.floor(x)
        return any(a <= x < b for a, b in self.arcs)

    def contains(self, other: "ArcSet") -> bool:
        for a, b in other.arcs:
            if not any(c <= a and b <= d for c, d in self._closure_arcs()):
                return False
        return True

    def _closure_arcs(self):
        # wrap-merge [x, 1) + [0, y) into [x, 1 + y) for containment tests
        arcs = list(self.arcs)
        if (
            len(arcs) >= 2
            and arcs[0][0] == 0
            and arcs[-1][1] == 1
        ):
            first = arcs.pop(0)
            last = arcs.pop()
            arcs.append((last[0], 1 + first[1]))
            arcs.insert(0, first)
        return arcs

    def union(self, other: "ArcSet") -> "ArcSet":
        return ArcSet.from_arcs(list(self.arcs) + list(other.arcs))

    def to_json(self):
        return [
            [a.numerator, a.denominator, b.numerator, b.denominator]
            for a, b in self.arcs
        ]

    @staticmethod
    def from_json(data) -> "ArcSet":
        return ArcSet.from_arcs(
            [(Fraction(na, da), Fraction(nb, db)) for na, da, nb, db in data]
        )


# ---------------------------------------------------------------------------
# the circle families


@dataclass(frozen=True)
class CircleCorrespondence:
    """Correspondence family invariant on the unit circle.

    kind "monomial":        z^m - w^n, params (m, n)
    kind "power_product":   prod_i (w - z^{m_i}), params = exponents
    kind "mixed_product":   prod_k (z^{i_k} - w^{j_k}), params = pairs
    """

    kind: str
    params: tuple

    @staticmethod
    def monomial(m: int, n: int) -> "CircleCorrespondence":
        if m < 1 or n < 1:
            raise InvalidInputError("monomial exponents must be >= 1")
        return CircleCorrespondence(kind="monomial", params=(m, n))

    @staticmethod
    def power_product(exponents: Sequence[int]) -> "CircleCorrespondence":
        exps = tuple(int(e) for e in exponents)
        if len(exps) < 2 or len(set(exps)) != len(exps) or min(exps) < 1:
            raise InvalidInputError(
                "power product needs at least two distinct exponents >= 1"
            )
        return CircleCorrespondence(kind="power_product", params=exps)

    @staticmethod
    def mixed_product(pairs) -> "CircleCorrespondence":
        ps = tuple((int(i), int(j)) for i, j in pairs)
        if not ps or min(min(p) for p in ps) < 1:
            raise InvalidInputError("mixed product needs pairs of exponents >= 1")
        return CircleCorrespondence(kind="mixed_product", params=ps)

    @property
    def m(self) -> int:
        self._require_monomial()
        return self.params[0]

    @property
    def n(self) -> int:
        self._require_monomial()
        return self.params[1]

    @property
    def d(self) -> int:
        return math.gcd(self.m, self.n)

    def _require_monomial(self):
        if self.kind != "monomial":
            raise InvalidInputError(f"operation requires the monomial family, got {self.kind}")

    def to_correspondence(self) -> Correspondence:
        from .polyalg import BivariatePolynomial as BP

        if self.kind == "monomial":
            return Correspondence(BP.monomial_relation(self.m, self.n))
        if self.kind == "power_product":
            factors = [BP.graph_of_power(e) for e in self.params]
            return Correspondence(BP.product(factors), factors=factors)
        factors = [BP.monomial_relation(i, j) for i, j in self.params]
        return Correspondence(BP.product(factors), factors=factors)


def propagate_arcs(cc: CircleCorrespondence, arcs: ArcSet, steps: int = 1) -> ArcSet:
    """Exact one-or-more-step image of an arc set under the angle relation
    m*alpha = n*beta (mod 1): each [a, b) maps to the n arcs
    [(m a + k)/n, (m b + k)/n)."""
    cc._require_monomial()
    m, n = cc.m, cc.n
    current = arcs
    for _ in range(steps):
        if not current.arcs:
            return current
        images = []
        for a, b in current.arcs:
            if m * (b - a) >= 1:
                return ArcSet.full()
            for k in range(n):
                images.append(
                    (Fraction(m * a + k, n), Fraction(m * b + k, n))
                )
        if len(images) > ARC_CAP:
            raise ResourceLimitError(
                f"arc count exploded past {ARC_CAP} during propagation"
            )
        current = ArcSet.from_arcs(images)
    return current


def expansive_decide(cc: CircleCorrespondence) -> bool:
    """Criterion for the monomial family: expansive on the circle iff
    m does not divide n."""
    return cc.n % cc.m != 0


def covering_step(cc: CircleCorrespondence, seed: ArcSet, r: int) -> bool:
    """Exact test whether the r-step image of seed is the whole circle.

    The r-step image is the union over k of (m^r U + d^(r-1) k) / n^r, i.e.
    translates of m^r U / n^r by the lattice of spacing d^(r-1) / n^r.  It
    covers the circle iff the arcs m^r U, reduced modulo d^(r-1), cover a
    full period.
    """
    cc._require_monomial()
    m, n, d = cc.m, cc.n, cc.d
    if not seed.arcs:
        return False
    spacing = Fraction(d ** (r - 1))
    scale = m**r
    pieces = []
    for a, b in seed.arcs:
        length = scale * (b - a)
        if length >= spacing:
            return True
        a2 = (scale * a) % spacing
        b2 = a2 + length
        if b2 <= spacing:
            pieces.append((a2, b2))
        else:
            pieces.append((a2, spacing))
            pieces.append((Fraction(0), b2 - spacing))
    pieces.sort()
    reach = Fraction(0)
    for a, b in pieces:
        if a > reach:
            return False
        reach = max(reach, b)
    return bool(pieces) and reach >= spacing


def expansive_oracle(
    cc: CircleCorrespondence, seed: ArcSet, max_steps: int = 64
):
    """(covered, steps): whether some iterate of the arc propagation reaches
    the full circle within max_steps, by the exact per-step covering test."""
    cc._require_monomial()
    if not seed.arcs:
        raise InvalidInputError("the seed arc set must be nonempty")
    if seed.is_full:
        return True, 0
    for r in range(1, max_steps + 1):
        if covering_step(cc, seed, r):
            return True, r
    return False, max_steps


def component_count(cc: CircleCorrespondence) -> int:
    """Number of connected components of the circle correspondence:
    gcd(m, n)."""
    return cc.d


def component_count_oracle(cc: CircleCorrespondence, samples: int = 10**4) -> int:
    """Union-find on a sampled graph of the torus curve m*alpha = n*beta
    (mod 1): nodes are exact rational samples along the n offset lines,
    consecutive samples along a line are joined, and coinciding sample
    points (including the wrap-around) are identified."""
    cc._require_monomial()
    m, n = cc.m, cc.n
    if samples < 4 * n * (m + 1):
        raise InvalidInputError(
            f"need at least {4 * n * (m + 1)} samples for m={m}, n={n}"
        )
    per_line = samples // n
    nodes = {}
    parent = []

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj

    def node(alpha, beta):
        key = (alpha % 1, beta % 1)
        if key not in nodes:
            nodes[key] = len(parent)
            parent.append(len(parent))
        return nodes[key]

    for k in range(n):
        prev = None
        for i in range(per_line + 1):
            alpha = Fraction(i, per_line)
            beta = (Fraction(m, n) * alpha + Fraction(k, n)) % 1
            idx = node(alpha, beta)
            if prev is not None:
                union(prev, idx)
            prev = idx
    return len({find(i) for i in range(len(parent))})


# ---------------------------------------------------------------------------
# freeness


def free_decide(cc: CircleCorrespondence) -> Optional[bool]:
    """Apply the family criteria for freeness on the circle.

    True/False where a criterion decides, None (undecided) otherwise:
    the single-factor relation z^m = w^n is free iff m != n; a product of
    factors z^{i_k} = w^{j_k} is free when every factor has an exponent
    other than 1 and the exponents other than 1 are pairwise coprime; the
    pair (w - z^m)(w^m - z), m >= 2, is not free (the 4-periodic and
    2-periodic paths through z^m coincide everywhere)."""
    if cc.kind == "monomial":
        return cc.params[0] != cc.params[1]
    if cc.kind == "power_product":
        pairs = tuple((e, 1) for e in cc.params)
    else:
        pairs = cc.params
    if len(pairs) == 1:
        return pairs[0][0] != pairs[0][1]
    if len(pairs) == 2:
        # (z^m - w)(z - w^m), m >= 2: explicit non-free pair
        (i1, j1), (i2, j2) = pairs
        if i1 == j2 and j1 == i2 == 1 and i1 >= 2:
            return False
        if i2 == j1 and j2 == i1 == 1 and i2 >= 2:
            return False
    specials = []
    for i, j in pairs:
        if i == 1 and j == 1:
            return None
        specials.extend(e for e in (i, j) if e != 1)
    for a in range(len(specials)):
        for b in range(a + 1, len(specials)):
            if math.gcd(specials[a], specials[b]) != 1:
                return None
    return True


@dataclass(frozen=True)
class GPReport:
    """Exact enumeration result for generalized periodic points."""

    N: int
    finite: bool
    points: tuple  # of SpherePoint, empty when infinite
    angles: tuple  # of Fraction, circle angles of the points
    certificate: str


def gp_enumerate(cc: CircleCorrespondence, N: int) -> GPReport:
    """Exact generalized periodic points of the monomial family up to path
    length N: intersections of the torus line families of two different
    iteration lengths, computed over the rationals."""
    cc._require_monomial()
    if N < 1:
        raise InvalidInputError("N must be >= 1")
    if N > 6:
        raise ResourceLimitError(
            "generalized-periodic enumeration refused for N > 6 "
            "(quadratic blowup in line pairs)"
        )
    m, n, d = cc.m, cc.n, cc.d
    if m == n:
        return GPReport(
            N=N,
            finite=False,
            points=(),
            angles=(),
            certificate="diagonal paths (z, z, ..., z) make every circle point "
            "generalized periodic",
        )

    def lines(r):
        # slope and offsets of the length-r endpoint relation on the torus
        if r == 0:
            return Fraction(1), [Fraction(0)]
        slope = Fraction(m**r, n**r)
        step = Fraction(d ** (r - 1), n**r)
        count = n**r // d ** (r - 1)
        return slope, [step * k for k in range(count)]

    betas = set()
    for r in range(1, N + 1):
        slope_r, offs_r = lines(r)
        for s in range(0, r):
            slope_s, offs_s = lines(s)
            delta = slope_r - slope_s
            for c1 in offs_r:
                for c2 in offs_s:
                    # slope_r * alpha + c1 = slope_s * alpha + c2 + t,
                    # so alpha = (c2 - c1 + t) / delta must land in [0, 1)
                    lo = min(c1 - c2, c1 - c2 + delta)
                    hi = max(c1 - c2, c1 - c2 + delta)
                    for t in range(math.floor(lo), math.ceil(hi) + 1):
                        alpha = (c2 - c1 + t) / delta
                        if 0 <= alpha < 1:
                            betas.add((slope_r * alpha + c1) % 1)
    angles = tuple(sorted(betas))
    points = tuple(
        SpherePoint.from_complex(
            complex(math.cos(2 * math.pi * b), math.sin(2 * math.pi * b))
        )
        for b in angles
    )
    return GPReport(
        N=N,
        finite=True,
        points=points,
        angles=angles,
        certificate=f"exact intersection of torus line families for lengths 0..{N}",
    )


@dataclass(frozen=True)
class GPSampleReport:
    """Heuristic sampled estimate of the generalized periodic set; density
    is the fraction of sampled start points witnessing a length coincidence."""

    N: int
    samples: int
    density: float
    witnesses: tuple  # of SpherePoint, capped

    heuristic: bool = True


def gp_sample(
    corr: Correspondence,
    sampler: Callable[[random.Random], SpherePoint],
    N: int,
    samples: int,
    seed: int = 0,
    tol: float = 1e-6,
    witness_cap: int = 64,
):
    """Sample start points, grow all forward paths to each length <= N and
    flag endpoints reached at two different lengths.  Heuristic only."""
    rng = random.Random(seed)
    witnesses = []
    hits = 0
    for _ in range(samples):
        z = sampler(rng)
        by_length = {0: [z]}
        current = [z]
        for k in range(1, N + 1):
            nxt = []
            for p in current:
                nxt.extend(w for w, _ in corr.forward_fiber(p, tol).points)
            by_length[k] = nxt
            current = nxt
        found = False
        for r in range(N + 1):
            for s in range(r + 1, N + 1):
                for a in by_length[r]:
                    for b in by_length[s]:
                        if chordal_distance(a, b) <= tol:
                            found = True
                            if len(witnesses) < witness_cap:
                                witnesses.append(a)
                            break
                    if found:
                        break
                if found:
                    break
            if found:
                break
        if found:
            hits += 1
    return GPSampleReport(
        N=N,
        samples=samples,
        density=hits / samples if samples else 0.0,
        witnesses=tuple(witnesses),
    )


def circle_sampler(rng: random.Random) -> SpherePoint:
    theta = 2 * math.pi * rng.random()
    return SpherePoint.from_complex(complex(math.cos(theta), math.sin(theta)))


def sphere_sampler(rng: random.Random) -> SpherePoint:
    # uniform on the sphere via the chordal-symmetric construction
    u = rng.random()
    theta = 2 * math.pi * rng.random()
    r = math.sqrt(u / max(1e-12, 1 - u))
    return SpherePoint.from_complex(complex(r * math.cos(theta), r * math.sin(theta)))


# ---------------------------------------------------------------------------
# chaos-game orbit sampling


def limit_set_sample(
    corr: Correspondence,
    iterations: int,
    seed: int,
    direction: str = "backward",
    start: Optional[SpherePoint] = None,
    weighted: bool = True,
    burn_in: int = 100,
    workers: int = 1,
    tol: float = 1e-6,
):
    """Chaos-game orbit: repeatedly jump to a fiber point chosen with
    probability proportional to its branch index (or uniformly when
    weighted=False).  Deterministic for a fixed (seed, workers) pair; the
    merged output is worker-ordered."""
    if iterations < 1:
        raise InvalidInputError("iterations must be >= 1")
    if direction not in ("forward", "backward", "mixed"):
        raise InvalidInputError(f"unknown direction {direction!r}")
    out = []
    for widx in range(workers):
        rng = random.Random(seed * 1000003 + widx)
        p = start if start is not None else sphere_sampler(rng)
        for i in range(iterations + burn_in):
            step_dir = direction
            if direction == "mixed":
                step_dir = "forward" if rng.random() < 0.5 else "backward"
            if step_dir == "backward":
                fiber = corr.backward_fiber(p, tol)
            else:
                fiber = corr.forward_fiber(p, tol)
            pts = fiber.points
            if weighted:
                weights = [e for _, e in pts]
            else:
                weights = [1] * len(pts)
            p = rng.choices([q for q, _ in pts], weights=weights, k=1)[0]
            if i >= burn_in:
                out.append(p)
    return out
