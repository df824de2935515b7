"""Boundary labels, symbolic-epsilon weights and the forgetful-map blow-up schedule.

A label ``h = h_1 | ... | h_s | M`` records a subset ``h_i`` of ``{1..d_i}`` for
each degree block and a set ``M`` of marked points (never containing 1). Its
string form lists the blocks then the marked set, each as a sorted brace set,
e.g. ``"{1,3}|{}"`` for ``d=3`` with no marks or ``"{1}|{2,3}"``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

BLOW_DOWN = "blow-down"
PROJECTIVE_BUNDLE = "projective-bundle"
EVEN_TERMINAL = "even-d-terminal"


@dataclass(frozen=True)
class LabelContext:
    """Degree blocks ``(d_1..d_s)`` and the number of marked points."""

    degrees: tuple[int, ...]
    points: int = 0

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        if not self.degrees or any(d < 0 for d in self.degrees):
            raise ValueError(f"bad degree blocks {self.degrees}")
        if self.points < 0:
            raise ValueError("negative number of marked points")

    @property
    def d(self) -> int:
        return sum(self.degrees)

    @property
    def markable(self) -> tuple[int, ...]:
        """Points allowed in a label's marked part (point 1 never is)."""
        return tuple(range(2, self.points + 1))


def context(d: int | Sequence[int], points: int = 0) -> LabelContext:
    degrees = (d,) if isinstance(d, int) else tuple(d)
    return LabelContext(degrees, points)


def _fmt_set(s) -> str:
    return "{" + ",".join(str(x) for x in sorted(s)) + "}"


_SET_RE = re.compile(r"\{([0-9,]*)\}")


@dataclass(frozen=True)
class BoundaryLabel:
    parts: tuple[frozenset, ...]
    marked: frozenset
    context: LabelContext

    def __post_init__(self):
        parts = tuple(frozenset(int(x) for x in p) for p in self.parts)
        marked = frozenset(int(x) for x in self.marked)
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "marked", marked)
        ctx = self.context
        if len(parts) != len(ctx.degrees):
            raise ValueError(f"label has {len(parts)} blocks, context has {len(ctx.degrees)}")
        for p, d in zip(parts, ctx.degrees):
            if not p <= set(range(1, d + 1)):
                raise ValueError(f"degree part {_fmt_set(p)} outside 1..{d}")
        if not marked <= set(ctx.markable):
            raise ValueError(f"marked part {_fmt_set(marked)} outside {_fmt_set(ctx.markable)}")
        if not any(parts) and len(marked) < 2:
            raise ValueError("label needs a nonempty degree part or at least two marked points")

    @classmethod
    def make(cls, ctx: LabelContext, *parts, marked=()) -> "BoundaryLabel":
        if len(parts) == 1 and len(ctx.degrees) > 1 and isinstance(parts[0], (tuple, list)) \
                and all(isinstance(p, (set, frozenset, tuple, list)) for p in parts[0]):
            parts = tuple(parts[0])
        return cls(tuple(frozenset(p) for p in parts), frozenset(marked), ctx)

    @classmethod
    def parse(cls, text: str, ctx: LabelContext) -> "BoundaryLabel":
        pieces = text.strip().split("|")
        if len(pieces) != len(ctx.degrees) + 1:
            raise ValueError(f"label {text!r} needs {len(ctx.degrees) + 1} '|'-separated sets")
        sets = []
        for piece in pieces:
            m = _SET_RE.fullmatch(piece.strip())
            if not m:
                raise ValueError(f"bad set {piece!r} in label {text!r}")
            body = m.group(1)
            sets.append(frozenset(int(x) for x in body.split(",")) if body else frozenset())
        return cls(tuple(sets[:-1]), sets[-1], ctx)

    def __str__(self) -> str:
        return "|".join([_fmt_set(p) for p in self.parts] + [_fmt_set(self.marked)])

    def __repr__(self) -> str:
        return f"BoundaryLabel({str(self)!r})"

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.parts)

    @property
    def size(self) -> int:
        """Total degree |h| carried by the label."""
        return sum(self.sizes)

    def elements(self) -> frozenset:
        """Tagged elements: ``(block, i)`` for degree parts, ``("m", j)`` for marks."""
        out = {(b, x) for b, p in enumerate(self.parts) for x in p}
        out |= {("m", j) for j in self.marked}
        return frozenset(out)

    def sort_key(self):
        return (self.size, len(self.marked), tuple(tuple(sorted(p)) for p in self.parts),
                tuple(sorted(self.marked)))

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def complement(self) -> "BoundaryLabel":
        return complement(self)

    def is_nested_in(self, other: "BoundaryLabel") -> bool:
        return self.elements() <= other.elements()

    def is_disjoint_from(self, other: "BoundaryLabel") -> bool:
        return not (self.elements() & other.elements())

    def symbol(self, prefix: str = "D") -> str:
        """Generator name for the divisor class, e.g. ``D{1,2}`` or ``D{1}|{2}``."""
        if len(self.parts) == 1 and not self.context.markable:
            return prefix + _fmt_set(self.parts[0])
        return prefix + str(self)


def complement(h: BoundaryLabel) -> BoundaryLabel:
    """The complementary decoration; only defined without markable points."""
    ctx = h.context
    if ctx.markable:
        raise ValueError("complement needs a context without markable points")
    parts = tuple(frozenset(range(1, d + 1)) - p for p, d in zip(h.parts, ctx.degrees))
    return BoundaryLabel(parts, frozenset(), ctx)


def is_compatible(labels: Iterable[BoundaryLabel]) -> bool:
    """True iff every two labels are nested or disjoint."""
    labels = list(labels)
    ctxs = {h.context for h in labels}
    if len(ctxs) > 1:
        raise ValueError("labels from different contexts")
    sets = [h.elements() for h in labels]
    for a, b in itertools.combinations(sets, 2):
        inter = a & b
        if inter and inter != a and inter != b:
            return False
    return True


class NestedFamily(frozenset):
    """A set of pairwise nested-or-disjoint labels."""

    def __new__(cls, labels: Iterable[BoundaryLabel] = ()):
        labels = frozenset(labels)
        if not is_compatible(labels):
            raise ValueError("labels are not pairwise nested or disjoint")
        return super().__new__(cls, labels)

    def __repr__(self):
        return "NestedFamily([" + ", ".join(str(h) for h in sorted(self)) + "])"


def all_labels(ctx: LabelContext, proper: bool = True) -> list[BoundaryLabel]:
    """Every label of the context, sorted canonically.

    With ``proper`` the label must leave a stable other side: some degree
    outside it, or (with marked points) at least one other point beside 1.
    """
    blocks = [list(_subsets(range(1, d + 1))) for d in ctx.degrees]
    marks = list(_subsets(ctx.markable))
    out = []
    for parts in itertools.product(*blocks):
        for M in marks:
            if not any(parts) and len(M) < 2:
                continue
            h = BoundaryLabel(tuple(parts), M, ctx)
            if proper and not _other_side_stable(h):
                continue
            out.append(h)
    out.sort(key=BoundaryLabel.sort_key)
    return out


def _other_side_stable(h: BoundaryLabel) -> bool:
    ctx = h.context
    rest_degree = ctx.d - h.size
    if ctx.points == 0:
        return rest_degree > 0
    # the other side carries point 1, the node, and the marks not in h
    rest_points = 1 + len(set(ctx.markable) - h.marked)
    return rest_degree > 0 or rest_points >= 2


def _subsets(items) -> Iterator[frozenset]:
    items = list(items)
    for r in range(len(items) + 1):
        for c in itertools.combinations(items, r):
            yield frozenset(c)


# group action --------------------------------------------------------------------

@dataclass(frozen=True)
class GroupElement:
    """One permutation per degree block, in one-line notation on ``1..d_i``."""

    perms: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        perms = tuple(tuple(int(x) for x in p) for p in self.perms)
        for p in perms:
            if sorted(p) != list(range(1, len(p) + 1)):
                raise ValueError(f"{p} is not a permutation of 1..{len(p)}")
        object.__setattr__(self, "perms", perms)

    @classmethod
    def identity(cls, degrees: Sequence[int]) -> "GroupElement":
        return cls(tuple(tuple(range(1, d + 1)) for d in degrees))

    @classmethod
    def transposition(cls, degrees: Sequence[int], block: int, i: int, j: int) -> "GroupElement":
        perms = [list(range(1, d + 1)) for d in degrees]
        perms[block][i - 1], perms[block][j - 1] = j, i
        return cls(tuple(tuple(p) for p in perms))

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.perms)

    def __call__(self, h: BoundaryLabel) -> BoundaryLabel:
        return orbit(self, h)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        # (self * other)(x) = self(other(x))
        return GroupElement(tuple(tuple(p[q[i] - 1] for i in range(len(q)))
                                  for p, q in zip(self.perms, other.perms)))

    def inverse(self) -> "GroupElement":
        inv = []
        for p in self.perms:
            q = [0] * len(p)
            for i, x in enumerate(p):
                q[x - 1] = i + 1
            inv.append(tuple(q))
        return GroupElement(tuple(inv))

    def is_identity(self) -> bool:
        return all(p == tuple(range(1, len(p) + 1)) for p in self.perms)


def group_elements(degrees: Sequence[int]) -> list[GroupElement]:
    """All of ``S_{d_1} x ... x S_{d_s}``, identity first."""
    per_block = [list(itertools.permutations(range(1, d + 1))) for d in degrees]
    return [GroupElement(tuple(c)) for c in itertools.product(*per_block)]


def orbit(g: GroupElement, h: BoundaryLabel) -> BoundaryLabel:
    """The image of ``h`` under ``g`` (relabels the degree parts)."""
    if g.degrees != h.context.degrees:
        raise ValueError("group element and label have different degree blocks")
    parts = tuple(frozenset(p[x - 1] for x in part) for p, part in zip(g.perms, h.parts))
    return BoundaryLabel(parts, h.marked, h.context)


def orbit_set(h: BoundaryLabel) -> list[BoundaryLabel]:
    """The full orbit of ``h`` under the product of symmetric groups, sorted."""
    out = {orbit(g, h) for g in group_elements(h.context.degrees)}
    return sorted(out, key=BoundaryLabel.sort_key)


# weights -------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class EpsWeight:
    """The formal weight ``1/(k + eps)`` with ``eps`` a positive infinitesimal."""

    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be nonnegative")

    def at(self, eps: Fraction) -> Fraction:
        return 1 / (self.k + Fraction(eps))

    def __str__(self):
        return f"1/({self.k}+eps)"


Weight = "Fraction | EpsWeight"


def _weight(w):
    if isinstance(w, EpsWeight):
        return w
    w = Fraction(w)
    if not 0 <= w <= 1:
        raise ValueError(f"point weight {w} outside [0,1]")
    return w


@dataclass(frozen=True)
class WeightSystem:
    """Marked-point weights and one map weight ``1/(k_i + eps)`` per degree block."""

    point_weights: tuple = ()
    map_k: tuple[int, ...] = (0,)

    def __post_init__(self):
        object.__setattr__(self, "point_weights", tuple(_weight(w) for w in self.point_weights))
        ks = (self.map_k,) if isinstance(self.map_k, int) else tuple(int(k) for k in self.map_k)
        if any(k < 0 for k in ks):
            raise ValueError("k must be nonnegative")
        object.__setattr__(self, "map_k", ks)

    @property
    def map_weights(self) -> tuple[EpsWeight, ...]:
        return tuple(EpsWeight(k) for k in self.map_k)

    def is_valid(self, degree: Sequence[int]) -> bool:
        """Stability condition ``sum a_i + sum d_i a > 2`` in the eps limit."""
        terms = list(self.point_weights) + [(l, w) for l, w in zip(degree, self.map_weights)]
        return _compare(terms, 2) > 0


def _split(terms):
    """Collect ``sum c/(k+eps) + r`` into (infinite?, L0, has-eps-part)."""
    infinite = False
    L0 = Fraction(0)
    has_eps = False
    for t in terms:
        c, w = (1, t) if not isinstance(t, tuple) else t
        c = Fraction(c)
        if isinstance(w, EpsWeight):
            if c == 0:
                continue
            if w.k == 0:
                if c > 0:
                    infinite = True
                else:
                    raise ValueError("negative multiple of 1/eps")
            else:
                L0 += c / w.k
                has_eps = True
        else:
            L0 += c * w
    return infinite, L0, has_eps


def _compare(terms, rhs) -> int:
    """Sign of ``lhs - rhs`` as eps -> 0+ (eps-terms with positive coefficient push below L0)."""
    infinite, L0, has_eps = _split(terms)
    if infinite:
        return 1
    if L0 != rhs:
        return 1 if L0 > rhs else -1
    return -1 if has_eps else 0


def is_unstable_component(degree: Sequence[int] | int, marked_weights: Sequence, w: WeightSystem) -> bool:
    """True iff ``sum_i l_i/(k_i+eps) + sum_j a_j <= 1`` for an infinitesimal eps > 0."""
    degree = (degree,) if isinstance(degree, int) else tuple(degree)
    if any(l < 0 for l in degree):
        raise ValueError("negative degree")
    if len(degree) != len(w.map_k):
        raise ValueError("degree and weight system have different numbers of blocks")
    terms = [(l, mw) for l, mw in zip(degree, w.map_weights)] + [_weight(a) for a in marked_weights]
    return _compare(terms, 1) <= 0


def is_unstable_numeric(degree, marked_weights, w: WeightSystem, eps=Fraction(1, 10**6)) -> bool:
    """Reference check: plug in a concrete small eps and compare exactly."""
    degree = (degree,) if isinstance(degree, int) else tuple(degree)
    eps = Fraction(eps)
    total = sum((l * mw.at(eps) for l, mw in zip(degree, w.map_weights)), Fraction(0))
    for a in marked_weights:
        a = _weight(a)
        total += a.at(eps) if isinstance(a, EpsWeight) else a
    return total <= 1


# schedules -----------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class DivisorType:
    """The divisor ``D(A, i | B, d-i)`` of the (m+1)-pointed space, A holding point m+1."""

    A: tuple[int, ...]
    i: int
    B: tuple[int, ...]
    d: int

    def __str__(self):
        return f"D({_fmt_set(self.A)},{self.i}|{_fmt_set(self.B)},{self.d - self.i})"

    def sort_key(self):
        return (self.i + len(self.A) - 1, self.i, len(self.A), self.A)

    def labels(self) -> list[BoundaryLabel]:
        """All labels of this type: degree parts of size i, marked part A."""
        ctx = LabelContext((self.d,), max(self.A + self.B))
        return [BoundaryLabel((frozenset(c),), frozenset(self.A), ctx)
                for c in itertools.combinations(range(1, self.d + 1), self.i)]


@dataclass(frozen=True)
class Stage:
    k: int
    kind: str
    contracted: tuple[str, ...]

    def to_json(self) -> dict:
        return {"k": self.k, "kind": self.kind, "contracted": list(self.contracted)}


@dataclass(frozen=True)
class BlowupSchedule:
    d: int
    m: int
    stages: tuple[Stage, ...]

    @property
    def blow_downs(self) -> tuple[Stage, ...]:
        return tuple(s for s in self.stages if s.kind == BLOW_DOWN)

    @property
    def terminal(self) -> Stage:
        return self.stages[-1]

    def to_json(self) -> dict:
        return {"d": self.d, "m": self.m, "stages": [s.to_json() for s in self.stages]}

    def rows(self) -> list[tuple[str, str, str]]:
        return [(str(s.k), s.kind, ", ".join(s.contracted) or "-") for s in self.stages]


def schedule_m0(d: int) -> BlowupSchedule:
    """Stages of the one-pointed degree-d tower: stage k contracts labels with |h| = k."""
    if d < 1:
        raise ValueError("d must be at least 1")
    ctx = LabelContext((d,), 0)
    labels = all_labels(ctx)
    K = (d - 1) // 2
    stages = []
    for k in range(1, K + 1):
        w = WeightSystem((), (k,))
        hit = [h for h in labels if h.size == k and is_unstable_component(h.size, (), w)]
        stages.append(Stage(k, BLOW_DOWN, tuple(str(h) for h in hit)))
    if d % 2:
        stages.append(Stage(K + 1, PROJECTIVE_BUNDLE, ()))
    else:
        half = tuple(str(h) for h in labels if 2 * h.size == d)
        stages.append(Stage(K + 1, EVEN_TERMINAL, half))
    return BlowupSchedule(d, 0, tuple(stages))


def tower_weights(d: int, m: int, k: int) -> tuple[WeightSystem, dict[int, object]]:
    """Weights of stage k of the (m+1)-pointed tower: point 1 has 1, m+1 has 0, others 1/(k+eps)."""
    pw = {1: Fraction(1), m + 1: Fraction(0)}
    for j in range(2, m + 1):
        pw[j] = EpsWeight(k)
    return WeightSystem(tuple(pw[j] for j in range(1, m + 2)), (k,)), pw


def divisor_types(d: int, m: int) -> list[DivisorType]:
    """Divisors D(A,i|B,d-i) with m+1 in A, 1 in B whose A-side is contracted somewhere in the tower.

    The A side must carry moduli (degree i >= 1 or at least two points besides
    m+1) and the B side must be stable (degree d-i >= 1 or at least two points).
    """
    out = []
    middle = list(range(2, m + 1))
    for r in range(len(middle) + 1):
        for Ap in itertools.combinations(middle, r):
            A = tuple(sorted(Ap + (m + 1,)))
            B = tuple(sorted(set(range(1, m + 1)) - set(Ap)))
            for i in range(d + 1):
                if not (i >= 1 or len(Ap) >= 2):
                    continue
                if not (d - i >= 1 or len(B) >= 2):
                    continue
                out.append(DivisorType(A, i, B, d))
    out.sort(key=DivisorType.sort_key)
    return out


def contraction_stage(D: DivisorType, m: int) -> int | None:
    """Smallest k at which the A side of D is unstable, decided by the eps rule."""
    for k in range(0, D.d + m + 1):
        w, pw = tower_weights(D.d, m, k)
        if is_unstable_component(D.i, [pw[j] for j in D.A], w):
            return k
    return None


def schedule_m(d: int, m: int) -> BlowupSchedule:
    """Stages of the (m+1)-pointed tower: stage k contracts D(A,i|B,d-i) with |A - {m+1}| + i = k."""
    if m < 1 or d < 1 or d + m < 3:
        raise ValueError(f"(d, m) = ({d}, {m}) is outside the stability range (m >= 1, d >= 1, d+m >= 3)")
    by_stage: dict[int, list[DivisorType]] = {}
    for D in divisor_types(d, m):
        by_stage.setdefault(contraction_stage(D, m), []).append(D)
    stages = []
    for k in range(1, d + m - 1):
        w, _ = tower_weights(d, m, k)
        assert w.is_valid((d,)), (d, m, k)
        stages.append(Stage(k, BLOW_DOWN, tuple(str(D) for D in by_stage.get(k, []))))
    stages.append(Stage(d + m - 1, PROJECTIVE_BUNDLE, ()))
    return BlowupSchedule(d, m, tuple(stages))


def exceptional_labels(d: int, m: int) -> list[BoundaryLabel]:
    """Labels ``h`` (with m+1 in M_h) of every exceptional divisor of the tower, sorted."""
    out = []
    for D in divisor_types(d, m):
        out.extend(D.labels())
    out.sort(key=BoundaryLabel.sort_key)
    return out


def schedule_from_json(data: dict) -> BlowupSchedule:
    return BlowupSchedule(int(data["d"]), int(data["m"]),
                          tuple(Stage(int(s["k"]), s["kind"], tuple(s["contracted"])) for s in data["stages"]))


def stability_grid(dmax: int = 4, mmax: int = 3, eps=Fraction(1, 10**6)):
    """Yield ((d, m, k, i, points), symbolic, numeric) over every component type of every tower stage.

    For m = 0 the components carry no points; for m >= 1 the stage weights are
    those of :func:`tower_weights` and every subset of the m+1 points is tried.
    """
    for m in range(mmax + 1):
        for d in range(1, dmax + 1):
            if m and d + m < 3:
                continue
            for k in range(0, d + m + 1):
                if m == 0:
                    w, pw = WeightSystem((), (k,)), {}
                else:
                    w, pw = tower_weights(d, m, k)
                for i in range(d + 1):
                    for pts in _subsets(sorted(pw)):
                        pts = tuple(sorted(pts))
                        ws = [pw[j] for j in pts]
                        yield ((d, m, k, i, pts), is_unstable_component(i, ws, w),
                               is_unstable_numeric(i, ws, w, eps))
