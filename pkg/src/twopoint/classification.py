"""Support sets J_K in generator form and the PD / DC-SPD / SPD criteria.

J_K = {(k, l) : a_{k,l} > 0} is represented as a finite union of
generators (:class:`FiniteSet`, :class:`Ray`, :class:`Grid`). Every
"infinitely many" condition in the criteria reduces to arithmetic on single
generators: a sequence in a finite union has a subsequence inside one
generator, so the per-generator checks are exact.

Theorem tags returned in results:

``gangolliext``  PD iff nonnegative coefficients with summable corner series
``dcsuf``        DC-SPD on S^d x (non-sphere), d >= 2
``dcsufnec``     DC-SPD on (non-sphere) x (non-sphere)
``sphere-pair``  DC-SPD on S^d x S^d', d, d' >= 2
``spdnec``       SPD on (non-sphere) x (non-sphere)
``spdnec1``      SPD on S^d x (non-sphere), d >= 2
``unsupported``  any S^1 factor; SPD on sphere x sphere
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

from .errors import SchemaError
from .spaces import Space

YES, NO, UNSUPPORTED = "yes", "no", "unsupported"


def _pair(value, name) -> tuple[int, int]:
    try:
        k, l = value
        if int(k) != k or int(l) != l:
            raise ValueError
        k, l = int(k), int(l)
    except (TypeError, ValueError):
        raise SchemaError(f"{name} must be a pair of integers, got {value!r}") from None
    if k < 0 or l < 0:
        raise SchemaError(f"{name} must be nonnegative, got {value!r}")
    return k, l


# --------------------------------------------------------------------------
# generators


@dataclass(frozen=True)
class FiniteSet:
    members: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted({_pair(m, "member") for m in self.members})))

    def contains(self, k, l) -> bool:
        return (k, l) in self.members

    def members_in_box(self, kmax, lmax) -> Iterator[tuple[int, int]]:
        return (m for m in self.members if m[0] <= kmax and m[1] <= lmax)

    def swapped(self) -> FiniteSet:
        return FiniteSet(tuple((l, k) for k, l in self.members))

    infinite = False
    second_infinite = False
    diagonal = False

    def fixed_second_parities(self):
        return set()

    def sum_parities(self):
        return set()

    def diagonal_first_parities(self):
        return set()

    def first_parities(self):
        return {k % 2 for k, _ in self.members}

    def split_first_parity(self):
        even = FiniteSet(tuple(m for m in self.members if m[0] % 2 == 0))
        odd = FiniteSet(tuple(m for m in self.members if m[0] % 2 == 1))
        return [even] if even.members else [], [odd] if odd.members else []

    def to_json(self):
        return {"kind": "finite", "members": [list(m) for m in self.members]}

    def __str__(self):
        return "FiniteSet{" + ", ".join(f"({k},{l})" for k, l in self.members) + "}"


@dataclass(frozen=True)
class Ray:
    """{(k0 + r dk, l0 + r dl) : r >= 0}."""

    start: tuple[int, int]
    step: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "start", _pair(self.start, "start"))
        object.__setattr__(self, "step", _pair(self.step, "step"))
        if self.step == (0, 0):
            raise SchemaError("ray step must not be (0, 0)")

    def contains(self, k, l) -> bool:
        (k0, l0), (dk, dl) = self.start, self.step
        if k < k0 or l < l0:
            return False
        if dk == 0:
            return k == k0 and (l - l0) % dl == 0
        r, rem = divmod(k - k0, dk)
        return rem == 0 and l == l0 + r * dl

    def members_in_box(self, kmax, lmax):
        (k0, l0), (dk, dl) = self.start, self.step
        k, l = k0, l0
        while k <= kmax and l <= lmax:
            yield k, l
            k, l = k + dk, l + dl

    def swapped(self) -> Ray:
        return Ray(self.start[::-1], self.step[::-1])

    infinite = True

    @property
    def second_infinite(self):
        return self.step[1] > 0

    @property
    def diagonal(self):
        return self.step[0] > 0 and self.step[1] > 0

    def fixed_second_parities(self):
        (k0, l0), (dk, dl) = self.start, self.step
        if dl > 0:
            return set()
        return {0, 1} if dk % 2 else {(k0 + l0) % 2}

    def sum_parities(self):
        (k0, l0), (dk, dl) = self.start, self.step
        return {0, 1} if (dk + dl) % 2 else {(k0 + l0) % 2}

    def diagonal_first_parities(self):
        if not self.diagonal:
            return set()
        return {0, 1} if self.step[0] % 2 else {self.start[0] % 2}

    def first_parities(self):
        return {0, 1} if self.step[0] % 2 else {self.start[0] % 2}

    def split_first_parity(self):
        (k0, l0), (dk, dl) = self.start, self.step
        if dk % 2 == 0:
            return ([self], []) if k0 % 2 == 0 else ([], [self])
        a = Ray((k0, l0), (2 * dk, 2 * dl))
        b = Ray((k0 + dk, l0 + dl), (2 * dk, 2 * dl))
        return ([a], [b]) if k0 % 2 == 0 else ([b], [a])

    def to_json(self):
        return {"kind": "ray", "start": list(self.start), "step": list(self.step)}

    def __str__(self):
        return f"Ray(start={self.start}, step={self.step})"


@dataclass(frozen=True)
class Grid:
    """{(k0 + u a, l0 + v b) : u, v >= 0} with a, b >= 1."""

    start: tuple[int, int]
    steps: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "start", _pair(self.start, "start"))
        object.__setattr__(self, "steps", _pair(self.steps, "steps"))
        if min(self.steps) < 1:
            raise SchemaError("grid steps must both be >= 1")

    def contains(self, k, l) -> bool:
        (k0, l0), (a, b) = self.start, self.steps
        return k >= k0 and l >= l0 and (k - k0) % a == 0 and (l - l0) % b == 0

    def members_in_box(self, kmax, lmax):
        (k0, l0), (a, b) = self.start, self.steps
        for k in range(k0, kmax + 1, a):
            for l in range(l0, lmax + 1, b):
                yield k, l

    def swapped(self) -> Grid:
        return Grid(self.start[::-1], self.steps[::-1])

    infinite = True
    second_infinite = True
    diagonal = True

    def fixed_second_parities(self):
        (k0, l0), (a, b) = self.start, self.steps
        return {0, 1} if a % 2 or b % 2 else {(k0 + l0) % 2}

    def sum_parities(self):
        return self.fixed_second_parities()

    def diagonal_first_parities(self):
        return self.first_parities()

    def first_parities(self):
        return {0, 1} if self.steps[0] % 2 else {self.start[0] % 2}

    def split_first_parity(self):
        (k0, l0), (a, b) = self.start, self.steps
        if a % 2 == 0:
            return ([self], []) if k0 % 2 == 0 else ([], [self])
        g0 = Grid((k0, l0), (2 * a, b))
        g1 = Grid((k0 + a, l0), (2 * a, b))
        return ([g0], [g1]) if k0 % 2 == 0 else ([g1], [g0])

    def to_json(self):
        return {"kind": "grid", "start": list(self.start), "steps": list(self.steps)}

    def __str__(self):
        return f"Grid(start={self.start}, steps={self.steps})"


Generator = Union[FiniteSet, Ray, Grid]


def generator_from_json(data) -> Generator:
    if not isinstance(data, dict) or "kind" not in data:
        raise SchemaError(f"generator must be an object with 'kind', got {data!r}")
    kind = data["kind"]
    try:
        if kind == "finite":
            return FiniteSet(tuple(tuple(m) for m in data["members"]))
        if kind == "ray":
            return Ray(tuple(data["start"]), tuple(data["step"]))
        if kind == "grid":
            return Grid(tuple(data["start"]), tuple(data["steps"]))
    except (KeyError, TypeError):
        raise SchemaError(f"malformed {kind} generator: {data!r}") from None
    raise SchemaError(f"unknown generator kind {kind!r}")


@dataclass(frozen=True)
class IndexSet:
    """J_K as a finite union of generators."""

    generators: tuple[Generator, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))

    def __contains__(self, kl) -> bool:
        return any(g.contains(*kl) for g in self.generators)

    def __iter__(self):
        return iter(self.generators)

    def members_in_box(self, kmax, lmax) -> set[tuple[int, int]]:
        out = set()
        for g in self.generators:
            out.update(g.members_in_box(kmax, lmax))
        return out

    @property
    def is_finite(self) -> bool:
        return not any(g.infinite for g in self.generators)

    @property
    def is_empty(self) -> bool:
        return all(isinstance(g, FiniteSet) and not g.members for g in self.generators)

    def swapped(self) -> IndexSet:
        return IndexSet(tuple(g.swapped() for g in self.generators))

    def first_parities(self) -> set[int]:
        out = set()
        for g in self.generators:
            out |= g.first_parities()
        return out

    def to_json(self):
        return [g.to_json() for g in self.generators]


def jk_membership(families, finite, k, l) -> bool:
    """True iff (k, l) lies in a generator of ``families`` or is a key of ``finite``."""
    if (k, l) in (finite or {}):
        return True
    return any(g.contains(k, l) for g in families)


def split_parity(jk) -> tuple[IndexSet, IndexSet]:
    """Split J_K into its even-k and odd-k parts, still in generator form."""
    even, odd = [], []
    for g in IndexSet(tuple(jk)):
        e, o = g.split_first_parity()
        even += e
        odd += o
    return IndexSet(tuple(even)), IndexSet(tuple(odd))


# --------------------------------------------------------------------------
# results


@dataclass
class ClassificationResult:
    pd: str | None = None
    dc_spd: str | None = None
    spd: str | None = None
    theorem: str = UNSUPPORTED
    witness: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"pd": self.pd, "dc_spd": self.dc_spd, "spd": self.spd,
               "theorem": self.theorem, "witness": self.witness}
        if self.notes:
            out["notes"] = list(self.notes)
        if self.details:
            out["details"] = self.details
        return out


def _yes(theorem, gens, why, **extra):
    return {"verdict": YES, "theorem": theorem,
            "witness": {"generators": [g.to_json() for g in gens], "reason": why, **extra}}


def _no(theorem, clause, why):
    return {"verdict": NO, "theorem": theorem, "witness": {"failed": clause, "reason": why}}


def _unsupported(why):
    return {"verdict": UNSUPPORTED, "theorem": UNSUPPORTED,
            "witness": {"failed": "unsupported-regime", "reason": why}}


def _is_circle(space: Space):
    return space.is_sphere and space.d == 1


def _rp2_note(space1, space2):
    from .spaces import SpaceFamily
    if any(s.family is SpaceFamily.REAL_PROJECTIVE and s.d == 2 for s in (space1, space2)):
        return ["P^2(R) is isometric to a sphere but is classified by family tag as a non-sphere"]
    return []


def regime(space1: Space, space2: Space) -> tuple[str, str]:
    """(DC-SPD theorem tag, SPD theorem tag) selected for a pair of spaces."""
    if _is_circle(space1) or _is_circle(space2):
        return UNSUPPORTED, UNSUPPORTED
    if space1.is_sphere and space2.is_sphere:
        return "sphere-pair", UNSUPPORTED
    if space1.is_sphere or space2.is_sphere:
        return "dcsuf", "spdnec1"
    return "dcsufnec", "spdnec"


def _first_with(gens, predicate):
    return next((g for g in gens if predicate(g)), None)


def _decide_dc(jk: IndexSet, space1, space2) -> dict:
    tag, _ = regime(space1, space2)
    gens = list(jk)
    if tag == UNSUPPORTED:
        return _unsupported("no criterion when a factor is the circle S^1")
    if tag == "dcsufnec":
        g = _first_with(gens, lambda g: g.infinite)
        if g:
            return _yes(tag, [g], "{k+l} is infinite")
        return _no(tag, "finite-sum-set", "{k+l : (k,l) in J_K} is finite")
    if tag == "sphere-pair":
        ge = _first_with(gens, lambda g: g.infinite and 0 in g.sum_parities())
        go = _first_with(gens, lambda g: g.infinite and 1 in g.sum_parities())
        if ge and go:
            return _yes(tag, [ge] if ge is go else [ge, go],
                        "{k+l} has infinitely many even and infinitely many odd values")
        missing = "even" if not ge else "odd"
        return _no(tag, f"missing-{missing}-sums", f"{{k+l}} has only finitely many {missing} values")
    # dcsuf: orient so the sphere is the first coordinate
    oriented = gens if space1.is_sphere else [g.swapped() for g in gens]
    pick = dict(zip(map(id, oriented), gens))
    g = _first_with(oriented, lambda g: g.second_infinite)
    if g:
        return _yes(tag, [pick[id(g)]], "the non-sphere degrees are unbounded")
    ge = _first_with(oriented, lambda g: 0 in g.fixed_second_parities())
    go = _first_with(oriented, lambda g: 1 in g.fixed_second_parities())
    if ge and go:
        chosen = [pick[id(ge)]] if ge is go else [pick[id(ge)], pick[id(go)]]
        return _yes(tag, chosen, "fixed-degree sequences with even and odd k+l and sphere degree -> infinity")
    missing = "even" if not ge else "odd"
    return _no(tag, f"missing-{missing}-parity-sequence",
               f"non-sphere degrees bounded and no {missing}-sum sequence with fixed non-sphere degree")


def _decide_spd(jk: IndexSet, space1, space2) -> dict:
    _, tag = regime(space1, space2)
    gens = list(jk)
    if tag == UNSUPPORTED:
        if _is_circle(space1) or _is_circle(space2):
            return _unsupported("no criterion when a factor is the circle S^1")
        return _unsupported("the sphere x sphere criterion is outside this library")
    if tag == "spdnec":
        g = _first_with(gens, lambda g: g.diagonal)
        if g:
            return _yes(tag, [g], "a sequence with both degrees -> infinity")
        return _no(tag, "no-diagonal-sequence", "no sequence in J_K with both degrees -> infinity")
    oriented = gens if space1.is_sphere else [g.swapped() for g in gens]
    pick = dict(zip(map(id, oriented), gens))
    ge = _first_with(oriented, lambda g: 0 in g.diagonal_first_parities())
    go = _first_with(oriented, lambda g: 1 in g.diagonal_first_parities())
    if ge and go:
        chosen = [pick[id(ge)]] if ge is go else [pick[id(ge)], pick[id(go)]]
        return _yes(tag, chosen, "both-degrees-unbounded sequences with even and with odd sphere degree")
    missing = "even" if not ge else "odd"
    return _no(tag, f"missing-{missing}-diagonal",
               f"no sequence with both degrees -> infinity and {missing} sphere degree")


def _result(field_name, decision, space1, space2):
    res = ClassificationResult(theorem=decision["theorem"], witness=decision["witness"],
                               notes=_rp2_note(space1, space2))
    setattr(res, field_name, decision["verdict"])
    return res


def classify_dc_spd(jk, space1: Space, space2: Space) -> ClassificationResult:
    """DC-strict positive definiteness verdict for support ``jk`` on ``space1 x space2``."""
    return _result("dc_spd", _decide_dc(IndexSet(tuple(jk)), space1, space2), space1, space2)


def classify_spd(jk, space1: Space, space2: Space) -> ClassificationResult:
    """Strict positive definiteness verdict for support ``jk`` on ``space1 x space2``."""
    return _result("spd", _decide_spd(IndexSet(tuple(jk)), space1, space2), space1, space2)


def classify_pd(spec) -> ClassificationResult:
    """PD verdict with the summability bound sum a_{k,l} P_k(1) P_l(1).

    Coefficients are nonnegative by construction of a KernelSpec, so the verdict
    is yes whenever the bound is finite.
    """
    bound = spec.summability_bound()
    if bound == float("inf"):
        return ClassificationResult(pd=NO, theorem="gangolliext",
                                    witness={"failed": "divergent-corner-series", "bound": bound})
    return ClassificationResult(pd=YES, theorem="gangolliext", witness={"bound": bound})


def classify(spec) -> ClassificationResult:
    """All three verdicts for a kernel spec.

    ``theorem``/``witness`` describe the SPD decision when it is supported,
    otherwise the DC-SPD one; ``details`` holds every decision.
    """
    jk = spec.support()
    s1, s2 = spec.space1, spec.space2
    pd = classify_pd(spec)
    dc = _decide_dc(jk, s1, s2)
    spd = _decide_spd(jk, s1, s2)
    lead = spd if spd["verdict"] != UNSUPPORTED else dc
    return ClassificationResult(
        pd=pd.pd, dc_spd=dc["verdict"], spd=spd["verdict"],
        theorem=lead["theorem"], witness=lead["witness"],
        notes=_rp2_note(s1, s2),
        details={"pd": {"verdict": pd.pd, "theorem": pd.theorem, "witness": pd.witness},
                 "dc_spd": dc, "spd": spd},
    )
