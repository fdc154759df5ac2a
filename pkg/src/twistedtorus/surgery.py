"""
Surgery multiplicities of primitive/middle-Seifert-fibered twisted torus knots

For K(p, q, r, 1, eps) that is middle Seifert-fibered inside and primitive outside, surgery
at the surface slope gives a small Seifert-fibered space. Two multiplicities come from the
middle coefficient; the third is |det([K], [f])| for the ordinary fiber f.

Also: the five families of such knots, their tabulated multiplicities, non-torus
certificates and the inverse problem of realizing a given triple.
"""

import logging
import math
from itertools import permutations
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .classify import normalize, psf_report
from .exceptions import (
    InconsistentPipelineError,
    InvalidParametersError,
    NotMiddleSeifertFiberedError,
    NotPrimitiveMiddleSfError,
    TripleNotRealizableError,
)
from .ttk import TtkParams, surface_slope

logger = logging.getLogger(__name__)

Variant = Literal["positive", "negative"]
Branch = Literal["p_minus_alpha_q_hat", "alpha_q_hat"]

TSV_COLUMNS = ("family", "family_params", "p", "q", "r", "m", "n", "slope", "mu", "certificates")


class HomologyClass(BaseModel):
    """A class (c1, c2) in the first homology of a genus-two handlebody"""

    model_config = ConfigDict(frozen=True)

    c1: int
    c2: int


class QDecomposition(BaseModel):
    """q = q_tilde + gamma*p with |q_tilde| < p/2, r = r_bar + beta_tw*p, and the middle branch"""

    model_config = ConfigDict(frozen=True)

    q_tilde: int
    gamma: int
    q_hat: int
    r_bar: int
    beta_tw: int
    alpha: int = Field(ge=1)
    branch: Branch

    @property
    def alpha_is_one(self) -> bool:
        """alpha = 1 makes the inside word primitive; such knots are not middle-P/SF"""
        return self.alpha == 1


class MultiplicityResult(BaseModel):
    """Multiplicities of the critical fibers, or a connected sum of lens spaces when mu3 = 0"""

    model_config = ConfigDict(frozen=True)

    kind: Literal["triple", "connected_sum"]
    mu1: int = Field(ge=0)
    mu2: int = Field(ge=0)
    mu3: int = Field(ge=0)
    slope: int

    @model_validator(mode="after")
    def _kind_matches_mu3(self) -> "MultiplicityResult":
        if (self.kind == "connected_sum") != (self.mu3 == 0):
            raise ValueError("kind must be connected_sum exactly when mu3 = 0")
        return self

    @classmethod
    def build(cls, mu1: int, mu2: int, mu3: int, slope: int) -> "MultiplicityResult":
        mu1, mu2, mu3 = abs(mu1), abs(mu2), abs(mu3)
        kind: Literal["triple", "connected_sum"] = "connected_sum" if mu3 == 0 else "triple"
        return cls(kind=kind, mu1=mu1, mu2=mu2, mu3=mu3, slope=slope)

    @property
    def mu(self) -> tuple[int, int, int]:
        return (self.mu1, self.mu2, self.mu3)

    def as_multiset(self) -> tuple[int, int, int]:
        a, b, c = sorted(self.mu)
        return (a, b, c)

    def label(self) -> list[int] | str:
        return "connected_sum" if self.kind == "connected_sum" else list(self.mu)


class NonTorusCertificate(BaseModel):
    """
    Evidence that the knot is not a torus knot.

    ``delta`` = |slope| - mu1 - mu2 - mu3 + chi(F) and needs a positive braid (eps = +1).
    Both criteria need a genuine three-fiber triple, so they are left empty when some
    multiplicity is below 2.
    """

    model_config = ConfigDict(frozen=True)

    delta: int | None
    chi: int | None
    moser_excluded: bool
    certified: bool

    @model_validator(mode="after")
    def _certified_rule(self) -> "NonTorusCertificate":
        expected = (self.delta is not None and self.delta > 0) or self.moser_excluded
        if self.certified != expected:
            raise ValueError("certified must equal (delta > 0) or moser_excluded")
        return self


class KnotRecord(BaseModel):
    """One primitive/middle-Seifert-fibered knot from the family classification"""

    model_config = ConfigDict(frozen=True)

    family: int = Field(ge=1, le=5)
    family_params: dict[str, int]
    params: TtkParams
    slope: int
    triple: MultiplicityResult
    in_family_range: bool = True
    certificate: NonTorusCertificate | None = None

    @property
    def key(self) -> tuple[int, int, int, int, int]:
        return (self.family, self.params.p, self.params.q, self.params.r, self.params.n)

    def to_row(self) -> dict[str, object]:
        """JSON row: family, family_params, p, q, r, m, n, slope, mu, certificates"""
        p, q, r, m, n = self.params.as_tuple()
        return {
            "family": self.family,
            "family_params": dict(self.family_params),
            "p": p,
            "q": q,
            "r": r,
            "m": m,
            "n": n,
            "slope": self.slope,
            "mu": self.triple.label(),
            "certificates": self.certificate.model_dump() if self.certificate else None,
        }

    def to_tsv(self) -> str:
        p, q, r, m, n = self.params.as_tuple()
        family_params = ",".join(f"{name}={value}" for name, value in self.family_params.items())
        label = self.triple.label()
        mu = label if isinstance(label, str) else ",".join(str(value) for value in label)
        certified = "" if self.certificate is None else str(self.certificate.certified).lower()
        fields = (self.family, family_params or "-", p, q, r, m, n, self.slope, mu, certified)
        return "\t".join(str(value) for value in fields)


# Homology and the determinant


def _require_unit_twist(params: TtkParams) -> int:
    if params.m != 1 or abs(params.n) != 1:
        raise InvalidParametersError(f"Needs m = 1 and n = +-1, got {params}")
    return params.n


def knot_homology(params: TtkParams) -> HomologyClass:
    """[K] = (eps*r, q) in the outside handlebody"""
    eps = _require_unit_twist(params)
    return HomologyClass(c1=eps * params.r, c2=params.q)


def q_decompositions(p: int, q: int, r: int) -> list[QDecomposition]:
    """
    Every middle decomposition of (p, q, r), the r_bar = p - alpha*q_hat branch first.

    Both branches exist only when q_hat = 1.

    Raises:
        NotMiddleSeifertFiberedError: if r is a multiple of p or no branch admits alpha >= 1
    """
    q_hat, _, r_bar = normalize(p, q, r)
    q_tilde = q % p
    if 2 * q_tilde > p:
        q_tilde -= p
    gamma = (q - q_tilde) // p
    beta_tw = r // p
    if r_bar == 0:
        raise NotMiddleSeifertFiberedError(f"r = {r} is a multiple of p = {p}")
    candidates: list[tuple[Branch, int]] = [
        ("p_minus_alpha_q_hat", p - r_bar),
        ("alpha_q_hat", r_bar),
    ]
    decompositions = [
        QDecomposition(
            q_tilde=q_tilde,
            gamma=gamma,
            q_hat=q_hat,
            r_bar=r_bar,
            beta_tw=beta_tw,
            alpha=multiple // q_hat,
            branch=branch,
        )
        for branch, multiple in candidates
        if multiple % q_hat == 0
    ]
    if not decompositions:
        raise NotMiddleSeifertFiberedError(
            f"({p}, {q}, {r}) has no decomposition r_bar = alpha*q_hat or p - alpha*q_hat"
        )
    return decompositions


def q_decompose(p: int, q: int, r: int) -> QDecomposition:
    return q_decompositions(p, q, r)[0]


def _fiber_cell(d: QDecomposition, eps: int) -> HomologyClass:
    a, b, g = d.alpha, d.beta_tw, d.gamma
    if d.branch == "p_minus_alpha_q_hat":
        if d.q_tilde > 0:
            return HomologyClass(c1=eps * a * b - 1, c2=a * g + b + 1)
        return HomologyClass(c1=eps * a * b + 1, c2=a * g - b - 1)
    if d.q_tilde > 0:
        return HomologyClass(c1=eps * a * (b + 1) + 1, c2=a * g - b)
    return HomologyClass(c1=eps * a * (b + 1) - 1, c2=a * g + b)


def fiber_homology(
    p: int, q: int, r: int, eps: int, decomposition: QDecomposition | None = None
) -> HomologyClass:
    """Class [f] of the ordinary fiber, keyed by the sign of q_tilde and the branch"""
    if eps not in (1, -1):
        raise InvalidParametersError(f"eps must be +1 or -1, got {eps}")
    return _fiber_cell(decomposition or q_decompose(p, q, r), eps)


def determinant(k: HomologyClass, f: HomologyClass) -> int:
    return abs(k.c1 * f.c2 - k.c2 * f.c1)


def mu3(params: TtkParams) -> int:
    """
    Third multiplicity |k1*f2 - k2*f1|; 0 means a connected sum of lens spaces.

    Raises:
        InconsistentPipelineError: if the two branches available when q_hat = 1 disagree
    """
    eps = _require_unit_twist(params)
    k = knot_homology(params)
    values = {
        determinant(k, fiber_homology(params.p, params.q, params.r, eps, d))
        for d in q_decompositions(params.p, params.q, params.r)
    }
    if len(values) != 1:
        raise InconsistentPipelineError(
            f"Branches of {params} give different mu3: {sorted(values)}"
        )
    return values.pop()


def multiplicity_triple(params: TtkParams) -> MultiplicityResult:
    """
    (alpha, p - alpha*q_hat, mu3) for a knot that is middle-SF inside and primitive outside.

    Raises:
        NotPrimitiveMiddleSfError: when the knot is not primitive/middle-Seifert-fibered
    """
    _require_unit_twist(params)
    report = psf_report(params)
    if not (report.outside.is_primitive and report.inside.is_sf and report.inside.middle()):
        raise NotPrimitiveMiddleSfError(f"{params} is not middle-SF inside and primitive outside")
    decomposition = q_decompose(params.p, params.q, params.r)
    mu1 = decomposition.alpha
    mu2 = params.p - mu1 * decomposition.q_hat
    if not any(match.beta_mid == mu1 for match in report.inside.middle()):
        raise InconsistentPipelineError(f"No middle match with coefficient {mu1} for {params}")
    return MultiplicityResult.build(mu1, mu2, mu3(params), surface_slope(params))


# Families of primitive/middle-SF knots


def _family_candidates(max_p: int, max_q: int) -> list[tuple[int, dict[str, int], int, int, int]]:
    candidates: list[tuple[int, dict[str, int], int, int, int]] = []
    for p in range(2, max_p + 1):
        for q in range(p // 2 + 1, p):
            if 2 * q > p + 1 and math.gcd(p, q) == 1 and q <= max_q:
                candidates.append((1, {}, p, q, 2 * q - p))
        for q in range(2, (p + 1) // 2):
            if 2 * q >= p or math.gcd(p, q) != 1 or q > max_q:
                continue
            for k in range(2, (p - 2) // q + 1):
                candidates.append((2, {"k": k}, p, q, p - k * q))

    for delta in (1, -1):
        for s in range(2, max_p + 1):
            for l in range(max(2 - delta, 1), max_p + 1):
                p, q = l * s + l + delta, l * s + delta
                if p > max_p:
                    break
                if q <= max_q:
                    candidates.append((3, {"l": l, "s": s, "delta": delta}, p, q, l * s))

    for s in range(2, max_p + 1):
        for l in range(1, max_p + 1):
            p = l * s + l + 1
            if p > max_p:
                break
            t = 2
            while t * p - l <= max_q:
                q = t * p - l
                candidates.append((4, {"l": l, "s": s, "t": t}, p, q, q - 1))
                t += 1

    for s in range(3, max_p + 2):
        for l in range(3, max_p + 2):
            p = l * s - 1
            if p > max_p:
                break
            t = 1
            while s + t * p <= max_q:
                q = s + t * p
                candidates.append((5, {"l": l, "s": s, "t": t}, p, q, q - 1))
                t += 1
    return candidates


def enumerate_middle_psf(
    max_p: int,
    max_q: int | None = None,
    families: set[int] | None = None,
    with_certificates: bool = True,
) -> list[KnotRecord]:
    """
    Every family instance with p <= max_p and q <= max_q (default 3*max_p), for eps = +-1.

    Records are deduplicated on (p, q, r, eps), keeping the lowest family number, and sorted
    by (family, p, q, r, eps).
    """
    if max_p < 1:
        raise InvalidParametersError(f"max_p must be positive, got {max_p}")
    bound = 3 * max_p if max_q is None else max_q
    seen: set[tuple[int, int, int, int]] = set()
    records: list[KnotRecord] = []
    candidates = sorted(_family_candidates(max_p, bound), key=lambda c: (c[0], c[2], c[3], c[4]))
    for family, family_params, p, q, r in candidates:
        if families is not None and family not in families:
            continue
        for eps in (-1, 1):
            if (p, q, r, eps) in seen:
                continue
            seen.add((p, q, r, eps))
            params = TtkParams(p=p, q=q, r=r, m=1, n=eps)
            triple = multiplicity_triple(params)
            certificate = (
                nontorus_certificate(params, triple.slope, triple) if with_certificates else None
            )
            records.append(
                KnotRecord(
                    family=family,
                    family_params=family_params,
                    params=params,
                    slope=triple.slope,
                    triple=triple,
                    certificate=certificate,
                )
            )
    records.sort(key=lambda record: record.key)
    logger.info(
        "Enumerated %d primitive/middle-SF records with p <= %d, q <= %d",
        len(records),
        max_p,
        bound,
    )
    return records


def corrected_family4_mu3(l: int, s: int, t: int, eps: int) -> int:
    """
    Third multiplicity for family 4, p = ls+l+1, q = tp-l, r = q-1, from the determinant.

    Here [f] = (eps*s*t - 1, st + t - 1), so mu3 = |q + eps*(q(t-1) - (st + t - 1))|.
    """
    p = l * s + l + 1
    q = t * p - l
    return abs(q + eps * (q * (t - 1) - (s * t + t - 1)))


def family_multiplicities(record: KnotRecord, corrected: bool = False) -> MultiplicityResult:
    """
    Tabulated multiplicities for the record's family, entries as absolute values.

    With ``corrected``, family 4 uses ``corrected_family4_mu3`` instead of the printed row.
    """
    p, q, _, _, eps = record.params.as_tuple()
    fp = record.family_params
    if record.family == 1:
        mu = (2, 2 * q - p, p + (eps - 2) * q)
    elif record.family == 2:
        k = fp["k"]
        mu = (k, p - k * q, p - (k - eps) * q)
    elif record.family == 3:
        l, s, delta = fp["l"], fp["s"], fp["delta"]
        mu = (s, l + delta, s * (l - eps * delta) + delta)
    elif record.family == 4:
        l, s, t = fp["l"], fp["s"], fp["t"]
        if corrected:
            third = corrected_family4_mu3(l, s, t, eps)
        else:
            third = (-l + t * (l * s + l + 1)) * (1 + eps * t - eps) + eps * s * (t * l - l - t)
        mu = (s, l + 1, third)
    else:
        l, s, t = fp["l"], fp["s"], fp["t"]
        mu = (s - 1, l - 1, (s + t * (l * s - 1)) * (eps * t + 1 + eps) - eps * (l * t + 1))
    return MultiplicityResult.build(*mu, slope=record.slope)


# Non-torus certificates


def braid_euler_char(p: int, q: int, r: int, eps: int = 1) -> int:
    """
    Euler characteristic of the fiber surface, -chi = crossings - strands of a positive braid.

    Raises:
        InvalidParametersError: for eps = -1 (not a positive braid) or r > max(p, q)
    """
    if eps != 1:
        raise InvalidParametersError("The braid of a negatively twisted knot is not positive")
    if r > max(p, q):
        raise InvalidParametersError(f"r = {r} exceeds the strand count max(p, q) = {max(p, q)}")
    return -(p * q - p - q + r * (r - 1))


def moser_multiplicities(a: int, b: int, slope: int) -> tuple[int, int, int]:
    """Multiplicities (a, b, |ab - slope|) of integral surgery on the (a, b) torus knot"""
    if a < 2 or b < 2 or math.gcd(a, b) != 1:
        raise InvalidParametersError(
            f"Torus knot parameters must be coprime and >= 2, got ({a}, {b})"
        )
    return (a, b, abs(a * b - slope))


def _moser_excluded(mu: tuple[int, int, int], slope: int) -> bool:
    for i in range(3):
        a, b, c = mu[i], mu[(i + 1) % 3], mu[(i + 2) % 3]
        if math.gcd(a, b) != 1:
            continue
        signed = {abs(sm * slope + sab * a * b) for sm in (1, -1) for sab in (1, -1)}
        if c in signed:
            return False
    return True


def nontorus_certificate(
    params: TtkParams, slope: int, triple: MultiplicityResult
) -> NonTorusCertificate:
    """Fiber-surface criterion (positive twisting only) and the Moser slope criterion"""
    chi = None
    if params.n == 1 and params.m == 1 and params.r <= max(params.p, params.q):
        chi = braid_euler_char(params.p, params.q, params.r)
    if min(triple.mu) < 2:
        return NonTorusCertificate(delta=None, chi=chi, moser_excluded=False, certified=False)
    delta = None if chi is None else abs(slope) - sum(triple.mu) + chi
    excluded = _moser_excluded(triple.mu, slope)
    certified = (delta is not None and delta > 0) or excluded
    return NonTorusCertificate(delta=delta, chi=chi, moser_excluded=excluded, certified=certified)


# Realization


def _family2_in_range(p: int, q: int, k: int) -> bool:
    return 1 < q and 2 * q < p and 2 <= k <= (p - 2) // q


def realize_triple(mu1: int, mu2: int, mu3: int, variant: Variant = "negative") -> KnotRecord:
    """
    A family-2 knot K(p, q, p - kq, 1, eps) whose surface-slope surgery has these multiplicities.

    negative: q = mu1 + mu2, p = mu3*q + mu2, k = mu3, eps = -1.
    positive: after ordering mu1 > mu2, q = mu1 - mu2 (which must exceed 1), p = mu3*q + mu2,
    k = mu3, eps = +1.

    The determinant pipeline recomputes the triple when the knot is inside the family's range
    (mu2, mu3 >= 2); otherwise the tabulated family-2 row is used.

    Raises:
        TripleNotRealizableError: when a precondition fails
    """
    if min(mu1, mu2, mu3) < 1:
        raise TripleNotRealizableError(
            f"Multiplicities must be positive, got ({mu1}, {mu2}, {mu3})"
        )
    if math.gcd(mu1, mu2) != 1:
        raise TripleNotRealizableError(f"gcd({mu1}, {mu2}) must be 1")
    if variant == "negative":
        q, eps = mu1 + mu2, -1
    elif variant == "positive":
        if mu1 < mu2:
            mu1, mu2 = mu2, mu1
        if mu1 - mu2 <= 1:
            raise TripleNotRealizableError(
                f"Positive twisting needs |mu1 - mu2| > 1, got ({mu1}, {mu2})"
            )
        q, eps = mu1 - mu2, 1
    else:
        raise InvalidParametersError(f"Unknown variant {variant!r}")
    k = mu3
    p = k * q + mu2
    params = TtkParams(p=p, q=q, r=mu2, m=1, n=eps)
    slope = surface_slope(params)
    in_range = _family2_in_range(p, q, k)
    tabulated = MultiplicityResult.build(k, p - k * q, p - (k - eps) * q, slope)
    triple = multiplicity_triple(params) if in_range else tabulated
    if triple.as_multiset() != tabulated.as_multiset():
        raise InconsistentPipelineError(
            f"Realization of {params} gives {triple.mu}, expected {tabulated.mu}"
        )
    if sorted(triple.mu) != sorted((mu1, mu2, mu3)):
        raise InconsistentPipelineError(f"Realization of {(mu1, mu2, mu3)} produced {triple.mu}")
    return KnotRecord(
        family=2,
        family_params={"k": k},
        params=params,
        slope=slope,
        triple=triple,
        in_family_range=in_range,
        certificate=nontorus_certificate(params, slope, triple),
    )


def realize_multiset(mu: tuple[int, int, int], variant: Variant = "negative") -> KnotRecord:
    """
    Realize an unordered triple, choosing an order whose leading pair is coprime.

    Orders that land inside the family's range are preferred, so (2, 2, n) is realized as
    (2, n, 2).
    """
    orders = list(dict.fromkeys(permutations(mu)))
    orders.sort(key=lambda order: not (order[1] >= 2 and order[2] >= 2))
    for a, b, c in orders:
        if math.gcd(a, b) != 1:
            continue
        if variant == "positive" and abs(a - b) <= 1:
            continue
        return realize_triple(a, b, c, variant)
    raise TripleNotRealizableError(f"No ordering of {mu} satisfies the {variant} preconditions")


def spherical_triples(max_n: int = 15) -> list[tuple[int, int, int]]:
    """(2,3,3), (2,3,4), (2,3,5) and (2,2,n) for odd 3 <= n <= max_n"""
    return [(2, 3, 3), (2, 3, 4), (2, 3, 5)] + [(2, 2, n) for n in range(3, max_n + 1, 2)]
