"""
Primitive and Seifert-fibered classification of twisted torus words

Closed-form rules on the normalized parameters (p, q_hat, r_bar). Every rule is checked
against the Whitehead oracle by ``twistedtorus.verify``.
"""

import logging
import math
from typing import Annotated, Literal, NamedTuple, Union

from pydantic import BaseModel, ConfigDict, Field
from sympy import mod_inverse

from .exceptions import InconsistentPipelineError, InvalidParametersError
from .freegroup import (
    GEN_X,
    GEN_Y,
    CyclicWord,
    Word,
    abelianize,
    cyclically_reduce,
    is_primitive_oracle,
    is_sf_oracle,
    reduce,
)
from .ttk import TtkParams, surface_slope, transformed_word, ttk_word, ttk_word_outside

logger = logging.getLogger(__name__)


class Primitive(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["primitive"] = "primitive"


class HyperSF(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["hyper"] = "hyper"
    fibers: tuple[int, int]


class MiddleSF(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["middle"] = "middle"
    beta_mid: int
    fibers: tuple[int, int]


class EndSF(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["end"] = "end"
    r_end: int
    fibers: tuple[int, int]


SfMatch = Annotated[Union[Primitive, HyperSF, MiddleSF, EndSF], Field(discriminator="kind")]


class SfClassification(BaseModel):
    """All closed-form matches for one word; no match means "not detected", never "not SF" """

    model_config = ConfigDict(frozen=True)

    matches: list[SfMatch]
    normalized_params: tuple[int, int, int]

    @property
    def is_primitive(self) -> bool:
        return any(isinstance(match, Primitive) for match in self.matches)

    @property
    def is_sf(self) -> bool:
        """Non-primitive with at least one Seifert-fibered match"""
        return not self.is_primitive and any(
            not isinstance(match, Primitive) for match in self.matches
        )

    def middle(self) -> list[MiddleSF]:
        return [match for match in self.matches if isinstance(match, MiddleSF)]


class Normalization(NamedTuple):
    q_hat: int
    q_hat_inv: int
    r_bar: int


def normalize(p: int, q: int, r: int) -> Normalization:
    """
    Smallest positive residues of +-q and +-q^-1 modulo p, and r mod p.

    Raises:
        InvalidParametersError: if p < 2 or gcd(p, q) != 1
    """
    if p < 2:
        raise InvalidParametersError(f"Normalization needs p >= 2, got {p}")
    if math.gcd(p, q) != 1:
        raise InvalidParametersError(f"p and q must be coprime, got ({p}, {q})")
    residue = q % p
    inverse = int(mod_inverse(q, p))
    return Normalization(min(residue, p - residue), min(inverse, p - inverse), r % p)


def is_primitive_closed(p: int, q: int, r: int, m: int) -> bool:
    """p = 1, or m = 1 and r = +-1 or +-q mod p"""
    TtkParams(p=p, q=q, r=r, m=m)
    if p == 1:
        return True
    if p < 1 or m != 1:
        return False
    return r % p in {1, p - 1, q % p, p - q % p}


def classify_word(p: int, q: int, r: int, m: int) -> SfClassification:
    """
    Report every primitive, hyper, middle and end Seifert-fibered rule that fires.

    Rules are applied to (p, q_hat, r_bar) and (p, q_hat, p - r_bar). Fiber entries are
    absolute values.
    """
    TtkParams(p=p, q=q, r=r, m=m)
    q_hat, q_hat_inv, r_bar = normalize(p, q, r)
    matches: list[SfMatch] = []
    if is_primitive_closed(p, q, r, m):
        matches.append(Primitive())

    if r_bar != 0:
        if m > 1 and r_bar in {1, p - 1, q_hat, p - q_hat}:
            matches.append(HyperSF(fibers=(p, m)))
        if m == 1:
            for beta in range(1, (p - 1) // q_hat + 1):
                if r_bar in {beta * q_hat, p - beta * q_hat}:
                    matches.append(MiddleSF(beta_mid=beta, fibers=(beta, p - beta * q_hat)))
            ceiling = -(-p // q_hat_inv)
            for r_end in sorted({r_bar, p - r_bar}):
                if 1 <= r_end <= ceiling:
                    fibers = (r_end, abs(p - r_end * q_hat_inv))
                    matches.append(EndSF(r_end=r_end, fibers=fibers))

    classification = SfClassification(matches=matches, normalized_params=(p, q_hat, r_bar))
    if not classification.is_primitive and any(
        1 in match.fibers for match in matches if not isinstance(match, Primitive)
    ):
        raise InconsistentPipelineError(
            f"A fiber of multiplicity 1 without primitivity at {p, q, r, m}"
        )
    return classification


class PsfFlags(BaseModel):
    model_config = ConfigDict(frozen=True)

    is_torus_degenerate: bool
    is_doubly_primitive: bool
    is_primitive_sf: bool
    is_doubly_sf: bool


class PsfReport(BaseModel):
    """Classification of both sides of the Heegaard surface"""

    model_config = ConfigDict(frozen=True)

    params: TtkParams
    inside: SfClassification
    outside: SfClassification
    surface_slope: int = Field(serialization_alias="slope")
    flags: PsfFlags


def _classify_side(p: int, q: int, r: int, m: int) -> SfClassification:
    if p == 1:
        return SfClassification(matches=[Primitive()], normalized_params=(1, 0, 0))
    return classify_word(p, q, r, m)


def psf_report(params: TtkParams) -> PsfReport:
    """
    Classify the inside word (p, q, r, m) and the outside word (q, p, r, |n|).

    The knot is torus-degenerate when r is 0, 1, p or q, when p or q is at most 1, or when
    m or n is 0.
    """
    p, q, r, m, n = params.as_tuple()
    if p < 1 or q < 1:
        raise InvalidParametersError(f"Both p and q must be positive for a report, got {params}")
    inside = _classify_side(p, q, r, m)
    outside = _classify_side(q, p, r, abs(n))
    degenerate = r in {0, 1, p, q} or p <= 1 or q <= 1 or m == 0 or n == 0
    flags = PsfFlags(
        is_torus_degenerate=degenerate,
        is_doubly_primitive=inside.is_primitive and outside.is_primitive,
        is_primitive_sf=(inside.is_primitive and outside.is_sf)
        or (outside.is_primitive and inside.is_sf),
        is_doubly_sf=inside.is_sf and outside.is_sf,
    )
    logger.debug("Classified %s: %s", params, flags)
    return PsfReport(
        params=params,
        inside=inside,
        outside=outside,
        surface_slope=surface_slope(params),
        flags=flags,
    )


def side_words(params: TtkParams) -> tuple[Word, Word]:
    """Inside and outside words of the knot"""
    return ttk_word(params.p, params.q, params.r, params.m), ttk_word_outside(params)


# Word-level forms


def _cyclic_runs(letters: tuple[int, ...]) -> list[tuple[int, int]]:
    """Maximal runs of a cyclic word as (letter, length), starting at a run boundary"""
    if not letters:
        return []
    if len(set(letters)) == 1:
        return [(letters[0], len(letters))]
    start = next(i for i in range(len(letters)) if letters[i] != letters[i - 1])
    rotated = letters[start:] + letters[:start]
    runs: list[tuple[int, int]] = []
    for letter in rotated:
        if runs and runs[-1][0] == letter:
            runs[-1] = (letter, runs[-1][1] + 1)
        else:
            runs.append((letter, 1))
    return runs


def has_regular_form(w: Word | CyclicWord) -> bool:
    """
    Whether a positive word has a regular form, up to rotation and swapping x and y.

    Regular forms are x^l y and x^l1 y x^l2 y ... x^lk y with every l_i in {e, e+1}.
    Every primitive positive word has one; the converse fails (xyxyx^2yx^2y), so this is
    only a filter.
    """
    core = cyclically_reduce(w)
    if not core.word.is_positive():
        raise InvalidParametersError(f"Regular forms are defined for positive words, got {core}")
    if len(core) <= 1:
        return True
    for single, other in ((2, 1), (1, 2)):
        runs = _cyclic_runs(core.letters)
        singles = [length for letter, length in runs if letter == single]
        others = [length for letter, length in runs if letter == other]
        if not singles or not others or any(length != 1 for length in singles):
            continue
        if len(singles) == 1 or max(others) - min(others) <= 1:
            return True
    return False


def _x_blocks(w: Word | CyclicWord) -> list[int]:
    """Exponents k_i of a cyclic word x y^k1 x y^k2 ... x y^kj"""
    core = cyclically_reduce(w)
    letters = core.letters
    if 1 not in letters or -1 in letters:
        raise InvalidParametersError(f"Expected a word x y^k1 ... x y^kj, got {core}")
    start = letters.index(1)
    rotated = letters[start:] + letters[:start]
    exponents: list[int] = []
    for letter in rotated:
        if letter == 1:
            exponents.append(0)
        else:
            exponents[-1] += 1 if letter > 0 else -1
    return exponents


def shift_y_exponents(w: Word | CyclicWord, l: int) -> Word:
    """
    x y^k1 ... x y^kj -> x y^(k1-l) ... x y^(kj-l).

    This is the automorphism x -> x y^-l, so it preserves the automorphic class.
    """
    raw: list[int] = []
    for exponent in _x_blocks(w):
        raw.append(1)
        raw.extend([2 if exponent > l else -2] * abs(exponent - l))
    return reduce(raw)


def middle_explicit_word(p: int, q_hat: int, beta: int) -> Word:
    """
    Transformed word at r = beta*q_hat, rebuilt from the word at r = q_hat.

    If the r = q_hat word is x y^k1 ... x y^kq then the result is
    x^beta y^(k1+1-beta) ... x^beta y^(kq+1-beta).
    """
    if beta < 1 or beta * q_hat >= p:
        raise InvalidParametersError(
            f"Need 1 <= beta < p/q_hat, got beta={beta}, p={p}, q_hat={q_hat}"
        )
    raw: list[int] = []
    for exponent in _x_blocks(transformed_word(p, q_hat, q_hat)):
        raw.extend([1] * beta)
        raw.extend([2 if exponent + 1 - beta > 0 else -2] * abs(exponent + 1 - beta))
    return reduce(raw)


def end_explicit_word(p: int, q_hat_inv: int, r: int) -> Word:
    """(x y^(q_hat_inv - 1))^(r-1) x y^(p - (r-1) q_hat_inv - 1), for 1 <= r <= ceil(p/q_hat_inv)"""
    if not 1 <= r <= -(-p // q_hat_inv):
        raise InvalidParametersError(
            f"r={r} is outside the end range for p={p}, q_hat_inv={q_hat_inv}"
        )
    block = GEN_X * GEN_Y ** (q_hat_inv - 1)
    return block ** (r - 1) * GEN_X * GEN_Y ** (p - (r - 1) * q_hat_inv - 1)


def search_sf_fibers(
    w: Word | CyclicWord, max_fiber: int, budget: int | None = None
) -> list[tuple[int, int]]:
    """
    Bounded search for (a, b) with <x, y | w> = <x, y | x^a y^b>, 2 <= a <= b <= max_fiber.

    Only pairs with gcd(a, b) equal to the content of the abelianization are tried. An empty
    result means "not detected".
    """
    content = abelianize(w).content
    found = []
    for a in range(2, max_fiber + 1):
        for b in range(a, max_fiber + 1):
            if math.gcd(a, b) == content and is_sf_oracle(w, a, b, budget):
                found.append((a, b))
    return found


def oracle_confirms(match: SfMatch, word: Word, budget: int | None = None) -> bool:
    """Check one closed-form match with the Whitehead oracle"""
    if isinstance(match, Primitive):
        return is_primitive_oracle(word, budget)
    a, b = match.fibers
    return is_sf_oracle(word, a, b, budget)
