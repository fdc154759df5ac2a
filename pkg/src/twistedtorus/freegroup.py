"""
Free group of rank two - words, substitutions and the Whitehead oracle

Words are stored as tuples of signed generator indices: x = 1, x^-1 = -1, y = 2, y^-1 = -2.
The Whitehead engine decides primitivity and automorphic equivalence of conjugacy classes
exactly; when the configured node budget runs out it raises ``SearchBudgetExceeded`` instead
of guessing.
"""

import logging
import math
import re
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, NamedTuple, Sequence

import networkx as nx
from sympy.combinatorics.free_groups import FreeGroupElement, free_group

from .config import resolve_budget
from .exceptions import InvalidParametersError, SearchBudgetExceeded, WordSyntaxError

logger = logging.getLogger(__name__)

X = 1
Y = 2
LETTERS = (1, -1, 2, -2)

_LETTER_TEXT = {1: "x", -1: "X", 2: "y", -2: "Y"}
_TEXT_LETTER = {text: letter for letter, text in _LETTER_TEXT.items()}

# Fixed letter order x < X < y < Y used for canonical rotations
_ROTATION_ORDER = {1: 0, -1: 1, 2: 2, -2: 3}

_TOKEN = re.compile(r"\s*([xyXY])(?:\^\s*(-?[0-9]+))?\s*", re.ASCII)


def _rank(letters: Sequence[int]) -> tuple[int, ...]:
    return tuple(_ROTATION_ORDER[letter] for letter in letters)


def _freely_reduce(raw: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for letter in raw:
        if letter not in _ROTATION_ORDER:
            raise InvalidParametersError(f"Not a generator of F(x, y): {letter!r}")
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


@dataclass(frozen=True)
class Word:
    """A freely reduced word in F(x, y); the empty word is the identity"""

    letters: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if _freely_reduce(self.letters) != self.letters:
            raise InvalidParametersError(f"Word is not freely reduced: {self.letters}")

    @classmethod
    def parse(cls, text: str) -> "Word":
        """
        Parse the external word format.

        Accepts letters x, y, X = x^-1, Y = y^-1, each optionally followed by ``^n``,
        separated by optional whitespace (``"x y x y^3"``, ``"xyX"``, ``"x^3 y^-2"``).
        ``""`` and ``"1"`` denote the identity.

        Raises:
            WordSyntaxError: on any other character
        """
        stripped = text.strip()
        if stripped in ("", "1"):
            return cls()
        raw: list[int] = []
        position = 0
        while position < len(stripped):
            match = _TOKEN.match(stripped, position)
            if match is None:
                raise WordSyntaxError(
                    f"Unexpected character {stripped[position]!r} at offset {position} in {text!r}"
                )
            letter = _TEXT_LETTER[match.group(1)]
            exponent = int(match.group(2)) if match.group(2) is not None else 1
            raw.extend([letter if exponent > 0 else -letter] * abs(exponent))
            position = match.end()
        return reduce(raw)

    @classmethod
    def from_sympy(cls, element: FreeGroupElement) -> "Word":
        """Convert an element of sympy's free group on x, y"""
        raw: list[int] = []
        for symbol, exponent in element.array_form:
            generator = X if str(symbol) == "x" else Y
            raw.extend([generator if exponent > 0 else -generator] * abs(exponent))
        return reduce(raw)

    def to_sympy(self) -> FreeGroupElement:
        group, x, y = _sympy_group()
        result = group.identity
        for letter in self.letters:
            generator = x if abs(letter) == X else y
            result = result * (generator if letter > 0 else generator**-1)
        return result

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        parts = []
        for letter, count in _runs(self.letters):
            name = _LETTER_TEXT[abs(letter)]
            exponent = count if letter > 0 else -count
            parts.append(name if exponent == 1 else f"{name}^{exponent}")
        return " ".join(parts)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return reduce(self.letters + other.letters)

    def __pow__(self, exponent: int) -> "Word":
        base = self if exponent >= 0 else self.inverse()
        return reduce(base.letters * abs(exponent))

    def inverse(self) -> "Word":
        return Word(tuple(-letter for letter in reversed(self.letters)))

    def is_positive(self) -> bool:
        """True when every exponent is positive"""
        return all(letter > 0 for letter in self.letters)


def _runs(letters: Sequence[int]) -> list[tuple[int, int]]:
    runs: list[tuple[int, int]] = []
    for letter in letters:
        if runs and runs[-1][0] == letter:
            runs[-1] = (letter, runs[-1][1] + 1)
        else:
            runs.append((letter, 1))
    return runs


@lru_cache(maxsize=1)
def _sympy_group() -> tuple[object, FreeGroupElement, FreeGroupElement]:
    group, x, y = free_group("x, y")
    return group, x, y


GEN_X = Word((X,))
GEN_Y = Word((Y,))


@dataclass(frozen=True)
class CyclicWord:
    """
    A conjugacy class, stored as the least rotation of a cyclically reduced word.

    Two CyclicWords are equal iff their canonical rotations are identical. Build
    instances with ``cyclically_reduce``.
    """

    letters: tuple[int, ...] = ()

    @property
    def word(self) -> Word:
        return Word(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return str(self.word)


@dataclass(frozen=True)
class AbelianImage:
    """Signed exponent sums (ex, ey)"""

    ex: int
    ey: int

    def __add__(self, other: "AbelianImage") -> "AbelianImage":
        return AbelianImage(self.ex + other.ex, self.ey + other.ey)

    @property
    def content(self) -> int:
        """gcd(|ex|, |ey|), an automorphism invariant"""
        return math.gcd(self.ex, self.ey)


@dataclass(frozen=True)
class Substitution:
    """Endomorphism of F(x, y) given by the images of the generators"""

    image_of_x: Word
    image_of_y: Word

    def image(self, letter: int) -> Word:
        target = self.image_of_x if abs(letter) == X else self.image_of_y
        return target if letter > 0 else target.inverse()

    def __call__(self, template: Word) -> Word:
        return substitute(template, self)


def reduce(raw: Iterable[int]) -> Word:
    """Freely reduce a sequence of signed generators"""
    return Word(_freely_reduce(raw))


def _cyclic_core(letters: tuple[int, ...]) -> tuple[int, ...]:
    start, end = 0, len(letters)
    while end - start >= 2 and letters[start] == -letters[end - 1]:
        start += 1
        end -= 1
    return letters[start:end]


def canonical_rotation(letters: Sequence[int]) -> tuple[int, ...]:
    """Least rotation under the letter order x < X < y < Y"""
    if not letters:
        return ()
    rotations = (tuple(letters[i:]) + tuple(letters[:i]) for i in range(len(letters)))
    return min(rotations, key=_rank)


def cyclically_reduce(w: Word | CyclicWord) -> CyclicWord:
    """Conjugate to a cyclically reduced word and pick its canonical rotation"""
    if isinstance(w, CyclicWord):
        return w
    return CyclicWord(canonical_rotation(_cyclic_core(w.letters)))


def abelianize(w: Word | CyclicWord) -> AbelianImage:
    ex = sum(1 if letter > 0 else -1 for letter in w.letters if abs(letter) == X)
    ey = sum(1 if letter > 0 else -1 for letter in w.letters if abs(letter) == Y)
    return AbelianImage(ex, ey)


def substitute(template: Word, s: Substitution) -> Word:
    """Replace each letter by its image under ``s`` and freely reduce"""
    raw: list[int] = []
    for letter in template.letters:
        raw.extend(s.image(letter).letters)
    return reduce(raw)


def compose(t: Substitution, s: Substitution) -> Substitution:
    """The substitution t∘s: apply ``s`` first, then ``t``"""
    return Substitution(substitute(s.image_of_x, t), substitute(s.image_of_y, t))


def power_map(m: int) -> Substitution:
    """x -> x^m, y -> y"""
    return Substitution(GEN_X**m, GEN_Y)


SWAP = Substitution(GEN_Y, GEN_X)


def primitive_word(s: int, t: int) -> Word:
    """
    The primitive word with abelianization (s, t), unique up to conjugacy.

    It is the pattern word of the (s+t, s) torus knot with an s-strand window read in the
    transformed basis: jump sources start at 1 and advance by s modulo s+t, and a source
    inside the window emits x, any other source emits y.
    """
    if s < 1 or t < 1 or math.gcd(s, t) != 1:
        raise InvalidParametersError(
            f"primitive_word needs coprime positive (s, t), got ({s}, {t})"
        )
    p = s + t
    letters = []
    source = 1
    for _ in range(p):
        letters.append(X if source <= s else Y)
        source = (source - 1 + s) % p + 1
    return Word(tuple(letters))


# Whitehead moves


@dataclass(frozen=True)
class WhiteheadMove:
    """A Whitehead automorphism of F(x, y), labelled for move traces"""

    name: str
    substitution: Substitution = field(compare=False)
    permutation: bool = False

    def apply(self, w: Word | CyclicWord) -> CyclicWord:
        return cyclically_reduce(substitute(Word(w.letters), self.substitution))


def _permutation_moves() -> tuple[WhiteheadMove, ...]:
    moves = []
    for swap, sign_x, sign_y in product((False, True), (1, -1), (1, -1)):
        targets = (Y, X) if swap else (X, Y)
        image_x = Word((sign_x * targets[0],))
        image_y = Word((sign_y * targets[1],))
        name = f"x->{image_x},y->{image_y}"
        moves.append(WhiteheadMove(name, Substitution(image_x, image_y), permutation=True))
    return tuple(moves)


def _type2_moves() -> tuple[WhiteheadMove, ...]:
    """
    The non-trivial moves (A, a): every generator z other than a^+-1 goes to z a when only
    z is in A, to a^-1 z when only z^-1 is in A and to a^-1 z a when both are.
    """
    moves = []
    for a in LETTERS:
        other = Y if abs(a) == X else X
        pivot = Word((a,))
        for right, left in ((True, False), (False, True), (True, True)):
            image = Word((other,))
            if right:
                image = image * pivot
            if left:
                image = pivot.inverse() * image
            images = {abs(a): Word((abs(a),)), other: image}
            name = f"{_LETTER_TEXT[other]}->{image}"
            moves.append(WhiteheadMove(name, Substitution(images[X], images[Y])))
    return tuple(moves)


PERMUTATION_MOVES = _permutation_moves()
TYPE2_MOVES = _type2_moves()
WHITEHEAD_MOVES = PERMUTATION_MOVES + TYPE2_MOVES
MOVES_BY_NAME = {move.name: move for move in WHITEHEAD_MOVES}


class _Budget:
    """Counts Whitehead-move evaluations against a node limit"""

    def __init__(self, limit: int | None, context: str):
        self.limit = resolve_budget(limit)
        self.context = context
        self.used = 0

    def spend(self, amount: int = 1) -> None:
        self.used += amount
        if self.used > self.limit:
            raise SearchBudgetExceeded(self.limit, self.context)


class Minimization(NamedTuple):
    min_length: int
    representative: CyclicWord
    moves: tuple[str, ...] = ()


def orbit_key(w: CyclicWord) -> CyclicWord:
    """Least canonical rotation over the eight generator permutations and inversions"""
    images = (move.apply(w) for move in PERMUTATION_MOVES)
    return min(images, key=lambda image: (len(image), _rank(image.letters)))


def _minimize(w: CyclicWord, budget: _Budget) -> Minimization:
    current = w
    trace: list[str] = []
    while True:
        best: WhiteheadMove | None = None
        best_image = current
        for move in TYPE2_MOVES:
            budget.spend()
            image = move.apply(current)
            if len(image) < len(best_image):
                best, best_image = move, image
        if best is None:
            return Minimization(len(current), current, tuple(trace))
        logger.debug("Whitehead move %s: length %d -> %d", best.name, len(current), len(best_image))
        trace.append(best.name)
        current = best_image


def whitehead_minimize(w: Word | CyclicWord, budget: int | None = None) -> Minimization:
    """
    Reduce a conjugacy class to minimal length in its Aut(F2)-orbit.

    Applies the best strictly length-decreasing Whitehead move until none remains. The
    returned ``moves`` replay from ``cyclically_reduce(w)`` to ``representative``.

    Raises:
        SearchBudgetExceeded: if more than ``budget`` moves are evaluated
    """
    return _minimize(cyclically_reduce(w), _Budget(budget, "minimizing"))


def _explore_level(start: CyclicWord, budget: _Budget, target: CyclicWord | None) -> nx.Graph:
    """Breadth-first search of the minimal-length level set, nodes are orbit keys"""
    root = orbit_key(start)
    graph = nx.Graph()
    graph.add_node(root)
    queue = deque([root])
    while queue and target not in graph:
        node = queue.popleft()
        for move in TYPE2_MOVES:
            budget.spend()
            image = move.apply(node)
            if len(image) != len(node):
                continue
            key = orbit_key(image)
            if key not in graph:
                graph.add_node(key)
                queue.append(key)
            if key != node:
                graph.add_edge(node, key, move=move.name)
    logger.debug("Explored %d words at length %d", graph.number_of_nodes(), len(root))
    return graph


def _minimized_pair(
    u: Word | CyclicWord, v: Word | CyclicWord, budget: _Budget
) -> tuple[Minimization, Minimization] | None:
    cu, cv = cyclically_reduce(u), cyclically_reduce(v)
    if len(cu) == 0 or len(cv) == 0:
        return None
    if abelianize(cu).content != abelianize(cv).content:
        return None
    mu, mv = _minimize(cu, budget), _minimize(cv, budget)
    if mu.min_length != mv.min_length:
        return None
    return mu, mv


def aut_equivalent(u: Word | CyclicWord, v: Word | CyclicWord, budget: int | None = None) -> bool:
    """
    True iff some automorphism of F(x, y) carries u to a conjugate of v.

    Both classes are minimized, then the minimal-length level set of u is searched
    breadth-first for v.

    Raises:
        SearchBudgetExceeded: if the search evaluates more than ``budget`` moves
    """
    if len(cyclically_reduce(u)) == 0 or len(cyclically_reduce(v)) == 0:
        return len(cyclically_reduce(u)) == len(cyclically_reduce(v))
    tracker = _Budget(budget, "deciding automorphic equivalence")
    pair = _minimized_pair(u, v, tracker)
    if pair is None:
        return False
    mu, mv = pair
    target = orbit_key(mv.representative)
    if orbit_key(mu.representative) == target:
        return True
    return target in _explore_level(mu.representative, tracker, target)


def orbit_trace(
    u: Word | CyclicWord, v: Word | CyclicWord, budget: int | None = None
) -> list[str] | None:
    """
    Whitehead moves linking the minimized forms of u and v within their common level set.

    Edges are between orbit keys, so generator permutations are implicit between steps.
    Returns None when u and v are not automorphically equivalent.
    """
    tracker = _Budget(budget, "tracing an orbit")
    pair = _minimized_pair(u, v, tracker)
    if pair is None:
        return None
    mu, mv = pair
    target = orbit_key(mv.representative)
    graph = _explore_level(mu.representative, tracker, target)
    if target not in graph:
        return None
    path = nx.shortest_path(graph, orbit_key(mu.representative), target)
    return [graph.edges[a, b]["move"] for a, b in zip(path, path[1:])]


def whitehead_graph(w: Word | CyclicWord) -> nx.MultiGraph:
    """Vertices are the four letters; each cyclic pair ab of w adds an edge a -- b^-1"""
    letters = cyclically_reduce(w).letters
    graph = nx.MultiGraph()
    graph.add_nodes_from(LETTERS)
    for index, letter in enumerate(letters):
        following = letters[(index + 1) % len(letters)]
        graph.add_edge(letter, -following)
    return graph


def has_cut_vertex(w: Word | CyclicWord) -> bool:
    """Whitehead graph is disconnected or has an articulation point"""
    graph = nx.Graph(whitehead_graph(w))
    if not nx.is_connected(graph):
        return True
    return any(True for _ in nx.articulation_points(graph))


def is_primitive_oracle(w: Word | CyclicWord, budget: int | None = None) -> bool:
    """True iff w is conjugate to a member of a free basis; the identity is not primitive"""
    core = cyclically_reduce(w)
    if len(core) == 0 or abelianize(core).content != 1:
        return False
    if len(core) == 1:
        return True
    # Whitehead's cut-vertex lemma
    if not has_cut_vertex(core):
        return False
    return aut_equivalent(core, GEN_X, budget)


def standard_sf_relators(a: int, b: int) -> tuple[CyclicWord, ...]:
    """
    Relators r with <x, y | r> isomorphic to <x, y | x^a y^b>, one per Nielsen class.

    These are v(a, k) with y -> y^b for gcd(k, a) = 1, 0 < 2k < a, and v(l, b) with
    x -> x^a for gcd(l, b) = 1, 0 < 2l < b, where v(s, t) is ``primitive_word``.
    k = 1 and l = 1 (the relator x^a y^b itself) are always present.
    """
    a, b = abs(a), abs(b)
    if a == 0 or b == 0:
        raise InvalidParametersError(f"Fiber multiplicities must be non-zero, got ({a}, {b})")
    relators: list[CyclicWord] = []
    stretch_y = Substitution(GEN_X, GEN_Y**b)
    stretch_x = Substitution(GEN_X**a, GEN_Y)
    for k in range(1, max(a, 2)):
        if math.gcd(k, a) == 1 and (k == 1 or 2 * k < a):
            relators.append(cyclically_reduce(substitute(primitive_word(a, k), stretch_y)))
    for l in range(1, max(b, 2)):
        if math.gcd(l, b) == 1 and (l == 1 or 2 * l < b):
            relators.append(cyclically_reduce(substitute(primitive_word(l, b), stretch_x)))
    return tuple(dict.fromkeys(relators))


def is_sf_oracle(w: Word | CyclicWord, a: int, b: int, budget: int | None = None) -> bool:
    """
    True iff <x, y | w> is the (a, b) Seifert-fibered group <x, y | x^a y^b>.

    Compares w and its inverse against every standard relator. When |a| or |b| is 1 the
    group is infinite cyclic and the test is primitivity.
    """
    a, b = abs(a), abs(b)
    if a == 0 or b == 0:
        raise InvalidParametersError(f"Fiber multiplicities must be non-zero, got ({a}, {b})")
    if a == 1 or b == 1:
        return is_primitive_oracle(w, budget)
    core = cyclically_reduce(w)
    if abelianize(core).content != math.gcd(a, b):
        return False
    inverse = cyclically_reduce(core.word.inverse())
    for relator in standard_sf_relators(a, b):
        if aut_equivalent(core, relator, budget) or aut_equivalent(inverse, relator, budget):
            return True
    return False
