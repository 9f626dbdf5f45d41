"""Reduced-word algebra for the rank-2 free group and its prefix-cone decompositions.

Words are ASCII strings over the alphabet 'a', 'A', 'b', 'B' standing for the
generators x, x^-1, y, y^-1.  The empty string is the group identity and is
rendered as "1".  A decomposition splits the group into the identity, a finite
residue set, and the cones J_psi of words sharing an initial word psi; the
translation identities gamma * J_s = Gamma - J_S between these pieces are
discovered empirically by bounded enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

LETTERS = "aAbB"
_INV = {"a": "A", "A": "a", "b": "B", "B": "b"}
_RANK = {ch: i for i, ch in enumerate(LETTERS)}

DEFAULT_BALL_CAP = 14


class WordError(ValueError):
    pass


class UnclassifiableWord(WordError):
    """Raised when a word belongs to no piece of a decomposition."""


class AmbiguousClassification(WordError):
    """Raised when a word belongs to several pieces of a decomposition."""


def inverse_letter(ch: str) -> str:
    return _INV[ch]


def check_letters(w: str) -> None:
    for ch in w:
        if ch not in _INV:
            raise WordError(f"invalid letter {ch!r}; expected one of {LETTERS!r}")


def reduce_word(letters: str) -> str:
    """Free reduction: cancel adjacent inverse pairs until none remain."""
    check_letters(letters)
    out: list[str] = []
    for ch in letters:
        if out and out[-1] == _INV[ch]:
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def is_reduced(w: str) -> bool:
    check_letters(w)
    return all(w[i + 1] != _INV[w[i]] for i in range(len(w) - 1))


def inverse_word(w: str) -> str:
    return "".join(_INV[ch] for ch in reversed(w))


def multiply(w1: str, w2: str) -> str:
    """Product of two reduced words, reduced.

    Both inputs must already be reduced; only the junction can cancel.
    """
    i = len(w1)
    j = 0
    while i > 0 and j < len(w2) and w1[i - 1] == _INV[w2[j]]:
        i -= 1
        j += 1
    return w1[:i] + w2[j:]


def word_key(w: str) -> tuple[int, tuple[int, ...]]:
    """Length-then-lexicographic sort key with letter order a < A < b < B."""
    return (len(w), tuple(_RANK[ch] for ch in w))


def format_word(w: str) -> str:
    return w if w else "1"


def parse_word(text: str) -> str:
    """Inverse of :func:`format_word`; accepts "1" for the identity."""
    if text == "1":
        return ""
    w = text
    if not is_reduced(w):
        raise WordError(f"{text!r} is not reduced")
    return w


def enumerate_ball(L: int, cap: int = DEFAULT_BALL_CAP) -> list[str]:
    """All reduced words of length <= L in length-lex order.

    The count is 1 + 2*(3^L - 1): four words of length 1 and a branching
    factor of three afterwards.
    """
    if L < 0:
        raise WordError("radius must be nonnegative")
    if L > cap:
        raise WordError(f"radius {L} exceeds cap {cap}")
    words = [""]
    frontier = [""]
    for _ in range(L):
        nxt = []
        for w in frontier:
            last = w[-1] if w else None
            for ch in LETTERS:
                if last is None or ch != _INV[last]:
                    nxt.append(w + ch)
        words.extend(nxt)
        frontier = nxt
    return words


def cone_members(psi: str, L: int, cap: int = DEFAULT_BALL_CAP) -> list[str]:
    """All words of length <= L whose initial word is psi (J_psi within a ball)."""
    if L > cap:
        raise WordError(f"radius {L} exceeds cap {cap}")
    if not psi:
        raise WordError("cone prefix must be a nonidentity word")
    if len(psi) > L:
        return []
    members = [psi]
    frontier = [psi]
    for _ in range(L - len(psi)):
        nxt = []
        for w in frontier:
            for ch in LETTERS:
                if ch != _INV[w[-1]]:
                    nxt.append(w + ch)
        members.extend(nxt)
        frontier = nxt
    return members


@dataclass(frozen=True)
class Decomposition:
    """A prefix/residue decomposition Gamma = {1} u residues u U_psi J_psi."""

    name: str
    prefixes: tuple[str, ...]
    residues: tuple[str, ...] = ()

    def __post_init__(self):
        seen = set()
        for w in self.prefixes + self.residues:
            if not w:
                raise WordError("identity cannot be a prefix or residue")
            if not is_reduced(w):
                raise WordError(f"{w!r} is not reduced")
            if w in seen:
                raise WordError(f"duplicate word {w!r}")
            seen.add(w)

    @property
    def words(self) -> tuple[str, ...]:
        return self.prefixes + self.residues

    def max_word_len(self) -> int:
        return max(len(w) for w in self.words)


def log3_decomposition() -> Decomposition:
    """The symmetric single-letter decomposition (four cones, no residues)."""
    return Decomposition("log3", ("a", "A", "b", "B"))


def dagger_decomposition() -> Decomposition:
    """The eight-cone decomposition adapted to the isometries x, y, xy.

    Prefixes: xy, x^2, xy^-1, y, x^-1, y^-1x^-1, y^-2, y^-1x; residues x, y^-1.
    """
    return Decomposition(
        "dagger",
        ("ab", "aa", "aB", "b", "A", "BA", "BB", "Ba"),
        ("a", "B"),
    )


PRESETS = {"log3": log3_decomposition, "dagger": dagger_decomposition}


def get_preset(name: str) -> Decomposition:
    try:
        return PRESETS[name]()
    except KeyError:
        raise WordError(f"unknown preset {name!r}; expected one of {sorted(PRESETS)}")


IDENTITY = "identity"
RESIDUE = "residue"
CONE = "cone"


def classify_all(dec: Decomposition, w: str) -> list[tuple[str, str]]:
    """Every piece of the decomposition containing w (normally exactly one)."""
    if not is_reduced(w):
        raise WordError(f"{w!r} is not reduced")
    if not w:
        return [(IDENTITY, "")]
    hits = []
    for r in dec.residues:
        if w == r:
            hits.append((RESIDUE, r))
    for p in dec.prefixes:
        if w.startswith(p):
            hits.append((CONE, p))
    return hits


def classify(dec: Decomposition, w: str) -> tuple[str, str]:
    """Unique classification of w; raises if the decomposition misses or overlaps."""
    hits = classify_all(dec, w)
    if not hits:
        raise UnclassifiableWord(f"{format_word(w)} is covered by no piece of {dec.name}")
    if len(hits) > 1:
        raise AmbiguousClassification(
            f"{format_word(w)} is covered by several pieces of {dec.name}: {hits}"
        )
    return hits[0]


@dataclass(frozen=True)
class PartitionReport:
    decomposition: str
    depth: int
    words_checked: int
    violations: tuple[tuple[str, int], ...]  # (word, number of classifications)

    @property
    def valid(self) -> bool:
        return not self.violations


def verify_partition(dec: Decomposition, L: int, cap: int = DEFAULT_BALL_CAP) -> PartitionReport:
    """Check that every word in the ball of radius L has exactly one classification."""
    violations = []
    count = 0
    for w in enumerate_ball(L, cap=cap):
        count += 1
        n = len(classify_all(dec, w))
        if n != 1:
            violations.append((format_word(w), n))
    return PartitionReport(dec.name, L, count, tuple(violations))


def translate_cone(dec: Decomposition, gamma: str, psi: str, L: int,
                   cap: int = DEFAULT_BALL_CAP) -> frozenset[str]:
    """The set (gamma * J_psi) intersected with the ball of radius L.

    Products are formed from cone members of length up to L + |gamma|, which
    guarantees the truncated image is exact: any u with |reduce(gamma*u)| <= L
    satisfies |u| <= L + |gamma|.
    """
    if psi not in dec.words:
        raise WordError(f"{format_word(psi)} is not a prefix or residue of {dec.name}")
    if not is_reduced(gamma):
        raise WordError(f"{gamma!r} is not reduced")
    out = set()
    for u in cone_members(psi, L + len(gamma), cap=cap + dec.max_word_len() + 2):
        w = multiply(gamma, u)
        if len(w) <= L:
            out.add(w)
    return frozenset(out)


@dataclass(frozen=True)
class RelationIdentity:
    """A verified exact identity  gamma * J_source = Gamma - J_excluded.

    Residue members of `excluded` contribute their singleton {r}; the group
    identity conventionally sits on the right-hand side (it is ignored by the
    membership checks, matching the measure argument where point masses vanish).
    """

    gamma: str
    source: str
    excluded: tuple[str, ...]
    verified_depth: int

    def __post_init__(self):
        if not self.gamma:
            raise WordError("gamma must be a nonidentity word")
        if not self.excluded:
            raise WordError("excluded set must be nonempty")

    def excluded_prefixes(self, dec: Decomposition) -> tuple[str, ...]:
        return tuple(w for w in self.excluded if w in dec.prefixes)

    def to_json(self) -> dict:
        return {
            "gamma": format_word(self.gamma),
            "source": format_word(self.source),
            "excluded": [format_word(w) for w in self.excluded],
            "verified_depth": self.verified_depth,
        }


def _exact_excluded(dec: Decomposition, gamma: str, psi: str, L: int, cap: int,
                    pieces: dict[str, list[str]] | None = None) -> tuple[str, ...] | None:
    """Excluded-piece tuple if gamma*J_psi misses exactly whole pieces, else None.

    The complement of the image inside the ball (identity element ignored) must
    be a union of full cones and residue singletons.  `pieces` optionally maps
    each piece word to its ball members, precomputed by the caller.
    """
    image = translate_cone(dec, gamma, psi, L, cap=cap)
    if pieces is None:
        pieces = _ball_pieces(dec, L, cap)
    excluded = []
    for piece_word, members in pieces.items():
        inside = sum(1 for w in members if w in image)
        if inside == 0:
            excluded.append(piece_word)
        elif inside != len(members):
            return None  # a piece is split by the image: not an exact identity
    if not excluded:
        return None
    return tuple(sorted(excluded, key=word_key))


def _ball_pieces(dec: Decomposition, L: int, cap: int) -> dict[str, list[str]]:
    """Members of every nonidentity piece inside the ball of radius L."""
    pieces: dict[str, list[str]] = {w: [] for w in dec.words}
    for w in enumerate_ball(L, cap=cap):
        if not w:
            continue
        pieces[classify(dec, w)[1]].append(w)
    return pieces


def verify_relation(dec: Decomposition, rel: RelationIdentity, depth: int,
                    cap: int = DEFAULT_BALL_CAP) -> bool:
    """Independent membership re-check of a relation on the ball of radius `depth`.

    Uses classification only: w belongs to gamma*J_source iff reduce(gamma^-1 w)
    has initial word `source`.  Never touches translate_cone.
    """
    ginv = inverse_word(rel.gamma)
    excluded = set(rel.excluded)
    for w in enumerate_ball(depth, cap=cap):
        if not w:
            continue
        u = multiply(ginv, w)
        in_image = bool(u) and u.startswith(rel.source)
        kind, piece = classify(dec, w)
        in_excluded = piece in excluded
        if in_image == in_excluded:
            return False
    return True


def discover_relations(dec: Decomposition, max_gamma_len: int, L: int,
                       cap: int = DEFAULT_BALL_CAP,
                       all_words: bool = False) -> list[RelationIdentity]:
    """Find the exact translation identities of the decomposition.

    Candidates are pairs (gamma, psi) with psi a prefix.  By default gamma
    ranges over the decomposition's own words (prefixes and residues, the
    isometries the identities bound) of length <= max_gamma_len, and the
    product gamma*psi must cancel at the junction; pairs without cancellation
    only ever produce the trivial embeddings gamma*J_psi = J_{gamma psi}.
    Passing all_words=True lifts both restrictions and enumerates every
    nonidentity gamma in the ball, which also surfaces the transposed and
    power variants of the canonical identities.
    """
    if max_gamma_len < 1:
        raise WordError("max_gamma_len must be at least 1")
    if L < max_gamma_len + 4:
        raise WordError(
            f"depth {L} too small for gamma length {max_gamma_len}; need at least {max_gamma_len + 4}"
        )
    if all_words:
        gammas = [w for w in enumerate_ball(max_gamma_len, cap=cap) if w]
    else:
        gammas = [w for w in dec.words if len(w) <= max_gamma_len]
    gammas.sort(key=word_key)
    prefixes = sorted(dec.prefixes, key=word_key)
    pieces = _ball_pieces(dec, L, cap)

    relations = []
    for gamma in gammas:
        for psi in prefixes:
            if not all_words and psi[0] != _INV[gamma[-1]]:
                continue
            excluded = _exact_excluded(dec, gamma, psi, L, cap, pieces=pieces)
            if excluded is not None:
                relations.append(RelationIdentity(gamma, psi, excluded, L))
    return relations
