"""Bilinear pairing between the Borel halves and dual-element extraction.

The pairing of an F-word against an E-word is computed by the coproduct
recursion: it is nonzero only when the index sequences are permutations of
one another, in which case it equals (-(q - q^-1)^-1)^len times a sum of
integer powers of q.  The recursion peels the first E index off, matches it
against each equal F index, and picks up a Cartan-pairing exponent from the
letters jumped over:

    <F_{x1..xm}, E_{y1..ym}>  ->  sum over i with x_i = y_1 of
        q^(sum_{j<i} cartan(x_j, x_i)) * <F with x_i removed, E_{y2..ym}>

Dual elements invert the Gram matrix of a basis of permutation words.  Words
that differ only by swapping adjacent commuting letters are the same algebra
element; `reduce` keeps one lexicographically-least representative per such
class, and `build_basis` then greedily keeps words while the Gram matrix of
kept words stays nonsingular.  Enumeration order is always lexicographic so
bases and dual elements are reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .exactq import QMatrix, QQ, RationalFunction, SingularMatrixError
from .qgroup import CartanData, E_KIND, F_KIND, Word

IndexWord = tuple[int, ...]


@dataclass(frozen=True)
class PairingValue:
    """Exponent multiset of a pairing; value is (-(q-1/q)^-1)^len * sum q^e."""

    exponents: tuple[int, ...]
    length: int

    @property
    def is_zero(self) -> bool:
        return not self.exponents

    def bare_sum(self) -> RationalFunction:
        """Sum of q^e without the (q - q^-1) prefactor."""
        total = QQ.zero
        for e in self.exponents:
            total = total + QQ.q_power(e)
        return total

    def value(self) -> RationalFunction:
        prefactor = (-(QQ.q_power(1) - QQ.q_power(-1)).inverse()) ** self.length
        return prefactor * self.bare_sum()


def pair(x: IndexWord, y: IndexWord, n: int) -> PairingValue:
    """Pair the F-word with indices x against the E-word with indices y."""
    cartan = CartanData(n).cartan
    return PairingValue(tuple(sorted(_pair_exponents(tuple(x), tuple(y), cartan))),
                        len(x))


def _pair_exponents(x: IndexWord, y: IndexWord, cartan) -> list[int]:
    if len(x) != len(y):
        return []
    if len(x) == 1:
        return [0] if x[0] == y[0] else []
    first = y[0]
    out: list[int] = []
    for i, xi in enumerate(x):
        if xi != first:
            continue
        rest = _pair_exponents(x[:i] + x[i + 1:], y[1:], cartan)
        if rest:
            prefactor = sum(cartan(x[j], xi) for j in range(i))
            out.extend(e + prefactor for e in rest)
    return out


def reduce_words(words: list[IndexWord], n: int) -> list[IndexWord]:
    """One representative per commuting-swap class, in first-seen order.

    Two words are linked when they differ by swapping adjacent letters whose
    Cartan pairing is zero; each class is replaced by its lexicographically
    least member.
    """
    cartan = CartanData(n).cartan
    seen: set[IndexWord] = set()
    reps: list[IndexWord] = []
    for w in words:
        if w in seen:
            continue
        component = {w}
        frontier = [w]
        while frontier:
            nxt = []
            for u in frontier:
                for k in range(len(u) - 1):
                    if u[k] != u[k + 1] and cartan(u[k], u[k + 1]) == 0:
                        s = u[:k] + (u[k + 1], u[k]) + u[k + 2:]
                        if s not in component:
                            component.add(s)
                            nxt.append(s)
            frontier = nxt
        seen |= component
        reps.append(min(component))
    return reps


def canonical_word(word: IndexWord, n: int) -> IndexWord:
    """Lexicographically least member of the word's commuting-swap class."""
    return reduce_words([tuple(word)], n)[0]


def gram_matrix(words: list[IndexWord], n: int, bare: bool = True) -> QMatrix:
    """Pairing matrix of F-words (rows) against E-words (columns)."""
    entries = []
    for x in words:
        row = []
        for y in words:
            p = pair(x, y, n)
            row.append(p.bare_sum() if bare else p.value())
        entries.append(row)
    return QMatrix(entries)


@lru_cache(maxsize=None)
def _basis_cached(multiset: tuple[int, ...], n: int) -> tuple[IndexWord, ...]:
    perms = sorted(set(itertools.permutations(sorted(multiset))))
    candidates = reduce_words(list(perms), n)
    kept: list[IndexWord] = []
    for w in candidates:
        trial = kept + [w]
        if gram_matrix(trial, n).rank() == len(trial):
            kept.append(w)
    return tuple(kept)


def build_basis(multiset: list[int] | tuple[int, ...], n: int) -> list[IndexWord]:
    """Greedy word basis of the span of all permutations of the multiset.

    The Gram matrix of the result is invertible; words are scanned in
    lexicographic order over swap-class representatives.
    """
    if not multiset:
        raise ValueError("empty multiset")
    return list(_basis_cached(tuple(sorted(multiset)), n))


@dataclass(frozen=True)
class DualElement:
    """Linear combination of index words on one Borel side."""

    terms: tuple[tuple[RationalFunction, IndexWord], ...]
    kind: str  # E_KIND or F_KIND of the words in `terms`

    def as_word_terms(self) -> list[tuple[RationalFunction, Word]]:
        return [(c, Word.of(self.kind, w)) for c, w in self.terms]

    def format(self) -> str:
        parts = [f"({c!r}) * {Word.of(self.kind, w).format()}" for c, w in self.terms]
        return " + ".join(parts) if parts else "0"


@lru_cache(maxsize=None)
def _dual_rows(multiset: tuple[int, ...], n: int) -> tuple[tuple[IndexWord, ...], QMatrix]:
    basis = _basis_cached(multiset, n)
    length = len(multiset)
    prefactor = (-(QQ.q_power(1) - QQ.q_power(-1))) ** length
    try:
        inv = gram_matrix(list(basis), n).inverse()
    except SingularMatrixError as exc:  # pragma: no cover - basis is built nonsingular
        raise SingularMatrixError(f"Gram matrix singular for multiset {multiset}") from exc
    return basis, inv.scale(prefactor)


def dual_element(word: IndexWord | list[int], n: int, kind: str = E_KIND) -> DualElement:
    """Dual of a basis word under the Borel pairing.

    For an E-word the dual is the F-combination pairing to 1 against the word
    and to 0 against every other basis word of its multiset (and vice versa).
    The word is canonicalized across commuting swaps first; it must then be a
    member of the greedy basis.
    """
    w = canonical_word(tuple(word), n)
    multiset = tuple(sorted(w))
    basis, dual_rows = _dual_rows(multiset, n)
    if w not in basis:
        raise ValueError(f"{w} is not a basis word for multiset {multiset}")
    k = basis.index(w)
    # Gram rows are F-against-E; dual of the k-th E-word reads row k of the
    # inverse, dual of the k-th F-word reads column k.
    if kind == E_KIND:
        coeffs = dual_rows.row(k)
        out_kind = F_KIND
    elif kind == F_KIND:
        coeffs = dual_rows.column(k)
        out_kind = E_KIND
    else:
        raise ValueError("kind must be E or F")
    terms = tuple((c, b) for c, b in zip(coeffs, basis) if c)
    return DualElement(terms, out_kind)


def biorthogonality_defect(multiset: list[int] | tuple[int, ...], n: int) -> QMatrix:
    """Matrix of <dual(e_k), e_j> - delta_kj; exact zero when duals are correct."""
    basis = build_basis(multiset, n)
    size = len(basis)
    out = []
    for k in range(size):
        dual = dual_element(basis[k], n, E_KIND)
        row = []
        for j in range(size):
            total = QQ.zero
            for c, w in dual.terms:
                total = total + c * pair(w, basis[j], n).value()
            expected = QQ.one if k == j else QQ.zero
            row.append(total - expected)
        out.append(row)
    return QMatrix(out)
