"""Assembly and verification of central elements of U_q(so_2n).

A central element is assembled as

    sum over weights mu of   q^(-2 rho, mu) * q^(H grading of -2 mu)
  + sum over pairs mu > lambda of
        q^((mu - lambda, mu) + (-2 rho, mu)) * e* * q^(H grading of -mu-lambda) * f*

where e* is the dual (an F-combination) of the raising word carrying
v_lambda to v_mu, and f* the dual (an E-combination) of the lowering word
carrying v_mu to v_lambda.  Both duals come from the Borel pairing module
and are corrected by the +-1 with which the raw words act on weight vectors.

The element is represented only through its realizations: fundamental and
iterated-coproduct matrices over Q(q) or over Q at an exact rational q0.
Centrality is verified by exact commutators with every generator's
(coproduct) action; correctness of the whole pipeline is anchored on those
commutators vanishing identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exactq import QMatrix, QQ, RationalFunction
from .pairing import DualElement, dual_element
from .qgroup import (CartanData, E, E_KIND, F, F_KIND, K, Kinv, GeneratorSymbol,
                     WeightLabel, Word, all_weights, act, coproduct_action,
                     fundamental_matrix, v_index_to_std, weight_pairs,
                     weight_path, word_action_sign)


def rho_exponent(mu: WeightLabel, n: int) -> int:
    """Exponent of the q^(-2 rho, mu) prefactor.

    With rho = (n-1, n-2, ..., 1, 0) in the L-basis this is 2i - 2n for
    mu = +L_i and 2n - 2i for mu = -L_i.  The sign convention is pinned by
    the centrality checks: flipping it breaks every commutator.
    """
    base = 2 * mu.index - 2 * n
    return base if mu.sign > 0 else -base


def mu_lambda_exponent(mu: WeightLabel, lam: WeightLabel, n: int) -> int:
    """Exponent of q^((mu - lambda, mu)): 2 when lambda = -mu, else 1."""
    if mu.order_rank(n) >= lam.order_rank(n):
        raise ValueError(f"{mu} is not above {lam}")
    return 2 if lam == -mu else 1


@lru_cache(maxsize=None)
def _h_diagonals(n: int) -> tuple[tuple[int, ...], ...]:
    """Integer diagonal of each Cartan generator H_i on the standard basis."""
    out = []
    for i in range(1, n + 1):
        d = [0] * (2 * n)
        if i < n:
            d[i - 1], d[i] = 1, -1
            d[n + i - 1], d[n + i] = -1, 1
        else:
            d[n - 2], d[n - 1] = 1, 1
            d[2 * n - 2], d[2 * n - 1] = -1, -1
        out.append(tuple(d))
    return tuple(out)


def cartan_combination(target_l_vector, n: int) -> tuple[int, ...]:
    """Integer coefficients c with sum c_i H_i representing the L-basis target.

    Solves over the simple roots; valid whenever the target lies in the root
    lattice (true for -2 mu and -mu-lambda here).
    """
    cd = CartanData(n)
    return cd.root_coordinates([Fraction(x) for x in target_l_vector])


def _cartan_exponent_diagonal(coeffs: tuple[int, ...], n: int) -> tuple[int, ...]:
    """Diagonal exponents of q^(sum c_i H_i) on the standard basis."""
    hs = _h_diagonals(n)
    return tuple(sum(c * h[k] for c, h in zip(coeffs, hs)) for k in range(2 * n))


@dataclass(frozen=True)
class DiagonalTerm:
    mu: WeightLabel
    q_power: int
    cartan_coeffs: tuple[int, ...]


@dataclass(frozen=True)
class PairTerm:
    mu: WeightLabel
    lam: WeightLabel
    q_power: int
    sign: int
    e_word: Word
    f_word: Word
    e_dual: DualElement  # F-side combination (dual of e_word)
    f_dual: DualElement  # E-side combination (dual of f_word)
    cartan_coeffs: tuple[int, ...]


@dataclass(frozen=True)
class CentralElementPlan:
    n: int
    diagonal: tuple[DiagonalTerm, ...]
    pairs: tuple[PairTerm, ...]


@lru_cache(maxsize=None)
def assemble_central(n: int) -> CentralElementPlan:
    """Build the central-element plan for U_q(so_2n)."""
    diag: list[DiagonalTerm] = []
    for mu in all_weights(n):
        minus_two_mu = tuple(-2 * x for x in mu.l_vector(n))
        diag.append(DiagonalTerm(mu, rho_exponent(mu, n),
                                 cartan_combination(minus_two_mu, n)))
    pairs: list[PairTerm] = []
    for mu, lam in weight_pairs(n):
        eword, fword = weight_path(mu, lam, n)
        s_e = word_action_sign(eword, lam.basis_index(n), mu.basis_index(n), n)
        s_f = word_action_sign(fword, mu.basis_index(n), lam.basis_index(n), n)
        e_dual = dual_element(eword.indices(), n, E_KIND)
        f_dual = dual_element(fword.indices(), n, F_KIND)
        minus_mu_lam = tuple(-(a + b) for a, b in
                             zip(mu.l_vector(n), lam.l_vector(n)))
        pairs.append(PairTerm(
            mu=mu, lam=lam,
            q_power=mu_lambda_exponent(mu, lam, n) + rho_exponent(mu, n),
            sign=s_e * s_f,
            e_word=eword, f_word=fword,
            e_dual=e_dual, f_dual=f_dual,
            cartan_coeffs=cartan_combination(minus_mu_lam, n)))
    return CentralElementPlan(n, tuple(diag), tuple(pairs))


# ---------------------------------------------------------------------------
# Realization
# ---------------------------------------------------------------------------

class _Realizer:
    """Caches coproduct matrices of words/exponents for one (n, N, field)."""

    def __init__(self, n: int, N: int, field=QQ):
        self.n = n
        self.N = N
        self.field = field
        self.dim = (2 * n) ** N
        self._letters: dict = {}
        self._words: dict = {}

    def letter(self, sym: GeneratorSymbol) -> QMatrix:
        if sym not in self._letters:
            self._letters[sym] = coproduct_action(sym, self.N, self.n, self.field)
        return self._letters[sym]

    def word(self, word: Word) -> QMatrix:
        if word not in self._words:
            mat = QMatrix.identity(self.dim, zero=self.field.zero, one=self.field.one)
            for sym in word.letters:
                mat = mat * self.letter(sym)
            self._words[word] = mat
        return self._words[word]

    def dual_combination(self, dual: DualElement) -> QMatrix:
        total = QMatrix.zeros(self.dim, self.dim, zero=self.field.zero)
        for coeff, word in dual.as_word_terms():
            total = total + self.word(word).scale(self.field.convert(coeff))
        return total

    def cartan_power(self, coeffs: tuple[int, ...]) -> QMatrix:
        site = _cartan_exponent_diagonal(coeffs, self.n)
        expos = list(site)
        for _ in range(self.N - 1):
            expos = [a + b for a in expos for b in site]
        return QMatrix.diagonal([self.field.q_power(e) for e in expos],
                                zero=self.field.zero)


def realize(plan: CentralElementPlan, N: int, field=QQ) -> QMatrix:
    """Matrix of the central element on N tensor factors of the fundamental."""
    if N < 1:
        raise ValueError("need at least one site")
    rz = _Realizer(plan.n, N, field)
    total = QMatrix.zeros(rz.dim, rz.dim, zero=field.zero)
    for term in plan.diagonal:
        total = total + rz.cartan_power(term.cartan_coeffs).scale(
            field.q_power(term.q_power))
    for term in plan.pairs:
        prefactor = field.q_power(term.q_power, term.sign)
        mat = rz.dual_combination(term.e_dual) * rz.cartan_power(term.cartan_coeffs)
        mat = mat * rz.dual_combination(term.f_dual)
        total = total + mat.scale(prefactor)
    return total


@lru_cache(maxsize=None)
def realized_central(n: int, N: int) -> QMatrix:
    """Cached symbolic realization; treat the result as immutable."""
    return realize(assemble_central(n), N)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

@dataclass
class CommutatorCheck:
    generator: str
    sites: int
    ok: bool
    witness: tuple[int, int] | None = None


def all_generators(n: int) -> list[GeneratorSymbol]:
    syms: list[GeneratorSymbol] = []
    for i in range(1, n + 1):
        syms.extend((E(i), F(i), K(i)))
    return syms


def verify_central(plan: CentralElementPlan, max_sites: int = 2,
                   field=QQ) -> list[CommutatorCheck]:
    """Exact commutators of the realized element with every generator."""
    checks: list[CommutatorCheck] = []
    for N in range(1, max_sites + 1):
        mat = realize(plan, N, field)
        for sym in all_generators(plan.n):
            gen = coproduct_action(sym, N, plan.n, field)
            comm = mat.commutator(gen)
            witness = None
            ok = True
            for i, j, x in comm.nonzero_items():
                ok = False
                witness = (i, j)
                break
            checks.append(CommutatorCheck(repr(sym), N, ok, witness))
    return checks


def scalar_action(plan: CentralElementPlan) -> RationalFunction:
    """The scalar by which the element acts on the fundamental representation.

    Raises if the single-site realization is not an exact scalar matrix.
    """
    mat = realize(plan, 1)
    scalar = mat.data[0][0]
    dim = mat.rows
    for i in range(dim):
        for j in range(dim):
            expected = scalar if i == j else QQ.zero
            if mat.data[i][j] != expected:
                raise ArithmeticError(
                    f"single-site realization is not scalar at entry ({i}, {j})")
    return scalar
