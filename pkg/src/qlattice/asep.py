"""The type D ASEP: clock-rate generator, dualities, reversibility, simulation.

States of N sites are encoded base 4 with site 1 most significant and digit
values (empty, first, second, both) = (0, 1, 2, 3); bit 0 of a digit flags a
first-class particle, bit 1 a second-class particle.  The lattice is closed:
no jumps off the ends.

Per bond (x, x+1) the moves are:

  drift       single particle steps into a site with no same-class particle
              when the other class is symmetric on both sites; rate
              q^-1 R_speed rightward, q R_speed leftward
  SWAP        [c; c'] <-> [c'; c] at R_SWAP for opposite classes, and
              [12; 0] -> [0; 12] at q^-2 R_SWAP, [0; 12] -> [12; 0] at
              q^2 R_SWAP
  STICK       [c; c'] -> [0; 12] (right) or [12; 0] (left); moving the
              first class costs q^(2 delta) rightward / q^(-2 delta)
              leftward relative to moving the second class
  TWIST       [12; 0] -> [c'; c] (right) or [0; 12] -> [c; c'] (left);
              the first class moves right at q^(-2 delta) R_TWIST(1/q),
              left at q^(2 delta) R_TWIST(q), the second class at the
              undecorated rates

The four rate functions are R_speed = q^(2n-1) + q^(1-2n),
R_SWAP = (q^(n-1) - q^(1-n))^2, R_TWIST = 2q^2 - q^(4-2n) + q^(2-2n) and
R_STICK = q^(2n) - q^(2n-2) + 2.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import Iterable, Sequence

from .exactq import QMatrix, QPoint, QQ, RF_ZERO, RationalFunction

EMPTY, FIRST, SECOND, BOTH = 0, 1, 2, 3

CLASS_PRESERVING = "classPreserving"
SUBSET_BOTH = "subsetBoth"
DUALITY_KINDS = (CLASS_PRESERVING, SUBSET_BOTH)


# ---------------------------------------------------------------------------
# Configurations
# ---------------------------------------------------------------------------

def digits(state: int, N: int) -> tuple[int, ...]:
    """Base-4 digits of a state, site 1 first."""
    out = []
    for x in range(N - 1, -1, -1):
        out.append((state >> (2 * x)) & 3)
    return tuple(out)


def encode(occupancies: Sequence[int]) -> int:
    state = 0
    for d in occupancies:
        if not 0 <= d <= 3:
            raise ValueError(f"bad occupancy {d}")
        state = (state << 2) | d
    return state


def sites_with_class(state: int, N: int, bit: int) -> tuple[int, ...]:
    """1-based site positions carrying the given class bit (1 or 2)."""
    return tuple(x + 1 for x, d in enumerate(digits(state, N)) if d & bit)


def particle_counts(state: int, N: int) -> tuple[int, int]:
    ds = digits(state, N)
    return (sum(1 for d in ds if d & 1), sum(1 for d in ds if d & 2))


def format_state(state: int, N: int) -> str:
    names = {0: ".", 1: "1", 2: "2", 3: "B"}
    return "".join(names[d] for d in digits(state, N))


# ---------------------------------------------------------------------------
# Rates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RateTable:
    """Jump-rate family with speed parameter n and class asymmetry delta."""

    n: int
    delta: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("rate parameter n must be >= 2")

    def speed(self, field=QQ):
        return field.q_power(2 * self.n - 1) + field.q_power(1 - 2 * self.n)

    def swap(self, field=QQ):
        m = self.n - 1
        return (field.q_power(2 * m) - field.q_power(0, 2)) + field.q_power(-2 * m)

    def twist(self, field=QQ, inverted: bool = False):
        s = -1 if inverted else 1
        return (field.q_power(2 * s, 2) - field.q_power(s * (4 - 2 * self.n))
                + field.q_power(s * (2 - 2 * self.n)))

    def stick(self, field=QQ, inverted: bool = False):
        s = -1 if inverted else 1
        return (field.q_power(2 * s * self.n) - field.q_power(s * (2 * self.n - 2))
                + field.q_power(0, 2))


def rate_identities(n: int) -> list[tuple[str, bool]]:
    """The three local relations the rate family satisfies, checked exactly."""
    rates = RateTable(n)
    q1, qm1, q2 = QQ.q_power(1), QQ.q_power(-1), QQ.q_power(2)
    checks = [
        ("q^-1 speed = swap + stick(1/q)",
         qm1 * rates.speed() == rates.swap() + rates.stick(inverted=True)),
        ("q speed = twist(q) + q^2 swap",
         q1 * rates.speed() == rates.twist() + q2 * rates.swap()),
        ("q^2 twist(1/q) = stick(q)",
         q2 * rates.twist(inverted=True) == rates.stick()),
    ]
    return checks


# ---------------------------------------------------------------------------
# Generator
# ---------------------------------------------------------------------------

def _bond_moves(a: int, b: int, rates: RateTable, field):
    """Yield (a', b', rate) for every enabled move on one bond."""
    two_delta = 2 * rates.delta
    for c in (1, 2):
        other = 3 - c
        has_a, has_b = a & c, b & c
        ctx = (1 if a & other else 0, 1 if b & other else 0)
        if has_a and not has_b:
            # class-c particle moves right
            if ctx in ((0, 0), (1, 1)):
                rate = field.q_power(-1) * rates.speed(field)
            elif ctx == (0, 1):  # sticks onto the other class at x+1
                rate = rates.stick(field, inverted=True)
                if c == 1:
                    rate = field.q_power(two_delta) * rate
            else:  # (1, 0): the pair at x splits rightward
                rate = rates.twist(field, inverted=True)
                if c == 1:
                    rate = field.q_power(-two_delta) * rate
            yield a & ~c, b | c, rate
        if has_b and not has_a:
            # class-c particle moves left
            if ctx in ((0, 0), (1, 1)):
                rate = field.q_power(1) * rates.speed(field)
            elif ctx == (1, 0):  # sticks onto the other class at x
                rate = rates.stick(field)
                if c == 1:
                    rate = field.q_power(-two_delta) * rate
            else:  # (0, 1): the pair at x+1 splits leftward
                rate = rates.twist(field)
                if c == 1:
                    rate = field.q_power(two_delta) * rate
            yield a | c, b & ~c, rate
    if (a, b) in ((FIRST, SECOND), (SECOND, FIRST)):
        yield b, a, rates.swap(field)
    elif a == BOTH and b == EMPTY:
        yield EMPTY, BOTH, field.q_power(-2) * rates.swap(field)
    elif a == EMPTY and b == BOTH:
        yield BOTH, EMPTY, field.q_power(2) * rates.swap(field)


def build_generator(rates: RateTable, N: int, field=QQ) -> QMatrix:
    """Markov generator on 4^N states with closed boundaries."""
    if N < 2:
        raise ValueError("need at least two sites")
    size = 4 ** N
    L = QMatrix.zeros(size, size, zero=field.zero)
    for s in range(size):
        ds = list(digits(s, N))
        for x in range(N - 1):
            a, b = ds[x], ds[x + 1]
            for a2, b2, rate in _bond_moves(a, b, rates, field):
                t_digits = list(ds)
                t_digits[x], t_digits[x + 1] = a2, b2
                t = encode(t_digits)
                L.data[s][t] = L.data[s][t] + rate
                L.data[s][s] = L.data[s][s] - rate
    return L


# ---------------------------------------------------------------------------
# Duality
# ---------------------------------------------------------------------------

def duality_matrix(kind: str, N: int, field=QQ) -> QMatrix:
    """Closed-form self-duality function as a 4^N x 4^N matrix D(eta, xi)."""
    if kind not in DUALITY_KINDS:
        raise ValueError(f"unknown duality kind {kind!r}")
    size = 4 ** N
    D = QMatrix.zeros(size, size, zero=field.zero)
    firsts = [sites_with_class(s, N, 1) for s in range(size)]
    seconds = [sites_with_class(s, N, 2) for s in range(size)]
    for eta in range(size):
        a1_eta, a2_eta = set(firsts[eta]), set(seconds[eta])
        for xi in range(size):
            a1_xi, a2_xi = firsts[xi], seconds[xi]
            if not set(a1_xi) <= a1_eta:
                continue
            if kind == CLASS_PRESERVING:
                if set(a2_xi) != a2_eta:
                    continue
            elif not set(a2_xi) <= a2_eta:
                continue
            expo = 0
            for x in a1_xi:
                expo += 2 * x - 2 * sum(1 for y in a1_eta if y < x)
            if kind == CLASS_PRESERVING:
                expo += sum(2 * x for x in a2_xi)
            else:
                for x in a2_xi:
                    expo += 2 * x - 2 * sum(1 for y in a2_eta if y < x)
            D.data[eta][xi] = field.q_power(expo)
    return D


@dataclass
class DualityReport:
    kind: str
    n: int
    delta: int
    sites: int
    ok: bool
    mode: str
    witnesses: list[tuple[str, str]] = dataclass_field(default_factory=list)
    points: list[Fraction] = dataclass_field(default_factory=list)


def check_duality(L: QMatrix, D: QMatrix, N: int) -> tuple[bool, list[tuple[str, str]]]:
    """Exact test of L D = D L^T; returns (ok, offending (eta, xi) pairs)."""
    lhs = L * D
    rhs = D * L.transpose()
    witnesses = []
    for i in range(lhs.rows):
        for j in range(lhs.cols):
            if lhs.data[i][j] != rhs.data[i][j]:
                witnesses.append((format_state(i, N), format_state(j, N)))
    return not witnesses, witnesses


def duality_report(rates: RateTable, kind: str, N: int,
                   numeric_points: int | None = None) -> DualityReport:
    """Symbolic duality check, or a degree-bounded multi-point check.

    In numeric mode the number of evaluation points always exceeds the
    tracked exponent span of L D - D L^T, which makes agreement at all
    points conclusive.
    """
    if numeric_points is None:
        L = build_generator(rates, N)
        D = duality_matrix(kind, N)
        ok, witnesses = check_duality(L, D, N)
        return DualityReport(kind, rates.n, rates.delta, N, ok, "symbolic",
                             witnesses[:8])
    Lsym = build_generator(rates, N)
    Dsym = duality_matrix(kind, N)
    llo, lhi = Lsym.exponent_bounds()
    dlo, dhi = Dsym.exponent_bounds()
    span = (lhi + dhi) - (llo + dlo) + 1
    count = max(numeric_points, span + 1)
    points = [Fraction(2 * k + 3, 2 * k + 5) for k in range(count)]
    witnesses: list[tuple[str, str]] = []
    ok = True
    for q0 in points:
        Lq = Lsym.evaluate(q0)
        Dq = Dsym.evaluate(q0)
        got, wit = check_duality(Lq, Dq, N)
        if not got:
            ok = False
            witnesses = wit[:8]
            break
    return DualityReport(kind, rates.n, rates.delta, N, ok,
                         f"numeric({count} points)", witnesses, points)


# ---------------------------------------------------------------------------
# Reversibility
# ---------------------------------------------------------------------------

def reversible_weights(N: int, field=QQ) -> list:
    """G^2(eta) = prod over occupied sites x of q^-2x per particle class."""
    out = []
    for s in range(4 ** N):
        expo = -2 * (sum(sites_with_class(s, N, 1)) + sum(sites_with_class(s, N, 2)))
        out.append(field.q_power(expo))
    return out


def detailed_balance_violations(L: QMatrix, N: int,
                                field=QQ) -> list[tuple[str, str]]:
    """Pairs where G^2(eta) L(eta, xi) != G^2(xi) L(xi, eta)."""
    w = reversible_weights(N, field)
    bad = []
    for i in range(L.rows):
        for j in range(i + 1, L.cols):
            if w[i] * L.data[i][j] != w[j] * L.data[j][i]:
                bad.append((format_state(i, N), format_state(j, N)))
    return bad


# ---------------------------------------------------------------------------
# Cross-derivation against the Hamiltonian route
# ---------------------------------------------------------------------------

@dataclass
class MatchReport:
    case: str
    rate_n: int
    delta: int
    interacting_ok: bool
    drift_ok: bool
    mismatches: list[tuple[int, int, str, str]]

    @property
    def ok(self) -> bool:
        return self.interacting_ok and self.drift_ok


def match_hamiltonian_generator(derived, rates: RateTable,
                                labeling: dict[int, int], case: str = "") -> MatchReport:
    """Compare a ground-state-derived generator with the clock-rate generator.

    `derived` is a DerivedGenerator on two sites; `labeling` maps v-indices
    to occupancy codes.  The derived matrix must equal the clock generator
    restricted to the corresponding four configurations, entrywise, and the
    drift 2x2 blocks must carry q^-+1 R_speed.
    """
    L = build_generator(rates, 2)
    states = [encode((labeling[a], labeling[b])) for a, b in derived.state_pairs]
    mismatches = []
    for i, si in enumerate(states):
        for j, sj in enumerate(states):
            got = derived.matrix.data[i][j]
            want = L.data[si][sj]
            if got != want:
                mismatches.append((i, j, repr(got), repr(want)))
    interacting_ok = not mismatches
    # drift: a single particle next to a compatible site hops at q^-+1 R_speed
    speed = rates.speed()
    qm, qp = QQ.q_power(-1) * speed, QQ.q_power(1) * speed
    drift_ok = True
    for right, left in (((BOTH, FIRST), (FIRST, BOTH)), ((BOTH, SECOND), (SECOND, BOTH)),
                        ((FIRST, EMPTY), (EMPTY, FIRST)), ((SECOND, EMPTY), (EMPTY, SECOND))):
        s_r, s_l = encode(right), encode(left)
        if L.data[s_r][s_l] != qm or L.data[s_l][s_r] != qp:
            drift_ok = False
            mismatches.append((s_r, s_l, repr(L.data[s_r][s_l]), repr(qm)))
    return MatchReport(case, rates.n, rates.delta, interacting_ok, drift_ok,
                       mismatches[:8])


def schutz_restriction_matches(rates: RateTable, N: int) -> bool:
    """With no second-class particles the process is the single-class ASEP.

    Checks that the generator restricted to {empty, first}^N equals the
    standard ASEP generator with right rate q^-1 R_speed, left rate q R_speed.
    """
    L = build_generator(rates, N)
    speed = rates.speed()
    qm, qp = QQ.q_power(-1) * speed, QQ.q_power(1) * speed
    states = [s for s in range(4 ** N) if not sites_with_class(s, N, 2)]
    for s in states:
        ds = digits(s, N)
        row = {t: RF_ZERO for t in states}
        for x in range(N - 1):
            a, b = ds[x], ds[x + 1]
            if a == FIRST and b == EMPTY:
                t = list(ds)
                t[x], t[x + 1] = EMPTY, FIRST
                row[encode(t)] = row[encode(t)] + qm
            elif a == EMPTY and b == FIRST:
                t = list(ds)
                t[x], t[x + 1] = FIRST, EMPTY
                row[encode(t)] = row[encode(t)] + qp
        row[s] = -sum((v for k, v in row.items() if k != s), RF_ZERO)
        for t in states:
            if L.data[s][t] != row[t]:
                return False
        for t in range(4 ** N):
            if t not in row and L.data[s][t]:
                return False
    return True


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------

@dataclass
class SimulationResult:
    sites: int
    q0: Fraction
    seed: int
    jumps: int
    elapsed: float
    final_state: int
    occupation: dict[int, float]
    trajectory: list[tuple[float, int]] | None

    def occupation_distribution(self) -> dict[int, float]:
        total = sum(self.occupation.values())
        if total == 0:
            return {}
        return {s: t / total for s, t in self.occupation.items()}


def simulate(rates: RateTable, N: int, q0: Fraction, t_max: float, seed: int,
             start: int | None = None, max_jumps: int | None = None,
             record: bool = True) -> SimulationResult:
    """Continuous-time jump-chain simulation, deterministic for a given seed.

    Stops at t_max or after max_jumps, whichever comes first.  Occupation
    times are accumulated per state; the trajectory is stored only when
    `record` is true.
    """
    q0 = Fraction(q0)
    if q0 <= 0:
        raise ValueError("q0 must be positive")
    L = build_generator(rates, N, QPoint(q0))
    size = 4 ** N
    out_rates: list[float] = []
    out_targets: list[list[int]] = []
    out_cum: list[list[float]] = []
    for s in range(size):
        targets, weights = [], []
        for t in range(size):
            if t != s and L.data[s][t]:
                targets.append(t)
                weights.append(float(L.data[s][t]))
        total = float(-L.data[s][s])
        cum, acc = [], 0.0
        for w in weights:
            acc += w
            cum.append(acc)
        out_rates.append(total)
        out_targets.append(targets)
        out_cum.append(cum)
    rng = random.Random(seed)
    state = start if start is not None else encode([BOTH] + [EMPTY] * (N - 1))
    t = 0.0
    jumps = 0
    occupation: dict[int, float] = {}
    trajectory: list[tuple[float, int]] | None = [(0.0, state)] if record else None
    while t < t_max and (max_jumps is None or jumps < max_jumps):
        lam = out_rates[state]
        if lam <= 0.0:
            occupation[state] = occupation.get(state, 0.0) + (t_max - t)
            t = t_max
            break
        dt = rng.expovariate(lam)
        if t + dt >= t_max and max_jumps is None:
            occupation[state] = occupation.get(state, 0.0) + (t_max - t)
            t = t_max
            break
        occupation[state] = occupation.get(state, 0.0) + dt
        t += dt
        u = rng.random() * out_cum[state][-1]
        cum = out_cum[state]
        lo, hi = 0, len(cum) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if cum[mid] >= u:
                hi = mid
            else:
                lo = mid + 1
        state = out_targets[state][lo]
        jumps += 1
        if trajectory is not None:
            trajectory.append((t, state))
    return SimulationResult(N, q0, seed, jumps, t, state, occupation, trajectory)


def write_trajectory_csv(result: SimulationResult, path: str) -> None:
    """Rows of time followed by one base-4 digit per site."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time"] + [f"site{x}" for x in range(1, result.sites + 1)])
        for t, s in result.trajectory or []:
            writer.writerow([f"{t:.9f}", *digits(s, result.sites)])


def stationary_tv_distance(result: SimulationResult, q0: Fraction) -> float:
    """Total-variation distance of time-weighted occupation from normalized G^2.

    The comparison is within the particle-count sector actually visited,
    where the chain is irreducible and G^2 normalizes to its stationary law.
    """
    visited = sorted(result.occupation)
    weights = reversible_weights(result.sites, QPoint(Fraction(q0)))
    sector = particle_counts(visited[0], result.sites)
    states = [s for s in range(4 ** result.sites)
              if particle_counts(s, result.sites) == sector]
    total_w = sum(weights[s] for s in states)
    dist = result.occupation_distribution()
    return 0.5 * sum(abs(dist.get(s, 0.0) - float(weights[s] / total_w))
                     for s in states)
