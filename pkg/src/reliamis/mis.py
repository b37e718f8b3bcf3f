"""Markov imbeddable structure (MIS) models and their analytic evaluation.

A model steps once per component through a chain whose states are the
sets of failed components, plus one absorbing ``FAILED`` state standing for
every configuration in which the system has failed.  System reliability is
``pi0 . T_1 . T_2 ... T_n . u``.

Transitions into ``FAILED`` lose the failed configuration that was reached.
Models built by abstraction keep it in :attr:`MisModel.moves` so that the
dependencies can be recovered exactly; models built from bare matrices
assume that nothing but the stepping component failed.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .errors import InvalidModel, PartialAssignment
from .props import check_name, to_probability


class _FailedSink:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "FAILED"

    def __reduce__(self):
        return (_FailedSink, ())


FAILED = _FailedSink()


class UnreachableStateWarning(UserWarning):
    pass


class Move(NamedTuple):
    """Where ``component`` goes when it fails in the state with failed set ``source``.

    ``landing`` is the failed configuration actually reached; it equals
    ``target`` unless ``target`` is ``FAILED``.
    """

    component: str
    source: frozenset
    target: object
    landing: frozenset


class ModelViolation(NamedTuple):
    rule: str
    where: str
    message: str


class Method(enum.Enum):
    ANALYTIC = "analytic"
    PATH_ENUM = "path-enumeration"
    MONTE_CARLO = "monte-carlo"


def format_decimal(x, places: int = 12) -> str:
    if isinstance(x, Fraction):
        # round() on a Fraction is exact and ties go to even
        d = Decimal(round(x * 10**places)).scaleb(-places)
    else:
        d = Decimal(repr(float(x))).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN)
    return format(d, "f")


@dataclass(frozen=True)
class ReliabilityResult:
    value: object  # Fraction for exact methods, float for Monte Carlo
    method: Method
    ci_halfwidth: float | None = None
    trials: int | None = None

    def __post_init__(self):
        if (self.ci_halfwidth is not None) != (self.method is Method.MONTE_CARLO):
            raise ValueError("a confidence half-width goes with Monte Carlo results only")

    def __float__(self):
        return float(self.value)

    def decimal(self, places: int = 12) -> str:
        return format_decimal(self.value, places)

    def __str__(self):
        if self.method is Method.MONTE_CARLO:
            return (
                f"{self.value:.12f} +/- {self.ci_halfwidth:.3e} "
                f"({self.trials} trials, {self.method.value})"
            )
        v = self.value
        return f"{v.numerator}/{v.denominator} = {self.decimal()} ({self.method.value})"


def state_order_key(state, names: Sequence[str]):
    """Canonical order: fewer failures first, then by bitstring value, FAILED last."""
    if state is FAILED:
        return (1, 0, 0)
    bits = int(state_label(state, names), 2) if names else 0
    return (0, len(state), bits)


def state_label(state, names: Sequence[str]) -> str:
    """Bitstring with ``1`` for every functional component; ``FAILED`` is all zeros."""
    if state is FAILED:
        return "0" * len(names)
    return "".join("0" if c in state else "1" for c in names)


@dataclass(frozen=True)
class MisModel:
    components: tuple  # ((name, p), ...) in evaluation order
    states: tuple  # failed-set frozensets, FAILED last
    tpms: tuple  # one tuple of row tuples per component
    moves: frozenset = frozenset()
    pi0: tuple = None
    u: tuple = None
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.states)})
        if self.pi0 is None:
            object.__setattr__(
                self, "pi0", tuple(Fraction(int(i == 0)) for i in range(len(self.states)))
            )
        if self.u is None:
            object.__setattr__(
                self, "u", tuple(Fraction(int(s is not FAILED)) for s in self.states)
            )

    @classmethod
    def build(cls, components, states, tpms, moves=(), pi0=None, u=None) -> "MisModel":
        """Build a model from plain Python data, converting numbers to exact rationals.

        ``components`` is a sequence of ``(name, p)`` pairs; ``states`` holds
        failed-component collections or :data:`FAILED`; ``tpms`` holds one
        square matrix (nested sequences or array) per component.
        """
        comps = tuple((check_name(n), to_probability(p)) for n, p in components)
        sts = tuple(s if s is FAILED else frozenset(s) for s in states)
        mats = tuple(
            tuple(tuple(_exact(x) for x in row) for row in np.asarray(t, dtype=object).tolist())
            for t in tpms
        )
        mv = frozenset(
            Move(m[0], frozenset(m[1]), m[2] if m[2] is FAILED else frozenset(m[2]), frozenset(m[3]))
            for m in moves
        )
        conv = (lambda v: None if v is None else tuple(_exact(x) for x in v))
        return cls(comps, sts, mats, mv, conv(pi0), conv(u))

    # -- accessors ------------------------------------------------------------

    @property
    def names(self) -> tuple:
        return tuple(n for n, _ in self.components)

    @property
    def n(self) -> int:
        return len(self.components)

    def index(self, state) -> int:
        return self._index[state]

    def label(self, state) -> str:
        return state_label(state, self.names)

    def matrix(self, i: int) -> np.ndarray:
        """TPM of component ``i`` as a read-only object array of Fractions."""
        a = np.array(self.tpms[i], dtype=object)
        a.flags.writeable = False
        return a

    def functional_states(self) -> list:
        return [s for s in self.states if s is not FAILED]

    def move(self, name: str, source: frozenset) -> Move | None:
        """Failure transition of ``name`` out of ``source``.

        Uses the recorded move when there is one, otherwise reads the
        off-diagonal entry of the TPM.  ``None`` when the component cannot fail.
        """
        for m in self.moves:
            if m.component == name and m.source == source:
                return m
        i = self.names.index(name)
        row = self.tpms[i][self.index(source)]
        targets = [self.states[j] for j, x in enumerate(row) if x and self.states[j] != source]
        if len(targets) != 1:
            return None
        t = targets[0]
        landing = source | {name} if t is FAILED else t
        return Move(name, source, t, landing)

    def all_moves(self) -> dict:
        """``{(component, source): Move}`` for every functional component of every functional state."""
        out = {}
        for s in self.functional_states():
            for name in self.names:
                if name in s:
                    continue
                m = self.move(name, s)
                if m is not None:
                    out[(name, s)] = m
        return out

    def canonical(self) -> "MisModel":
        """Same model with states in canonical order and every move recorded."""
        names = self.names
        order = sorted(range(len(self.states)), key=lambda i: state_order_key(self.states[i], names))
        states = tuple(self.states[i] for i in order)
        tpms = tuple(
            tuple(tuple(t[r][c] for c in order) for r in order) for t in self.tpms
        )
        moves = frozenset(self.all_moves().values())
        return MisModel(
            self.components,
            states,
            tpms,
            moves,
            tuple(self.pi0[i] for i in order),
            tuple(self.u[i] for i in order),
        )

    def with_reliabilities(self, assignment: Mapping[str, object]) -> "MisModel":
        """Rebuild every TPM for new component reliabilities, keeping the structure."""
        missing = set(self.names) - set(assignment)
        extra = set(assignment) - set(self.names)
        if missing or extra:
            raise PartialAssignment(
                f"assignment must cover exactly {sorted(self.names)};"
                f" missing {sorted(missing)}, unknown {sorted(extra)}"
            )
        moves = self.all_moves()
        comps, tpms = [], []
        for i, (name, _) in enumerate(self.components):
            p = to_probability(assignment[name])
            q = 1 - p
            rows = [list(r) for r in self.tpms[i]]
            for s in self.functional_states():
                if name in s:
                    continue
                m = moves.get((name, s))
                if m is None and q:
                    raise InvalidModel(f"no failure transition recorded for {name} in {self.label(s)}")
                r = self.index(s)
                rows[r] = [Fraction(0)] * len(self.states)
                rows[r][r] = p
                if m is not None:
                    rows[r][self.index(m.target)] += q
            comps.append((name, p))
            tpms.append(tuple(tuple(r) for r in rows))
        return MisModel(tuple(comps), self.states, tuple(tpms), frozenset(moves.values()), self.pi0, self.u)


def _exact(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


# -- validation ---------------------------------------------------------------

def unreachable_states(m: MisModel) -> list:
    seen = {m.states[0]} if m.states else set()
    frontier = list(seen)
    while frontier:
        s = m.index(frontier.pop())
        for t in m.tpms:
            for j, x in enumerate(t[s]):
                if x and m.states[j] not in seen:
                    seen.add(m.states[j])
                    frontier.append(m.states[j])
    return [s for s in m.functional_states() if s not in seen]


def validate_model(m: MisModel) -> list:
    """All structural violations of ``m``; an empty list means the model is valid.

    Unreachable functional states are allowed but reported through an
    :class:`UnreachableStateWarning`.
    """
    v = []
    names = m.names
    k = len(m.states)
    if len(set(names)) != len(names):
        v.append(ModelViolation("components", "-", "duplicate component names"))
    if len(set(m.states)) != k:
        v.append(ModelViolation("states", "-", "duplicate states"))
    if m.states.count(FAILED) != 1 or (m.states and m.states[-1] is not FAILED):
        v.append(ModelViolation("states", "-", "exactly one FAILED state is required, listed last"))
    if not m.states or m.states[0] != frozenset():
        v.append(ModelViolation("states", "-", "the initial all-functional state must come first"))
    for s in m.functional_states():
        if not s <= set(names):
            v.append(ModelViolation("states", str(sorted(s)), "state mentions unknown components"))
    if len(m.tpms) != len(names):
        v.append(ModelViolation("tpm", "-", f"expected {len(names)} TPMs, got {len(m.tpms)}"))
    if len(m.pi0) != k or list(m.pi0) != [1] + [0] * (k - 1):
        v.append(ModelViolation("pi0", "-", "initial distribution must be [1, 0, ..., 0]"))
    if len(m.u) != k or any(x != (s is not FAILED) for x, s in zip(m.u, m.states)):
        v.append(ModelViolation("u", "-", "u must be 1 exactly on functional states"))
    if v:
        return v

    for i, (name, p) in enumerate(m.components):
        t = m.tpms[i]
        where = f"T[{name}]"
        if len(t) != k or any(len(r) != k for r in t):
            v.append(ModelViolation("tpm", where, f"matrix must be {k}x{k}"))
            continue
        for r, s in enumerate(m.states):
            row = t[r]
            lab = m.label(s)
            if any(x < 0 or x > 1 for x in row):
                v.append(ModelViolation("probability", f"{where} row {lab}", "entries must lie in [0, 1]"))
            if sum(row) != 1:
                v.append(ModelViolation("row-sum", f"{where} row {lab}", f"row sums to {sum(row)}"))
            for c, x in enumerate(row):
                if x and not _no_repair(s, m.states[c]):
                    v.append(
                        ModelViolation(
                            "no-repair",
                            f"{where} {lab}->{m.label(m.states[c])}",
                            "transition recovers failed components",
                        )
                    )
            if s is FAILED or name in s:
                if any(x != (c == r) for c, x in enumerate(row)):
                    rule = "absorbing" if s is FAILED else "failed-identity"
                    v.append(ModelViolation(rule, f"{where} row {lab}", "row must be the identity"))
                continue
            off = [(c, x) for c, x in enumerate(row) if c != r and x]
            if row[r] != p or sum(x for _, x in off) != 1 - p:
                v.append(
                    ModelViolation(
                        "component-reliability",
                        f"{where} row {lab}",
                        f"expected stay {p} and failure mass {1 - p}",
                    )
                )
            if len(off) > 1:
                v.append(ModelViolation("single-target", f"{where} row {lab}", "failure splits across several states"))
            for c, _ in off:
                tgt = m.states[c]
                if tgt is not FAILED and name not in tgt:
                    v.append(
                        ModelViolation(
                            "component-fails",
                            f"{where} {lab}->{m.label(tgt)}",
                            f"{name} is still functional after its own failure",
                        )
                    )
    for mv in m.moves:
        where = f"move {mv.component}@{sorted(mv.source)}"
        if mv.component not in names or mv.source not in m._index or mv.target not in m._index:
            v.append(ModelViolation("moves", where, "refers to unknown component or state"))
            continue
        if mv.component in mv.source or not mv.source | {mv.component} <= mv.landing:
            v.append(ModelViolation("moves", where, "landing must contain the source and the component"))
        if mv.target is not FAILED and mv.landing != mv.target:
            v.append(ModelViolation("moves", where, "landing of a functional target must be the target"))
        i = names.index(mv.component)
        row = m.tpms[i][m.index(mv.source)]
        if 1 - m.components[i][1] and not row[m.index(mv.target)]:
            v.append(ModelViolation("moves", where, "TPM has no mass on the recorded target"))
    if not v:
        dead = unreachable_states(m)
        if dead:
            warnings.warn(
                "unreachable functional states: " + ", ".join(m.label(s) for s in dead),
                UnreachableStateWarning,
                stacklevel=2,
            )
    return v


def _no_repair(src, dst) -> bool:
    if dst is FAILED:
        return True
    if src is FAILED:
        return False
    return src <= dst


def require_valid(m: MisModel) -> None:
    v = validate_model(m)
    if v:
        raise InvalidModel("; ".join(f"[{x.rule}] {x.where}: {x.message}" for x in v[:5]))


# -- evaluation ---------------------------------------------------------------

def evaluate_reliability(m: MisModel) -> ReliabilityResult:
    """``pi0 . T_1 ... T_n . u`` in exact rational arithmetic."""
    require_valid(m)
    vec = np.array(m.pi0, dtype=object)
    for i in range(m.n):
        vec = vec @ m.matrix(i)
    value = vec @ np.array(m.u, dtype=object)
    return ReliabilityResult(Fraction(value), Method.ANALYTIC)


def evaluate_at(m: MisModel, assignment: Mapping[str, object]) -> ReliabilityResult:
    return evaluate_reliability(m.with_reliabilities(assignment))
