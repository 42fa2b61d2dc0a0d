"""Finite filtered probability spaces.

Sigma-fields on a finite state set are represented by their atom
partitions, so every measurability question reduces to a union-of-atoms
test and every conditional expectation to exact weighted block averages.
Filtrations are refining sequences of partitions over an integer time
grid; stopping-time processes (the raw material for market delays) are
per-time tables of grid values validated against a delay-information
filtration.

Everything is immutable and exact: state probabilities, conditional
expectations and stopped sigma-fields are computed in rational
arithmetic with no tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .rationals import ONE, Rational, rat


@dataclass(frozen=True)
class FiniteSpace:
    """Finite state set with strictly positive probabilities and a time grid.

    The trading grid is 0..horizon; prices may extend to extended_horizon
    to make room for order executions that land after maturity.
    """

    states: tuple[str, ...]
    probability: Mapping[str, Rational]
    horizon: int
    extended_horizon: int

    def __post_init__(self):
        if len(self.states) == 0:
            raise ValueError("state set is empty")
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate state names")
        if self.horizon < 1:
            raise ValueError("grid horizon must be at least 1")
        if self.extended_horizon < self.horizon:
            raise ValueError("extended horizon must be >= horizon")
        if set(self.probability) != set(self.states):
            raise ValueError("probability keys do not match the state set")
        weights = [rat(self.probability[s]) for s in self.states]
        if any(w <= 0 for w in weights):
            raise ValueError("all state probabilities must be strictly positive")
        if sum(weights) != ONE:
            raise ValueError("probabilities must sum to exactly 1")
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "probability", dict(zip(self.states, weights)))

    @classmethod
    def uniform(cls, states: Sequence[str], horizon: int, extended_horizon: int | None = None) -> "FiniteSpace":
        n = len(states)
        prob = {s: rat(1, n) for s in states}
        if extended_horizon is None:
            extended_horizon = horizon
        return cls(tuple(states), prob, horizon, extended_horizon)

    @cached_property
    def state_index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.states)}

    @cached_property
    def weights(self) -> tuple[Rational, ...]:
        return tuple(self.probability[s] for s in self.states)

    def index(self, state: str) -> int:
        return self.state_index[state]


@dataclass(frozen=True)
class Partition:
    """A sigma-field on a finite state set, given by its atoms.

    Canonical form: each atom lists states in universe order and atoms are
    ordered by the index of their smallest state, so equal sigma-fields
    compare (and serialize) identically.
    """

    states: tuple[str, ...]
    atoms: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        seen: set[str] = set()
        for atom in self.atoms:
            if not atom:
                raise ValueError("empty atom")
            for s in atom:
                if s in seen:
                    raise ValueError(f"state {s!r} appears in two atoms")
                seen.add(s)
        if seen != set(self.states):
            raise ValueError("atoms do not cover the state set")

    @classmethod
    def of(cls, states: Sequence[str], atoms: Iterable[Iterable[str]]) -> "Partition":
        """Canonicalize arbitrary atom collections (sets, lists, any order)."""
        states = tuple(states)
        order = {s: i for i, s in enumerate(states)}
        normal = [tuple(sorted(atom, key=order.__getitem__)) for atom in atoms]
        normal.sort(key=lambda a: order[a[0]])
        return cls(states, tuple(normal))

    @classmethod
    def trivial(cls, states: Sequence[str]) -> "Partition":
        return cls(tuple(states), (tuple(states),))

    @classmethod
    def discrete(cls, states: Sequence[str]) -> "Partition":
        return cls(tuple(states), tuple((s,) for s in states))

    @classmethod
    def from_labels(cls, states: Sequence[str], labels: Sequence) -> "Partition":
        """Group states that share a label; labels may be any hashables."""
        if len(labels) != len(states):
            raise ValueError("one label per state required")
        groups: dict = {}
        for s, lab in zip(states, labels):
            groups.setdefault(lab, []).append(s)
        return cls.of(states, groups.values())

    @cached_property
    def atom_index(self) -> dict[str, int]:
        return {s: i for i, atom in enumerate(self.atoms) for s in atom}

    def atom_of(self, state: str) -> tuple[str, ...]:
        return self.atoms[self.atom_index[state]]

    def labels(self) -> tuple[int, ...]:
        """Atom id per state, aligned with the universe order."""
        return tuple(self.atom_index[s] for s in self.states)


def refines(fine: Partition, coarse: Partition) -> bool:
    """True iff every atom of `fine` sits inside an atom of `coarse`.

    Orientation: refines(f, c) holds exactly when the sigma-field of c is
    contained in that of f.
    """
    if fine.states != coarse.states:
        raise ValueError("partitions over different state sets")
    coarse_of = coarse.atom_index
    return all(
        len({coarse_of[s] for s in atom}) == 1
        for atom in fine.atoms
    )


def sigma_join(parts: Sequence[Partition]) -> Partition:
    """Coarsest common refinement: the sigma-field generated by the union.

    Atoms are the nonempty intersections of one atom from each input.
    """
    if not parts:
        raise ValueError("sigma_join of an empty list")
    states = parts[0].states
    for p in parts[1:]:
        if p.states != states:
            raise ValueError("partitions over different state sets")
    keys = [tuple(p.atom_index[s] for p in parts) for s in states]
    return Partition.from_labels(states, keys)


def sigma_meet(parts: Sequence[Partition]) -> Partition:
    """Finest partition coarser than every input: the intersection sigma-field.

    Atoms are the connected components when every input atom is read as a
    hyperedge linking its states.
    """
    if not parts:
        raise ValueError("sigma_meet of an empty list")
    states = parts[0].states
    for p in parts[1:]:
        if p.states != states:
            raise ValueError("partitions over different state sets")
    parent = {s: s for s in states}

    def find(s: str) -> str:
        while parent[s] != s:
            parent[s] = parent[parent[s]]
            s = parent[s]
        return s

    for p in parts:
        for atom in p.atoms:
            root = find(atom[0])
            for s in atom[1:]:
                parent[find(s)] = root
    return Partition.from_labels(states, [find(s) for s in states])


def conditional_expectation(
    x: Sequence[Rational],
    sigma: Partition,
    q: Sequence[Rational],
) -> tuple[Rational, ...]:
    """Exact conditional expectation of x given sigma under the weights q.

    x and q are state-indexed in universe order; q must be strictly
    positive. The result is constant on each atom, equal to the q-weighted
    average of x over that atom.
    """
    n = len(sigma.states)
    if len(x) != n or len(q) != n:
        raise ValueError("vector length does not match the state set")
    if any(w <= 0 for w in q):
        raise ValueError("weights must be strictly positive")
    idx = {s: i for i, s in enumerate(sigma.states)}
    out: list[Rational] = [None] * n  # type: ignore[list-item]
    for atom in sigma.atoms:
        mass = sum(q[idx[s]] for s in atom)
        if mass == 0:
            raise ArithmeticError("zero-mass atom under strictly positive weights")
        avg = sum(q[idx[s]] * x[idx[s]] for s in atom) / mass
        for s in atom:
            out[idx[s]] = avg
    return tuple(out)


@dataclass(frozen=True)
class Filtration:
    """A refining sequence of partitions indexed by grid times 0..len-1."""

    partitions: tuple[Partition, ...]

    def __post_init__(self):
        if not self.partitions:
            raise ValueError("empty filtration")
        states = self.partitions[0].states
        for t, p in enumerate(self.partitions):
            if p.states != states:
                raise ValueError("filtration mixes state sets")
            if t > 0 and not refines(p, self.partitions[t - 1]):
                raise ValueError(f"partition at time {t} does not refine time {t - 1}")

    @classmethod
    def constant(cls, partition: Partition, length: int) -> "Filtration":
        return cls(tuple(partition for _ in range(length)))

    @property
    def states(self) -> tuple[str, ...]:
        return self.partitions[0].states

    def __len__(self) -> int:
        return len(self.partitions)

    def at(self, t: int) -> Partition:
        if not 0 <= t < len(self.partitions):
            raise IndexError(f"time {t} outside filtration grid 0..{len(self.partitions) - 1}")
        return self.partitions[t]

    def restrict(self, length: int) -> "Filtration":
        if length > len(self.partitions):
            raise ValueError("cannot restrict beyond current length")
        return Filtration(self.partitions[:length])

    def extend_to(self, length: int) -> "Filtration":
        """Extend past the grid by repeating the final partition."""
        if length <= len(self.partitions):
            return self.restrict(length)
        pad = (self.partitions[-1],) * (length - len(self.partitions))
        return Filtration(self.partitions + pad)


def is_subfiltration(coarse: Filtration, fine: Filtration) -> bool:
    """True iff coarse.at(t) is coarser than fine.at(t) for every shared t.

    The comparison runs over the shorter of the two grids.
    """
    n = min(len(coarse), len(fine))
    return all(refines(fine.at(t), coarse.at(t)) for t in range(n))


@dataclass(frozen=True)
class StoppingProcess:
    """A time-indexed table of grid-valued stopping times with its information.

    values[t][i] is the stopped grid time for order time t and state i (in
    the universe order of `info`). Validity (stopping property, bounds,
    path-wise monotonicity) is checked by validate_stopping_process, not by
    the constructor, so diagnostic reports can be produced for bad tables.
    """

    values: tuple[tuple[int, ...], ...]
    info: Filtration

    def __post_init__(self):
        n = len(self.info.states)
        if not self.values:
            raise ValueError("empty value table")
        for row in self.values:
            if len(row) != n:
                raise ValueError("value row length differs from state count")
        object.__setattr__(
            self, "values", tuple(tuple(int(v) for v in row) for row in self.values)
        )

    @classmethod
    def deterministic(cls, schedule: Sequence[int], info: Filtration) -> "StoppingProcess":
        n = len(info.states)
        return cls(tuple((int(v),) * n for v in schedule), info)

    @classmethod
    def identity(cls, grid_length: int, info: Filtration) -> "StoppingProcess":
        return cls.deterministic(range(grid_length), info)

    @property
    def states(self) -> tuple[str, ...]:
        return self.info.states

    def grid_length(self) -> int:
        return len(self.values)

    def at(self, t: int) -> tuple[int, ...]:
        return self.values[t]


def is_stopping_time(tau: Sequence[int], f: Filtration) -> bool:
    """{tau <= s} must be a union of atoms of f.at(s) for every s."""
    states = f.states
    idx = {st: i for i, st in enumerate(states)}
    if len(tau) != len(states):
        raise ValueError("stopping-time vector length differs from state count")
    for s in range(len(f)):
        for atom in f.at(s).atoms:
            hits = [tau[idx[st]] <= s for st in atom]
            if any(hits) and not all(hits):
                return False
    return True


def stopped_sigma_field(f: Filtration, tau: Sequence[int]) -> Partition:
    """The sigma-field of the tau-past, as a partition.

    tau must be a stopping time for f with values inside f's grid. The
    atoms are the atoms A of f.at(s) with A contained in {tau = s}; the
    result F satisfies the definitional test that F ∩ {tau <= u} is
    measurable at every u.
    """
    states = f.states
    idx = {st: i for i, st in enumerate(states)}
    if len(tau) != len(states):
        raise ValueError("stopping-time vector length differs from state count")
    for v in tau:
        if not 0 <= v < len(f):
            raise ValueError(f"stopped time {v} escapes the filtration grid")
    atoms: list[tuple[str, ...]] = []
    for s in sorted(set(tau)):
        part = f.at(s)
        for atom in part.atoms:
            inside = [tau[idx[st]] == s for st in atom]
            if any(inside):
                if not all(inside):
                    raise ValueError("tau is not a stopping time for this filtration")
                atoms.append(atom)
    return Partition.of(states, atoms)


_INFORMATION = "information"
_EXECUTION = "execution"


def validate_stopping_process(sp: StoppingProcess, mode: str) -> list[str]:
    """Diagnostic report for a delay table; empty list means valid.

    Checks, per order time t: the stopping property of sp.values[t] against
    sp.info, the bound for the mode (information: 0 <= value <= t;
    execution: t <= value <= top of the info grid), and path-wise
    monotonicity across t.
    """
    if mode not in (_INFORMATION, _EXECUTION):
        raise ValueError(f"unknown mode {mode!r}; use 'information' or 'execution'")
    problems: list[str] = []
    states = sp.states
    idx = {st: i for i, st in enumerate(states)}
    top = len(sp.info) - 1
    for t, row in enumerate(sp.values):
        for st, v in zip(states, row):
            if mode == _INFORMATION and not 0 <= v <= t:
                problems.append(f"information bound violated: value {v} at (t={t}, state={st}) outside [0, {t}]")
            if mode == _EXECUTION and not t <= v <= top:
                problems.append(f"execution bound violated: value {v} at (t={t}, state={st}) outside [{t}, {top}]")
        for s in range(len(sp.info)):
            for atom in sp.info.at(s).atoms:
                hits = [row[idx[st]] <= s for st in atom]
                if any(hits) and not all(hits):
                    problems.append(
                        f"stopping property violated at t={t}: {{value <= {s}}} cuts atom {atom} of the information"
                    )
                    break
            else:
                continue
            break
    for t in range(len(sp.values) - 1):
        for st, a, b in zip(states, sp.values[t], sp.values[t + 1]):
            if a > b:
                problems.append(f"path-wise monotonicity violated at state {st}: value({t})={a} > value({t + 1})={b}")
    return problems
