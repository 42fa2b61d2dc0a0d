"""Markets with restricted information.

A market bundles grid-indexed asset prices, a union-closed index system of
tradeable asset subsets, one trading filtration per index set, and a grand
filtration carrying all market information. Simple strategies hold
atom-measurable positions between finitely many dates; their wealth
processes generate the attainable terminal claims, for which a finite
generator set is produced by gain_generators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .probability import Filtration, FiniteSpace, Partition, refines
from .rationals import Rational, ZERO, rat

PriceTable = tuple[tuple[Rational, ...], ...]  # time-major: table[t][state]


def _freeze_table(table: Sequence[Sequence[Rational]]) -> PriceTable:
    return tuple(tuple(rat(v) for v in row) for row in table)


@dataclass(frozen=True)
class Market:
    """Assets, index system, trading filtrations, and grand filtration.

    Asset tables span 0..extended_horizon and the grand filtration with
    them. Trading filtrations span at least 0..horizon; a market may
    declare them further out (up to the extended horizon) when trading
    information past maturity matters, otherwise the final partition is
    repeated on demand. Shape errors raise immediately, semantic
    invariants are reported by validate_market.
    """

    space: FiniteSpace
    assets: Mapping[str, PriceTable]
    index_system: tuple[frozenset[str], ...]
    trading_filtrations: Mapping[frozenset[str], Filtration]
    grand_filtration: Filtration

    def __post_init__(self):
        n_states = len(self.space.states)
        rows = self.space.extended_horizon + 1
        frozen_assets = {}
        for aid, table in self.assets.items():
            table = _freeze_table(table)
            if len(table) != rows:
                raise ValueError(f"asset {aid!r}: price table must have {rows} time rows")
            if any(len(r) != n_states for r in table):
                raise ValueError(f"asset {aid!r}: price rows must have {n_states} entries")
            frozen_assets[aid] = table
        object.__setattr__(self, "assets", frozen_assets)
        index_system = tuple(sorted({frozenset(a) for a in self.index_system},
                                    key=lambda a: (len(a), sorted(a))))
        object.__setattr__(self, "index_system", index_system)
        filts = {frozenset(k): v for k, v in self.trading_filtrations.items()}
        object.__setattr__(self, "trading_filtrations", filts)
        if len(self.grand_filtration) != rows:
            raise ValueError(f"grand filtration must span 0..{rows - 1}")
        if self.grand_filtration.states != self.space.states:
            raise ValueError("grand filtration state set differs from the space")
        for a, f in filts.items():
            if f.states != self.space.states:
                raise ValueError(f"trading filtration for {set(a)} has a different state set")
            if not self.space.horizon + 1 <= len(f) <= rows:
                raise ValueError(
                    f"trading filtration for {set(a)} must span at least 0..{self.space.horizon} "
                    f"and at most 0..{self.space.extended_horizon}"
                )

    @property
    def asset_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.assets))

    def price(self, asset: str, t: int) -> tuple[Rational, ...]:
        return self.assets[asset][t]

    def trading_filtration(self, index_set: frozenset[str], horizon: int | None = None) -> Filtration:
        """Trading filtration of an index set over 0..horizon.

        Beyond the declared grid the final partition is repeated: no new
        information arrives unless the market declares an extension.
        """
        f = self.trading_filtrations[frozenset(index_set)]
        horizon = self.space.horizon if horizon is None else horizon
        if horizon > self.space.extended_horizon:
            raise ValueError("horizon beyond the extended grid")
        return f.extend_to(horizon + 1)

    def with_trading_filtrations(self, filtrations: Mapping[frozenset[str], Filtration]) -> "Market":
        return Market(self.space, self.assets, self.index_system, filtrations, self.grand_filtration)


def validate_market(m: Market) -> list[str]:
    """Diagnostic report of every violated market invariant; empty means valid."""
    problems: list[str] = []
    space = m.space
    ids = set(m.assets)

    members = set(m.index_system)
    for a in m.index_system:
        if not a:
            problems.append("index system contains an empty set")
        if not a <= ids:
            problems.append(f"index set {sorted(a)} names unknown assets")
    for a1 in m.index_system:
        for a2 in m.index_system:
            if a1 | a2 not in members:
                problems.append(
                    f"refining property violated: union of {sorted(a1)} and {sorted(a2)} is not in the index system"
                )
    missing = [a for a in m.index_system if a not in m.trading_filtrations]
    for a in missing:
        problems.append(f"no trading filtration declared for index set {sorted(a)}")
    extra = [a for a in m.trading_filtrations if a not in members]
    for a in extra:
        problems.append(f"trading filtration declared for unknown index set {sorted(a)}")

    for a1 in m.index_system:
        for a2 in m.index_system:
            if a1 < a2 and a1 in m.trading_filtrations and a2 in m.trading_filtrations:
                f1, f2 = m.trading_filtrations[a1], m.trading_filtrations[a2]
                for t in range(min(len(f1), len(f2))):
                    if not refines(f2.at(t), f1.at(t)):
                        problems.append(
                            f"monotonicity property violated: filtration of {sorted(a1)} is not coarser than "
                            f"that of {sorted(a2)} at t={t}"
                        )
                        break

    for a, f in m.trading_filtrations.items():
        if a not in members:
            continue
        for t in range(len(f)):
            if not refines(m.grand_filtration.at(t), f.at(t)):
                problems.append(
                    f"trading filtration of {sorted(a)} is finer than the grand filtration at t={t}"
                )
                break

    for aid, table in m.assets.items():
        for t in range(space.extended_horizon + 1):
            if not is_measurable(table[t], m.grand_filtration.at(t)):
                problems.append(f"asset {aid!r} not adapted: price at t={t} varies inside a grand-filtration atom")
                break
    return problems


def is_measurable(x: Sequence[Rational], sigma: Partition) -> bool:
    idx = {s: i for i, s in enumerate(sigma.states)}
    return all(
        len({x[idx[s]] for s in atom}) == 1
        for atom in sigma.atoms
    )


@dataclass(frozen=True)
class Strategy:
    """Piecewise-constant holdings on one index set between ordered dates.

    holdings[i] maps each traded asset to a state vector held over the
    interval (dates[i], dates[i+1]]; each vector must be measurable for the
    index set's trading filtration at dates[i].
    """

    index_set: frozenset[str]
    dates: tuple[int, ...]
    holdings: tuple[Mapping[str, tuple[Rational, ...]], ...]

    def __post_init__(self):
        object.__setattr__(self, "index_set", frozenset(self.index_set))
        object.__setattr__(self, "dates", tuple(int(t) for t in self.dates))
        if len(self.dates) < 2:
            raise ValueError("a strategy needs at least two dates")
        if any(a >= b for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("dates must be strictly increasing")
        if len(self.holdings) != len(self.dates) - 1:
            raise ValueError("one holdings map per interval between consecutive dates")
        frozen = tuple(
            {aid: tuple(rat(v) for v in vec) for aid, vec in h.items()}
            for h in self.holdings
        )
        object.__setattr__(self, "holdings", frozen)
        for h in frozen:
            if not set(h) <= self.index_set:
                raise ValueError("holdings name assets outside the index set")


def validate_strategy(m: Market, s: Strategy, horizon: int | None = None) -> list[str]:
    """Report contract violations of a strategy against a market."""
    problems: list[str] = []
    horizon = m.space.horizon if horizon is None else horizon
    if s.index_set not in set(m.index_system):
        problems.append(f"index set {sorted(s.index_set)} is not in the index system")
        return problems
    if s.dates[0] < 0 or s.dates[-1] > horizon:
        problems.append(f"dates {s.dates} leave the grid 0..{horizon}")
        return problems
    filtration = m.trading_filtration(s.index_set, horizon)
    n_states = len(m.space.states)
    for i, h in enumerate(s.holdings):
        t_prev = s.dates[i]
        sigma = filtration.at(t_prev)
        for aid, vec in h.items():
            if len(vec) != n_states:
                problems.append(f"holding vector for {aid!r} has wrong length")
            elif not is_measurable(vec, sigma):
                problems.append(
                    f"holding for {aid!r} over ({t_prev}, {s.dates[i + 1]}] is not measurable at time {t_prev}"
                )
    return problems


def wealth_process(m: Market, s: Strategy, horizon: int | None = None) -> tuple[tuple[Rational, ...], ...]:
    """Exact wealth path of a simple strategy; W_0 is identically zero.

    W_t(w) = sum over intervals (t_prev, t_next] started before t of
    holding(w) * (price(min(t_next, t), w) - price(t_prev, w)), summed over
    the traded assets.
    """
    horizon = m.space.horizon if horizon is None else horizon
    problems = validate_strategy(m, s, horizon)
    if problems:
        raise ValueError("invalid strategy: " + "; ".join(problems))
    n_states = len(m.space.states)
    wealth = [[ZERO] * n_states for _ in range(horizon + 1)]
    for t in range(1, horizon + 1):
        acc = wealth[t]
        for i, h in enumerate(s.holdings):
            t_prev, t_next = s.dates[i], s.dates[i + 1]
            if t <= t_prev:
                break
            stop = min(t_next, t)
            for aid, vec in h.items():
                now, then = m.assets[aid][stop], m.assets[aid][t_prev]
                for k in range(n_states):
                    acc[k] += vec[k] * (now[k] - then[k])
    return tuple(tuple(row) for row in wealth)


@dataclass(frozen=True)
class GainGenerator:
    """One-step gain of holding an atom indicator of one asset.

    vector[w] = 1_atom(w) * (price(step + 1, w) - price(step, w)); the
    linear span of all generators equals the attainable terminal wealths.
    """

    index_set: frozenset[str]
    asset: str
    step: int
    atom: tuple[str, ...]
    vector: tuple[Rational, ...]


def gain_generators(m: Market, horizon: int | None = None) -> list[GainGenerator]:
    """Finite generator set of the attainable-terminal-wealth space.

    Any holding over a longer interval telescopes into per-step holdings
    that stay measurable at the earlier date, so consecutive-step atom
    indicators span every simple strategy's terminal wealth. Zero vectors
    are dropped and duplicate vectors keep their first (canonical)
    provenance.
    """
    horizon = m.space.horizon if horizon is None else horizon
    if horizon > m.space.extended_horizon:
        raise ValueError("horizon beyond the extended grid")
    idx = m.space.state_index
    out: list[GainGenerator] = []
    seen: set[tuple[Rational, ...]] = set()
    for index_set in m.index_system:
        filtration = m.trading_filtration(index_set, horizon)
        for asset in sorted(index_set):
            table = m.assets[asset]
            for t in range(horizon):
                now, nxt = table[t], table[t + 1]
                for atom in filtration.at(t).atoms:
                    vec = [ZERO] * len(m.space.states)
                    for s in atom:
                        k = idx[s]
                        vec[k] = nxt[k] - now[k]
                    tvec = tuple(vec)
                    if any(v != 0 for v in tvec) and tvec not in seen:
                        seen.add(tvec)
                        out.append(GainGenerator(index_set, asset, t, atom, tvec))
    return out
