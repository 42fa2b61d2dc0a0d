"""Information delays and order-execution delays on finite markets.

An information delay rewinds each trading sigma-field to a stopped past,
an execution delay defers the grid time at which a received order is
priced. Both are stopping-time processes against a declared
delay-information filtration; this module builds the delayed filtrations
and delayed markets, inverts execution delays into information delays,
superimposes one execution delay over another, and takes pointwise minima
across brokers.

A delay table is "step-continuous" when every path moves by 0 or 1 per
grid step, which makes each path's range a full integer interval; that is
the hypothesis under which composing a delay with its inverse is the
identity on the range, and it is required wherever that identity is used.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .markets import Market
from .probability import (
    Filtration,
    StoppingProcess,
    is_subfiltration,
    refines,
    sigma_join,
    stopped_sigma_field,
    validate_stopping_process,
)


class DelayPreconditionError(ValueError):
    """A delay operation's preconditions failed; carries every violation."""

    def __init__(self, problems: Sequence[str]):
        super().__init__("; ".join(problems))
        self.problems = list(problems)


@dataclass(frozen=True)
class InformationDelayFamily:
    """One information delay per index set of the market."""

    delays: Mapping[frozenset[str], StoppingProcess]

    def __post_init__(self):
        object.__setattr__(self, "delays", {frozenset(k): v for k, v in self.delays.items()})


@dataclass(frozen=True)
class ExecutionDelayFamily:
    """One execution delay per asset, with optional strict caps.

    A cap c for asset a promises value < c everywhere; uncapped assets
    default to the top of the extended grid plus one.
    """

    delays: Mapping[str, StoppingProcess]
    caps: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "delays", dict(self.delays))
        object.__setattr__(self, "caps", {a: int(c) for a, c in self.caps.items()})

    def cap(self, asset: str, extended_horizon: int) -> int:
        return self.caps.get(asset, extended_horizon + 1)

    def reach(self, extended_horizon: int) -> int:
        """Largest grid index any delayed order can be priced at."""
        return max(self.cap(a, extended_horizon) - 1 for a in self.delays)


def validate_information_family(m: Market, fam: InformationDelayFamily) -> list[str]:
    """Diagnostic report; empty means the family is usable on this market."""
    problems: list[str] = []
    horizon = m.space.horizon
    members = set(m.index_system)
    for a in members:
        if a not in fam.delays:
            problems.append(f"no information delay for index set {sorted(a)}")
    for a, sp in fam.delays.items():
        label = f"index set {sorted(a)}"
        if a not in members:
            problems.append(f"information delay for unknown {label}")
            continue
        if sp.info.states != m.space.states:
            problems.append(f"{label}: delay information lives on a different state set")
            continue
        if sp.grid_length() != horizon + 1:
            problems.append(f"{label}: delay table must cover grid times 0..{horizon}")
            continue
        problems += [f"{label}: {p}" for p in validate_stopping_process(sp, "information")]
        if not is_subfiltration(sp.info, m.trading_filtrations[a]):
            problems.append(f"{label}: delay information is not coarser than the trading filtration")
    return problems


def validate_execution_family(m: Market, fam: ExecutionDelayFamily) -> list[str]:
    """Diagnostic report; empty means the family is usable on this market."""
    problems: list[str] = []
    horizon = m.space.horizon
    extended = m.space.extended_horizon
    for a in m.assets:
        if a not in fam.delays:
            problems.append(f"no execution delay for asset {a!r}")
    for a, sp in fam.delays.items():
        label = f"asset {a!r}"
        if a not in m.assets:
            problems.append(f"execution delay for unknown {label}")
            continue
        if sp.info.states != m.space.states:
            problems.append(f"{label}: delay information lives on a different state set")
            continue
        if sp.grid_length() != horizon + 1:
            problems.append(f"{label}: delay table must cover grid times 0..{horizon}")
            continue
        if len(sp.info) != extended + 1:
            problems.append(f"{label}: delay information must cover grid times 0..{extended}")
            continue
        problems += [f"{label}: {p}" for p in validate_stopping_process(sp, "execution")]
        if not is_subfiltration(sp.info, m.grand_filtration):
            problems.append(f"{label}: delay information is not coarser than the grand filtration")
        cap = fam.cap(a, extended)
        if not 1 <= cap <= extended + 2:
            problems.append(f"{label}: cap {cap} outside 1..{extended + 1}")
        for t, row in enumerate(sp.values):
            bad = [v for v in row if v >= cap]
            if bad:
                problems.append(f"{label}: cap {cap} violated at t={t} (value {bad[0]})")
                break
    return problems


def is_step_continuous(sp: StoppingProcess) -> bool:
    """Every path moves by 0 or 1 per grid step."""
    return all(
        b - a in (0, 1)
        for row_now, row_next in zip(sp.values, sp.values[1:])
        for a, b in zip(row_now, row_next)
    )


def delayed_trading_filtration(f: Filtration, delta: StoppingProcess) -> Filtration:
    """Filtration t -> sigma-field of the delta(t)-past of f.

    delta must be a valid information delay whose information is coarser
    than f; path-wise monotonicity makes the stopped fields refine in t.
    """
    problems = validate_stopping_process(delta, "information")
    if problems:
        raise DelayPreconditionError(problems)
    if not is_subfiltration(delta.info, f):
        raise DelayPreconditionError(["delay information is not coarser than the delayed filtration"])
    return Filtration(tuple(stopped_sigma_field(f, delta.at(t)) for t in range(delta.grid_length())))


def large_delayed_filtrations(m: Market, fam: InformationDelayFamily) -> dict[frozenset[str], Filtration]:
    """Recursively delayed trading filtrations for the whole index system.

    Each index set joins its own delayed filtration with the results of
    every proper subset in the system, so the delayed family again agrees
    with the index system: monotone in the set order and refining in time.
    """
    problems = validate_information_family(m, fam)
    if problems:
        raise DelayPreconditionError(problems)
    out: dict[frozenset[str], Filtration] = {}
    for index_set in m.index_system:  # canonical order puts subsets first
        own = delayed_trading_filtration(m.trading_filtrations[index_set], fam.delays[index_set])
        subs = [out[a] for a in m.index_system if a < index_set]
        if subs:
            length = len(own)
            own = Filtration(tuple(
                sigma_join([own.at(t)] + [s.at(t) for s in subs]) for t in range(length)
            ))
        out[index_set] = own
    return out


def information_delayed_market(m: Market, fam: InformationDelayFamily) -> Market:
    """The market with trading filtrations replaced by the delayed family."""
    return m.with_trading_filtrations(large_delayed_filtrations(m, fam))


def check_coarseness(m: Market, fam: InformationDelayFamily) -> bool:
    """Delayed trading fields never exceed the originals; true for valid input."""
    delayed = large_delayed_filtrations(m, fam)
    for index_set, f in delayed.items():
        original = m.trading_filtrations[index_set]
        for t in range(len(f)):
            if not refines(original.at(t), f.at(t)):
                return False
    return True


def _extended_rows(sp: StoppingProcess, upto: int) -> list[tuple[int, ...]]:
    """Delay rows for order times 0..upto, pushing past the table's end.

    Beyond its grid a delay keeps its final backlog: row(t) = max(row(T), t),
    which preserves monotonicity, the stopping property, bounds, and
    step-continuity.
    """
    rows = list(sp.values[: upto + 1])
    last = sp.values[-1]
    for t in range(sp.grid_length(), upto + 1):
        rows.append(tuple(max(v, t) for v in last))
    return rows


def delayed_market(m: Market, fam: ExecutionDelayFamily, extended_horizon: int | None = None) -> Market:
    """Reprice every asset at its delayed order time.

    The result trades on the same filtrations over the same grid, prices
    asset a at t as the original price at the stopped time, and carries
    the grand filtration joined over the per-asset stopped sigma-fields.
    With extended_horizon > horizon the delayed price table and grand
    filtration are continued past maturity so the result can itself be
    checked or delayed on a longer grid.
    """
    problems = validate_execution_family(m, fam)
    if problems:
        raise DelayPreconditionError(problems)
    space = m.space
    upto = space.horizon if extended_horizon is None else extended_horizon
    if not space.horizon <= upto <= space.extended_horizon:
        raise ValueError(f"extended horizon {upto} outside {space.horizon}..{space.extended_horizon}")
    n_states = len(space.states)
    rows_by_asset = {a: _extended_rows(fam.delays[a], upto) for a in m.assets}
    for a, rows in rows_by_asset.items():
        top = max(max(r) for r in rows)
        if top > space.extended_horizon:
            raise ValueError(f"asset {a!r}: delayed time {top} exceeds the extended grid")

    new_assets = {}
    for a, table in m.assets.items():
        rows = rows_by_asset[a]
        new_assets[a] = tuple(
            tuple(table[rows[t][i]][i] for i in range(n_states)) for t in range(upto + 1)
        )
    grand = Filtration(tuple(
        sigma_join([stopped_sigma_field(m.grand_filtration, rows_by_asset[a][t]) for a in sorted(m.assets)])
        for t in range(upto + 1)
    ))
    new_space = type(space)(space.states, space.probability, space.horizon, upto)
    trading = {
        a: f if len(f) <= upto + 1 else f.restrict(upto + 1)
        for a, f in m.trading_filtrations.items()
    }
    return Market(new_space, new_assets, m.index_system, trading, grand)


def invert_delay(pi: StoppingProcess) -> StoppingProcess:
    """The information delay matching an execution delay.

    value(t) is the first order time whose execution reaches t, capped at
    the end of the trading grid; its information at t is the delay
    information stopped at pi(t), so the inverse is a stopping time there.
    """
    problems = validate_stopping_process(pi, "execution")
    if problems:
        raise DelayPreconditionError(problems)
    top = pi.grid_length() - 1
    n_states = len(pi.states)
    values = []
    for t in range(top + 1):
        row = []
        for i in range(n_states):
            hit = next((s for s in range(top + 1) if pi.values[s][i] >= t), top)
            row.append(min(hit, top))
        values.append(tuple(row))
    info = Filtration(tuple(stopped_sigma_field(pi.info, pi.at(t)) for t in range(top + 1)))
    return StoppingProcess(tuple(values), info)


def superimpose_delays(fam: ExecutionDelayFamily, stronger: ExecutionDelayFamily) -> ExecutionDelayFamily:
    """The residual delay that turns the fam-delayed market into the stronger one.

    Requires fam <= stronger pointwise, step-continuous fam, and fam's
    information coarser than stronger's. The result maps order time t to
    the first fam-delayed time whose original price index reaches
    stronger(t); pricing the fam-delayed market there reproduces the
    stronger-delayed prices exactly.
    """
    problems: list[str] = []
    if set(fam.delays) != set(stronger.delays):
        raise DelayPreconditionError(["families delay different asset sets"])
    for a in fam.delays:
        base, tilde = fam.delays[a], stronger.delays[a]
        label = f"asset {a!r}"
        problems += [f"{label}: {p}" for p in validate_stopping_process(base, "execution")]
        problems += [f"{label}: {p}" for p in validate_stopping_process(tilde, "execution")]
        if base.grid_length() != tilde.grid_length():
            problems.append(f"{label}: delay tables cover different grids")
            continue
        if not is_step_continuous(base):
            problems.append(f"{label}: base delay is not step-continuous")
        if any(
            b > s for rb, rs in zip(base.values, tilde.values) for b, s in zip(rb, rs)
        ):
            problems.append(f"{label}: base delay exceeds the stronger delay somewhere")
        if not is_subfiltration(base.info, tilde.info):
            problems.append(f"{label}: base delay information is not coarser than the stronger one")
    if problems:
        raise DelayPreconditionError(problems)

    out: dict[str, StoppingProcess] = {}
    caps: dict[str, int] = {}
    for a in fam.delays:
        base, tilde = fam.delays[a], stronger.delays[a]
        top = base.grid_length() - 1
        info_top = len(base.info) - 1
        ext = _extended_rows(base, info_top)
        n_states = len(base.states)
        values = []
        for t in range(top + 1):
            row = []
            for i in range(n_states):
                target = tilde.values[t][i]
                hit = next(s for s in range(info_top + 1) if ext[s][i] >= target)
                row.append(max(t, hit))
            values.append(tuple(row))
        info = Filtration(tuple(
            stopped_sigma_field(tilde.info, ext[u]) for u in range(info_top + 1)
        ))
        out[a] = StoppingProcess(tuple(values), info)
        if a in stronger.caps:
            caps[a] = stronger.caps[a]
    return ExecutionDelayFamily(out, caps)


def min_delay(families: Sequence[ExecutionDelayFamily]) -> ExecutionDelayFamily:
    """Pointwise fastest execution across brokers sharing delay information."""
    if not families:
        raise ValueError("min_delay of an empty list")
    assets = set(families[0].delays)
    for fam in families[1:]:
        if set(fam.delays) != assets:
            raise ValueError("families delay different asset sets")
    out: dict[str, StoppingProcess] = {}
    caps: dict[str, int] = {}
    for a in sorted(assets):
        procs = [fam.delays[a] for fam in families]
        info = procs[0].info
        for p in procs[1:]:
            if p.info != info:
                raise DelayPreconditionError([f"asset {a!r}: broker delay informations differ"])
            if p.grid_length() != procs[0].grid_length():
                raise DelayPreconditionError([f"asset {a!r}: broker delay tables cover different grids"])
        values = tuple(
            tuple(min(p.values[t][i] for p in procs) for i in range(len(procs[0].states)))
            for t in range(procs[0].grid_length())
        )
        out[a] = StoppingProcess(values, info)
        declared = [fam.caps[a] for fam in families if a in fam.caps]
        if declared:
            caps[a] = min(declared)
    return ExecutionDelayFamily(out, caps)


def lint_family_ordering(m: Market, fam: InformationDelayFamily) -> list[str]:
    """Optional style check: larger index sets should not be fresher.

    Flags pairs A inside A' where the delay of the superset overtakes the
    subset's delay somewhere, which lets the recursion leak faster
    information onto the smaller set.
    """
    notes: list[str] = []
    for small in m.index_system:
        for big in m.index_system:
            if small < big and small in fam.delays and big in fam.delays:
                sp_small, sp_big = fam.delays[small], fam.delays[big]
                for t in range(min(sp_small.grid_length(), sp_big.grid_length())):
                    if any(b > s for s, b in zip(sp_small.values[t], sp_big.values[t])):
                        notes.append(
                            f"delay of {sorted(big)} overtakes delay of subset {sorted(small)} at t={t}"
                        )
                        break
    return notes


def enlarged_trading_filtrations(m: Market, fam: ExecutionDelayFamily) -> dict[frozenset[str], Filtration]:
    """Per index set: the join over its assets of the pi-stopped trading field."""
    out = {}
    for index_set in m.index_system:
        f_ext = m.trading_filtration(index_set, m.space.extended_horizon)
        parts = []
        for t in range(m.space.horizon + 1):
            stopped = [stopped_sigma_field(f_ext, fam.delays[a].at(t)) for a in sorted(index_set)]
            parts.append(sigma_join(stopped))
        out[index_set] = Filtration(tuple(parts))
    return out


def representation_check(m: Market, fam: ExecutionDelayFamily) -> bool:
    """Does inverting the execution delays recover the trading filtrations?

    Builds the enlarged filtrations (trading fields stopped at the
    execution times), the inverse information-delay family (per index set
    the pointwise minimum over its assets), recursively delays the
    enlarged family, and compares atoms with the original trading
    filtrations at every time.

    Preconditions (violations raise, they are never reported as False):
    singleton index sets for all assets, step-continuous delays starting
    at zero, and delay information coarser than every containing trading
    filtration.
    """
    problems = validate_execution_family(m, fam)
    for a in sorted(m.assets):
        if frozenset({a}) not in set(m.index_system):
            problems.append(f"asset {a!r} has no singleton index set")
        sp = fam.delays.get(a)
        if sp is None:
            continue
        if not is_step_continuous(sp):
            problems.append(f"asset {a!r}: delay is not step-continuous")
        if any(v != 0 for v in sp.values[0]):
            problems.append(f"asset {a!r}: delay does not start at zero")
        for index_set in m.index_system:
            if a in index_set:
                f_ext = m.trading_filtration(index_set, m.space.extended_horizon)
                if not is_subfiltration(sp.info, f_ext):
                    problems.append(
                        f"asset {a!r}: delay information is not coarser than the trading "
                        f"filtration of {sorted(index_set)}"
                    )
    if problems:
        raise DelayPreconditionError(problems)

    enlarged = enlarged_trading_filtrations(m, fam)
    inverses = {a: invert_delay(fam.delays[a]) for a in m.assets}
    deltas = {}
    for index_set in m.index_system:
        procs = [inverses[a] for a in sorted(index_set)]
        values = tuple(
            tuple(min(p.values[t][i] for p in procs) for i in range(len(m.space.states)))
            for t in range(m.space.horizon + 1)
        )
        deltas[index_set] = StoppingProcess(values, enlarged[index_set])
    shadow = m.with_trading_filtrations(enlarged)
    recovered = large_delayed_filtrations(shadow, InformationDelayFamily(deltas))
    for index_set in m.index_system:
        original = m.trading_filtrations[index_set]
        back = recovered[index_set]
        for t in range(m.space.horizon + 1):
            if original.at(t).atoms != back.at(t).atoms:
                return False
    return True
