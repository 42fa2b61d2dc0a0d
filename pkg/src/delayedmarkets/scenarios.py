"""Structured and random market generators plus experiment harnesses.

Markets built backward from a random strictly positive measure are free of
free lunches by construction, fully random ones usually are not; both feed
the delay-inheritance, superimposition, multi-broker and representation
harnesses, which assert exact theorem-level facts (a failing trial is a
bug, never noise) and report reproduction material for every failure.

All randomness flows from a config seed through per-trial child generators
derived by stable string seeding, so any single trial can be replayed in
isolation.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from typing import Callable

from .arbitrage import (
    FreeLunch,
    MartingaleMeasureCertificate,
    NoFreeLunch,
    check_naflp,
    verify_certificate,
)
from .delays import (
    DelayPreconditionError,
    ExecutionDelayFamily,
    InformationDelayFamily,
    check_coarseness,
    delayed_market,
    information_delayed_market,
    min_delay,
    representation_check,
    superimpose_delays,
    validate_execution_family,
    validate_information_family,
)
from .markets import Market, validate_market
from .probability import (
    Filtration,
    FiniteSpace,
    Partition,
    StoppingProcess,
    conditional_expectation,
    refines,
    sigma_join,
    sigma_meet,
)
from .rationals import Rational, rat


@dataclass(frozen=True)
class ScenarioConfig:
    """Upper bounds and knobs for generated scenarios; sizes are drawn per trial."""

    seed: int = 0
    num_states: int = 10
    grid: int = 3                  # trading horizon N
    extension: int = 5             # extended horizon for prices
    num_assets: int = 2
    max_index_sets: int = 4
    lookahead: int = 1
    brokers: int = 3
    state_cap: int = 2 ** 14

    def __post_init__(self):
        positive = ("num_states", "grid", "num_assets", "max_index_sets", "brokers")
        for name in positive:
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.lookahead < 0:
            raise ValueError("lookahead must be nonnegative")
        if self.extension < self.grid:
            raise ValueError("extension must be at least the grid length")
        if self.state_cap < 2:
            raise ValueError("state_cap must allow at least two states")


def _rng(seed, *path) -> random.Random:
    return random.Random(":".join([str(seed), *map(str, path)]))


# ---------------------------------------------------------------------------
# random building blocks


def random_positive_measure(rng: random.Random, states) -> dict[str, Rational]:
    weights = [rng.randint(1, 9) for _ in states]
    total = sum(weights)
    return {s: rat(w, total) for s, w in zip(states, weights)}


def _random_split(rng: random.Random, part: Partition, prob: float = 0.6) -> Partition:
    atoms = []
    for atom in part.atoms:
        if len(atom) >= 2 and rng.random() < prob:
            shuffled = list(atom)
            rng.shuffle(shuffled)
            cut = rng.randint(1, len(shuffled) - 1)
            atoms.append(shuffled[:cut])
            atoms.append(shuffled[cut:])
        else:
            atoms.append(list(atom))
    return Partition.of(part.states, atoms)


def random_refining_filtration(rng: random.Random, states, length: int) -> Filtration:
    current = Partition.trivial(states)
    if len(states) > 1 and rng.random() < 0.2:
        current = _random_split(rng, current)
    parts = [current]
    for _ in range(length - 1):
        current = _random_split(rng, current)
        parts.append(current)
    return Filtration(tuple(parts))


def random_time_change(rng: random.Random, length: int, jumps=(0, 1, 1, 2)) -> list[int]:
    g = [0]
    for t in range(1, length):
        g.append(min(t, g[-1] + rng.choice(jumps)))
    return g


def random_subfiltration(rng: random.Random, f: Filtration, length: int | None = None) -> Filtration:
    """A filtration coarser than f at every time: trivial or a time change of f."""
    length = len(f) if length is None else length
    if rng.random() < 0.25:
        return Filtration.constant(Partition.trivial(f.states), length)
    g = random_time_change(rng, length)
    return Filtration(tuple(f.at(min(g[t], len(f) - 1)) for t in range(length)))


def random_stopping_time(rng: random.Random, f: Filtration, top: int, stop_prob: float = 0.35) -> list[int]:
    """Scan the grid and stop whole atoms at random; everyone stops by `top`."""
    states = f.states
    tau = {s: top for s in states}
    alive = set(states)
    for s in range(min(top, len(f) - 1) + 1):
        for atom in f.at(s).atoms:
            if atom[0] in alive and (s == top or rng.random() < stop_prob):
                for st in atom:
                    tau[st] = s
                alive -= set(atom)
    return [tau[s] for s in states]


def _random_info_values(rng: random.Random, info: Filtration, horizon: int) -> tuple[tuple[int, ...], ...]:
    """A valid information-delay table: monotone, 0 <= value <= t, stopping."""
    n = len(info.states)
    kind = rng.choice(("zero", "deterministic", "frozen", "mixed"))
    if kind == "zero":
        return tuple(tuple(t for _ in range(n)) for t in range(horizon + 1))
    schedule = random_time_change(rng, horizon + 1)
    if kind == "deterministic":
        return tuple(tuple(schedule[t] for _ in range(n)) for t in range(horizon + 1))
    tau = random_stopping_time(rng, info, horizon)
    if kind == "frozen":
        # information freezes at tau: delta(t) = min(tau, t)
        return tuple(tuple(min(tau[i], t) for i in range(n)) for t in range(horizon + 1))
    return tuple(
        tuple(max(schedule[t], min(tau[i], t)) for i in range(n)) for t in range(horizon + 1)
    )


def _random_exec_values(
    rng: random.Random,
    info: Filtration,
    horizon: int,
    top: int,
    continuous: bool,
) -> tuple[tuple[int, ...], ...]:
    """A valid execution-delay table with values in [t, top]."""
    n = len(info.states)
    jumps = (0, 1) if continuous else (0, 1, 1, 2, 3)
    d = [min(top, rng.randint(0, 2))]
    for t in range(1, horizon + 1):
        d.append(min(top, max(t, d[-1] + rng.choice(jumps))))
    kind = rng.choice(("identity", "deterministic", "queue", "mixed"))
    if kind == "identity":
        return tuple(tuple(t for _ in range(n)) for t in range(horizon + 1))
    if kind == "deterministic":
        return tuple(tuple(d[t] for _ in range(n)) for t in range(horizon + 1))
    tau = random_stopping_time(rng, info, top)
    queue = [tuple(min(top, max(tau[i], t)) for i in range(n)) for t in range(horizon + 1)]
    if kind == "queue":
        return tuple(queue)
    return tuple(
        tuple(min(d[t], queue[t][i]) for i in range(n)) for t in range(horizon + 1)
    )


def _delay_info_for_asset(rng: random.Random, m: Market, asset: str) -> Filtration:
    """Delay information for one asset: coarser than every containing trading
    filtration at all times, and frozen past the trading horizon."""
    containing = [m.trading_filtrations[a] for a in m.index_system if asset in a]
    horizon, extended = m.space.horizon, m.space.extended_horizon
    if containing:
        meet = Filtration(tuple(
            sigma_meet([f.at(t) for f in containing]) for t in range(horizon + 1)
        ))
    else:
        meet = Filtration.constant(Partition.trivial(m.space.states), horizon + 1)
    g = random_time_change(rng, extended + 1)
    return Filtration(tuple(meet.at(min(g[u], horizon)) for u in range(extended + 1)))


def gen_random_delay(
    cfg: ScenarioConfig,
    mode: str,
    m: Market,
    *,
    continuous: bool = False,
    strict: bool = False,
    capped: bool = False,
    rng: random.Random | None = None,
):
    """Random valid delay family of the requested mode for a market."""
    rng = rng if rng is not None else _rng(cfg.seed, "delay", mode)
    horizon = m.space.horizon
    extended = m.space.extended_horizon
    if mode == "information":
        delays = {}
        for index_set in m.index_system:
            info = random_subfiltration(rng, m.trading_filtrations[index_set])
            delays[index_set] = StoppingProcess(_random_info_values(rng, info, horizon), info)
        return InformationDelayFamily(delays)
    if mode != "execution":
        raise ValueError(f"unknown delay mode {mode!r}")
    delays = {}
    caps = {}
    for asset in sorted(m.assets):
        info = _delay_info_for_asset(rng, m, asset)
        cap = rng.randint(horizon + 1, extended + 1) if capped else extended + 1
        top = cap - 1
        if strict:
            room = top - horizon
            if room < 0:
                raise ValueError("strict monotonicity impossible: cap leaves no room past maturity")
            base = random_stopping_time(rng, info, room, stop_prob=0.5)
            values = tuple(tuple(base[i] + t for i in range(len(info.states))) for t in range(horizon + 1))
        else:
            values = _random_exec_values(rng, info, horizon, top, continuous)
        delays[asset] = StoppingProcess(values, info)
        if capped:
            caps[asset] = cap
    return ExecutionDelayFamily(delays, caps)


# ---------------------------------------------------------------------------
# market generators


def _union_closed_index_system(rng: random.Random, assets, max_sets: int, singletons: bool):
    ids = list(assets)
    if singletons:
        family = {frozenset([a]) for a in ids}
        family.add(frozenset(ids))
        extra = {frozenset(rng.sample(ids, rng.randint(1, len(ids)))) for _ in range(2)}
        family |= extra
    else:
        for attempt in range(6):
            k = rng.randint(1, max(1, min(max_sets - 1, len(ids))))
            family = {frozenset(rng.sample(ids, rng.randint(1, len(ids)))) for _ in range(k)}
            family = _close_under_union(family)
            if len(family) <= max_sets:
                break
        else:
            family = {frozenset(ids)}
    return _close_under_union(family)


def _close_under_union(family: set[frozenset]) -> set[frozenset]:
    closed = set(family)
    while True:
        fresh = {a | b for a in closed for b in closed} - closed
        if not fresh:
            return closed
        closed |= fresh


def _random_filtration_bundle(rng: random.Random, space: FiniteSpace, index_system):
    """Grand filtration plus monotone trading filtrations built from
    per-asset information joined over each index set."""
    grand = random_refining_filtration(rng, space.states, space.extended_horizon + 1)
    restricted = grand.restrict(space.horizon + 1)
    assets_present = sorted(set().union(*index_system)) if index_system else []
    base = {a: random_subfiltration(rng, restricted) for a in assets_present}
    trading = {}
    for index_set in index_system:
        trading[index_set] = Filtration(tuple(
            sigma_join([base[a].at(t) for a in sorted(index_set)])
            for t in range(space.horizon + 1)
        ))
    return grand, trading


def _draw_space(rng: random.Random, cfg: ScenarioConfig, min_extension: int = 0):
    n_states = rng.randint(2, max(2, cfg.num_states))
    states = tuple(f"s{i}" for i in range(n_states))
    horizon = rng.randint(1, max(1, cfg.grid))
    extension = rng.randint(max(horizon, horizon + min_extension), max(horizon + min_extension, cfg.extension))
    prob = random_positive_measure(rng, states)
    return FiniteSpace(states, prob, horizon, extension)


def gen_martingale_market(
    cfg: ScenarioConfig,
    *,
    rng: random.Random | None = None,
    with_measure: bool = False,
    singletons: bool = False,
    min_extension: int = 0,
):
    """A market that is free of free lunches at every horizon by construction.

    Draws a strictly positive measure, random terminal payoffs, and defines
    each asset backward as conditional expectations along the grand
    filtration, making every asset a martingale under the drawn measure.
    """
    rng = rng if rng is not None else _rng(cfg.seed, "martingale-market")
    space = _draw_space(rng, cfg, min_extension)
    n_assets = rng.randint(1, max(1, cfg.num_assets))
    assets = tuple(f"a{i}" for i in range(n_assets))
    index_system = _union_closed_index_system(rng, assets, cfg.max_index_sets, singletons)
    grand, trading = _random_filtration_bundle(rng, space, index_system)
    q_map = random_positive_measure(rng, space.states)
    q_vec = tuple(q_map[s] for s in space.states)

    tables = {}
    for a in assets:
        terminal = [rat(0)] * len(space.states)
        for atom in grand.at(space.extended_horizon).atoms:
            value = rat(rng.randint(-6, 12), rng.choice((1, 1, 2, 4)))
            for s in atom:
                terminal[space.index(s)] = value
        rows = [tuple(terminal)]
        for t in range(space.extended_horizon - 1, -1, -1):
            rows.append(conditional_expectation(rows[-1], grand.at(t), q_vec))
        tables[a] = tuple(reversed(rows))
    market = Market(space, tables, tuple(index_system), trading, grand)
    if with_measure:
        return market, MartingaleMeasureCertificate(q_map)
    return market


def gen_random_market(cfg: ScenarioConfig, *, rng: random.Random | None = None) -> Market:
    """A market with adapted but otherwise arbitrary prices; usually not
    arbitrage-free, which exercises the free-lunch side of the oracles."""
    rng = rng if rng is not None else _rng(cfg.seed, "random-market")
    space = _draw_space(rng, cfg)
    n_assets = rng.randint(1, max(1, cfg.num_assets))
    assets = tuple(f"a{i}" for i in range(n_assets))
    index_system = _union_closed_index_system(rng, assets, cfg.max_index_sets, False)
    grand, trading = _random_filtration_bundle(rng, space, index_system)
    tables = {}
    for a in assets:
        rows = []
        for t in range(space.extended_horizon + 1):
            row = [rat(0)] * len(space.states)
            for atom in grand.at(t).atoms:
                value = rat(rng.randint(-4, 10), rng.choice((1, 1, 2)))
                for s in atom:
                    row[space.index(s)] = value
            rows.append(tuple(row))
        tables[a] = tuple(rows)
    return Market(space, tables, tuple(index_system), trading, grand)


def _walk_states(length: int, state_cap: int):
    if 2 ** length > state_cap:
        raise ValueError(f"walk needs 2^{length} states, over the cap {state_cap}")
    states = tuple("".join(p) for p in itertools.product("+-", repeat=length))
    return states


def _walk_prices(states, upto: int) -> tuple[tuple[Rational, ...], ...]:
    rows = []
    for t in range(upto + 1):
        rows.append(tuple(rat(2 * s[:t].count("+") - t) for s in states))
    return tuple(rows)


def _prefix_filtration(states, horizons) -> Filtration:
    return Filtration(tuple(
        Partition.from_labels(states, [s[:k] for s in states]) for k in horizons
    ))


def gen_insider_market(steps: int, lookahead: int, state_cap: int = 2 ** 14):
    """Walk market whose trading information peeks `lookahead` steps ahead.

    The peek makes a sure win available from time 1 on; delaying the
    information by the same lookahead restores the walk's natural
    filtration (trading at time 0 is blind, so nothing is known there
    either) and with it the uniform martingale measure.
    """
    if steps < 1 or lookahead < 0 or lookahead > steps:
        raise ValueError("need steps >= 1 and 0 <= lookahead <= steps")
    length = steps + lookahead
    states = _walk_states(length, state_cap)
    space = FiniteSpace.uniform(states, steps, length)
    prices = {"walk": _walk_prices(states, length)}
    grand = _prefix_filtration(states, [min(t + lookahead, length) for t in range(length + 1)])
    peek = [0] + [min(t + lookahead, length) for t in range(1, steps + 1)]
    trading = _prefix_filtration(states, peek)
    index_set = frozenset({"walk"})
    market = Market(space, prices, (index_set,), {index_set: trading}, grand)
    trivial = Filtration.constant(Partition.trivial(states), steps + 1)
    delta = StoppingProcess.deterministic([max(t - lookahead, 0) for t in range(steps + 1)], trivial)
    return market, InformationDelayFamily({index_set: delta})


def gen_insider_execution_market(steps: int, lookahead: int, state_cap: int = 2 ** 14):
    """Walk market with a peeking filtration and the matching execution delay.

    Undelayed, the peek is a sure win even at time 0; deferring every
    order by the lookahead executes at prices the information no longer
    anticipates, and the uniform measure prices the delayed market.
    """
    if steps < 1 or lookahead < 0 or lookahead > steps:
        raise ValueError("need steps >= 1 and 0 <= lookahead <= steps")
    length = steps + 2 * lookahead
    states = _walk_states(length, state_cap)
    extended = steps + lookahead
    space = FiniteSpace.uniform(states, steps, extended)
    prices = {"walk": _walk_prices(states, extended)}
    grand = _prefix_filtration(states, [min(t + lookahead, length) for t in range(extended + 1)])
    trading = _prefix_filtration(states, [t + lookahead for t in range(steps + 1)])
    index_set = frozenset({"walk"})
    market = Market(space, prices, (index_set,), {index_set: trading}, grand)
    trivial = Filtration.constant(Partition.trivial(states), extended + 1)
    pi = StoppingProcess.deterministic([t + lookahead for t in range(steps + 1)], trivial)
    fam = ExecutionDelayFamily({"walk": pi}, {"walk": steps + lookahead + 1})
    return market, fam


# ---------------------------------------------------------------------------
# experiment harnesses


@dataclass(frozen=True)
class TrialRecord:
    index: int
    label: str
    ok: bool
    detail: str = ""
    reproduction: dict | None = None


@dataclass(frozen=True)
class ExperimentReport:
    kind: str
    seed: int
    trials: int
    records: tuple[TrialRecord, ...]
    failures: tuple[dict, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.failures and all(r.ok for r in self.records)

    def to_json(self) -> str:
        payload = {
            "format_version": 1,
            "kind": self.kind,
            "seed": self.seed,
            "trials": self.trials,
            "passed": self.passed,
            "records": [
                {"index": r.index, "label": r.label, "ok": r.ok, "detail": r.detail}
                for r in self.records
            ],
            "failures": list(self.failures),
        }
        return json.dumps(payload, indent=2)


def _reproduction(m: Market, info_fam=None, exec_fam=None) -> dict:
    from .documents import serialize_market_document

    return json.loads(serialize_market_document(m, info_delays=info_fam, exec_delays=exec_fam))


def _fail(i: int, label: str, detail: str, m: Market | None = None,
          info_fam=None, exec_fam=None) -> TrialRecord:
    repro = None
    if m is not None:
        try:
            repro = _reproduction(m, info_fam, exec_fam)
        except Exception as exc:  # reproduction must never mask the failure itself
            repro = {"serialization_error": repr(exc)}
    return TrialRecord(i, label, False, detail, repro)


def _verdict_kind(v) -> str:
    return v.kind


def run_inheritance_experiment(cfg: ScenarioConfig, kind: str, trials: int = 200) -> ExperimentReport:
    """Empirically validate delay inheritance at desk scale; failures carry repro."""
    runners: dict[str, Callable] = {
        "information": _information_trial,
        "execution": _execution_trial,
        "broker": _broker_trial,
        "insider-demo": None,
    }
    if kind not in runners:
        raise ValueError(f"unknown experiment kind {kind!r}")
    if kind == "insider-demo":
        return run_insider_demo(cfg)
    records: list[TrialRecord] = []
    for i in range(trials):
        rng = _rng(cfg.seed, kind, i)
        try:
            record = runners[kind](cfg, rng, i)
        except Exception as exc:  # a crash is a failing trial, not a crash of the run
            record = TrialRecord(i, kind, False, f"exception: {exc!r}")
        records.append(record)
    return ExperimentReport(kind, cfg.seed, trials, tuple(records), _collect_failures(records))


def _collect_failures(records) -> tuple[dict, ...]:
    return tuple(
        {
            "index": r.index,
            "label": r.label,
            "detail": r.detail,
            "reproduction": r.reproduction,
        }
        for r in records
        if not r.ok
    )


def _information_trial(cfg: ScenarioConfig, rng: random.Random, i: int) -> TrialRecord:
    m = gen_martingale_market(cfg, rng=rng)
    fam = gen_random_delay(cfg, "information", m, rng=rng)
    base = check_naflp(m)
    if not isinstance(base, NoFreeLunch):
        return _fail(i, "information", "martingale-built market showed a free lunch", m, info_fam=fam)
    problems = validate_information_family(m, fam)
    if problems:
        return _fail(i, "information", f"generated delay family invalid: {problems[0]}", m, info_fam=fam)
    if not check_coarseness(m, fam):
        return _fail(i, "information", "delayed filtration finer than the original", m, info_fam=fam)
    delayed = information_delayed_market(m, fam)
    if not _delayed_family_agrees(m, delayed):
        return _fail(i, "information", "delayed family not monotone in the index order", m, info_fam=fam)
    if validate_market(delayed):
        return _fail(i, "information", "delayed market failed validation", m, info_fam=fam)
    verdict = check_naflp(delayed)
    if not isinstance(verdict, NoFreeLunch):
        return _fail(i, "information", "free lunch appeared after an information delay", m, info_fam=fam)
    if not verify_certificate(delayed, verdict):
        return _fail(i, "information", "delayed measure certificate failed re-verification", m, info_fam=fam)
    return TrialRecord(i, "information", True, "inherited")


def _delayed_family_agrees(m: Market, delayed: Market) -> bool:
    for small in delayed.index_system:
        for big in delayed.index_system:
            if small < big:
                f_small = delayed.trading_filtrations[small]
                f_big = delayed.trading_filtrations[big]
                if not all(refines(f_big.at(t), f_small.at(t)) for t in range(len(f_small))):
                    return False
    return True


def _execution_trial(cfg: ScenarioConfig, rng: random.Random, i: int) -> TrialRecord:
    m = gen_martingale_market(cfg, rng=rng, min_extension=1)
    fam = gen_random_delay(
        cfg, "execution", m,
        continuous=rng.random() < 0.5,
        capped=rng.random() < 0.5,
        rng=rng,
    )
    problems = validate_execution_family(m, fam)
    if problems:
        return _fail(i, "execution", f"generated delay family invalid: {problems[0]}", m, exec_fam=fam)
    horizon = max(m.space.horizon, fam.reach(m.space.extended_horizon))
    base = check_naflp(m, horizon)
    if not isinstance(base, NoFreeLunch):
        return _fail(i, "execution", "martingale-built market showed a free lunch on the extended horizon",
                     m, exec_fam=fam)
    dm = delayed_market(m, fam)
    if validate_market(dm):
        return _fail(i, "execution", "delayed market failed validation", m, exec_fam=fam)
    verdict = check_naflp(dm)
    if not isinstance(verdict, NoFreeLunch):
        return _fail(i, "execution", "free lunch appeared after an execution delay", m, exec_fam=fam)
    if not verify_certificate(dm, verdict):
        return _fail(i, "execution", "delayed measure certificate failed re-verification", m, exec_fam=fam)
    return TrialRecord(i, "execution", True, "inherited")


def _shared_info_families(cfg: ScenarioConfig, m: Market, k: int, rng: random.Random):
    """k execution families sharing per-asset delay information and caps."""
    horizon = m.space.horizon
    extended = m.space.extended_horizon
    infos = {a: _delay_info_for_asset(rng, m, a) for a in sorted(m.assets)}
    caps = {a: rng.randint(horizon + 1, extended + 1) for a in sorted(m.assets)}
    families = []
    for _ in range(k):
        delays = {
            a: StoppingProcess(
                _random_exec_values(rng, infos[a], horizon, caps[a] - 1, rng.random() < 0.5),
                infos[a],
            )
            for a in sorted(m.assets)
        }
        families.append(ExecutionDelayFamily(delays, dict(caps)))
    return families


def _broker_trial(cfg: ScenarioConfig, rng: random.Random, i: int) -> TrialRecord:
    use_martingale = rng.random() < 0.7
    if use_martingale:
        m = gen_martingale_market(cfg, rng=rng, min_extension=1)
    else:
        m = gen_random_market(cfg, rng=rng)
    k = rng.randint(2, max(2, cfg.brokers))
    families = _shared_info_families(cfg, m, k, rng)
    fastest = min_delay(families)
    for fam in families:
        for a in fam.delays:
            fast, slow = fastest.delays[a].values, fam.delays[a].values
            if any(f > s for rf, rs in zip(fast, slow) for f, s in zip(rf, rs)):
                return _fail(i, "broker", "minimum delay exceeds a broker delay", m, exec_fam=fastest)
    horizon = max(m.space.horizon, fastest.reach(m.space.extended_horizon))
    fast_market = delayed_market(m, fastest, extended_horizon=horizon)
    fast_verdict = check_naflp(fast_market, horizon)
    if isinstance(fast_verdict, FreeLunch):
        return TrialRecord(i, "broker", True, "fastest market has a free lunch; nothing to inherit")
    for l, fam in enumerate(families):
        verdict = check_naflp(delayed_market(m, fam))
        if not isinstance(verdict, NoFreeLunch):
            return _fail(i, "broker", f"broker {l} shows a free lunch despite a safe fastest market",
                         m, exec_fam=fam)
    return TrialRecord(i, "broker", True, f"{k} brokers inherited")


def run_superimposition_experiment(cfg: ScenarioConfig, trials: int = 100) -> ExperimentReport:
    """Composed delays reproduce stronger-delayed prices and inherit safety."""
    records = []
    for i in range(trials):
        rng = _rng(cfg.seed, "superimpose", i)
        try:
            record = _superimpose_trial(cfg, rng, i)
        except Exception as exc:
            record = TrialRecord(i, "superimpose", False, f"exception: {exc!r}")
        records.append(record)
    return ExperimentReport("superimpose", cfg.seed, trials, tuple(records), _collect_failures(records))


def _superimpose_trial(cfg: ScenarioConfig, rng: random.Random, i: int) -> TrialRecord:
    use_martingale = rng.random() < 0.7
    if use_martingale:
        m = gen_martingale_market(cfg, rng=rng, min_extension=1)
    else:
        m = gen_random_market(cfg, rng=rng)
    horizon = m.space.horizon
    extended = m.space.extended_horizon
    infos = {a: _delay_info_for_asset(rng, m, a) for a in sorted(m.assets)}
    caps = {a: rng.randint(horizon + 1, extended + 1) for a in sorted(m.assets)}
    base_delays = {}
    strong_delays = {}
    for a in sorted(m.assets):
        top = caps[a] - 1
        base_vals = _random_exec_values(rng, infos[a], horizon, top, continuous=True)
        over_vals = _random_exec_values(rng, infos[a], horizon, top, continuous=True)
        strong_vals = tuple(
            tuple(max(b, o) for b, o in zip(rb, ro)) for rb, ro in zip(base_vals, over_vals)
        )
        base_delays[a] = StoppingProcess(base_vals, infos[a])
        strong_delays[a] = StoppingProcess(strong_vals, infos[a])
    base_fam = ExecutionDelayFamily(base_delays, dict(caps))
    strong_fam = ExecutionDelayFamily(strong_delays, dict(caps))

    composed = superimpose_delays(base_fam, strong_fam)
    base_market = delayed_market(m, base_fam, extended_horizon=extended)
    strong_market = delayed_market(m, strong_fam)
    if validate_execution_family(base_market, composed):
        return _fail(i, "superimpose", "composed delay failed validation on the delayed market",
                     m, exec_fam=strong_fam)
    n_states = len(m.space.states)
    for a in sorted(m.assets):
        for t in range(horizon + 1):
            for w in range(n_states):
                shifted = composed.delays[a].values[t][w]
                if base_market.assets[a][shifted][w] != strong_market.assets[a][t][w]:
                    return _fail(i, "superimpose",
                                 f"price identity broken: asset {a}, t={t}, state {m.space.states[w]}",
                                 m, exec_fam=strong_fam)
    check_horizon = max(horizon, strong_fam.reach(extended))
    base_verdict = check_naflp(base_market, check_horizon)
    if isinstance(base_verdict, NoFreeLunch):
        strong_verdict = check_naflp(strong_market)
        if not isinstance(strong_verdict, NoFreeLunch):
            return _fail(i, "superimpose", "stronger delay lost safety the base market had",
                         m, exec_fam=strong_fam)
        return TrialRecord(i, "superimpose", True, "identity and inheritance hold")
    return TrialRecord(i, "superimpose", True, "identity holds; base market unsafe, nothing to inherit")


def run_representation_experiment(cfg: ScenarioConfig, trials: int = 100) -> ExperimentReport:
    """Inverting execution delays must reconstruct the trading filtrations."""
    records = []
    for i in range(trials):
        rng = _rng(cfg.seed, "representation", i)
        try:
            record = _representation_trial(cfg, rng, i)
        except Exception as exc:
            record = TrialRecord(i, "representation", False, f"exception: {exc!r}")
        records.append(record)
    return ExperimentReport("representation", cfg.seed, trials, tuple(records), _collect_failures(records))


def _representation_trial(cfg: ScenarioConfig, rng: random.Random, i: int) -> TrialRecord:
    m = gen_martingale_market(cfg, rng=rng, singletons=True)
    horizon = m.space.horizon
    delays = {}
    for a in sorted(m.assets):
        info = _delay_info_for_asset(rng, m, a)
        # step-continuity, value(0) = 0 and value >= t pin the table to the identity
        values = tuple(tuple(t for _ in m.space.states) for t in range(horizon + 1))
        delays[a] = StoppingProcess(values, info)
    fam = ExecutionDelayFamily(delays)
    if not representation_check(m, fam):
        return _fail(i, "representation", "reconstructed filtration differs from the original",
                     m, exec_fam=fam)
    if m.space.extended_horizon > horizon:
        shifted = ExecutionDelayFamily({
            a: StoppingProcess(
                tuple(tuple(min(t + 1, m.space.extended_horizon) for _ in m.space.states)
                      for t in range(horizon + 1)),
                delays[a].info,
            )
            for a in delays
        })
        try:
            representation_check(m, shifted)
            return _fail(i, "representation", "shifted delay was not rejected", m, exec_fam=fam)
        except DelayPreconditionError:
            pass
    return TrialRecord(i, "representation", True, "reconstruction exact")


def run_insider_demo(cfg: ScenarioConfig) -> ExperimentReport:
    """The converse failures: delays can remove but never create free lunches."""
    records = []
    steps, lookahead = max(2, min(cfg.grid, 3)), max(1, min(cfg.lookahead, 2))
    m, info_fam = gen_insider_market(steps, lookahead, cfg.state_cap)
    undelayed = check_naflp(m)
    delayed = check_naflp(information_delayed_market(m, info_fam))
    records.append(TrialRecord(
        0, "insider-information",
        isinstance(undelayed, FreeLunch) and isinstance(delayed, NoFreeLunch),
        f"undelayed={_verdict_kind(undelayed)}, delayed={_verdict_kind(delayed)}",
    ))
    m2, exec_fam = gen_insider_execution_market(steps, lookahead, cfg.state_cap)
    undelayed2 = check_naflp(m2)
    delayed2 = check_naflp(delayed_market(m2, exec_fam))
    records.append(TrialRecord(
        1, "insider-execution",
        isinstance(undelayed2, FreeLunch) and isinstance(delayed2, NoFreeLunch),
        f"undelayed={_verdict_kind(undelayed2)}, delayed={_verdict_kind(delayed2)}",
    ))
    return ExperimentReport("insider-demo", cfg.seed, len(records), tuple(records), _collect_failures(records))
