"""Market documents: exact JSON serialization of markets and delay families.

Rationals travel as "p/q" strings, filtrations as explicit per-time atom
lists of state names, so documents are diff-stable and self-validating
without reconstruction logic. Parsing is strict: unknown fields are
rejected and every structural problem is reported with the invariant it
violates. Serialization is canonical, so parse -> serialize -> parse is
the identity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .delays import ExecutionDelayFamily, InformationDelayFamily
from .markets import Market, validate_market
from .probability import Filtration, FiniteSpace, Partition, StoppingProcess
from .rationals import ONE, format_rational, parse_rational

FORMAT_VERSION = 1


class DocumentError(ValueError):
    """A document failed to parse or validate; carries every problem found."""

    def __init__(self, problems):
        problems = [problems] if isinstance(problems, str) else list(problems)
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class MarketDocument:
    market: Market
    info_delays: InformationDelayFamily | None = None
    exec_delays: ExecutionDelayFamily | None = None


def _require_keys(obj: dict, allowed: set[str], required: set[str], where: str, problems: list[str]):
    unknown = set(obj) - allowed
    for key in sorted(unknown):
        problems.append(f"{where}: unknown field {key!r}")
    for key in sorted(required - set(obj)):
        problems.append(f"{where}: missing field {key!r}")


def _parse_partition(entry, states, where: str, problems: list[str]) -> Partition | None:
    if not isinstance(entry, list) or not all(isinstance(a, list) for a in entry):
        problems.append(f"{where}: a partition must be a list of atoms (lists of state names)")
        return None
    seen = [s for atom in entry for s in atom]
    if sorted(seen) != sorted(states):
        problems.append(f"{where}: atoms must partition the state set")
        return None
    return Partition.of(states, entry)


def _parse_filtration(entry, states, length: int, where: str, problems: list[str]) -> Filtration | None:
    if not isinstance(entry, list) or len(entry) != length:
        problems.append(f"{where}: expected {length} per-time partitions")
        return None
    parts = []
    for t, sub in enumerate(entry):
        p = _parse_partition(sub, states, f"{where}[t={t}]", problems)
        if p is None:
            return None
        parts.append(p)
    try:
        return Filtration(tuple(parts))
    except ValueError as exc:
        problems.append(f"{where}: {exc}")
        return None


def _resolve_info(entry, states, length: int, grand: Filtration, where: str, problems: list[str]):
    if entry == "trivial":
        return Filtration.constant(Partition.trivial(states), length)
    if entry == "grand":
        return grand.extend_to(length) if len(grand) < length else grand.restrict(length)
    if isinstance(entry, list):
        return _parse_filtration(entry, states, length, where, problems)
    problems.append(f"{where}: delay information must be 'trivial', 'grand', or an inline filtration")
    return None


def parse_market_document(text: str) -> MarketDocument:
    """Parse and fully validate a JSON market document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError([f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"]) from None
    if not isinstance(doc, dict):
        raise DocumentError(["document root must be an object"])
    problems: list[str] = []
    _require_keys(
        doc,
        {"format_version", "states", "grid", "assets", "index_system", "filtrations", "delays"},
        {"format_version", "states", "grid", "assets", "index_system", "filtrations"},
        "document", problems,
    )
    if problems:
        raise DocumentError(problems)
    if doc["format_version"] != FORMAT_VERSION:
        raise DocumentError([f"unsupported format_version {doc['format_version']!r}"])

    entries = doc["states"]
    if not isinstance(entries, list) or not entries:
        raise DocumentError(["states: expected a non-empty list"])
    states: list[str] = []
    probability = {}
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            problems.append(f"states[{i}]: expected an object")
            continue
        _require_keys(entry, {"name", "probability"}, {"name", "probability"}, f"states[{i}]", problems)
        if problems:
            continue
        states.append(entry["name"])
        try:
            p = parse_rational(entry["probability"])
            if p <= 0:
                problems.append(f"states[{i}]: probability must be strictly positive")
            probability[entry["name"]] = p
        except ValueError as exc:
            problems.append(f"states[{i}]: {exc}")
    if len(set(states)) != len(states):
        problems.append("states: duplicate names")
    if not problems and sum(probability.values()) != ONE:
        problems.append("measure not normalized: probabilities must sum to exactly 1")

    grid = doc["grid"]
    _require_keys(grid if isinstance(grid, dict) else {}, {"n", "n_ext"}, {"n", "n_ext"}, "grid", problems)
    if problems:
        raise DocumentError(problems)
    horizon, extended = grid["n"], grid["n_ext"]
    if not (isinstance(horizon, int) and isinstance(extended, int) and 1 <= horizon <= extended):
        raise DocumentError(["grid: need integers 1 <= n <= n_ext"])
    try:
        space = FiniteSpace(tuple(states), probability, horizon, extended)
    except ValueError as exc:
        raise DocumentError([f"states: {exc}"]) from None

    assets = {}
    if not isinstance(doc["assets"], dict) or not doc["assets"]:
        raise DocumentError(["assets: expected a non-empty object"])
    for aid, table in doc["assets"].items():
        if not isinstance(table, list) or len(table) != extended + 1:
            problems.append(f"assets[{aid}]: expected {extended + 1} time rows")
            continue
        rows = []
        for t, row in enumerate(table):
            if not isinstance(row, list) or len(row) != len(states):
                problems.append(f"assets[{aid}][t={t}]: expected {len(states)} entries")
                break
            try:
                rows.append(tuple(parse_rational(v) for v in row))
            except ValueError as exc:
                problems.append(f"assets[{aid}][t={t}]: {exc}")
                break
        else:
            assets[aid] = tuple(rows)
    if problems:
        raise DocumentError(problems)

    index_system = []
    for i, ids in enumerate(doc["index_system"]):
        if not isinstance(ids, list) or not ids:
            problems.append(f"index_system[{i}]: expected a non-empty list of asset ids")
            continue
        index_system.append(frozenset(ids))

    filt = doc["filtrations"]
    _require_keys(filt if isinstance(filt, dict) else {}, {"grand", "trading"}, {"grand", "trading"},
                  "filtrations", problems)
    if problems:
        raise DocumentError(problems)
    grand = _parse_filtration(filt["grand"], tuple(states), extended + 1, "filtrations.grand", problems)
    trading = {}
    if not isinstance(filt["trading"], list):
        problems.append("filtrations.trading: expected a list")
    else:
        for i, entry in enumerate(filt["trading"]):
            where = f"filtrations.trading[{i}]"
            if not isinstance(entry, dict):
                problems.append(f"{where}: expected an object")
                continue
            _require_keys(entry, {"index_set", "partitions"}, {"index_set", "partitions"}, where, problems)
            if problems:
                continue
            declared = entry["partitions"]
            if not isinstance(declared, list) or not horizon + 1 <= len(declared) <= extended + 1:
                problems.append(f"{where}: expected between {horizon + 1} and {extended + 1} per-time partitions")
                continue
            f = _parse_filtration(declared, tuple(states), len(declared), where, problems)
            if f is not None:
                trading[frozenset(entry["index_set"])] = f
    if problems or grand is None:
        raise DocumentError(problems or ["filtrations.grand unreadable"])

    try:
        market = Market(space, assets, tuple(index_system), trading, grand)
    except ValueError as exc:
        raise DocumentError([str(exc)]) from None
    report = validate_market(market)
    if report:
        raise DocumentError(report)

    info_fam = exec_fam = None
    delays = doc.get("delays")
    if delays is not None:
        _require_keys(delays, {"information", "execution"}, set(), "delays", problems)
        if "information" in delays:
            info_fam = _parse_info_delays(delays["information"], market, problems)
        if "execution" in delays:
            exec_fam = _parse_exec_delays(delays["execution"], market, problems)
        if problems:
            raise DocumentError(problems)
    return MarketDocument(market, info_fam, exec_fam)


def _parse_values(entry, length: int, n_states: int, where: str, problems: list[str]):
    if not isinstance(entry, list) or len(entry) != length:
        problems.append(f"{where}: expected {length} time rows of grid values")
        return None
    rows = []
    for t, row in enumerate(entry):
        if not isinstance(row, list) or len(row) != n_states or not all(isinstance(v, int) for v in row):
            problems.append(f"{where}[t={t}]: expected {n_states} integer grid values")
            return None
        rows.append(tuple(row))
    return tuple(rows)


def _parse_info_delays(entries, market: Market, problems: list[str]):
    if not isinstance(entries, list):
        problems.append("delays.information: expected a list")
        return None
    space = market.space
    delays = {}
    for i, entry in enumerate(entries):
        where = f"delays.information[{i}]"
        if not isinstance(entry, dict):
            problems.append(f"{where}: expected an object")
            continue
        _require_keys(entry, {"index_set", "values", "info"}, {"index_set", "values", "info"}, where, problems)
        if problems:
            continue
        values = _parse_values(entry["values"], space.horizon + 1, len(space.states), where, problems)
        info = _resolve_info(entry["info"], space.states, space.horizon + 1,
                             market.grand_filtration, f"{where}.info", problems)
        if values is None or info is None:
            continue
        delays[frozenset(entry["index_set"])] = StoppingProcess(values, info)
    if problems:
        return None
    from .delays import validate_information_family

    fam = InformationDelayFamily(delays)
    problems.extend(validate_information_family(market, fam))
    return fam if not problems else None


def _parse_exec_delays(entries, market: Market, problems: list[str]):
    if not isinstance(entries, list):
        problems.append("delays.execution: expected a list")
        return None
    space = market.space
    delays = {}
    caps = {}
    for i, entry in enumerate(entries):
        where = f"delays.execution[{i}]"
        if not isinstance(entry, dict):
            problems.append(f"{where}: expected an object")
            continue
        _require_keys(entry, {"asset", "values", "info", "cap"}, {"asset", "values", "info"}, where, problems)
        if problems:
            continue
        values = _parse_values(entry["values"], space.horizon + 1, len(space.states), where, problems)
        info = _resolve_info(entry["info"], space.states, space.extended_horizon + 1,
                             market.grand_filtration, f"{where}.info", problems)
        if values is None or info is None:
            continue
        delays[entry["asset"]] = StoppingProcess(values, info)
        if "cap" in entry:
            if not isinstance(entry["cap"], int):
                problems.append(f"{where}: cap must be an integer")
            else:
                caps[entry["asset"]] = entry["cap"]
    if problems:
        return None
    from .delays import validate_execution_family

    fam = ExecutionDelayFamily(delays, caps)
    problems.extend(validate_execution_family(market, fam))
    return fam if not problems else None


def _filtration_payload(f: Filtration):
    return [[list(atom) for atom in f.at(t).atoms] for t in range(len(f))]


def serialize_market_document(
    market: Market,
    info_delays: InformationDelayFamily | None = None,
    exec_delays: ExecutionDelayFamily | None = None,
) -> str:
    """Canonical JSON for a market and optional delay families."""
    space = market.space
    doc = {
        "format_version": FORMAT_VERSION,
        "states": [
            {"name": s, "probability": format_rational(space.probability[s])}
            for s in space.states
        ],
        "grid": {"n": space.horizon, "n_ext": space.extended_horizon},
        "assets": {
            aid: [[format_rational(v) for v in row] for row in market.assets[aid]]
            for aid in sorted(market.assets)
        },
        "index_system": [sorted(a) for a in market.index_system],
        "filtrations": {
            "grand": _filtration_payload(market.grand_filtration),
            "trading": [
                {"index_set": sorted(a), "partitions": _filtration_payload(market.trading_filtrations[a])}
                for a in market.index_system
            ],
        },
    }
    delays = {}
    if info_delays is not None:
        delays["information"] = [
            {
                "index_set": sorted(a),
                "values": [list(row) for row in sp.values],
                "info": _filtration_payload(sp.info),
            }
            for a, sp in sorted(info_delays.delays.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
        ]
    if exec_delays is not None:
        entries = []
        for asset in sorted(exec_delays.delays):
            sp = exec_delays.delays[asset]
            entry = {
                "asset": asset,
                "values": [list(row) for row in sp.values],
                "info": _filtration_payload(sp.info),
            }
            if asset in exec_delays.caps:
                entry["cap"] = exec_delays.caps[asset]
            entries.append(entry)
        delays["execution"] = entries
    if delays:
        doc["delays"] = delays
    return json.dumps(doc, indent=2) + "\n"
