"""The two sides of the fundamental theorem of asset pricing, as oracles.

On a finite state space the attainable terminal wealths form a linear
subspace K spanned by the one-step gain generators, so "no free lunch"
collapses to the Stiemke alternative: either some nonzero nonnegative
vector lies in K (a free-lunch strategy), or some strictly positive
measure annihilates K (an equivalent martingale measure for every trading
filtration of the index system). Both sides are decided by exact rational
LPs over the same generator set and exactly one of them can ever produce
a certificate; check_naflp runs both and treats any other pattern as a
solver bug, never as a model state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from . import lp
from .markets import GainGenerator, Market, Strategy, gain_generators, wealth_process
from .probability import conditional_expectation
from .rationals import ONE, Rational, ZERO, format_rational, rat


class OracleDisagreementError(RuntimeError):
    """Both or neither oracle produced a certificate: an internal inconsistency."""


@dataclass(frozen=True)
class FreeLunchCertificate:
    """A simple strategy whose terminal wealth is nonnegative and not zero."""

    strategy: Strategy
    terminal_wealth: tuple[Rational, ...]


@dataclass(frozen=True)
class MartingaleMeasureCertificate:
    """A strictly positive measure making every traded asset a martingale
    for the trading filtration of every index set."""

    q: Mapping[str, Rational]

    def __post_init__(self):
        object.__setattr__(self, "q", {s: rat(v) for s, v in self.q.items()})

    def vector(self, states: tuple[str, ...]) -> tuple[Rational, ...]:
        return tuple(self.q[s] for s in states)


@dataclass(frozen=True)
class FreeLunch:
    certificate: FreeLunchCertificate

    @property
    def kind(self) -> str:
        return "free-lunch"


@dataclass(frozen=True)
class NoFreeLunch:
    certificate: MartingaleMeasureCertificate

    @property
    def kind(self) -> str:
        return "no-free-lunch"


Verdict = FreeLunch | NoFreeLunch


def find_free_lunch(m: Market, horizon: int | None = None) -> FreeLunchCertificate | None:
    """Search the span of the gain generators for a nonnegative nonzero claim.

    Maximizes the total mass of v = sum_j coeff_j * generator_j subject to
    0 <= v <= 1 per state; a positive optimum yields a certificate whose
    strategy is rebuilt from the active generators, a zero optimum means
    only v = 0 is attainable.
    """
    horizon = m.space.horizon if horizon is None else horizon
    gens = gain_generators(m, horizon)
    if not gens:
        return None
    n_states = len(m.space.states)
    k = len(gens)
    lower_rows = []
    upper_rows = []
    for w in range(n_states):
        lower_rows.append((tuple(-g.vector[w] for g in gens), ZERO))
        upper_rows.append((tuple(g.vector[w] for g in gens), ONE))
    problem = lp.LpProblem(
        num_vars=k,
        objective=tuple(sum(g.vector) for g in gens),
        inequalities=tuple(lower_rows + upper_rows),
    )
    outcome = lp.solve(problem)
    if outcome.status != lp.OPTIMAL:
        raise OracleDisagreementError(f"free-lunch search ended {outcome.status}; the claim box is compact")
    if outcome.objective == 0:
        return None
    coeffs = outcome.solution
    terminal = tuple(
        sum(c * g.vector[w] for c, g in zip(coeffs, gens) if c != 0)
        for w in range(n_states)
    )
    strategy = _strategy_from_active(m, gens, coeffs)
    return FreeLunchCertificate(strategy=strategy, terminal_wealth=terminal)


def _strategy_from_active(m: Market, gens: list[GainGenerator], coeffs) -> Strategy:
    """One simple strategy reproducing sum_j coeff_j * generator_j.

    Active generators are grouped per step; holdings add coeff on the
    generator's atom. The carrying index set is the union of the active
    generators' index sets, which the refining property keeps inside the
    index system, and whose filtration dominates each participant's.
    """
    active = [(c, g) for c, g in zip(coeffs, gens) if c != 0]
    if not active:
        raise ValueError("no active generators to build a strategy from")
    index_set = frozenset().union(*(g.index_set for _, g in active))
    if index_set not in set(m.index_system):
        raise OracleDisagreementError(
            f"union {sorted(index_set)} of active index sets escaped the index system"
        )
    idx = m.space.state_index
    n_states = len(m.space.states)
    steps = sorted({g.step for _, g in active})
    t_lo, t_hi = steps[0], steps[-1] + 1
    dates = tuple(range(t_lo, t_hi + 1))
    holdings = []
    for t in dates[:-1]:
        acc: dict[str, list[Rational]] = {}
        for c, g in active:
            if g.step != t:
                continue
            vec = acc.setdefault(g.asset, [ZERO] * n_states)
            for s in g.atom:
                vec[idx[s]] += c
        holdings.append({a: tuple(v) for a, v in acc.items()})
    return Strategy(index_set=index_set, dates=dates, holdings=tuple(holdings))


def find_martingale_measure(m: Market, horizon: int | None = None) -> MartingaleMeasureCertificate | None:
    """Search for a strictly positive measure annihilating every gain generator.

    Maximizes the floor eps under the constraints sum(q) = 1, q_w >= eps,
    and orthogonality of q to a row basis of the generator span; a
    positive optimum is returned as a certificate, anything else is None.
    Orthogonality to consecutive-step generators gives the martingale
    property for all date pairs by the tower property.
    """
    horizon = m.space.horizon if horizon is None else horizon
    gens = gain_generators(m, horizon)
    n_states = len(m.space.states)
    n_vars = n_states + 1  # q per state, then eps
    equalities = [(tuple([ONE] * n_states + [ZERO]), ONE)]
    for row in lp.row_basis([g.vector for g in gens]):
        equalities.append((row + (ZERO,), ZERO))
    inequalities = []
    for w in range(n_states):
        coeffs = [ZERO] * n_vars
        coeffs[w] = -ONE
        coeffs[-1] = ONE
        inequalities.append((tuple(coeffs), ZERO))
    problem = lp.LpProblem(
        num_vars=n_vars,
        objective=tuple([ZERO] * n_states + [ONE]),
        equalities=tuple(equalities),
        inequalities=tuple(inequalities),
        lower_bounds=tuple([ZERO] * n_vars),
    )
    outcome = lp.solve(problem)
    if outcome.status == lp.INFEASIBLE or (outcome.status == lp.OPTIMAL and outcome.objective == 0):
        return None
    if outcome.status != lp.OPTIMAL:
        raise OracleDisagreementError(f"measure search ended {outcome.status}; eps is bounded by 1/|states|")
    q = dict(zip(m.space.states, outcome.solution[:n_states]))
    return MartingaleMeasureCertificate(q=q)


def check_naflp(m: Market, horizon: int | None = None) -> Verdict:
    """Run both oracles and insist that exactly one of them certifies."""
    lunch = find_free_lunch(m, horizon)
    measure = find_martingale_measure(m, horizon)
    if lunch is not None and measure is None:
        return FreeLunch(lunch)
    if lunch is None and measure is not None:
        return NoFreeLunch(measure)
    raise OracleDisagreementError(
        f"oracles disagree: free lunch {'found' if lunch else 'absent'}, "
        f"martingale measure {'found' if measure else 'absent'}"
    )


def verify_certificate(m: Market, v: Verdict, horizon: int | None = None) -> bool:
    """Re-check a verdict's certificate from scratch, on independent code paths.

    Measures are verified with conditional expectations over every date
    pair, strategies by recomputing the wealth process; nothing from the
    LP layer is reused.
    """
    horizon = m.space.horizon if horizon is None else horizon
    if isinstance(v, NoFreeLunch):
        return _verify_measure(m, v.certificate, horizon)
    if isinstance(v, FreeLunch):
        return _verify_strategy(m, v.certificate, horizon)
    return False


def _verify_measure(m: Market, cert: MartingaleMeasureCertificate, horizon: int) -> bool:
    if set(cert.q) != set(m.space.states):
        return False
    weights = cert.vector(m.space.states)
    if any(w <= 0 for w in weights) or sum(weights) != ONE:
        return False
    for index_set in m.index_system:
        filtration = m.trading_filtration(index_set, horizon)
        for asset in sorted(index_set):
            table = m.assets[asset]
            for t in range(horizon + 1):
                sigma = filtration.at(t)
                projected_now = conditional_expectation(table[t], sigma, weights)
                for u in range(t, horizon + 1):
                    projected_later = conditional_expectation(table[u], sigma, weights)
                    if projected_later != projected_now:
                        return False
    return True


def _verify_strategy(m: Market, cert: FreeLunchCertificate, horizon: int) -> bool:
    terminal = cert.terminal_wealth
    if len(terminal) != len(m.space.states):
        return False
    if any(v < 0 for v in terminal) or all(v == 0 for v in terminal):
        return False
    try:
        wealth = wealth_process(m, cert.strategy, horizon)
    except ValueError:
        return False
    if any(v != 0 for v in wealth[0]):
        return False
    return wealth[-1] == tuple(terminal)


def render_verdict(v: Verdict, states: tuple[str, ...]) -> str:
    """Canonical text form of a verdict, exact rationals, stable ordering."""
    lines = [f"verdict: {v.kind}", "format: 1"]
    if isinstance(v, NoFreeLunch):
        lines.append("measure:")
        for s in states:
            lines.append(f"  {s}: {format_rational(v.certificate.q[s])}")
    else:
        cert = v.certificate
        strat = cert.strategy
        lines.append(f"index set: {','.join(sorted(strat.index_set))}")
        lines.append(f"dates: {','.join(str(t) for t in strat.dates)}")
        for i, h in enumerate(strat.holdings):
            lines.append(f"interval ({strat.dates[i]},{strat.dates[i + 1]}]:")
            for asset in sorted(h):
                values = " ".join(format_rational(x) for x in h[asset])
                lines.append(f"  {asset}: {values}")
        values = " ".join(format_rational(x) for x in cert.terminal_wealth)
        lines.append(f"terminal wealth: {values}")
    return "\n".join(lines) + "\n"
