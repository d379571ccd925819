"""Event-driven simulation of case arrivals and treatment.

One decision cycle is replayed as a deterministic sequence of case arrivals:
per disease, arrivals are evenly spaced over the cycle's working hours, and
suspected-infection treatments ride on those arrivals at the disease's
suspect rate. Three uses share the machinery:

* ``evaluate_original`` scores a purchase plan (both objectives) on the
  expected case counts with the pessimistic suspected-case total r_0,
* ``check_feasibility`` replays the lower-bound case counts (still with r_0
  suspected treatments) and reports what could not be treated,
* ``divide`` replays the expected schedule from storage only, buying the
  cheapest alternative whenever storage runs out; its outcome seeds the
  per-profile budget subproblems and the transformed-space bounds.

Suspected-case accounting is exact: per-arrival suspect rates are decimal
rationals, per-disease suspected counts are apportioned largest-remainder to
hit the requested total, and flags land on arrivals by integer Bresenham
steps. A disease whose rate implies more suspected cases than arrivals
(companions) contributes standalone epidemic-only events at the triggering
arrival's time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .instance_model import EPIDEMIC, Money, ProcurementInstance


@dataclass(frozen=True)
class ScheduleEvent:
    time_hours: float
    disease_id: int  # 0 marks an epidemic-only event
    is_suspected: bool


@dataclass
class ArrivalSchedule:
    """Time-ordered arrivals plus the kernel-ready arrays derived from them."""

    events: tuple[ScheduleEvent, ...]
    case_counts: tuple[int, ...]
    suspected_per_disease: tuple[int, ...]
    suspected_total: int
    ev_profile: np.ndarray  # int64; 0 = epidemic-only event
    ev_susp: np.ndarray  # uint8
    ev_time: np.ndarray  # float64
    canon: np.ndarray  # int64 event indices in canonical epidemic order


def build_schedule(
    instance: ProcurementInstance,
    case_counts: Sequence[int],
    include_suspected: bool = True,
    suspected_target: int | None = None,
) -> ArrivalSchedule:
    """Deterministic arrival schedule for the given per-disease case counts.

    Disease i contributes ``case_counts[i-1]`` arrivals at multiples of
    (cycle_days * working_hours) / count. With ``include_suspected``, the
    total number of epidemic treatments equals ``suspected_target`` (default:
    the ceiling of the summed per-disease suspect quotas), apportioned to
    diseases by largest remainder and placed by integer Bresenham steps.
    Events sort by (time, source disease, ordinal, sub-event).
    """
    m = instance.n_diseases
    if len(case_counts) != m:
        raise ValueError(f"expected {m} case counts, got {len(case_counts)}")
    counts = [int(c) for c in case_counts]
    if any(c < 0 for c in counts):
        raise ValueError("case counts must be nonnegative")

    quotas = [Fraction(0)] * m
    if include_suspected:
        for i, d in enumerate(instance.diseases):
            quotas[i] = d.suspect_rate * counts[i]
    total_quota = sum(quotas, Fraction(0))
    if suspected_target is None:
        target = math.ceil(total_quota) if include_suspected else 0
    else:
        target = int(suspected_target) if include_suspected else 0

    susp = [math.floor(q) for q in quotas]
    extras = target - sum(susp)
    eligible = [i for i in range(m) if counts[i] > 0]
    standalone_only = 0
    if extras > 0:
        if eligible:
            order = sorted(eligible, key=lambda i: (-(quotas[i] - susp[i]), i))
            for t in range(extras):
                susp[order[t % len(order)]] += 1
        else:
            standalone_only = extras
    elif extras < 0:
        order = sorted(range(m), key=lambda i: (quotas[i] - susp[i], i))
        deficit = -extras
        while deficit > 0:
            for i in order:
                if susp[i] > 0:
                    susp[i] -= 1
                    deficit -= 1
                    if deficit == 0:
                        break

    # (time, src_disease, ordinal, sub, profile, suspected)
    raw: list[tuple[float, int, int, int, int, bool]] = []
    T = instance.cycle_days
    for i, d in enumerate(instance.diseases):
        r = counts[i]
        if r == 0:
            continue
        delta = (T * d.working_hours) / r
        s = susp[i]
        for c in range(1, r + 1):
            t = c * delta
            nflag = (c * s) // r - ((c - 1) * s) // r
            raw.append((t, d.id, c, 0, d.id, nflag >= 1))
            for sub in range(1, nflag):
                raw.append((t, d.id, c, sub, EPIDEMIC, True))
    if standalone_only:
        delta = (T * 24) / standalone_only
        for c in range(1, standalone_only + 1):
            raw.append((c * delta, 0, c, 0, EPIDEMIC, True))

    raw.sort(key=lambda ev: (ev[0], ev[1], ev[2], ev[3]))

    events = tuple(
        ScheduleEvent(time_hours=t, disease_id=profile, is_suspected=suspected)
        for t, _src, _ord, _sub, profile, suspected in raw
    )
    ev_profile = np.array([ev[4] for ev in raw], dtype=np.int64)
    ev_susp = np.array(
        [1 if (ev[5] and ev[4] >= 1) or ev[4] == EPIDEMIC else 0 for ev in raw],
        dtype=np.uint8,
    )
    ev_time = np.array([ev[0] for ev in raw], dtype=np.float64)

    epi_slots = [
        (raw[e][1], raw[e][2], raw[e][3], e)
        for e in range(len(raw))
        if raw[e][5] or raw[e][4] == EPIDEMIC
    ]
    epi_slots.sort()
    canon = np.array([e for (_, _, _, e) in epi_slots], dtype=np.int64)

    return ArrivalSchedule(
        events=events,
        case_counts=tuple(counts),
        suspected_per_disease=tuple(susp),
        suspected_total=target,
        ev_profile=ev_profile,
        ev_susp=ev_susp,
        ev_time=ev_time,
        canon=canon,
    )


# ---------------------------------------------------------------------------
# flat instance layout shared by both kernel backends


@dataclass
class CompiledInstance:
    n_supplies: int
    n_profiles: int
    prices: list[int]
    inv0: np.ndarray
    weights: list[float]  # index 0 unused
    mand_off: np.ndarray
    mand_sup: np.ndarray
    mand_qty: np.ndarray
    item_off: np.ndarray
    alt_off: np.ndarray
    alt_sup: np.ndarray
    alt_qty: np.ndarray
    alt_eff: np.ndarray
    pgrp_off: np.ndarray
    grp_off: np.ndarray
    grp_item: np.ndarray
    grp_w: np.ndarray


def compile_instance(instance: ProcurementInstance) -> CompiledInstance:
    mand_off = [0]
    mand_sup: list[int] = []
    mand_qty: list[int] = []
    item_off = [0]
    alt_off = [0]
    alt_sup: list[int] = []
    alt_qty: list[int] = []
    alt_eff: list[float] = []
    pgrp_off = [0]
    grp_off = [0]
    grp_item: list[int] = []
    grp_w: list[float] = []
    weights = [0.0]

    profiles = [instance.epidemic] + list(instance.diseases)
    for p, prof in enumerate(profiles):
        if p > 0:
            weights.append(prof.weight)
        for it in prof.items:
            if it.mandatory:
                sid, qty, _ = it.alternatives[0]
                mand_sup.append(sid - 1)
                mand_qty.append(qty)
            else:
                for sid, qty, eff in it.alternatives:
                    alt_sup.append(sid - 1)
                    alt_qty.append(qty)
                    alt_eff.append(eff)
                alt_off.append(len(alt_sup))
        mand_off.append(len(mand_sup))
        item_off.append(len(alt_off) - 1)
        for group in prof.effect_fn.groups:
            for item_idx, w in group:
                grp_item.append(item_idx)
                grp_w.append(w)
            grp_off.append(len(grp_item))
        pgrp_off.append(len(grp_off) - 1)

    i64 = lambda xs: np.array(xs, dtype=np.int64)
    return CompiledInstance(
        n_supplies=instance.n_supplies,
        n_profiles=len(profiles),
        prices=[s.unit_price for s in instance.supplies],
        inv0=i64([s.inventory for s in instance.supplies]),
        weights=weights,
        mand_off=i64(mand_off),
        mand_sup=i64(mand_sup),
        mand_qty=i64(mand_qty),
        item_off=i64(item_off),
        alt_off=i64(alt_off),
        alt_sup=i64(alt_sup),
        alt_qty=i64(alt_qty),
        alt_eff=np.array(alt_eff, dtype=np.float64),
        pgrp_off=i64(pgrp_off),
        grp_off=i64(grp_off),
        grp_item=i64(grp_item),
        grp_w=np.array(grp_w, dtype=np.float64),
    )


# ---------------------------------------------------------------------------
# results


@dataclass
class EvaluationResult:
    epidemic_effect: float
    treatment_effect: float
    per_disease_effects: tuple[float, ...]
    epidemic_treatable: bool
    disease_treatable: tuple[bool, ...]
    untreated_epidemic_count: int
    untreated_disease_counts: tuple[int, ...]
    cost_spent: Money


@dataclass
class FeasibilityReport:
    budget_excess: Money
    untreated_lower_cases: tuple[int, ...]
    untreated_suspected: int

    @property
    def ok(self) -> bool:
        return (
            self.budget_excess == 0
            and self.untreated_suspected == 0
            and all(u == 0 for u in self.untreated_lower_cases)
        )

    @property
    def violated_constraints(self) -> int:
        """Number of violated treatability constraints (one per profile)."""
        n = 1 if self.untreated_suspected > 0 else 0
        return n + sum(1 for u in self.untreated_lower_cases if u > 0)


@dataclass
class DivisionOutcome:
    """Storage split and cheapest per-profile assignments from the division pass."""

    storage_allotments: tuple[tuple[tuple[int, ...], ...], ...]
    cheapest_counts: tuple[tuple[tuple[int, ...], ...], ...]
    advance_cost: tuple[Money, ...]
    case_counts: tuple[int, ...]  # per profile; index 0 is the suspected total

    @property
    def cheapest_solutions(self):
        from .subproblem import SubproblemSolution

        return tuple(SubproblemSolution(counts=c) for c in self.cheapest_counts)


class Simulator:
    """Reusable evaluation context: compiled arrays plus cached schedules.

    Instances are immutable, so one simulator can serve any number of
    sequential or concurrent evaluations; each call owns its mutable state.
    """

    def __init__(self, instance: ProcurementInstance):
        self.instance = instance
        self.compiled = compile_instance(instance)
        r0 = instance.epidemic.suspected_cases
        expected = [d.expected_cases for d in instance.diseases]
        lower = [d.lower_cases for d in instance.diseases]
        self.schedule_expected = build_schedule(instance, expected, True, r0)
        self.schedule_lower = build_schedule(instance, lower, True, r0)

    def _run(self, schedule: ArrivalSchedule, plan_arr: np.ndarray, kernel=None):
        c = self.compiled
        sim = (kernel or _kernels).simulate
        return sim(
            c.inv0, plan_arr, c.mand_off, c.mand_sup, c.mand_qty,
            c.item_off, c.alt_off, c.alt_sup, c.alt_qty, c.alt_eff,
            c.pgrp_off, c.grp_off, c.grp_item, c.grp_w,
            schedule.ev_profile, schedule.ev_susp, schedule.canon,
        )

    def _plan_array(self, plan) -> np.ndarray:
        x = getattr(plan, "x", plan)
        arr = np.asarray(x, dtype=np.int64)
        if arr.shape != (self.compiled.n_supplies,):
            raise ValueError(
                f"plan must have one quantity per supply ({self.compiled.n_supplies}), "
                f"got shape {arr.shape}"
            )
        if (arr < 0).any():
            raise ValueError("plan quantities must be nonnegative")
        return arr

    def plan_cost(self, plan) -> Money:
        x = getattr(plan, "x", plan)
        prices = self.compiled.prices
        return sum(prices[k] * int(x[k]) for k in range(len(prices)))

    def evaluate(self, plan) -> EvaluationResult:
        arr = self._plan_array(plan)
        ups, ups_i, flags, untreated, _treated, _rem = self._run(self.schedule_expected, arr)
        weights = self.compiled.weights
        ups_prime = 0.0
        for i in range(1, self.compiled.n_profiles):
            ups_prime += weights[i] * ups_i[i]
        return EvaluationResult(
            epidemic_effect=ups,
            treatment_effect=ups_prime,
            per_disease_effects=tuple(ups_i[1:]),
            epidemic_treatable=bool(flags[0]),
            disease_treatable=tuple(bool(f) for f in flags[1:]),
            untreated_epidemic_count=untreated[0],
            untreated_disease_counts=tuple(untreated[1:]),
            cost_spent=self.plan_cost(plan),
        )

    def evaluate_detailed(self, plan):
        """Evaluation plus remaining inventory, for conservation checks."""
        arr = self._plan_array(plan)
        out = self._run(self.schedule_expected, arr)
        return self.evaluate(plan), list(out[5])

    def check_feasibility(self, plan) -> FeasibilityReport:
        arr = self._plan_array(plan)
        _ups, _ups_i, _flags, untreated, _treated, _rem = self._run(self.schedule_lower, arr)
        cost = self.plan_cost(plan)
        excess = cost - self.instance.budget
        return FeasibilityReport(
            budget_excess=excess if excess > 0 else 0,
            untreated_lower_cases=tuple(untreated[1:]),
            untreated_suspected=untreated[0],
        )

    def objectives_and_feasibility(self, plan) -> tuple[EvaluationResult, FeasibilityReport]:
        return self.evaluate(plan), self.check_feasibility(plan)

    # -- division pass ------------------------------------------------------

    def divide(self) -> DivisionOutcome:
        """Storage-only replay of the expected schedule with cheapest top-ups.

        Mandatory items draw on storage when possible (their shortfall is the
        lower-bound purchase, costed separately); alternative items take the
        first alternative with stock, else an in-advance purchase of the
        item's cheapest alternative. No case is left untreated, so the
        resulting per-item counts sum to each profile's case load.
        """
        c = self.compiled
        sched = self.schedule_expected
        P = c.n_profiles
        stock = [int(v) for v in c.inv0]
        head = [int(c.alt_off[t]) for t in range(len(c.alt_off) - 1)]

        storage = []
        advance = []
        cheapest_alt = []
        for t in range(len(c.alt_off) - 1):
            lo, hi = int(c.alt_off[t]), int(c.alt_off[t + 1])
            storage.append([0] * (hi - lo))
            advance.append([0] * (hi - lo))
            best = lo
            best_cost = c.prices[int(c.alt_sup[lo])] * int(c.alt_qty[lo])
            for a in range(lo + 1, hi):
                cost = c.prices[int(c.alt_sup[a])] * int(c.alt_qty[a])
                if cost < best_cost or (cost == best_cost and c.alt_sup[a] < c.alt_sup[best]):
                    best = a
                    best_cost = cost
            cheapest_alt.append((best, best_cost))
        advance_cost = [0] * P

        mand_sup = c.mand_sup.tolist()
        mand_qty = c.mand_qty.tolist()
        alt_sup = c.alt_sup.tolist()
        alt_qty = c.alt_qty.tolist()

        def serve(p: int):
            for x in range(int(c.mand_off[p]), int(c.mand_off[p + 1])):
                s, q = mand_sup[x], mand_qty[x]
                if stock[s] >= q:
                    stock[s] -= q
            for t in range(int(c.item_off[p]), int(c.item_off[p + 1])):
                lo = int(c.alt_off[t])
                end = int(c.alt_off[t + 1])
                h = head[t]
                while h < end and stock[alt_sup[h]] < alt_qty[h]:
                    h += 1
                head[t] = h
                if h < end:
                    stock[alt_sup[h]] -= alt_qty[h]
                    storage[t][h - lo] += 1
                else:
                    best, best_cost = cheapest_alt[t]
                    advance[t][best - lo] += 1
                    advance_cost[p] += best_cost

        ev_profile = sched.ev_profile.tolist()
        ev_susp = sched.ev_susp.tolist()
        for e in range(len(ev_profile)):
            p = ev_profile[e]
            if p >= 1:
                serve(p)
                if ev_susp[e]:
                    serve(EPIDEMIC)
            else:
                serve(EPIDEMIC)

        storage_out = []
        cheapest_out = []
        for p in range(P):
            lo_t, hi_t = int(c.item_off[p]), int(c.item_off[p + 1])
            storage_out.append(tuple(tuple(storage[t]) for t in range(lo_t, hi_t)))
            cheapest_out.append(
                tuple(
                    tuple(storage[t][k] + advance[t][k] for k in range(len(storage[t])))
                    for t in range(lo_t, hi_t)
                )
            )
        case_counts = [sched.suspected_total] + list(sched.case_counts)
        return DivisionOutcome(
            storage_allotments=tuple(storage_out),
            cheapest_counts=tuple(cheapest_out),
            advance_cost=tuple(advance_cost),
            case_counts=tuple(case_counts),
        )

    # -- trace --------------------------------------------------------------

    def write_trace(self, plan, out) -> EvaluationResult:
        """Evaluate through the pure backend, logging one TSV line per event."""
        from ._kernels import pykernels

        arr = self._plan_array(plan)
        trace: list = []
        c = self.compiled
        sched = self.schedule_expected
        pykernels.simulate(
            c.inv0, arr, c.mand_off, c.mand_sup, c.mand_qty,
            c.item_off, c.alt_off, c.alt_sup, c.alt_qty, c.alt_eff,
            c.pgrp_off, c.grp_off, c.grp_item, c.grp_w,
            sched.ev_profile, sched.ev_susp, sched.canon,
            trace=trace,
        )
        out.write("time_hours\tprofile\tchosen_supplies\teffect\n")
        for e, p, chosen_alts, effect in trace:
            names = ",".join(str(int(c.alt_sup[a]) + 1) for a in chosen_alts)
            out.write(f"{sched.ev_time[e]:.6f}\t{p}\t{names}\t{effect!r}\n")
        return self.evaluate(plan)


# ---------------------------------------------------------------------------
# module-level conveniences (tests and small scripts)


def evaluate_original(instance: ProcurementInstance, plan) -> EvaluationResult:
    return Simulator(instance).evaluate(plan)


def check_feasibility(instance: ProcurementInstance, plan) -> FeasibilityReport:
    return Simulator(instance).check_feasibility(plan)


def divide(instance: ProcurementInstance) -> DivisionOutcome:
    return Simulator(instance).divide()
