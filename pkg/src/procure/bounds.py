"""Search-range construction for both decision spaces.

Original space: per-supply purchase bounds. The lower bound covers mandatory
(non-alternative) consumption of the expected case load net of inventory; the
upper bound assumes the supply is chosen every time it appears as an
alternative, again net of inventory and clamped so ranges are never empty.

Transformed space: per-profile budget ranges. The lower bound is the advance
cost of the division pass (storage first, then cheapest alternatives); the
upper bound prices the all-best-alternatives assignment net of the storage
allotments the division pass fixed, so shared storage is never counted twice.
"""

from __future__ import annotations

from dataclasses import dataclass

from .instance_model import Money, ProcurementInstance
from .simulation import DivisionOutcome


@dataclass
class VariableBounds:
    x_lower: tuple[int, ...]
    x_upper: tuple[int, ...]


@dataclass
class BudgetBounds:
    y_lower: tuple[Money, ...]
    y_upper: tuple[Money, ...]
    remaining_budget: Money

    @property
    def deficit(self) -> Money:
        """How far the cheapest treatment exceeds the remaining budget."""
        short = sum(self.y_lower) - self.remaining_budget
        return short if short > 0 else 0

    @property
    def feasible(self) -> bool:
        return self.deficit == 0


def x_bounds(instance: ProcurementInstance) -> VariableBounds:
    n = instance.n_supplies
    mand_demand = [0] * n
    total_demand = [0] * n
    for idx, prof in instance.profiles():
        cases = instance.profile_case_count(idx)
        for item in prof.items:
            if item.mandatory:
                sid, qty, _ = item.alternatives[0]
                mand_demand[sid - 1] += cases * qty
                total_demand[sid - 1] += cases * qty
            else:
                for sid, qty, _ in item.alternatives:
                    total_demand[sid - 1] += cases * qty
    lower = []
    upper = []
    for k in range(n):
        a = instance.supplies[k].inventory
        lo = max(0, mand_demand[k] - a)
        hi = max(0, lo, total_demand[k] - a)
        lower.append(lo)
        upper.append(hi)
    return VariableBounds(x_lower=tuple(lower), x_upper=tuple(upper))


def lower_bound_cost(instance: ProcurementInstance, vb: VariableBounds) -> Money:
    return sum(s.unit_price * vb.x_lower[s.id - 1] for s in instance.supplies)


def y_bounds(
    instance: ProcurementInstance,
    division: DivisionOutcome,
    vb: VariableBounds | None = None,
) -> BudgetBounds:
    if vb is None:
        vb = x_bounds(instance)
    remaining = instance.budget - lower_bound_cost(instance, vb)

    uppers = []
    for p, (idx, prof) in enumerate(instance.profiles()):
        cases = division.case_counts[p]
        total = 0
        for t, item in enumerate(prof.alternative_items()):
            sid, qty, _ = item.alternatives[0]  # effect-sorted: best first
            served_free = division.storage_allotments[p][t][0]
            need = cases - served_free
            if need > 0:
                total += instance.supply(sid).unit_price * qty * need
        uppers.append(total)

    return BudgetBounds(
        y_lower=tuple(division.advance_cost),
        y_upper=tuple(uppers),
        remaining_budget=remaining,
    )
