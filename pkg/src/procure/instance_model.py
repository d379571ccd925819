"""Problem data model for medical-supplies procurement planning.

A procurement instance bundles a supply catalogue, one epidemic-control
profile, and a set of disease profiles. Each profile lists treatment items;
an item is either mandatory (exactly one supply, always consumed) or carries
an ordered list of alternative supplies sorted best-effect first. A
product-of-weighted-sums effect function maps the chosen alternatives of one
case to a scalar effect in [0, 1].

Conventions used throughout the package:

* Money is integer cents. All cost arithmetic is exact.
* Probabilities written in instance files are treated as decimal literals;
  derived counts (suspected-case totals) are computed with exact rational
  arithmetic so that ceilings are well defined.
* Alternatives inside an item are kept sorted by (effect desc, price asc,
  supply id asc). Loading and saving preserve this order.
* Instances are immutable after validation and safe to share across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

Money = int

#: Profile index of the epidemic-control profile (diseases are 1..m).
EPIDEMIC = 0


class InstanceError(ValueError):
    """Raised for schema violations and invariant violations in instance data."""


def _as_fraction(x: float | int) -> Fraction:
    """Exact rational value of a probability/rate read from a decimal literal.

    ``repr`` of a float is its shortest round-tripping decimal, so this
    recovers the decimal the instance file contained.
    """
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(repr(float(x)))


@dataclass
class Supply:
    """One purchasable supply: id, display name, unit price, volume, stock."""

    id: int
    name: str
    unit_price: Money
    unit_volume: float = 0.0
    inventory: int = 0


@dataclass
class TreatmentItem:
    """One step of a treatment: a set of interchangeable supply alternatives.

    ``alternatives`` holds (supply_id, quantity_per_case, effect) triples.
    Mandatory items have exactly one alternative with effect 1.0; for
    non-mandatory items the list is sorted by (effect desc, price asc, id asc).
    """

    alternatives: tuple[tuple[int, int, float], ...]
    mandatory: bool = False


@dataclass
class EffectFunction:
    """Product over groups of weighted sums of per-item effects.

    ``groups`` is a tuple of groups; each group is a tuple of
    (item_index, weight) pairs where item_index counts the profile's
    non-mandatory items from 0 in order. Weights of a group are positive and
    sum to 1, so the value is in [0, 1] whenever all inputs are.
    """

    groups: tuple[tuple[tuple[int, float], ...], ...]

    @property
    def n_items(self) -> int:
        return sum(len(g) for g in self.groups)


@dataclass
class DiseaseProfile:
    id: int
    name: str
    items: tuple[TreatmentItem, ...]
    effect_fn: EffectFunction
    weight: float
    expected_cases: int
    lower_cases: int
    upper_cases: int
    suspect_prob: float
    companions: float = 0.0
    companion_suspect_prob: float = 0.0
    emergency: bool = False

    @property
    def working_hours(self) -> int:
        """Daily working hours: 24 for emergency diseases, 8 otherwise."""
        return 24 if self.emergency else 8

    @property
    def suspect_rate(self) -> Fraction:
        """Expected suspected cases (patient plus companions) per arrival."""
        return _as_fraction(self.suspect_prob) + _as_fraction(
            self.companion_suspect_prob
        ) * _as_fraction(self.companions)

    def alternative_items(self) -> tuple[TreatmentItem, ...]:
        return tuple(it for it in self.items if not it.mandatory)

    def mandatory_items(self) -> tuple[TreatmentItem, ...]:
        return tuple(it for it in self.items if it.mandatory)


@dataclass
class EpidemicProfile:
    items: tuple[TreatmentItem, ...]
    effect_fn: EffectFunction
    suspected_cases: int = 0  # derived; set by compute_suspected_cases

    def alternative_items(self) -> tuple[TreatmentItem, ...]:
        return tuple(it for it in self.items if not it.mandatory)

    def mandatory_items(self) -> tuple[TreatmentItem, ...]:
        return tuple(it for it in self.items if it.mandatory)


@dataclass
class ProcurementInstance:
    supplies: tuple[Supply, ...]
    epidemic: EpidemicProfile
    diseases: tuple[DiseaseProfile, ...]
    budget: Money
    cycle_days: int = 15
    local_incidence: float = 0.0

    @property
    def n_supplies(self) -> int:
        return len(self.supplies)

    @property
    def n_diseases(self) -> int:
        return len(self.diseases)

    def supply(self, supply_id: int) -> Supply:
        return self.supplies[supply_id - 1]

    def profiles(self) -> list[tuple[int, object]]:
        """(index, profile) pairs: epidemic at index 0, diseases at 1..m."""
        out: list[tuple[int, object]] = [(EPIDEMIC, self.epidemic)]
        out.extend((d.id, d) for d in self.diseases)
        return out

    def profile_case_count(self, index: int) -> int:
        """Expected case load of a profile: r_0 for index 0, r_i otherwise."""
        if index == EPIDEMIC:
            return self.epidemic.suspected_cases
        return self.diseases[index - 1].expected_cases


# ---------------------------------------------------------------------------
# effect evaluation


def eval_effect(fn: EffectFunction, chosen_effects: Sequence[float]) -> float:
    """Evaluate a product-of-weighted-sums effect function.

    ``chosen_effects`` supplies one value per covered item, indexed by the
    item indices stored in the groups. Groups are folded left to right and
    each weighted sum accumulates left to right, which makes the result
    independent of scheduling. The product is clamped at 1.0 to absorb
    rounding at the boundary.
    """
    if len(chosen_effects) != fn.n_items:
        raise InstanceError(
            f"effect function covers {fn.n_items} items, got {len(chosen_effects)} values"
        )
    prod = 1.0
    for group in fn.groups:
        s = 0.0
        for item_idx, weight in group:
            s += weight * chosen_effects[item_idx]
        prod *= s
    return prod if prod <= 1.0 else 1.0


def compute_suspected_cases(instance: ProcurementInstance) -> int:
    """Total suspected infection cases over one cycle, pessimistic rounding.

    Sums (suspect_prob + companion_suspect_prob * companions) * upper_cases
    over all diseases in exact rational arithmetic and takes the ceiling.
    The value is also stored on the epidemic profile.
    """
    total = Fraction(0)
    for d in instance.diseases:
        total += d.suspect_rate * d.upper_cases
    r0 = math.ceil(total)
    instance.epidemic.suspected_cases = r0
    return r0


# ---------------------------------------------------------------------------
# validation

_ALT_SORT_NOTE = "alternatives must sort by (effect desc, price asc, supply id asc)"


def _sorted_alternatives(
    alts: Iterable[tuple[int, int, float]], price_of: dict[int, Money]
) -> tuple[tuple[int, int, float], ...]:
    return tuple(
        sorted(alts, key=lambda a: (-a[2], price_of[a[0]], a[0]))
    )


def validate_instance(instance: ProcurementInstance) -> ProcurementInstance:
    """Check all structural invariants, normalize alternative order, derive r_0.

    Returns the (mutated in place) instance for chaining. Raises
    ``InstanceError`` naming the offending field on any violation.
    """
    ids = [s.id for s in instance.supplies]
    if ids != list(range(1, len(ids) + 1)):
        raise InstanceError("supply ids must be unique and contiguous starting at 1")
    price_of = {}
    for s in instance.supplies:
        if not isinstance(s.unit_price, int) or s.unit_price < 0:
            raise InstanceError(f"supplies[{s.id}].price_cents must be a nonnegative integer")
        if not isinstance(s.inventory, int) or s.inventory < 0:
            raise InstanceError(f"supplies[{s.id}].inventory must be a nonnegative integer")
        if s.unit_volume < 0:
            raise InstanceError(f"supplies[{s.id}].volume must be nonnegative")
        price_of[s.id] = s.unit_price

    if instance.budget < 0:
        raise InstanceError("budget_cents must be nonnegative")
    if instance.cycle_days < 1:
        raise InstanceError("cycle_days must be positive")
    if not 0.0 <= instance.local_incidence <= 1.0:
        raise InstanceError("local_incidence must lie in [0, 1]")

    def check_profile(profile, where: str):
        items = list(profile.items)
        n_alt = 0
        for t, item in enumerate(items):
            loc = f"{where}.items[{t}]"
            if not item.alternatives:
                raise InstanceError(f"{loc}: empty alternatives")
            for sid, qty, eff in item.alternatives:
                if sid not in price_of:
                    raise InstanceError(f"{loc}: unknown supply id {sid}")
                if not isinstance(qty, int) or qty <= 0:
                    raise InstanceError(f"{loc}: quantity must be a positive integer")
                if not 0.0 <= eff <= 1.0:
                    raise InstanceError(f"{loc}: effect {eff} outside [0, 1]")
            if item.mandatory:
                if len(item.alternatives) != 1:
                    raise InstanceError(f"{loc}: mandatory items carry exactly one alternative")
                if item.alternatives[0][2] != 1.0:
                    raise InstanceError(f"{loc}: mandatory items carry effect 1.0")
            else:
                n_alt += 1
                item.alternatives = _sorted_alternatives(item.alternatives, price_of)
        # mandatory-first ordering is normalized rather than rejected
        items.sort(key=lambda it: 0 if it.mandatory else 1)
        profile.items = tuple(items)

        seen: set[int] = set()
        for g, group in enumerate(profile.effect_fn.groups):
            if not group:
                raise InstanceError(f"{where}.effect_groups[{g}]: empty group")
            wsum = 0.0
            for item_idx, weight in group:
                if weight <= 0:
                    raise InstanceError(f"{where}.effect_groups[{g}]: weights must be positive")
                if not 0 <= item_idx < n_alt:
                    raise InstanceError(
                        f"{where}.effect_groups[{g}]: item index {item_idx} outside 0..{n_alt - 1}"
                    )
                if item_idx in seen:
                    raise InstanceError(
                        f"{where}.effect_groups[{g}]: item {item_idx} appears in two groups"
                    )
                seen.add(item_idx)
                wsum += weight
            if abs(wsum - 1.0) > 1e-9:
                raise InstanceError(f"{where}.effect_groups[{g}]: weights sum to {wsum}, not 1")
        if len(seen) != n_alt:
            raise InstanceError(f"{where}: effect groups cover {len(seen)} of {n_alt} items")

    check_profile(instance.epidemic, "epidemic")
    for k, d in enumerate(instance.diseases):
        where = f"diseases[{k}]"
        if d.id != k + 1:
            raise InstanceError(f"{where}.id must be {k + 1} (contiguous from 1)")
        if d.weight < 0:
            raise InstanceError(f"{where}.weight must be nonnegative")
        if not (0 <= d.lower_cases <= d.expected_cases <= d.upper_cases):
            raise InstanceError(
                f"{where}: need lower_cases <= expected_cases <= upper_cases, "
                f"got ({d.lower_cases}, {d.expected_cases}, {d.upper_cases})"
            )
        for name in ("suspect_prob", "companion_suspect_prob"):
            v = getattr(d, name)
            if not 0.0 <= v <= 1.0:
                raise InstanceError(f"{where}.{name} must lie in [0, 1]")
        if d.companions < 0:
            raise InstanceError(f"{where}.companions must be nonnegative")
        check_profile(d, where)

    compute_suspected_cases(instance)
    return instance


# ---------------------------------------------------------------------------
# instance file format (UTF-8 JSON)


def _require_keys(obj: dict, allowed: set[str], required: set[str], where: str):
    unknown = set(obj) - allowed
    if unknown:
        raise InstanceError(f"{where}: unknown key(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise InstanceError(f"{where}: missing key(s) {sorted(missing)}")


def _items_from_json(raw, where: str) -> tuple[TreatmentItem, ...]:
    items = []
    for t, it in enumerate(raw):
        loc = f"{where}[{t}]"
        if not isinstance(it, dict):
            raise InstanceError(f"{loc}: expected an object")
        _require_keys(it, {"mandatory", "alternatives"}, {"mandatory", "alternatives"}, loc)
        alts = []
        for a, alt in enumerate(it["alternatives"]):
            aloc = f"{loc}.alternatives[{a}]"
            _require_keys(alt, {"supply", "qty", "effect"}, {"supply", "qty", "effect"}, aloc)
            alts.append((alt["supply"], alt["qty"], float(alt["effect"])))
        items.append(TreatmentItem(alternatives=tuple(alts), mandatory=bool(it["mandatory"])))
    return tuple(items)


def _groups_from_json(raw, where: str) -> EffectFunction:
    groups = []
    for g, group in enumerate(raw):
        members = []
        for k, member in enumerate(group):
            loc = f"{where}[{g}][{k}]"
            _require_keys(member, {"item", "weight"}, {"item", "weight"}, loc)
            members.append((member["item"], float(member["weight"])))
        groups.append(tuple(members))
    return EffectFunction(groups=tuple(groups))


def _items_to_json(items: Sequence[TreatmentItem]):
    return [
        {
            "mandatory": it.mandatory,
            "alternatives": [
                {"supply": sid, "qty": qty, "effect": eff} for sid, qty, eff in it.alternatives
            ],
        }
        for it in items
    ]


def _groups_to_json(fn: EffectFunction):
    return [[{"item": i, "weight": w} for i, w in group] for group in fn.groups]


_DISEASE_KEYS = {
    "id",
    "name",
    "items",
    "effect_groups",
    "weight",
    "expected_cases",
    "lower_cases",
    "upper_cases",
    "suspect_prob",
    "companions",
    "companion_suspect_prob",
    "emergency",
}


def load_instance(path) -> ProcurementInstance:
    """Load and validate an instance file. Unknown keys are rejected."""
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"{path}: not valid JSON ({exc})") from exc
    top_keys = {
        "supplies",
        "epidemic",
        "diseases",
        "budget_cents",
        "cycle_days",
        "local_incidence",
    }
    _require_keys(raw, top_keys, top_keys, str(path))

    supplies = []
    for k, s in enumerate(raw["supplies"]):
        loc = f"supplies[{k}]"
        _require_keys(s, {"id", "name", "price_cents", "volume", "inventory"},
                      {"id", "name", "price_cents", "inventory"}, loc)
        supplies.append(
            Supply(
                id=s["id"],
                name=s["name"],
                unit_price=s["price_cents"],
                unit_volume=float(s.get("volume", 0.0)),
                inventory=s["inventory"],
            )
        )

    epi = raw["epidemic"]
    _require_keys(epi, {"items", "effect_groups"}, {"items", "effect_groups"}, "epidemic")
    epidemic = EpidemicProfile(
        items=_items_from_json(epi["items"], "epidemic.items"),
        effect_fn=_groups_from_json(epi["effect_groups"], "epidemic.effect_groups"),
    )

    diseases = []
    for k, d in enumerate(raw["diseases"]):
        loc = f"diseases[{k}]"
        _require_keys(d, _DISEASE_KEYS, _DISEASE_KEYS - {"companions", "companion_suspect_prob", "emergency"}, loc)
        diseases.append(
            DiseaseProfile(
                id=d["id"],
                name=d["name"],
                items=_items_from_json(d["items"], f"{loc}.items"),
                effect_fn=_groups_from_json(d["effect_groups"], f"{loc}.effect_groups"),
                weight=float(d["weight"]),
                expected_cases=d["expected_cases"],
                lower_cases=d["lower_cases"],
                upper_cases=d["upper_cases"],
                suspect_prob=float(d["suspect_prob"]),
                companions=float(d.get("companions", 0.0)),
                companion_suspect_prob=float(d.get("companion_suspect_prob", 0.0)),
                emergency=bool(d.get("emergency", False)),
            )
        )

    instance = ProcurementInstance(
        supplies=tuple(supplies),
        epidemic=epidemic,
        diseases=tuple(diseases),
        budget=raw["budget_cents"],
        cycle_days=raw["cycle_days"],
        local_incidence=float(raw["local_incidence"]),
    )
    return validate_instance(instance)


def save_instance(instance: ProcurementInstance, path) -> None:
    """Write an instance as canonical JSON (validated first, keys sorted)."""
    validate_instance(instance)
    doc = {
        "supplies": [
            {
                "id": s.id,
                "name": s.name,
                "price_cents": s.unit_price,
                "volume": s.unit_volume,
                "inventory": s.inventory,
            }
            for s in instance.supplies
        ],
        "epidemic": {
            "items": _items_to_json(instance.epidemic.items),
            "effect_groups": _groups_to_json(instance.epidemic.effect_fn),
        },
        "diseases": [
            {
                "id": d.id,
                "name": d.name,
                "items": _items_to_json(d.items),
                "effect_groups": _groups_to_json(d.effect_fn),
                "weight": d.weight,
                "expected_cases": d.expected_cases,
                "lower_cases": d.lower_cases,
                "upper_cases": d.upper_cases,
                "suspect_prob": d.suspect_prob,
                "companions": d.companions,
                "companion_suspect_prob": d.companion_suspect_prob,
                "emergency": d.emergency,
            }
            for d in instance.diseases
        ],
        "budget_cents": instance.budget,
        "cycle_days": instance.cycle_days,
        "local_incidence": instance.local_incidence,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# canonical test instance


def tiny_instance(budget: Money = 10_000) -> ProcurementInstance:
    """Six-supply instance small enough for hand simulation and enumeration.

    Epidemic control: mandatory S1 (1 cent) plus one item with alternatives
    S2 (effect 1.0, 10 cents) and S3 (effect 0.5, 2 cents). One disease:
    mandatory S4 (1 cent) plus one item with alternatives S5 (effect 1.0,
    5 cents) and S6 (effect 0.6, 1 cent); 4 expected cases (2..4), suspect
    probability 0.25, no companions, all inventories zero.
    """
    supplies = tuple(
        Supply(id=i + 1, name=n, unit_price=p)
        for i, (n, p) in enumerate(
            [("epi-base", 1), ("epi-best", 10), ("epi-cheap", 2),
             ("d1-base", 1), ("d1-best", 5), ("d1-cheap", 1)]
        )
    )
    epidemic = EpidemicProfile(
        items=(
            TreatmentItem(alternatives=((1, 1, 1.0),), mandatory=True),
            TreatmentItem(alternatives=((2, 1, 1.0), (3, 1, 0.5))),
        ),
        effect_fn=EffectFunction(groups=(((0, 1.0),),)),
    )
    disease = DiseaseProfile(
        id=1,
        name="D1",
        items=(
            TreatmentItem(alternatives=((4, 1, 1.0),), mandatory=True),
            TreatmentItem(alternatives=((5, 1, 1.0), (6, 1, 0.6))),
        ),
        effect_fn=EffectFunction(groups=(((0, 1.0),),)),
        weight=1.0,
        expected_cases=4,
        lower_cases=2,
        upper_cases=4,
        suspect_prob=0.25,
    )
    instance = ProcurementInstance(
        supplies=supplies, epidemic=epidemic, diseases=(disease,), budget=budget
    )
    return validate_instance(instance)
