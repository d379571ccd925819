"""Pure-Python implementations of the hot kernels.

Two kernels dominate runtime: the case-arrival simulation (plan evaluation
and feasibility checking) and the per-profile budget subproblem solver
(greedy improvement plus tabu search). The compiled backend in
``_ckernels.pyx`` mirrors this module operation for operation — same loop
structure, same accumulation order, same PRNG — so both produce bit-identical
results. Any change here must be transliterated there.

Array arguments are numpy arrays (int64 / float64 / uint8); this module
converts them to plain lists up front since native Python scalars are much
faster than numpy scalar indexing inside interpreted loops.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _aslist(x):
    """Native-typed list copy of a numpy array (or any sequence)."""
    tolist = getattr(x, "tolist", None)
    return tolist() if tolist is not None else list(x)


class SplitMix64:
    """Deterministic 64-bit PRNG, mirrored in the compiled backend."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform draw in [0, n). Modulo bias is negligible for our n."""
        return self.next_u64() % n


def derive_seed(seed: int, stream: int) -> int:
    """Decorrelated child seed for a numbered stream (e.g. one per profile)."""
    return SplitMix64((seed ^ ((stream + 1) * _GAMMA)) & _MASK64).next_u64()


# ---------------------------------------------------------------------------
# subproblem kernel
#
# A subproblem is one profile's budgeted effect maximization. Data layout
# (all indices local to the profile):
#   item_off[j] .. item_off[j+1]  flat alternative range of item j
#   ppc[a]      price per case of alternative a (unit price times quantity)
#   eff[a]      effect of alternative a (sorted nonincreasing within an item)
#   storage[a]  cases of alternative a served free from initial inventory
#   z[a]        cases assigned to alternative a; sums to r within each item
# Effect of z: cases are rank-aligned (case 1 takes every item's first
# assigned alternative, and so on); the total is the sum over cases of the
# profile's effect function, accumulated left to right.


def _fn_value(grp_off, grp_item, grp_w, eff, ptr):
    prod = 1.0
    for g in range(len(grp_off) - 1):
        s = 0.0
        for x in range(grp_off[g], grp_off[g + 1]):
            s += grp_w[x] * eff[ptr[grp_item[x]]]
        prod *= s
    return prod if prod <= 1.0 else 1.0


def subproblem_effect(item_off, eff, grp_off, grp_item, grp_w, z, r) -> float:
    item_off = _aslist(item_off)
    eff = _aslist(eff)
    grp_off = _aslist(grp_off)
    grp_item = _aslist(grp_item)
    grp_w = _aslist(grp_w)
    z = _aslist(z)
    return _effect_full(item_off, eff, grp_off, grp_item, grp_w, z, r)


def _effect_full(item_off, eff, grp_off, grp_item, grp_w, z, r) -> float:
    if r == 0:
        return 0.0
    n_items = len(item_off) - 1
    ptr = [0] * n_items
    rem = [0] * n_items
    for j in range(n_items):
        x = item_off[j]
        while z[x] == 0:
            x += 1
        ptr[j] = x
        rem[j] = z[x]
    acc = 0.0
    for c in range(r):
        acc += _fn_value(grp_off, grp_item, grp_w, eff, ptr)
        if c + 1 < r:
            for j in range(n_items):
                rem[j] -= 1
                if rem[j] == 0:
                    x = ptr[j] + 1
                    while z[x] == 0:
                        x += 1
                    ptr[j] = x
                    rem[j] = z[x]
    return acc


def _cost_of(item_off, ppc, storage, z) -> int:
    total = 0
    for a in range(len(z)):
        over = z[a] - storage[a]
        if over > 0:
            total += ppc[a] * over
    return total


def _alt_at(item_off, z, j, c, da1=-1, dv1=0, da2=-1, dv2=0):
    """Alternative serving ordinal c (1-based) of item j, with optional deltas."""
    cum = 0
    for x in range(item_off[j], item_off[j + 1]):
        v = z[x]
        if x == da1:
            v += dv1
        if x == da2:
            v += dv2
        cum += v
        if cum >= c:
            return x
    return item_off[j + 1] - 1  # unreachable for valid z


def _combo_value(item_off, eff, grp_off, grp_item, grp_w, z, c, ov_j1, ov_a1, ov_j2, ov_a2):
    """Effect-function value at case ordinal c with up to two item overrides."""
    prod = 1.0
    for g in range(len(grp_off) - 1):
        s = 0.0
        for x in range(grp_off[g], grp_off[g + 1]):
            j = grp_item[x]
            if j == ov_j1:
                a = ov_a1
            elif j == ov_j2:
                a = ov_a2
            else:
                a = _alt_at(item_off, z, j, c)
            s += grp_w[x] * eff[a]
        prod *= s
    return prod if prod <= 1.0 else 1.0


def _delta_cost(item_off, ppc, storage, z, deltas) -> int:
    # merge repeated indices first: marginals are not additive across the
    # storage boundary, so each touched entry must be evaluated once
    idx: list[int] = []
    dvs: list[int] = []
    for a, dv in deltas:
        for i in range(len(idx)):
            if idx[i] == a:
                dvs[i] += dv
                break
        else:
            idx.append(a)
            dvs.append(dv)
    d = 0
    for i in range(len(idx)):
        a = idx[i]
        old = z[a] - storage[a]
        new = old + dvs[i]
        d += ppc[a] * ((new if new > 0 else 0) - (old if old > 0 else 0))
    return d


def subproblem_greedy(item_off, ppc, eff, storage, grp_off, grp_item, grp_w, z, r, budget):
    """Repeated single-case upgrades to better alternatives under the budget.

    Candidates are ranked by effect gain per cost (cost-free gains first),
    ties broken by lowest item, then lowest target alternative, then lowest
    source alternative. Stops when no budget-feasible improving upgrade
    remains. Returns the improved assignment; never worse than the input.
    """
    item_off = _aslist(item_off)
    ppc = _aslist(ppc)
    eff = _aslist(eff)
    storage = _aslist(storage)
    grp_off = _aslist(grp_off)
    grp_item = _aslist(grp_item)
    grp_w = _aslist(grp_w)
    z = _aslist(z)
    n_items = len(item_off) - 1
    z0 = list(z)
    eff_in = _effect_full(item_off, eff, grp_off, grp_item, grp_w, z, r)
    cur_cost = _cost_of(item_off, ppc, storage, z)

    while True:
        best = None  # (free, key, j, a_to, a_from, dcost, dgain)
        for j in range(n_items):
            lo, hi = item_off[j], item_off[j + 1]
            for a_from in range(lo + 1, hi):
                if z[a_from] == 0:
                    continue
                for a_to in range(lo, a_from):
                    dcost = _delta_cost(item_off, ppc, storage, z, ((a_to, 1), (a_from, -1)))
                    if cur_cost + dcost > budget:
                        continue
                    dgain = _upgrade_gain(item_off, eff, grp_off, grp_item, grp_w,
                                          z, j, a_to, a_from)
                    if dgain <= 0.0:
                        continue
                    free = dcost <= 0
                    key = dgain if free else dgain / dcost
                    cand = (free, key, j, a_to, a_from, dcost)
                    if best is None or _greedy_better(cand, best):
                        best = cand
        if best is None:
            break
        _, _, j, a_to, a_from, dcost = best
        z[a_to] += 1
        z[a_from] -= 1
        cur_cost += dcost

    if _effect_full(item_off, eff, grp_off, grp_item, grp_w, z, r) < eff_in:
        return z0  # rounding pathology guard; upgrades cannot truly lose effect
    return z


def _greedy_better(cand, best) -> bool:
    cfree, ckey, cj, cto, cfrom, _ = cand
    bfree, bkey, bj, bto, bfrom, _ = best
    if cfree != bfree:
        return cfree
    if ckey != bkey:
        return ckey > bkey
    return (cj, cto, cfrom) < (bj, bto, bfrom)


def _upgrade_gain(item_off, eff, grp_off, grp_item, grp_w, z, j, a_to, a_from) -> float:
    """Exact effect change of moving one case of item j from a_from to a_to.

    The rank-aligned encoding shifts one boundary per alternative between the
    two, so each distinct boundary ordinal is re-evaluated once, old vs. new.
    """
    gain = 0.0
    prev_c = -1
    cum = 0
    for x in range(item_off[j], a_to):
        cum += z[x]
    for t in range(a_to, a_from):
        cum += z[t]
        c = cum + 1
        if c == prev_c:
            continue
        prev_c = c
        a_old = _alt_at(item_off, z, j, c)
        a_new = _alt_at(item_off, z, j, c, a_to, 1, a_from, -1)
        old_v = _combo_value(item_off, eff, grp_off, grp_item, grp_w, z, c, j, a_old, -1, -1)
        new_v = _combo_value(item_off, eff, grp_off, grp_item, grp_w, z, c, j, a_new, -1, -1)
        gain += new_v - old_v
    return gain


def subproblem_tabu(item_off, ppc, eff, storage, grp_off, grp_item, grp_w,
                    z, r, budget, k_n, tenure, max_iter, seed):
    """Tabu search over paired demote/promote moves on the assignment counts.

    Each move demotes one case of some item to its next-worse alternative and
    promotes one case (possibly of another item) to its next-better
    alternative, subject to the budget. Per iteration the feasible move set
    is enumerated, up to k_n candidates are sampled without replacement, and
    the best candidate that is not tabu (or beats the incumbent; aspiration)
    is applied. Applied moves are tabu for ``tenure`` iterations. For
    single-item profiles pure demote-only and promote-only moves are added,
    since the paired neighborhood degenerates there.

    Returns (best assignment, iteration of last incumbent improvement).
    """
    item_off = _aslist(item_off)
    ppc = _aslist(ppc)
    eff = _aslist(eff)
    storage = _aslist(storage)
    grp_off = _aslist(grp_off)
    grp_item = _aslist(grp_item)
    grp_w = _aslist(grp_w)
    z = _aslist(z)
    n_items = len(item_off) - 1
    n_alts = len(ppc)
    rng = SplitMix64(seed)

    cur_cost = _cost_of(item_off, ppc, storage, z)
    cur_eff = _effect_full(item_off, eff, grp_off, grp_item, grp_w, z, r)
    best_z = list(z)
    best_eff = cur_eff
    best_cost = cur_cost
    best_iter = 0

    item_of = [0] * n_alts
    for j in range(n_items):
        for x in range(item_off[j], item_off[j + 1]):
            item_of[x] = j
    last = [False] * n_alts
    for j in range(n_items):
        last[item_off[j + 1] - 1] = True

    tabu_a = [-2] * tenure
    tabu_b = [-2] * tenure
    tabu_exp = [0] * tenure
    n_applied = 0

    for it in range(max_iter):
        moves_a = []
        moves_b = []
        for a in range(n_alts):
            if last[a] or z[a] == 0:
                continue
            for b in range(n_alts):
                if last[b] or z[b + 1] == 0 or a == b:
                    continue
                # net feasibility on the touched entries
                if not _move_valid(z, a, b):
                    continue
                dcost = _delta_cost(item_off, ppc, storage, z,
                                    ((a, -1), (a + 1, 1), (b, 1), (b + 1, -1)))
                if cur_cost + dcost <= budget:
                    moves_a.append(a)
                    moves_b.append(b)
        if n_items == 1:
            for a in range(n_alts):
                if last[a] or z[a] == 0:
                    continue
                dcost = _delta_cost(item_off, ppc, storage, z, ((a, -1), (a + 1, 1)))
                if cur_cost + dcost <= budget:
                    moves_a.append(a)
                    moves_b.append(-1)
            for b in range(n_alts):
                if last[b] or z[b + 1] == 0:
                    continue
                dcost = _delta_cost(item_off, ppc, storage, z, ((b, 1), (b + 1, -1)))
                if cur_cost + dcost <= budget:
                    moves_a.append(-1)
                    moves_b.append(b)
        n_moves = len(moves_a)
        if n_moves == 0:
            break
        take = n_moves
        if n_moves > k_n:
            take = k_n
            for i in range(take):
                sw = i + rng.below(n_moves - i)
                moves_a[i], moves_a[sw] = moves_a[sw], moves_a[i]
                moves_b[i], moves_b[sw] = moves_b[sw], moves_b[i]

        sel = -1
        sel_score = 0.0
        sel_cost = 0
        for i in range(take):
            a = moves_a[i]
            b = moves_b[i]
            score = cur_eff + _move_gain(item_off, eff, grp_off, grp_item, grp_w,
                                         z, item_of, a, b)
            if a >= 0 and b >= 0:
                deltas = ((a, -1), (a + 1, 1), (b, 1), (b + 1, -1))
            elif a >= 0:
                deltas = ((a, -1), (a + 1, 1))
            else:
                deltas = ((b, 1), (b + 1, -1))
            new_cost = cur_cost + _delta_cost(item_off, ppc, storage, z, deltas)
            if _is_tabu(tabu_a, tabu_b, tabu_exp, a, b, it) and score <= best_eff:
                continue
            if sel < 0 or score > sel_score or (score == sel_score and new_cost < sel_cost):
                sel = i
                sel_score = score
                sel_cost = new_cost
        if sel < 0:
            continue  # everything sampled is tabu; tenure will age out

        a = moves_a[sel]
        b = moves_b[sel]
        if a >= 0:
            z[a] -= 1
            z[a + 1] += 1
        if b >= 0:
            z[b] += 1
            z[b + 1] -= 1
        cur_cost = sel_cost
        cur_eff = _effect_full(item_off, eff, grp_off, grp_item, grp_w, z, r)
        slot = n_applied % tenure
        tabu_a[slot] = a
        tabu_b[slot] = b
        tabu_exp[slot] = it + tenure + 1
        n_applied += 1
        if cur_eff > best_eff:
            best_eff = cur_eff
            best_cost = cur_cost
            best_z = list(z)
            best_iter = it + 1

    return best_z, best_iter


def _move_valid(z, a, b) -> bool:
    # incremented entries stay nonnegative trivially; the only hazard is the
    # double decrement when the demoted and promote-source entries coincide
    if a == b + 1:
        return z[a] >= 2
    return True


def _is_tabu(tabu_a, tabu_b, tabu_exp, a, b, it) -> bool:
    for s in range(len(tabu_a)):
        if tabu_a[s] == a and tabu_b[s] == b and tabu_exp[s] > it:
            return True
    return False


def _move_gain(item_off, eff, grp_off, grp_item, grp_w, z, item_of, a, b) -> float:
    """Exact effect change of one tabu move, via its changed case ordinals.

    A demote shifts one boundary down (ordinal = prefix through a), a promote
    shifts one up (ordinal = prefix through b, plus one). When both parts of
    a cross-item move hit the same ordinal, one combined re-evaluation is
    done; otherwise the two single-item differences are summed.
    """
    c1 = -1
    c2 = -1
    j1 = -1
    j2 = -1
    if a >= 0:
        j1 = item_of[a]
        cum = 0
        for x in range(item_off[j1], a + 1):
            cum += z[x]
        c1 = cum
    if b >= 0:
        j2 = item_of[b]
        cum = 0
        for x in range(item_off[j2], b + 1):
            cum += z[x]
        c2 = cum + 1

    if a >= 0 and b >= 0 and c1 == c2 and j1 != j2:
        a1_new = _alt_at(item_off, z, j1, c1, a, -1, a + 1, 1)
        a2_new = _alt_at(item_off, z, j2, c2, b, 1, b + 1, -1)
        old_v = _combo_value(item_off, eff, grp_off, grp_item, grp_w, z, c1, -1, -1, -1, -1)
        new_v = _combo_value(item_off, eff, grp_off, grp_item, grp_w, z, c1,
                             j1, a1_new, j2, a2_new)
        return new_v - old_v

    t1 = 0.0
    t2 = 0.0
    if a >= 0:
        a_old = _alt_at(item_off, z, j1, c1)
        a_new = _alt_at(item_off, z, j1, c1, a, -1, a + 1, 1)
        old_v = _combo_value(item_off, eff, grp_off, grp_item, grp_w, z, c1, j1, a_old, -1, -1)
        new_v = _combo_value(item_off, eff, grp_off, grp_item, grp_w, z, c1, j1, a_new, -1, -1)
        t1 = new_v - old_v
    if b >= 0:
        b_old = _alt_at(item_off, z, j2, c2)
        b_new = _alt_at(item_off, z, j2, c2, b, 1, b + 1, -1)
        old_v = _combo_value(item_off, eff, grp_off, grp_item, grp_w, z, c2, j2, b_old, -1, -1)
        new_v = _combo_value(item_off, eff, grp_off, grp_item, grp_w, z, c2, j2, b_new, -1, -1)
        t2 = new_v - old_v
    return t1 + t2


# ---------------------------------------------------------------------------
# simulation kernel
#
# Event-driven replay of one decision cycle. Events are pre-sorted arrivals;
# ev_profile[e] is a disease id (1..m) or 0 for a standalone epidemic-only
# event (suspected companion); ev_susp[e] marks arrivals that additionally
# trigger the epidemic block. Profile 0 is epidemic control.
#
# Per case: mandatory supplies are consumed first (consuming below the
# per-case quantity flags the profile untreatable for *subsequent* cases);
# then each alternative item takes its first alternative with sufficient
# stock, permanently skipping exhausted ones. If a mandatory supply cannot
# serve the current case, or an item runs out of alternatives, the case is
# rolled back, counted untreated, and the profile flag flips false.
#
# Epidemic effects are re-summed at the end in canonical (source disease,
# ordinal, sub-event) order given by ``canon`` so that interleaving cannot
# change the floating-point sum.


def simulate(inv0, plan, mand_off, mand_sup, mand_qty,
             item_off, alt_off, alt_sup, alt_qty, alt_eff,
             pgrp_off, grp_off, grp_item, grp_w,
             ev_profile, ev_susp, canon, trace=None):
    inv0 = _aslist(inv0)
    plan = _aslist(plan)
    mand_off = _aslist(mand_off)
    mand_sup = _aslist(mand_sup)
    mand_qty = _aslist(mand_qty)
    item_off = _aslist(item_off)
    alt_off = _aslist(alt_off)
    alt_sup = _aslist(alt_sup)
    alt_qty = _aslist(alt_qty)
    alt_eff = _aslist(alt_eff)
    pgrp_off = _aslist(pgrp_off)
    grp_off = _aslist(grp_off)
    grp_item = _aslist(grp_item)
    grp_w = _aslist(grp_w)
    ev_profile = _aslist(ev_profile)
    ev_susp = _aslist(ev_susp)
    canon = _aslist(canon)

    n_sup = len(inv0)
    n_prof = len(mand_off) - 1
    stock = [inv0[k] + plan[k] for k in range(n_sup)]
    head = list(alt_off[:-1])  # per flat item: first not-yet-removed alternative
    flags = [True] * n_prof
    ups_i = [0.0] * n_prof
    untreated = [0] * n_prof
    treated = [0] * n_prof
    contrib = [0.0] * len(ev_profile)

    rb_sup: list[int] = []
    rb_qty: list[int] = []
    chosen: list[float] = []
    chosen_alts: list[int] = []

    def process_block(p: int) -> float:
        """Treat one case of profile p; returns its effect or -1.0 on rollback."""
        rb_sup.clear()
        rb_qty.clear()
        for x in range(mand_off[p], mand_off[p + 1]):
            s = mand_sup[x]
            q = mand_qty[x]
            if stock[s] < q:
                for i in range(len(rb_sup)):
                    stock[rb_sup[i]] += rb_qty[i]
                flags[p] = False
                return -1.0
            stock[s] -= q
            rb_sup.append(s)
            rb_qty.append(q)
            if stock[s] < q:
                flags[p] = False  # guards the next case; this one completes
        chosen.clear()
        chosen_alts.clear()
        for t in range(item_off[p], item_off[p + 1]):
            h = head[t]
            end = alt_off[t + 1]
            while h < end and stock[alt_sup[h]] < alt_qty[h]:
                h += 1
            head[t] = h
            if h == end:
                for i in range(len(rb_sup)):
                    stock[rb_sup[i]] += rb_qty[i]
                flags[p] = False
                return -1.0
            s = alt_sup[h]
            q = alt_qty[h]
            stock[s] -= q
            rb_sup.append(s)
            rb_qty.append(q)
            chosen.append(alt_eff[h])
            chosen_alts.append(h)
        prod = 1.0
        for g in range(pgrp_off[p], pgrp_off[p + 1]):
            ssum = 0.0
            for x in range(grp_off[g], grp_off[g + 1]):
                ssum += grp_w[x] * chosen[grp_item[x]]
            prod *= ssum
        return prod if prod <= 1.0 else 1.0

    for e in range(len(ev_profile)):
        p = ev_profile[e]
        if p >= 1:
            if flags[p]:
                val = process_block(p)
                if val >= 0.0:
                    ups_i[p] += val
                    treated[p] += 1
                    if trace is not None:
                        trace.append((e, p, tuple(chosen_alts), val))
                else:
                    untreated[p] += 1
            else:
                untreated[p] += 1
            if ev_susp[e]:
                if flags[0]:
                    val = process_block(0)
                    if val >= 0.0:
                        contrib[e] = val
                        treated[0] += 1
                        if trace is not None:
                            trace.append((e, 0, tuple(chosen_alts), val))
                    else:
                        untreated[0] += 1
                else:
                    untreated[0] += 1
        else:
            if flags[0]:
                val = process_block(0)
                if val >= 0.0:
                    contrib[e] = val
                    treated[0] += 1
                    if trace is not None:
                        trace.append((e, 0, tuple(chosen_alts), val))
                else:
                    untreated[0] += 1
            else:
                untreated[0] += 1

    ups = 0.0
    for idx in canon:
        ups += contrib[idx]

    return (ups, ups_i, [1 if f else 0 for f in flags], untreated, treated, stock)
