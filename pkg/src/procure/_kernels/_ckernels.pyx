# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``pykernels.py``.

Every loop, accumulation order, comparison, and PRNG draw mirrors the pure
implementation exactly so that both backends return bit-identical results.
Keep the two files in lockstep; the cross-backend equality tests enforce it.
"""

import numpy as np

from libc.stdint cimport int64_t, uint64_t

cdef uint64_t _GAMMA = 0x9E3779B97F4A7C15u


cdef inline uint64_t _next_u64(uint64_t* state) nogil:
    state[0] = state[0] + _GAMMA
    cdef uint64_t z = state[0]
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9u
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBu
    return z ^ (z >> 31)


cdef inline uint64_t _below(uint64_t* state, uint64_t n) nogil:
    return _next_u64(state) % n


# ---------------------------------------------------------------------------
# subproblem kernel


cdef inline double _fn_value(const int64_t[::1] grp_off, const int64_t[::1] grp_item,
                             const double[::1] grp_w, const double[::1] eff,
                             const int64_t[::1] ptr) nogil:
    cdef double prod = 1.0
    cdef double s
    cdef Py_ssize_t g, x
    for g in range(grp_off.shape[0] - 1):
        s = 0.0
        for x in range(grp_off[g], grp_off[g + 1]):
            s += grp_w[x] * eff[ptr[grp_item[x]]]
        prod *= s
    return prod if prod <= 1.0 else 1.0


cdef double _effect_full(const int64_t[::1] item_off, const double[::1] eff,
                         const int64_t[::1] grp_off, const int64_t[::1] grp_item,
                         const double[::1] grp_w, const int64_t[::1] z, int64_t r,
                         int64_t[::1] ptr, int64_t[::1] rem) nogil:
    if r == 0:
        return 0.0
    cdef Py_ssize_t n_items = item_off.shape[0] - 1
    cdef Py_ssize_t j
    cdef int64_t x, c
    for j in range(n_items):
        x = item_off[j]
        while z[x] == 0:
            x += 1
        ptr[j] = x
        rem[j] = z[x]
    cdef double acc = 0.0
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


def subproblem_effect(item_off, eff, grp_off, grp_item, grp_w, z, r):
    cdef const int64_t[::1] io = item_off
    cdef Py_ssize_t n_items = io.shape[0] - 1
    scratch = np.zeros(n_items if n_items > 0 else 1, dtype=np.int64)
    scratch2 = np.zeros(n_items if n_items > 0 else 1, dtype=np.int64)
    return _effect_full(io, eff, grp_off, grp_item, grp_w, z, r, scratch, scratch2)


cdef int64_t _cost_of(const int64_t[::1] ppc, const int64_t[::1] storage,
                      const int64_t[::1] z) nogil:
    cdef int64_t total = 0
    cdef int64_t over
    cdef Py_ssize_t a
    for a in range(z.shape[0]):
        over = z[a] - storage[a]
        if over > 0:
            total += ppc[a] * over
    return total


cdef inline int64_t _alt_at(const int64_t[::1] item_off, const int64_t[::1] z,
                            int64_t j, int64_t c,
                            int64_t da1, int64_t dv1, int64_t da2, int64_t dv2) nogil:
    cdef int64_t cum = 0
    cdef int64_t x, v
    for x in range(item_off[j], item_off[j + 1]):
        v = z[x]
        if x == da1:
            v += dv1
        if x == da2:
            v += dv2
        cum += v
        if cum >= c:
            return x
    return item_off[j + 1] - 1


cdef double _combo_value(const int64_t[::1] item_off, const double[::1] eff,
                         const int64_t[::1] grp_off, const int64_t[::1] grp_item,
                         const double[::1] grp_w, const int64_t[::1] z, int64_t c,
                         int64_t ov_j1, int64_t ov_a1, int64_t ov_j2, int64_t ov_a2) nogil:
    cdef double prod = 1.0
    cdef double s
    cdef Py_ssize_t g, x
    cdef int64_t j, a
    for g in range(grp_off.shape[0] - 1):
        s = 0.0
        for x in range(grp_off[g], grp_off[g + 1]):
            j = grp_item[x]
            if j == ov_j1:
                a = ov_a1
            elif j == ov_j2:
                a = ov_a2
            else:
                a = _alt_at(item_off, z, j, c, -1, 0, -1, 0)
            s += grp_w[x] * eff[a]
        prod *= s
    return prod if prod <= 1.0 else 1.0


cdef int64_t _delta_cost4(const int64_t[::1] ppc, const int64_t[::1] storage,
                          const int64_t[::1] z,
                          int64_t a0, int64_t d0, int64_t a1, int64_t d1,
                          int64_t a2, int64_t d2, int64_t a3, int64_t d3) nogil:
    # merge repeated indices first (mirrors _delta_cost in pykernels)
    cdef int64_t idx[4]
    cdef int64_t dvs[4]
    cdef int n = 0
    cdef int i, found
    cdef int64_t aa[4]
    cdef int64_t dd[4]
    aa[0] = a0; dd[0] = d0
    aa[1] = a1; dd[1] = d1
    aa[2] = a2; dd[2] = d2
    aa[3] = a3; dd[3] = d3
    cdef int k
    for k in range(4):
        if aa[k] < 0:
            continue
        found = 0
        for i in range(n):
            if idx[i] == aa[k]:
                dvs[i] += dd[k]
                found = 1
                break
        if not found:
            idx[n] = aa[k]
            dvs[n] = dd[k]
            n += 1
    cdef int64_t d = 0
    cdef int64_t old, new
    for i in range(n):
        old = z[idx[i]] - storage[idx[i]]
        new = old + dvs[i]
        d += ppc[idx[i]] * ((new if new > 0 else 0) - (old if old > 0 else 0))
    return d


cdef double _upgrade_gain(const int64_t[::1] item_off, const double[::1] eff,
                          const int64_t[::1] grp_off, const int64_t[::1] grp_item,
                          const double[::1] grp_w, const int64_t[::1] z,
                          int64_t j, int64_t a_to, int64_t a_from) nogil:
    cdef double gain = 0.0
    cdef int64_t prev_c = -1
    cdef int64_t cum = 0
    cdef int64_t x, t, c, a_old, a_new
    cdef double old_v, new_v
    for x in range(item_off[j], a_to):
        cum += z[x]
    for t in range(a_to, a_from):
        cum += z[t]
        c = cum + 1
        if c == prev_c:
            continue
        prev_c = c
        a_old = _alt_at(item_off, z, j, c, -1, 0, -1, 0)
        a_new = _alt_at(item_off, z, j, c, a_to, 1, a_from, -1)
        old_v = _combo_value(item_off, eff, grp_off, grp_item, grp_w, z, c, j, a_old, -1, -1)
        new_v = _combo_value(item_off, eff, grp_off, grp_item, grp_w, z, c, j, a_new, -1, -1)
        gain += new_v - old_v
    return gain


def subproblem_greedy(item_off_in, ppc_in, eff_in, storage_in, grp_off_in, grp_item_in,
                      grp_w_in, z_in, r, budget):
    cdef const int64_t[::1] item_off = item_off_in
    cdef const int64_t[::1] ppc = ppc_in
    cdef const double[::1] eff = eff_in
    cdef const int64_t[::1] storage = storage_in
    cdef const int64_t[::1] grp_off = grp_off_in
    cdef const int64_t[::1] grp_item = grp_item_in
    cdef const double[::1] grp_w = grp_w_in

    z_arr = np.array(z_in, dtype=np.int64)
    z0_arr = z_arr.copy()
    cdef int64_t[::1] z = z_arr
    cdef Py_ssize_t n_items = item_off.shape[0] - 1
    cdef int64_t rr = r
    cdef int64_t bud = budget

    ptr_arr = np.zeros(n_items if n_items > 0 else 1, dtype=np.int64)
    rem_arr = np.zeros(n_items if n_items > 0 else 1, dtype=np.int64)
    cdef int64_t[::1] ptr = ptr_arr
    cdef int64_t[::1] rem = rem_arr

    cdef double eff_in_val = _effect_full(item_off, eff, grp_off, grp_item, grp_w, z, rr, ptr, rem)
    cdef int64_t cur_cost = _cost_of(ppc, storage, z)

    cdef int has_best
    cdef int best_free, cand_free
    cdef double best_key, cand_key
    cdef int64_t best_j, best_to, best_from, best_dcost
    cdef int64_t j, a_from, a_to, dcost, lo, hi
    cdef double dgain
    cdef int take_it

    while True:
        has_best = 0
        best_free = 0
        best_key = 0.0
        best_j = 0
        best_to = 0
        best_from = 0
        best_dcost = 0
        for j in range(n_items):
            lo = item_off[j]
            hi = item_off[j + 1]
            for a_from in range(lo + 1, hi):
                if z[a_from] == 0:
                    continue
                for a_to in range(lo, a_from):
                    dcost = _delta_cost4(ppc, storage, z, a_to, 1, a_from, -1, -1, 0, -1, 0)
                    if cur_cost + dcost > bud:
                        continue
                    dgain = _upgrade_gain(item_off, eff, grp_off, grp_item, grp_w,
                                          z, j, a_to, a_from)
                    if dgain <= 0.0:
                        continue
                    cand_free = 1 if dcost <= 0 else 0
                    cand_key = dgain if cand_free else dgain / (<double> dcost)
                    take_it = 0
                    if not has_best:
                        take_it = 1
                    elif cand_free != best_free:
                        take_it = cand_free
                    elif cand_key != best_key:
                        take_it = 1 if cand_key > best_key else 0
                    else:
                        if j != best_j:
                            take_it = 1 if j < best_j else 0
                        elif a_to != best_to:
                            take_it = 1 if a_to < best_to else 0
                        else:
                            take_it = 1 if a_from < best_from else 0
                    if take_it:
                        has_best = 1
                        best_free = cand_free
                        best_key = cand_key
                        best_j = j
                        best_to = a_to
                        best_from = a_from
                        best_dcost = dcost
        if not has_best:
            break
        z[best_to] += 1
        z[best_from] -= 1
        cur_cost += best_dcost

    if _effect_full(item_off, eff, grp_off, grp_item, grp_w, z, rr, ptr, rem) < eff_in_val:
        return z0_arr.tolist()
    return z_arr.tolist()


def subproblem_tabu(item_off_in, ppc_in, eff_in, storage_in, grp_off_in, grp_item_in,
                    grp_w_in, z_in, r, budget, k_n, tenure, max_iter, seed):
    cdef const int64_t[::1] item_off = item_off_in
    cdef const int64_t[::1] ppc = ppc_in
    cdef const double[::1] eff = eff_in
    cdef const int64_t[::1] storage = storage_in
    cdef const int64_t[::1] grp_off = grp_off_in
    cdef const int64_t[::1] grp_item = grp_item_in
    cdef const double[::1] grp_w = grp_w_in

    z_arr = np.array(z_in, dtype=np.int64)
    cdef int64_t[::1] z = z_arr
    cdef Py_ssize_t n_items = item_off.shape[0] - 1
    cdef Py_ssize_t n_alts = ppc.shape[0]
    cdef int64_t rr = r
    cdef int64_t bud = budget
    cdef int64_t kn = k_n
    cdef int64_t ten = tenure
    cdef int64_t miter = max_iter
    cdef uint64_t rng = <uint64_t> (<object> seed & 0xFFFFFFFFFFFFFFFF)

    ptr_arr = np.zeros(n_items if n_items > 0 else 1, dtype=np.int64)
    rem_arr = np.zeros(n_items if n_items > 0 else 1, dtype=np.int64)
    cdef int64_t[::1] ptr = ptr_arr
    cdef int64_t[::1] rem = rem_arr

    cdef int64_t cur_cost = _cost_of(ppc, storage, z)
    cdef double cur_eff = _effect_full(item_off, eff, grp_off, grp_item, grp_w, z, rr, ptr, rem)
    best_arr = z_arr.copy()
    cdef int64_t[::1] best_z = best_arr
    cdef double best_eff = cur_eff
    cdef int64_t best_iter = 0

    item_of_arr = np.zeros(n_alts if n_alts > 0 else 1, dtype=np.int64)
    last_arr = np.zeros(n_alts if n_alts > 0 else 1, dtype=np.int64)
    cdef int64_t[::1] item_of = item_of_arr
    cdef int64_t[::1] last = last_arr
    cdef int64_t j, x
    for j in range(n_items):
        for x in range(item_off[j], item_off[j + 1]):
            item_of[x] = j
        last[item_off[j + 1] - 1] = 1

    tabu_a_arr = np.full(ten, -2, dtype=np.int64)
    tabu_b_arr = np.full(ten, -2, dtype=np.int64)
    tabu_exp_arr = np.zeros(ten, dtype=np.int64)
    cdef int64_t[::1] tabu_a = tabu_a_arr
    cdef int64_t[::1] tabu_b = tabu_b_arr
    cdef int64_t[::1] tabu_exp = tabu_exp_arr
    cdef int64_t n_applied = 0

    cdef Py_ssize_t cap = n_alts * n_alts + 2 * n_alts + 1
    moves_a_arr = np.zeros(cap, dtype=np.int64)
    moves_b_arr = np.zeros(cap, dtype=np.int64)
    cdef int64_t[::1] moves_a = moves_a_arr
    cdef int64_t[::1] moves_b = moves_b_arr

    cdef int64_t it, a, b, n_moves, take, i, sw, tmp, sel
    cdef int64_t dcost, new_cost, sel_cost, slot
    cdef double score, sel_score, gain
    cdef int is_tabu, s

    for it in range(miter):
        n_moves = 0
        for a in range(n_alts):
            if last[a] or z[a] == 0:
                continue
            for b in range(n_alts):
                if last[b] or z[b + 1] == 0 or a == b:
                    continue
                if a == b + 1 and z[a] < 2:
                    continue
                dcost = _delta_cost4(ppc, storage, z, a, -1, a + 1, 1, b, 1, b + 1, -1)
                if cur_cost + dcost <= bud:
                    moves_a[n_moves] = a
                    moves_b[n_moves] = b
                    n_moves += 1
        if n_items == 1:
            for a in range(n_alts):
                if last[a] or z[a] == 0:
                    continue
                dcost = _delta_cost4(ppc, storage, z, a, -1, a + 1, 1, -1, 0, -1, 0)
                if cur_cost + dcost <= bud:
                    moves_a[n_moves] = a
                    moves_b[n_moves] = -1
                    n_moves += 1
            for b in range(n_alts):
                if last[b] or z[b + 1] == 0:
                    continue
                dcost = _delta_cost4(ppc, storage, z, b, 1, b + 1, -1, -1, 0, -1, 0)
                if cur_cost + dcost <= bud:
                    moves_a[n_moves] = -1
                    moves_b[n_moves] = b
                    n_moves += 1
        if n_moves == 0:
            break
        take = n_moves
        if n_moves > kn:
            take = kn
            for i in range(take):
                sw = i + <int64_t> _below(&rng, <uint64_t> (n_moves - i))
                tmp = moves_a[i]; moves_a[i] = moves_a[sw]; moves_a[sw] = tmp
                tmp = moves_b[i]; moves_b[i] = moves_b[sw]; moves_b[sw] = tmp

        sel = -1
        sel_score = 0.0
        sel_cost = 0
        for i in range(take):
            a = moves_a[i]
            b = moves_b[i]
            gain = _move_gain(item_off, eff, grp_off, grp_item, grp_w, z, item_of, a, b)
            score = cur_eff + gain
            if a >= 0 and b >= 0:
                dcost = _delta_cost4(ppc, storage, z, a, -1, a + 1, 1, b, 1, b + 1, -1)
            elif a >= 0:
                dcost = _delta_cost4(ppc, storage, z, a, -1, a + 1, 1, -1, 0, -1, 0)
            else:
                dcost = _delta_cost4(ppc, storage, z, b, 1, b + 1, -1, -1, 0, -1, 0)
            new_cost = cur_cost + dcost
            is_tabu = 0
            for s in range(ten):
                if tabu_a[s] == a and tabu_b[s] == b and tabu_exp[s] > it:
                    is_tabu = 1
                    break
            if is_tabu and score <= best_eff:
                continue
            if sel < 0 or score > sel_score or (score == sel_score and new_cost < sel_cost):
                sel = i
                sel_score = score
                sel_cost = new_cost
        if sel < 0:
            continue

        a = moves_a[sel]
        b = moves_b[sel]
        if a >= 0:
            z[a] -= 1
            z[a + 1] += 1
        if b >= 0:
            z[b] += 1
            z[b + 1] -= 1
        cur_cost = sel_cost
        cur_eff = _effect_full(item_off, eff, grp_off, grp_item, grp_w, z, rr, ptr, rem)
        slot = n_applied % ten
        tabu_a[slot] = a
        tabu_b[slot] = b
        tabu_exp[slot] = it + ten + 1
        n_applied += 1
        if cur_eff > best_eff:
            best_eff = cur_eff
            for x in range(n_alts):
                best_z[x] = z[x]
            best_iter = it + 1

    return best_arr.tolist(), int(best_iter)


cdef double _move_gain(const int64_t[::1] item_off, const double[::1] eff,
                       const int64_t[::1] grp_off, const int64_t[::1] grp_item,
                       const double[::1] grp_w, const int64_t[::1] z,
                       const int64_t[::1] item_of, int64_t a, int64_t b) nogil:
    cdef int64_t c1 = -1, c2 = -1, j1 = -1, j2 = -1
    cdef int64_t cum, x
    cdef int64_t a_old, a_new, b_old, b_new, a1_new, a2_new
    cdef double old_v, new_v, t1, t2
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
        a_old = _alt_at(item_off, z, j1, c1, -1, 0, -1, 0)
        a_new = _alt_at(item_off, z, j1, c1, a, -1, a + 1, 1)
        old_v = _combo_value(item_off, eff, grp_off, grp_item, grp_w, z, c1, j1, a_old, -1, -1)
        new_v = _combo_value(item_off, eff, grp_off, grp_item, grp_w, z, c1, j1, a_new, -1, -1)
        t1 = new_v - old_v
    if b >= 0:
        b_old = _alt_at(item_off, z, j2, c2, -1, 0, -1, 0)
        b_new = _alt_at(item_off, z, j2, c2, b, 1, b + 1, -1)
        old_v = _combo_value(item_off, eff, grp_off, grp_item, grp_w, z, c2, j2, b_old, -1, -1)
        new_v = _combo_value(item_off, eff, grp_off, grp_item, grp_w, z, c2, j2, b_new, -1, -1)
        t2 = new_v - old_v
    return t1 + t2


# ---------------------------------------------------------------------------
# simulation kernel


def simulate(inv0_in, plan_in, mand_off_in, mand_sup_in, mand_qty_in,
             item_off_in, alt_off_in, alt_sup_in, alt_qty_in, alt_eff_in,
             pgrp_off_in, grp_off_in, grp_item_in, grp_w_in,
             ev_profile_in, ev_susp_in, canon_in):
    cdef const int64_t[::1] inv0 = inv0_in
    cdef const int64_t[::1] plan = plan_in
    cdef const int64_t[::1] mand_off = mand_off_in
    cdef const int64_t[::1] mand_sup = mand_sup_in
    cdef const int64_t[::1] mand_qty = mand_qty_in
    cdef const int64_t[::1] item_off = item_off_in
    cdef const int64_t[::1] alt_off = alt_off_in
    cdef const int64_t[::1] alt_sup = alt_sup_in
    cdef const int64_t[::1] alt_qty = alt_qty_in
    cdef const double[::1] alt_eff = alt_eff_in
    cdef const int64_t[::1] pgrp_off = pgrp_off_in
    cdef const int64_t[::1] grp_off = grp_off_in
    cdef const int64_t[::1] grp_item = grp_item_in
    cdef const double[::1] grp_w = grp_w_in
    cdef const int64_t[::1] ev_profile = ev_profile_in
    cdef const unsigned char[::1] ev_susp = ev_susp_in
    cdef const int64_t[::1] canon = canon_in

    cdef Py_ssize_t n_sup = inv0.shape[0]
    cdef Py_ssize_t n_prof = mand_off.shape[0] - 1
    cdef Py_ssize_t n_items = alt_off.shape[0] - 1
    cdef Py_ssize_t n_ev = ev_profile.shape[0]

    stock_arr = np.zeros(n_sup, dtype=np.int64)
    cdef int64_t[::1] stock = stock_arr
    cdef Py_ssize_t k
    for k in range(n_sup):
        stock[k] = inv0[k] + plan[k]

    head_arr = np.zeros(n_items if n_items > 0 else 1, dtype=np.int64)
    cdef int64_t[::1] head = head_arr
    for k in range(n_items):
        head[k] = alt_off[k]

    flags_arr = np.ones(n_prof, dtype=np.int64)
    ups_i_arr = np.zeros(n_prof, dtype=np.float64)
    untreated_arr = np.zeros(n_prof, dtype=np.int64)
    treated_arr = np.zeros(n_prof, dtype=np.int64)
    contrib_arr = np.zeros(n_ev if n_ev > 0 else 1, dtype=np.float64)
    cdef int64_t[::1] flags = flags_arr
    cdef double[::1] ups_i = ups_i_arr
    cdef int64_t[::1] untreated = untreated_arr
    cdef int64_t[::1] treated = treated_arr
    cdef double[::1] contrib = contrib_arr

    # rollback scratch sized to the largest block
    cdef Py_ssize_t max_block = 1
    cdef Py_ssize_t p
    for p in range(n_prof):
        k = (mand_off[p + 1] - mand_off[p]) + (item_off[p + 1] - item_off[p])
        if k > max_block:
            max_block = k
    rb_sup_arr = np.zeros(max_block, dtype=np.int64)
    rb_qty_arr = np.zeros(max_block, dtype=np.int64)
    chosen_arr = np.zeros(max_block, dtype=np.float64)
    cdef int64_t[::1] rb_sup = rb_sup_arr
    cdef int64_t[::1] rb_qty = rb_qty_arr
    cdef double[::1] chosen = chosen_arr

    cdef Py_ssize_t e
    cdef int64_t pe
    cdef double val
    cdef double ups = 0.0

    with nogil:
        for e in range(n_ev):
            pe = ev_profile[e]
            if pe >= 1:
                if flags[pe]:
                    val = _process_block(pe, stock, head, flags,
                                         mand_off, mand_sup, mand_qty,
                                         item_off, alt_off, alt_sup, alt_qty, alt_eff,
                                         pgrp_off, grp_off, grp_item, grp_w,
                                         rb_sup, rb_qty, chosen)
                    if val >= 0.0:
                        ups_i[pe] += val
                        treated[pe] += 1
                    else:
                        untreated[pe] += 1
                else:
                    untreated[pe] += 1
                if ev_susp[e]:
                    if flags[0]:
                        val = _process_block(0, stock, head, flags,
                                             mand_off, mand_sup, mand_qty,
                                             item_off, alt_off, alt_sup, alt_qty, alt_eff,
                                             pgrp_off, grp_off, grp_item, grp_w,
                                             rb_sup, rb_qty, chosen)
                        if val >= 0.0:
                            contrib[e] = val
                            treated[0] += 1
                        else:
                            untreated[0] += 1
                    else:
                        untreated[0] += 1
            else:
                if flags[0]:
                    val = _process_block(0, stock, head, flags,
                                         mand_off, mand_sup, mand_qty,
                                         item_off, alt_off, alt_sup, alt_qty, alt_eff,
                                         pgrp_off, grp_off, grp_item, grp_w,
                                         rb_sup, rb_qty, chosen)
                    if val >= 0.0:
                        contrib[e] = val
                        treated[0] += 1
                    else:
                        untreated[0] += 1
                else:
                    untreated[0] += 1

        for e in range(canon.shape[0]):
            ups += contrib[canon[e]]

    return (ups, ups_i_arr.tolist(), flags_arr.tolist(), untreated_arr.tolist(),
            treated_arr.tolist(), stock_arr.tolist())


cdef double _process_block(int64_t p, int64_t[::1] stock, int64_t[::1] head,
                           int64_t[::1] flags,
                           const int64_t[::1] mand_off, const int64_t[::1] mand_sup,
                           const int64_t[::1] mand_qty,
                           const int64_t[::1] item_off, const int64_t[::1] alt_off,
                           const int64_t[::1] alt_sup, const int64_t[::1] alt_qty,
                           const double[::1] alt_eff,
                           const int64_t[::1] pgrp_off, const int64_t[::1] grp_off,
                           const int64_t[::1] grp_item, const double[::1] grp_w,
                           int64_t[::1] rb_sup, int64_t[::1] rb_qty,
                           double[::1] chosen) nogil:
    cdef Py_ssize_t n_rb = 0
    cdef Py_ssize_t n_chosen = 0
    cdef int64_t x, s, q, t, h, end
    cdef Py_ssize_t i, g
    cdef double prod, ssum
    for x in range(mand_off[p], mand_off[p + 1]):
        s = mand_sup[x]
        q = mand_qty[x]
        if stock[s] < q:
            for i in range(n_rb):
                stock[rb_sup[i]] += rb_qty[i]
            flags[p] = 0
            return -1.0
        stock[s] -= q
        rb_sup[n_rb] = s
        rb_qty[n_rb] = q
        n_rb += 1
        if stock[s] < q:
            flags[p] = 0
    for t in range(item_off[p], item_off[p + 1]):
        h = head[t]
        end = alt_off[t + 1]
        while h < end and stock[alt_sup[h]] < alt_qty[h]:
            h += 1
        head[t] = h
        if h == end:
            for i in range(n_rb):
                stock[rb_sup[i]] += rb_qty[i]
            flags[p] = 0
            return -1.0
        s = alt_sup[h]
        q = alt_qty[h]
        stock[s] -= q
        rb_sup[n_rb] = s
        rb_qty[n_rb] = q
        n_rb += 1
        chosen[n_chosen] = alt_eff[h]
        n_chosen += 1
    prod = 1.0
    for g in range(pgrp_off[p], pgrp_off[p + 1]):
        ssum = 0.0
        for x in range(grp_off[g], grp_off[g + 1]):
            ssum += grp_w[x] * chosen[grp_item[x]]
        prod *= ssum
    return prod if prod <= 1.0 else 1.0
