"""Hot numeric kernels, JIT-compiled when numba is available.

Each kernel is written once as a plain numpy-on-int64 function and wrapped
with numba.njit unless the environment variable FIVEFLOW_DISABLE_NUMBA is
set to a non-empty value other than "0", in which case the identical
pure-Python implementation runs.  All kernels are deterministic.

Contents:
  * max-flow on a preallocated arc arena (Edmonds-Karp, integral),
  * the faithful-flow decision engine: depth-first atom assignment with
    per-vertex completion windows, demand odometer, and a strictness
    battery of max-flow runs whose integral witnesses average to an
    interior certificate,
  * the independent oracle: exhaustive scaled-integer grid search,
  * minimum edge cut between two contracted vertex sets (for cyclic edge
    connectivity).
"""

from __future__ import annotations

import os

import numpy as np

_DISABLE = os.environ.get("FIVEFLOW_DISABLE_NUMBA", "").strip() not in ("", "0")

if not _DISABLE:
    try:
        from numba import njit as _njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _DISABLE = True

if _DISABLE:

    def _jit(fn):
        return fn

else:

    def _jit(fn):
        return _njit(cache=True)(fn)


NUMBA_ENABLED = not _DISABLE


# ===========================================================================
# Max-flow on an arc arena
# ===========================================================================
#
# Arcs are stored in (forward, reverse) pairs: arc a's reverse is a ^ 1.
# `first[v]` heads a chain through `nxt` of arcs leaving v; `arc_to[a]` is
# the target.  Capacities are mutated in place (residual network).


def _maxflow_py(nn, s, t, first, nxt, arc_to, cap, limit):
    parent = np.empty(nn, np.int64)
    queue = np.empty(nn, np.int64)
    flow = np.int64(0)
    while flow < limit:
        for i in range(nn):
            parent[i] = -2
        parent[s] = -1
        queue[0] = s
        qh, qt = 0, 1
        reached = False
        while qh < qt:
            u = queue[qh]
            qh += 1
            a = first[u]
            while a != -1:
                v = arc_to[a]
                if cap[a] > 0 and parent[v] == -2:
                    parent[v] = a
                    if v == t:
                        reached = True
                        break
                    queue[qt] = v
                    qt += 1
                a = nxt[a]
            if reached:
                break
        if not reached:
            break
        bottleneck = limit - flow
        v = t
        while v != s:
            a = parent[v]
            if cap[a] < bottleneck:
                bottleneck = cap[a]
            v = arc_to[a ^ 1]
        v = t
        while v != s:
            a = parent[v]
            cap[a] -= bottleneck
            cap[a ^ 1] += bottleneck
            v = arc_to[a ^ 1]
        flow += bottleneck
    return flow


_maxflow = _jit(_maxflow_py)


# ===========================================================================
# Engine: strictness battery over one demand vector
# ===========================================================================
#
# Flow-network layout for a circulation instance with mp interval-valued
# edges and n_v vertices (super-source S = n_v, super-sink T = n_v + 1):
#   arcs 2j / 2j+1        : interval edge j, tail -> head, capacity 1
#   arcs 2mp+4v .. +3     : S -> v pair, then v -> T pair
# A demand vector kk (net outflow of the fractional parts per vertex) is
# feasible in the closed sense iff saturating all S-arcs is possible.


def _reset_caps_py(n_v, mp, kk, cap, fixed):
    for j in range(mp):
        cap[2 * j] = 0 if j == fixed else 1
        cap[2 * j + 1] = 0
    base = 2 * mp
    for v in range(n_v):
        kv = kk[v]
        cap[base + 4 * v] = kv if kv > 0 else 0
        cap[base + 4 * v + 1] = 0
        cap[base + 4 * v + 2] = -kv if kv < 0 else 0
        cap[base + 4 * v + 3] = 0


_reset_caps = _jit(_reset_caps_py)


def _total_pos_py(n_v, kk):
    total = np.int64(0)
    for v in range(n_v):
        if kk[v] > 0:
            total += kk[v]
    return total


_total_pos = _jit(_total_pos_py)


def _battery_py(n_v, mp, ie_tails, ie_heads, kk, first, nxt, arc_to, cap, acc, stats):
    """Closed feasibility plus both per-edge boundary fixings.

    Returns 1 and fills acc[j] = sum over the 2*mp boundary witnesses of
    their value on edge j (an integer in [1, 2*mp - 1]) iff every run is
    feasible; returns 0 otherwise.
    """
    nn = n_v + 2
    s = n_v
    t = n_v + 1
    for j in range(mp):
        acc[j] = 0

    target = _total_pos(n_v, kk)
    _reset_caps(n_v, mp, kk, cap, -1)
    stats[3] += 1
    if _maxflow(nn, s, t, first, nxt, arc_to, cap, target) < target:
        return 0

    for j in range(mp):
        # Fix t_j = 0: remove the arc, demands unchanged.
        _reset_caps(n_v, mp, kk, cap, j)
        stats[3] += 1
        if _maxflow(nn, s, t, first, nxt, arc_to, cap, target) < target:
            return 0
        for j2 in range(mp):
            if j2 != j:
                acc[j2] += 1 - cap[2 * j2]
        # Fix t_j = 1: remove the arc, shift one unit tail -> head.
        kk[ie_tails[j]] -= 1
        kk[ie_heads[j]] += 1
        target1 = _total_pos(n_v, kk)
        _reset_caps(n_v, mp, kk, cap, j)
        stats[3] += 1
        ok = _maxflow(nn, s, t, first, nxt, arc_to, cap, target1) >= target1
        kk[ie_tails[j]] += 1
        kk[ie_heads[j]] -= 1
        if not ok:
            return 0
        for j2 in range(mp):
            if j2 != j:
                acc[j2] += 1 - cap[2 * j2]
        acc[j] += 1
    return 1


_battery = _jit(_battery_py)


# ===========================================================================
# Engine: leaf evaluation (demand odometer + battery)
# ===========================================================================


def _leaf_py(n_v, m, tails, heads, kind_sel, res5, iin, iout, out_tnum, stats):
    """Decide one complete atom assignment; return the certificate
    denominator (2*mp, or 1 when no interval edges) if feasible, else 0.

    On success out_tnum[p] holds the t-numerator of the interval edge at
    search position p.
    """
    mp = np.int64(0)
    for p in range(m):
        if kind_sel[p] == 0:
            mp += 1
    ie_pos = np.empty(mp, np.int64)
    ie_tails = np.empty(mp, np.int64)
    ie_heads = np.empty(mp, np.int64)
    idx = 0
    for p in range(m):
        if kind_sel[p] == 0:
            ie_pos[idx] = p
            ie_tails[idx] = tails[p]
            ie_heads[idx] = heads[p]
            idx += 1

    # Demand windows: k_v = net outflow of fractional parts at v, an
    # integer congruent to res5[v] mod 5 with 1 - iin <= k <= iout - 1.
    k0 = np.zeros(n_v, np.int64)
    kmx = np.zeros(n_v, np.int64)
    for v in range(n_v):
        if iin[v] == 0 and iout[v] == 0:
            if res5[v] != 0:
                return 0
        else:
            lo = 1 - iin[v]
            hi = iout[v] - 1
            first_k = lo + ((res5[v] - lo) % 5)
            if first_k > hi:
                return 0
            k0[v] = first_k
            kmx[v] = first_k + 5 * ((hi - first_k) // 5)

    smin = np.zeros(n_v + 1, np.int64)
    smax = np.zeros(n_v + 1, np.int64)
    for v in range(n_v - 1, -1, -1):
        smin[v] = smin[v + 1] + k0[v]
        smax[v] = smax[v + 1] + kmx[v]
    if smin[0] > 0 or smax[0] < 0:
        return 0

    # Flow-network arena (static chains, capacities reset per run).
    nn = n_v + 2
    n_arcs = 2 * mp + 4 * n_v
    arc_to = np.empty(n_arcs, np.int64)
    arc_frm = np.empty(n_arcs, np.int64)
    for j in range(mp):
        arc_to[2 * j] = ie_heads[j]
        arc_frm[2 * j] = ie_tails[j]
        arc_to[2 * j + 1] = ie_tails[j]
        arc_frm[2 * j + 1] = ie_heads[j]
    for v in range(n_v):
        base = 2 * mp + 4 * v
        arc_to[base] = v
        arc_frm[base] = n_v  # S
        arc_to[base + 1] = n_v
        arc_frm[base + 1] = v
        arc_to[base + 2] = n_v + 1  # T
        arc_frm[base + 2] = v
        arc_to[base + 3] = v
        arc_frm[base + 3] = n_v + 1
    first = np.full(nn, -1, np.int64)
    nxt = np.empty(n_arcs, np.int64)
    for a in range(n_arcs - 1, -1, -1):
        f = arc_frm[a]
        nxt[a] = first[f]
        first[f] = a
    cap = np.zeros(n_arcs, np.int64)
    acc = np.zeros(mp, np.int64)
    kk = np.zeros(n_v, np.int64)

    # Odometer over demand vectors with suffix-sum windows forcing total 0.
    cand = np.empty(n_v, np.int64)
    kcur = np.empty(n_v, np.int64)
    psum = np.zeros(n_v + 1, np.int64)
    pos = 0
    if n_v > 0:
        cand[0] = k0[0]
    while pos >= 0:
        if pos == n_v:
            stats[2] += 1
            if mp == 0:
                return 1
            for v in range(n_v):
                kk[v] = kcur[v]
            if _battery(
                n_v, mp, ie_tails, ie_heads, kk, first, nxt, arc_to, cap, acc, stats
            ) == 1:
                for j in range(mp):
                    out_tnum[ie_pos[j]] = acc[j]
                return 2 * mp
            pos -= 1
            continue
        k = cand[pos]
        s = psum[pos]
        found = False
        while k <= kmx[pos]:
            rest = s + k
            if rest + smin[pos + 1] <= 0 and rest + smax[pos + 1] >= 0:
                found = True
                break
            k += 5
        if found:
            kcur[pos] = k
            cand[pos] = k + 5
            psum[pos + 1] = s + k
            pos += 1
            if pos < n_v:
                cand[pos] = k0[pos]
        else:
            pos -= 1
    return 0


_leaf = _jit(_leaf_py)


def _window_ok_py(r, n_in, n_out):
    if n_in == 0 and n_out == 0:
        return r == 0
    lo = 1 - n_in
    first_k = lo + ((r - lo) % 5)
    return first_k <= n_out - 1


_window_ok = _jit(_window_ok_py)


# ===========================================================================
# Engine: depth-first atom assignment
# ===========================================================================


def _engine_py(n_v, tails, heads, acnt, akind, aval, out_choice, out_tnum, stats):
    """Decide faithfulness; edges come pre-sorted in search order.

    Returns 0 (infeasible) or the certificate denominator; on success
    out_choice[p] is the chosen atom index and out_tnum[p] the t-numerator
    for interval-valued positions.
    """
    m = tails.shape[0]
    if m == 0:
        return np.int64(1)
    res5 = np.zeros(n_v, np.int64)
    iin = np.zeros(n_v, np.int64)
    iout = np.zeros(n_v, np.int64)
    undeg = np.zeros(n_v, np.int64)
    for p in range(m):
        undeg[tails[p]] += 1
        undeg[heads[p]] += 1
    kind_sel = np.zeros(m, np.int64)
    trial = np.zeros(m, np.int64)

    pos = 0
    while pos >= 0:
        if pos == m:
            stats[1] += 1
            den = _leaf(
                n_v, m, tails, heads, kind_sel, res5, iin, iout, out_tnum, stats
            )
            if den > 0:
                return den
            pos -= 1
            # Undo the placement at the new position before retrying.
            a = out_choice[pos]
            val = aval[pos, a]
            t = tails[pos]
            h = heads[pos]
            res5[h] = (res5[h] - val) % 5
            res5[t] = (res5[t] + val) % 5
            if akind[pos, a] == 0:
                iout[t] -= 1
                iin[h] -= 1
            undeg[t] += 1
            undeg[h] += 1
            continue
        if trial[pos] >= acnt[pos]:
            trial[pos] = 0
            pos -= 1
            if pos >= 0:
                a = out_choice[pos]
                val = aval[pos, a]
                t = tails[pos]
                h = heads[pos]
                res5[h] = (res5[h] - val) % 5
                res5[t] = (res5[t] + val) % 5
                if akind[pos, a] == 0:
                    iout[t] -= 1
                    iin[h] -= 1
                undeg[t] += 1
                undeg[h] += 1
            continue
        a = trial[pos]
        trial[pos] += 1
        stats[0] += 1
        kind = akind[pos, a]
        val = aval[pos, a]
        t = tails[pos]
        h = heads[pos]
        res5[h] = (res5[h] + val) % 5
        res5[t] = (res5[t] - val) % 5
        if kind == 0:
            iout[t] += 1
            iin[h] += 1
        undeg[t] -= 1
        undeg[h] -= 1
        out_choice[pos] = a
        kind_sel[pos] = kind
        ok = True
        if undeg[t] == 0 and not _window_ok(res5[t], iin[t], iout[t]):
            ok = False
        if ok and undeg[h] == 0 and not _window_ok(res5[h], iin[h], iout[h]):
            ok = False
        if ok:
            pos += 1
            if pos < m:
                trial[pos] = 0
        else:
            res5[h] = (res5[h] - val) % 5
            res5[t] = (res5[t] + val) % 5
            if kind == 0:
                iout[t] -= 1
                iin[h] -= 1
            undeg[t] += 1
            undeg[h] += 1
    return np.int64(0)


_engine = _jit(_engine_py)


# ===========================================================================
# Independent oracle: scaled-integer grid search for one atom assignment
# ===========================================================================
#
# With mi interval-valued edges all candidate flows live on the grid
# base + g/S with S = 2*mi and g in [1, S-1]; conservation of the scaled
# values V = base*S + g is an exact congruence mod 5*S.


def _oracle_py(n_v, mi, tails_i, heads_i, scale, res0, icnt0, out_g):
    mod = 5 * scale
    res = np.empty(n_v, np.int64)
    icnt = np.empty(n_v, np.int64)
    for v in range(n_v):
        res[v] = res0[v] % mod
        icnt[v] = icnt0[v]
        if icnt[v] == 0 and res[v] != 0:
            return np.int64(0)
    if mi == 0:
        return np.int64(1)
    gtry = np.zeros(mi, np.int64)
    pos = 0
    gtry[0] = 1
    while pos >= 0:
        if pos == mi:
            return np.int64(1)
        g = gtry[pos]
        if g > scale - 1:
            pos -= 1
            if pos >= 0:
                g0 = out_g[pos]
                t = tails_i[pos]
                h = heads_i[pos]
                res[h] = (res[h] - g0) % mod
                res[t] = (res[t] + g0) % mod
                icnt[t] += 1
                icnt[h] += 1
            continue
        gtry[pos] = g + 1
        t = tails_i[pos]
        h = heads_i[pos]
        res[h] = (res[h] + g) % mod
        res[t] = (res[t] - g) % mod
        icnt[t] -= 1
        icnt[h] -= 1
        ok = True
        if icnt[t] == 0 and res[t] != 0:
            ok = False
        if ok and icnt[h] == 0 and res[h] != 0:
            ok = False
        if ok:
            out_g[pos] = g
            pos += 1
            if pos < mi:
                gtry[pos] = 1
        else:
            res[h] = (res[h] - g) % mod
            res[t] = (res[t] + g) % mod
            icnt[t] += 1
            icnt[h] += 1
    return np.int64(0)


_oracle = _jit(_oracle_py)


# ===========================================================================
# Minimum edge cut between two contracted vertex sets
# ===========================================================================


def _pair_mincut_py(n, tails, heads, is_src, is_snk, k):
    """Min cut (capped at k) separating the src set from the snk set.

    Undirected unit-capacity edges: each edge becomes an antiparallel arc
    pair, both of capacity 1, paired for residual bookkeeping.
    """
    m = tails.shape[0]
    n_arcs = 2 * m
    arc_to = np.empty(n_arcs, np.int64)
    arc_frm = np.empty(n_arcs, np.int64)
    cap = np.ones(n_arcs, np.int64)
    for i in range(m):
        arc_to[2 * i] = heads[i]
        arc_frm[2 * i] = tails[i]
        arc_to[2 * i + 1] = tails[i]
        arc_frm[2 * i + 1] = heads[i]
    first = np.full(n, -1, np.int64)
    nxt = np.empty(n_arcs, np.int64)
    for a in range(n_arcs - 1, -1, -1):
        f = arc_frm[a]
        nxt[a] = first[f]
        first[f] = a
    parent = np.empty(n, np.int64)
    queue = np.empty(n, np.int64)
    flow = np.int64(0)
    while flow < k:
        for v in range(n):
            parent[v] = -2
        qt = 0
        for v in range(n):
            if is_src[v] == 1:
                parent[v] = -1
                queue[qt] = v
                qt += 1
        qh = 0
        reach = np.int64(-1)
        while qh < qt and reach < 0:
            u = queue[qh]
            qh += 1
            a = first[u]
            while a != -1:
                v = arc_to[a]
                if cap[a] > 0 and parent[v] == -2:
                    parent[v] = a
                    if is_snk[v] == 1:
                        reach = v
                        break
                    queue[qt] = v
                    qt += 1
                a = nxt[a]
        if reach < 0:
            break
        bottleneck = k - flow
        v = reach
        while parent[v] != -1:
            a = parent[v]
            if cap[a] < bottleneck:
                bottleneck = cap[a]
            v = arc_frm[a]
        v = reach
        while parent[v] != -1:
            a = parent[v]
            cap[a] -= bottleneck
            cap[a ^ 1] += bottleneck
            v = arc_frm[a]
        flow += bottleneck
    return flow


_pair_mincut_kernel = _jit(_pair_mincut_py)


def pair_mincut(n, tails, heads, src_mask, snk_mask, k):
    """Python-facing wrapper: vertex sets given as bitmasks over 0..n-1."""
    is_src = np.zeros(n, np.int64)
    is_snk = np.zeros(n, np.int64)
    for v in range(n):
        if src_mask >> v & 1:
            is_src[v] = 1
        if snk_mask >> v & 1:
            is_snk[v] = 1
    return int(_pair_mincut_kernel(n, tails, heads, is_src, is_snk, k))


def engine_search(n_v, tails, heads, acnt, akind, aval, out_choice, out_tnum, stats):
    """Python-facing wrapper for the decision engine kernel."""
    return int(
        _engine(n_v, tails, heads, acnt, akind, aval, out_choice, out_tnum, stats)
    )


def oracle_search(n_v, mi, tails_i, heads_i, scale, res0, icnt0, out_g):
    """Python-facing wrapper for the per-assignment oracle kernel."""
    return int(_oracle(n_v, mi, tails_i, heads_i, scale, res0, icnt0, out_g))
