"""Array kernels for the exhaustive searches.

Every hot routine has two bodies:

* a scalar-loop body (``*_loop``) written in the numba-compatible subset,
  compiled with ``numba.njit`` when numba is usable;
* a vectorised numpy body (``*_numpy``) used when numba is missing or the
  environment sets ``SPAP_DISABLE_NUMBA=1``.

The depth-first drivers (:func:`oracle_step`, :func:`bb_step`) exist once;
they are compiled in numba mode and interpreted otherwise, calling whichever
leaf routines are active.  They are resumable: all search state lives in the
caller's arrays, so a driver can stop at a leaf, hand it back to Python and
continue where it left off.

All indices here are 0-based; unassigned is ``-1``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .model import Instance

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and os.environ.get("SPAP_DISABLE_NUMBA", "").strip().lower() in ("", "0", "false", "no")

DONE, FOUND, PAUSE, BUDGET = 0, 1, 2, 3

# st layout shared by both drivers
ST_DEPTH, ST_NODES, ST_INCUMBENT, ST_MAX_NODES, ST_AT_LEAF, ST_ASSIGNED = range(6)
ST_LEN = 6


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


@dataclass(frozen=True)
class InstanceArrays:
    pref: np.ndarray  # (n1, maxlen) 0-based project ids, -1 padding
    plen: np.ndarray  # (n1,)
    srank: np.ndarray  # (n1, n2) 1-based rank, 0 = not acceptable
    plect: np.ndarray  # (n2,) lecturer of each project
    pcap: np.ndarray
    lcap: np.ndarray
    lrank: np.ndarray  # (n2,) rank of each project on its lecturer's list
    sdl: np.ndarray  # (n1, n3) distinct lecturers on each student's list, -1 padding
    sdlen: np.ndarray


def pack_instance(inst: Instance) -> InstanceArrays:
    n1, n2, n3 = inst.n1, inst.n2, inst.n3
    maxlen = max(len(s.prefs) for s in inst.students)
    pref = np.full((n1, maxlen), -1, dtype=np.int64)
    plen = np.zeros(n1, dtype=np.int64)
    srank = np.zeros((n1, n2), dtype=np.int64)
    sdl = np.full((n1, n3), -1, dtype=np.int64)
    sdlen = np.zeros(n1, dtype=np.int64)
    for s in inst.students:
        i = s.id - 1
        plen[i] = len(s.prefs)
        seen = []
        for t, p in enumerate(s.prefs):
            pref[i, t] = p - 1
            srank[i, p - 1] = t + 1
            k = inst.lecturer_of(p) - 1
            if k not in seen:
                seen.append(k)
        sdl[i, : len(seen)] = seen
        sdlen[i] = len(seen)
    plect = np.array([p.lecturer - 1 for p in inst.projects], dtype=np.int64)
    pcap = np.array([p.capacity for p in inst.projects], dtype=np.int64)
    lcap = np.array([lec.capacity for lec in inst.lecturers], dtype=np.int64)
    lrank = np.zeros(n2, dtype=np.int64)
    for lec in inst.lecturers:
        for r, p in enumerate(lec.prefs, 1):
            lrank[p - 1] = r
    return InstanceArrays(pref, plen, srank, plect, pcap, lcap, lrank, sdl, sdlen)


# ---------------------------------------------------------------------------
# leaf routines: scalar loops


def _worst_loop(plect, lrank, pcount, worst):
    for k in range(worst.shape[0]):
        worst[k] = 0
    for p in range(pcount.shape[0]):
        if pcount[p] > 0 and lrank[p] > worst[plect[p]]:
            worst[plect[p]] = lrank[p]


def _blocking_scan_loop(pref, plen, plect, pcap, lcap, lrank, assign, pcount, lcount, worst):
    """First blocking pair by (student, list position): (i, p, type 1/2/3) or (-1, -1, 0).

    ``worst`` must hold each lecturer's worst non-empty rank (0 if none).
    """
    for i in range(plen.shape[0]):
        a = assign[i]
        for t in range(plen[i]):
            p = pref[i, t]
            if p == a:
                break
            if pcount[p] >= pcap[p]:
                continue
            k = plect[p]
            if a >= 0 and plect[a] == k:
                if lrank[p] < lrank[a]:
                    return i, p, 1
            elif lcount[k] < lcap[k]:
                return i, p, 2
            elif lrank[p] < worst[k]:
                return i, p, 3
    return -1, -1, 0


def _envy_has_cycle_loop(srank, assign):
    n1 = assign.shape[0]
    indeg = np.zeros(n1, dtype=np.int64)
    adj = np.zeros((n1, n1), dtype=np.bool_)
    for i in range(n1):
        a = assign[i]
        if a < 0:
            continue
        mine = srank[i, a]
        for j in range(n1):
            b = assign[j]
            if j != i and b >= 0 and srank[i, b] > 0 and srank[i, b] < mine:
                adj[i, j] = True
                indeg[j] += 1
    stack = np.empty(n1, dtype=np.int64)
    top = 0
    for i in range(n1):
        if indeg[i] == 0:
            stack[top] = i
            top += 1
    removed = 0
    while top > 0:
        top -= 1
        u = stack[top]
        removed += 1
        for j in range(n1):
            if adj[u, j]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    stack[top] = j
                    top += 1
    return removed < n1


def _leaf_feasible_loop(
    assign, choice, row_ptr, row_idx, row_coef, row_rhs, xidx,
    aux_vars, aux_ptr, aux_rows, e_vars, e_src, e_dst, v_vars, z,
):
    """Complete the auxiliary variables for the fixed x and test every row.

    Indicators take the least value their defining rows allow, v is a
    topological labelling of the envy arcs; that completion is feasible iff
    any completion is.
    """
    n1 = assign.shape[0]
    for t in range(z.shape[0]):
        z[t] = 0
    for i in range(n1):
        if assign[i] >= 0:
            z[xidx[i, choice[i]]] = 1
    for a in range(aux_vars.shape[0]):
        for t in range(aux_ptr[a], aux_ptr[a + 1]):
            r = aux_rows[t]
            act = 0
            for q in range(row_ptr[r], row_ptr[r + 1]):
                act += row_coef[q] * z[row_idx[q]]
            if act > row_rhs[r]:
                z[aux_vars[a]] = 1
                break
    if v_vars.shape[0] > 0:
        indeg = np.zeros(n1, dtype=np.int64)
        for t in range(e_vars.shape[0]):
            if z[e_vars[t]] == 1:
                indeg[e_dst[t]] += 1
        placed = np.zeros(n1, dtype=np.bool_)
        for label in range(1, n1 + 1):
            u = -1
            for i in range(n1):
                if not placed[i] and indeg[i] == 0:
                    u = i
                    break
            if u < 0:
                return False
            placed[u] = True
            z[v_vars[u]] = label
            for t in range(e_vars.shape[0]):
                if e_src[t] == u and z[e_vars[t]] == 1:
                    indeg[e_dst[t]] -= 1
    for r in range(row_rhs.shape[0]):
        act = 0
        for q in range(row_ptr[r], row_ptr[r + 1]):
            act += row_coef[q] * z[row_idx[q]]
        if act > row_rhs[r]:
            return False
    return True


def _doomed_loop(d, pref, plen, plect, pcap, lcap, lrank, assign, choice, pcount, lcount, remp, reml, worst):
    """True if some pair of a fixed student is certain to block every completion.

    A project that cannot reach capacity even if every unfixed student who
    accepts it joined stays undersubscribed; the same bound on the lecturer,
    and the fact that a lecturer's worst non-empty project only gets worse as
    students are added, decide the 1(a)/(b)/(c) clauses ahead of the leaf.
    """
    _worst(plect, lrank, pcount, worst)
    for i in range(d + 1):
        a = assign[i]
        for t in range(choice[i]):
            p = pref[i, t]
            k = plect[p]
            # a full lecturer's projects take no more students
            if lcount[k] >= lcap[k]:
                if pcount[p] >= pcap[p]:
                    continue
            elif pcount[p] + remp[p] >= pcap[p]:
                continue
            if a >= 0 and plect[a] == k:
                if lrank[p] < lrank[a]:
                    return True
            elif lcount[k] + reml[k] < lcap[k]:
                return True
            elif lrank[p] < worst[k]:
                return True
    # an unfixed student with no open project stays unassigned; their closed,
    # undersubscribed projects belong to full lecturers
    for i in range(d + 1, plen.shape[0]):
        stranded = True
        for t in range(plen[i]):
            p = pref[i, t]
            if pcount[p] < pcap[p] and lcount[plect[p]] < lcap[plect[p]]:
                stranded = False
                break
        if stranded:
            for t in range(plen[i]):
                p = pref[i, t]
                if pcount[p] < pcap[p] and lrank[p] < worst[plect[p]]:
                    return True
    return False


# ---------------------------------------------------------------------------
# leaf routines: numpy


def _worst_numpy(plect, lrank, pcount, worst):
    worst[:] = 0
    ne = pcount > 0
    np.maximum.at(worst, plect[ne], lrank[ne])


def _pair_codes(pref, plen, plect, pcap, lcap, lrank, assign, pcount, lcount, worst, cap_p, cap_l):
    """Per (student, list position) blocking code, with ``cap_p``/``cap_l`` as
    the occupancy that decides under-subscription."""
    n1, width = pref.shape
    pos = np.arange(width)
    valid = pos[None, :] < plen[:, None]
    hit = (pref == assign[:, None]) & valid & (assign[:, None] >= 0)
    apos = np.where(hit.any(axis=1), hit.argmax(axis=1), plen)
    cand = valid & (pos[None, :] < apos[:, None])
    P = np.where(valid, pref, 0)
    K = plect[P]
    under = cap_p[P] < pcap[P]
    aa = np.where(assign >= 0, assign, 0)
    same = (assign[:, None] >= 0) & (plect[aa][:, None] == K)
    live = cand & under
    ta = live & same & (lrank[P] < lrank[aa][:, None])
    tb = live & ~same & (cap_l[K] < lcap[K])
    tc = live & ~same & ~tb & (lrank[P] < worst[K])
    return np.where(ta, 1, np.where(tb, 2, np.where(tc, 3, 0)))


def _blocking_scan_numpy(pref, plen, plect, pcap, lcap, lrank, assign, pcount, lcount, worst):
    codes = _pair_codes(pref, plen, plect, pcap, lcap, lrank, assign, pcount, lcount, worst, pcount, lcount)
    nz = np.flatnonzero(codes)
    if nz.size == 0:
        return -1, -1, 0
    i, t = divmod(int(nz[0]), pref.shape[1])
    return i, int(pref[i, t]), int(codes[i, t])


def _envy_has_cycle_numpy(srank, assign):
    n1 = assign.shape[0]
    on = assign >= 0
    aa = np.where(on, assign, 0)
    other = srank[:, aa]
    mine = srank[np.arange(n1), aa]
    adj = on[:, None] & on[None, :] & (other > 0) & (other < mine[:, None])
    alive = np.ones(n1, dtype=bool)
    while alive.any():
        indeg = adj[alive].sum(axis=0)
        src = alive & (indeg == 0)
        if not src.any():
            return True
        alive &= ~src
    return False


def _row_activity_numpy(row_ptr, row_idx, row_coef, z):
    rows = np.repeat(np.arange(row_ptr.shape[0] - 1), np.diff(row_ptr))
    return np.bincount(rows, weights=row_coef * z[row_idx], minlength=row_ptr.shape[0] - 1)


def _leaf_feasible_numpy(
    assign, choice, row_ptr, row_idx, row_coef, row_rhs, xidx,
    aux_vars, aux_ptr, aux_rows, e_vars, e_src, e_dst, v_vars, z,
):
    n1 = assign.shape[0]
    z[:] = 0
    on = np.flatnonzero(assign >= 0)
    z[xidx[on, choice[on]]] = 1
    viol = _row_activity_numpy(row_ptr, row_idx, row_coef, z) > row_rhs
    if aux_vars.size:
        owner = np.repeat(np.arange(aux_vars.shape[0]), np.diff(aux_ptr))
        need = np.bincount(owner, weights=viol[aux_rows], minlength=aux_vars.shape[0]) > 0
        z[aux_vars[need]] = 1
    if v_vars.size:
        arcs = z[e_vars] == 1
        adj = np.zeros((n1, n1), dtype=bool)
        adj[e_src[arcs], e_dst[arcs]] = True
        # label = 1 + length of the longest path ending at the vertex
        label = np.zeros(n1, dtype=np.int64)
        alive = np.ones(n1, dtype=bool)
        layer = 1
        while alive.any():
            src = alive & (adj[alive].sum(axis=0) == 0)
            if not src.any():
                return False
            label[src] = layer
            alive &= ~src
            layer += 1
        z[v_vars] = label
    viol = _row_activity_numpy(row_ptr, row_idx, row_coef, z) > row_rhs
    return not viol.any()


def _doomed_numpy(d, pref, plen, plect, pcap, lcap, lrank, assign, choice, pcount, lcount, remp, reml, worst):
    _worst(plect, lrank, pcount, worst)
    rows = slice(0, d + 1)
    fixed_assign = assign[rows]
    codes = _pair_codes(
        pref[rows], plen[rows], plect, pcap, lcap, lrank, fixed_assign,
        pcount, lcount, worst, pcount + remp * (lcount[plect] < lcap[plect]), lcount + reml,
    )
    if codes.any():
        return True
    rest = slice(d + 1, pref.shape[0])
    P, L = pref[rest], plen[rest]
    valid = np.arange(pref.shape[1])[None, :] < L[:, None]
    Q = np.where(valid, P, 0)
    under = valid & (pcount[Q] < pcap[Q])
    open_ = under & (lcount[plect[Q]] < lcap[plect[Q]])
    stranded = ~open_.any(axis=1)
    return bool((stranded[:, None] & under & (lrank[Q] < worst[plect[Q]])).any())


# ---------------------------------------------------------------------------
# depth-first drivers


def oracle_step(pref, plen, srank, plect, pcap, lcap, lrank, check_coalition,
                st, choice, assign, pcount, lcount, worst, chunk):
    """Enumerate capacity-feasible assignments; stop at each stable one.

    Students are branched in index order over their list, then unassigned.
    Returns FOUND with the matching in ``assign``, DONE, PAUSE after
    ``chunk`` steps, or BUDGET when the node count passes ``st[ST_MAX_NODES]``.
    """
    n1 = plen.shape[0]
    d = st[ST_DEPTH]
    nodes = st[ST_NODES]
    max_nodes = st[ST_MAX_NODES]
    steps = 0
    while True:
        if d < 0:
            st[ST_DEPTH] = d
            st[ST_NODES] = nodes
            return DONE
        if steps >= chunk:
            st[ST_DEPTH] = d
            st[ST_NODES] = nodes
            return PAUSE
        steps += 1
        if d == n1:
            if st[ST_AT_LEAF] == 0:
                st[ST_AT_LEAF] = 1
                _worst(plect, lrank, pcount, worst)
                bi, bp, bt = _blocking_scan(pref, plen, plect, pcap, lcap, lrank, assign, pcount, lcount, worst)
                ok = bt == 0
                if ok and check_coalition != 0:
                    ok = not _envy_has_cycle(srank, assign)
                if ok:
                    st[ST_DEPTH] = d
                    st[ST_NODES] = nodes
                    return FOUND
            st[ST_AT_LEAF] = 0
            d -= 1
            continue
        c = choice[d]
        if c >= 0:
            # undo the previous choice (written out: helper calls are costly here)
            p = assign[d]
            if p >= 0:
                pcount[p] -= 1
                lcount[plect[p]] -= 1
                st[ST_ASSIGNED] -= 1
                assign[d] = -1
        opt = c + 1
        moved = False
        while opt <= plen[d]:
            if opt < plen[d]:
                p = pref[d, opt]
                if pcount[p] >= pcap[p] or lcount[plect[p]] >= lcap[plect[p]]:
                    opt += 1
                    continue
            nodes += 1
            if max_nodes >= 0 and nodes > max_nodes:
                choice[d] = -1
                st[ST_DEPTH] = d
                st[ST_NODES] = nodes
                return BUDGET
            if opt < plen[d]:
                p = pref[d, opt]
                assign[d] = p
                pcount[p] += 1
                lcount[plect[p]] += 1
                st[ST_ASSIGNED] += 1
            choice[d] = opt
            d += 1
            if d < n1:
                choice[d] = -1
            moved = True
            break
        if not moved:
            choice[d] = -1
            d -= 1


def bb_step(pref, plen, plect, pcap, lcap, lrank, sdl, sdlen, lookahead,
            row_ptr, row_idx, row_coef, row_rhs, xidx, aux_vars, aux_ptr, aux_rows,
            e_vars, e_src, e_dst, v_vars,
            st, choice, assign, pcount, lcount, remp, reml, worst, pres, z, chunk):
    """Branch and bound over student assignments; stop at each improving leaf.

    Children violating a capacity row are never created; a child is pruned
    when assigned + unbranched students cannot beat ``st[ST_INCUMBENT]``,
    when the residual lecturer capacity reachable by unbranched students
    cannot either (``pres`` is scratch space of length 3 * n3), or
    (with ``lookahead``) when :func:`_doomed_loop` holds.  A
    leaf is returned as FOUND only if every model row holds.
    """
    n1 = plen.shape[0]
    d = st[ST_DEPTH]
    nodes = st[ST_NODES]
    max_nodes = st[ST_MAX_NODES]
    steps = 0
    while True:
        if d < 0:
            st[ST_DEPTH] = d
            st[ST_NODES] = nodes
            return DONE
        if steps >= chunk:
            st[ST_DEPTH] = d
            st[ST_NODES] = nodes
            return PAUSE
        steps += 1
        if d == n1:
            if st[ST_AT_LEAF] == 0:
                st[ST_AT_LEAF] = 1
                if st[ST_ASSIGNED] > st[ST_INCUMBENT] and _leaf_feasible(
                    assign, choice, row_ptr, row_idx, row_coef, row_rhs, xidx,
                    aux_vars, aux_ptr, aux_rows, e_vars, e_src, e_dst, v_vars, z,
                ):
                    st[ST_DEPTH] = d
                    st[ST_NODES] = nodes
                    return FOUND
            st[ST_AT_LEAF] = 0
            d -= 1
            continue
        c = choice[d]
        if c >= 0:
            p = assign[d]
            if p >= 0:
                pcount[p] -= 1
                lcount[plect[p]] -= 1
                st[ST_ASSIGNED] -= 1
                assign[d] = -1
            for t in range(plen[d]):
                remp[pref[d, t]] += 1
            for t in range(sdlen[d]):
                reml[sdl[d, t]] += 1
        opt = c + 1
        moved = False
        while opt <= plen[d]:
            gain = 0
            if opt < plen[d]:
                p = pref[d, opt]
                if pcount[p] >= pcap[p] or lcount[plect[p]] >= lcap[plect[p]]:
                    opt += 1
                    continue
                gain = 1
            if st[ST_ASSIGNED] + gain + (n1 - d - 1) <= st[ST_INCUMBENT]:
                opt += 1
                continue
            nodes += 1
            if max_nodes >= 0 and nodes > max_nodes:
                choice[d] = -1
                st[ST_DEPTH] = d
                st[ST_NODES] = nodes
                return BUDGET
            # fix student d (written out: helper calls are costly here)
            if opt < plen[d]:
                assign[d] = p
                pcount[p] += 1
                lcount[plect[p]] += 1
                st[ST_ASSIGNED] += 1
            for t in range(plen[d]):
                remp[pref[d, t]] -= 1
            for t in range(sdlen[d]):
                reml[sdl[d, t]] -= 1
            choice[d] = opt
            # Bounds and lookahead.  pres[:n3] is the residual project
            # capacity of each lecturer, pres[n3:2n3] the unbranched students
            # with an open project of that lecturer, pres[2n3:] a stamp.
            n3 = lcap.shape[0]
            for k in range(3 * n3):
                pres[k] = 0
            for k in range(n3):
                worst[k] = 0
            for q in range(pcap.shape[0]):
                pres[plect[q]] += pcap[q] - pcount[q]
                if pcount[q] > 0 and lrank[q] > worst[plect[q]]:
                    worst[plect[q]] = lrank[q]
            prune = False
            free = 0
            for i in range(d + 1, n1):
                hit = False
                for t in range(plen[i]):
                    q = pref[i, t]
                    k = plect[q]
                    if pcount[q] < pcap[q] and lcount[k] < lcap[k]:
                        hit = True
                        if pres[2 * n3 + k] != i + 1:
                            pres[2 * n3 + k] = i + 1
                            pres[n3 + k] += 1
                if hit:
                    free += 1
                elif lookahead != 0:
                    # stranded: certainly unassigned, and every lecturer they
                    # could block through is full already, so frozen
                    for t in range(plen[i]):
                        q = pref[i, t]
                        if pcount[q] < pcap[q] and lrank[q] < worst[plect[q]]:
                            prune = True
            room = 0
            for k in range(n3):
                r = lcap[k] - lcount[k]
                if pres[k] < r:
                    r = pres[k]
                if pres[n3 + k] < r:
                    r = pres[n3 + k]
                room += r
            if room > free:
                room = free
            if st[ST_ASSIGNED] + room <= st[ST_INCUMBENT]:
                prune = True
            if not prune and lookahead != 0:
                # the fixed-student half of _doomed_loop, written out for speed
                for i in range(d + 1):
                    a = assign[i]
                    for t in range(choice[i]):
                        q = pref[i, t]
                        k = plect[q]
                        if lcount[k] >= lcap[k]:
                            if pcount[q] >= pcap[q]:
                                continue
                        elif pcount[q] + remp[q] >= pcap[q]:
                            continue
                        if a >= 0 and plect[a] == k:
                            if lrank[q] < lrank[a]:
                                prune = True
                        elif lcount[k] + reml[k] < lcap[k]:
                            prune = True
                        elif lrank[q] < worst[k]:
                            prune = True
                        if prune:
                            break
                    if prune:
                        break
            if prune:
                p = assign[d]
                if p >= 0:
                    pcount[p] -= 1
                    lcount[plect[p]] -= 1
                    st[ST_ASSIGNED] -= 1
                    assign[d] = -1
                for t in range(plen[d]):
                    remp[pref[d, t]] += 1
                for t in range(sdlen[d]):
                    reml[sdl[d, t]] += 1
                choice[d] = -1
                opt += 1
                continue
            d += 1
            if d < n1:
                choice[d] = -1
            moved = True
            break
        if not moved:
            choice[d] = -1
            d -= 1


# ---------------------------------------------------------------------------
# binding

blocking_scan_loop = _blocking_scan_loop
envy_has_cycle_loop = _envy_has_cycle_loop
leaf_feasible_loop = _leaf_feasible_loop
doomed_loop = _doomed_loop

if USE_NUMBA:
    _jit = numba.njit(cache=True)
    _worst = _jit(_worst_loop)
    _blocking_scan = _jit(_blocking_scan_loop)
    _envy_has_cycle = _jit(_envy_has_cycle_loop)
    _leaf_feasible = _jit(_leaf_feasible_loop)
    _doomed = _jit(_doomed_loop)
    oracle_step = _jit(oracle_step)
    bb_step = _jit(bb_step)
else:
    _worst = _worst_numpy
    _blocking_scan = _blocking_scan_numpy
    _envy_has_cycle = _envy_has_cycle_numpy
    _leaf_feasible = _leaf_feasible_numpy
    _doomed = _doomed_numpy

# public handles on the active implementations
worst_nonempty_ranks = _worst
blocking_scan = _blocking_scan
envy_has_cycle = _envy_has_cycle
leaf_feasible = _leaf_feasible
doomed = _doomed


def new_state(n1: int, n2: int, n3: int, arrays: InstanceArrays, incumbent: int = -1, max_nodes: int = -1):
    """Fresh search state: (st, choice, assign, pcount, lcount, remp, reml, worst)."""
    st = np.zeros(ST_LEN, dtype=np.int64)
    st[ST_DEPTH] = 0
    st[ST_NODES] = 1  # the root
    st[ST_INCUMBENT] = incumbent
    st[ST_MAX_NODES] = max_nodes
    choice = np.full(n1, -1, dtype=np.int64)
    assign = np.full(n1, -1, dtype=np.int64)
    pcount = np.zeros(n2, dtype=np.int64)
    lcount = np.zeros(n3, dtype=np.int64)
    remp = np.zeros(n2, dtype=np.int64)
    reml = np.zeros(n3, dtype=np.int64)
    for i in range(n1):
        for t in range(arrays.plen[i]):
            remp[arrays.pref[i, t]] += 1
        for t in range(arrays.sdlen[i]):
            reml[arrays.sdl[i, t]] += 1
    worst = np.zeros(n3, dtype=np.int64)
    return st, choice, assign, pcount, lcount, remp, reml, worst
