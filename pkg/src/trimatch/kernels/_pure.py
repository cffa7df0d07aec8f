"""Pure-Python kernels: CDCL propositional search and matching local search.

This is the fallback backend used when the compiled extension is not
available, and the reference for its semantics.  The local-search kernel is
draw-for-draw identical to the compiled one (same RNG, same scan order);
the CDCL kernel guarantees the same verdicts but may take a different
search path.
"""

from __future__ import annotations

import heapq

BACKEND = "pure"

SAT = 1
UNSAT = -1
UNKNOWN = 0

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Deterministic 64-bit generator shared by both kernel backends."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        return self.next() % bound


def _luby(x: int) -> int:
    # Luby restart sequence 1,1,2,1,1,2,4,... (0-based index)
    size, seq = 1, 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) // 2
        seq -= 1
        x %= size
    return 1 << seq


def solve_cnf(num_vars: int, lits, offsets, seed: int = 0,
              max_conflicts: int = -1) -> tuple[int, list[int] | None, dict]:
    """CDCL search over a clause set given as a flat literal array.

    Returns (status, model, stats); model is a 0/1 list indexed 1..num_vars
    when status == SAT.  Deterministic for a given seed.  Intended for small
    problems; the compiled backend handles the large ones.
    """
    rng = SplitMix64(seed)
    val = [0] * (num_vars + 1)            # 0 unassigned, +1 true, -1 false
    level = [0] * (num_vars + 1)
    reason_cl: list[int | None] = [None] * (num_vars + 1)
    reason_bin = [0] * (num_vars + 1)     # other literal when reason is binary
    phase = [False] * (num_vars + 1)
    activity = [rng.below(1024) * 1e-12 for _ in range(num_vars + 1)]
    var_inc = 1.0

    nlitidx = 2 * num_vars + 2
    bin_imp: list[list[int]] = [[] for _ in range(nlitidx)]
    watches: list[list[int]] = [[] for _ in range(nlitidx)]
    clauses: list[list[int] | None] = []
    trail: list[int] = []
    trail_lim: list[int] = []
    qhead = 0

    stats = {"conflicts": 0, "decisions": 0, "propagations": 0,
             "restarts": 0, "learned": 0}

    def lidx(lit: int) -> int:
        return 2 * lit if lit > 0 else -2 * lit + 1

    def lit_val(lit: int) -> int:
        v = val[abs(lit)]
        return v if lit > 0 else -v

    def assign(lit: int, lvl: int, rcl: int | None, rbin: int = 0) -> None:
        v = abs(lit)
        val[v] = 1 if lit > 0 else -1
        phase[v] = lit > 0
        level[v] = lvl
        reason_cl[v] = rcl
        reason_bin[v] = rbin
        trail.append(lit)

    # -- load ------------------------------------------------------------

    offsets = list(offsets)
    lits = list(lits)
    root_units: list[int] = []
    for ci in range(len(offsets) - 1):
        cl = lits[offsets[ci]:offsets[ci + 1]]
        cset = set(cl)
        if any(-l in cset for l in cset):
            continue  # tautology
        cl = sorted(cset, key=abs)
        if not cl:
            return UNSAT, None, stats
        if len(cl) == 1:
            root_units.append(cl[0])
        elif len(cl) == 2:
            bin_imp[lidx(-cl[0])].append(cl[1])
            bin_imp[lidx(-cl[1])].append(cl[0])
        else:
            cid = len(clauses)
            clauses.append(cl)
            watches[lidx(cl[0])].append(cid)
            watches[lidx(cl[1])].append(cid)

    for u in root_units:
        if lit_val(u) == -1:
            return UNSAT, None, stats
        if lit_val(u) == 0:
            assign(u, 0, None)

    heap: list[tuple[float, int]] = [(-activity[v], v) for v in range(1, num_vars + 1)]
    heapq.heapify(heap)

    def bump(v: int) -> None:
        nonlocal var_inc
        activity[v] += var_inc
        if activity[v] > 1e100:
            for u in range(1, num_vars + 1):
                activity[u] *= 1e-100
            var_inc *= 1e-100
            heap[:] = [(-activity[u], u) for u in range(1, num_vars + 1)]
            heapq.heapify(heap)
        else:
            heapq.heappush(heap, (-activity[v], v))

    def propagate() -> tuple[int | None, int, int]:
        """Returns (conflict clause id | None, conflict lit a, lit b).

        For a binary conflict the id is -2 and (a, b) are its literals.
        """
        nonlocal qhead
        while qhead < len(trail):
            p = trail[qhead]
            qhead += 1
            stats["propagations"] += 1
            for q in bin_imp[lidx(p)]:
                vq = lit_val(q)
                if vq == -1:
                    return -2, q, -p
                if vq == 0:
                    assign(q, len(trail_lim), None, -p)
            falsified = -p
            ws = watches[lidx(falsified)]
            i = 0
            while i < len(ws):
                cid = ws[i]
                cl = clauses[cid]
                if cl is None:
                    ws[i] = ws[-1]
                    ws.pop()
                    continue
                if cl[0] == falsified:
                    cl[0], cl[1] = cl[1], cl[0]
                first = cl[0]
                if lit_val(first) == 1:
                    i += 1
                    continue
                for j in range(2, len(cl)):
                    if lit_val(cl[j]) != -1:
                        cl[1], cl[j] = cl[j], cl[1]
                        watches[lidx(cl[1])].append(cid)
                        ws[i] = ws[-1]
                        ws.pop()
                        break
                else:
                    if lit_val(first) == -1:
                        return cid, 0, 0
                    assign(first, len(trail_lim), cid)
                    i += 1
        return None, 0, 0

    def reason_lits(v: int) -> list[int]:
        rcl = reason_cl[v]
        if rcl is None:
            rb = reason_bin[v]
            return [rb] if rb else []
        return clauses[rcl][1:]  # first literal is the one asserted

    def analyze(confl_id: int, ca: int, cb: int) -> tuple[list[int], int]:
        seen = bytearray(num_vars + 1)
        learnt: list[int] = [0]
        path = 0
        p = 0
        idx = len(trail) - 1
        cur = len(trail_lim)
        cl_lits = [ca, cb] if confl_id == -2 else clauses[confl_id]
        while True:
            for q in cl_lits:
                vq = abs(q)
                if not seen[vq] and level[vq] > 0:
                    seen[vq] = 1
                    bump(vq)
                    if level[vq] >= cur:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[abs(trail[idx])]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            seen[abs(p)] = 0
            path -= 1
            if path == 0:
                break
            cl_lits = reason_lits(abs(p))
        learnt[0] = -p

        # cheap self-subsumption: drop lits whose whole reason is already seen
        kept = [learnt[0]]
        for q in learnt[1:]:
            vq = abs(q)
            if reason_cl[vq] is None and reason_bin[vq] == 0:
                kept.append(q)
                continue
            if any(level[abs(l)] > 0 and not seen[abs(l)] for l in reason_lits(vq)):
                kept.append(q)
        learnt = kept

        if len(learnt) == 1:
            return learnt, 0
        bt = max(range(1, len(learnt)), key=lambda j: level[abs(learnt[j])])
        learnt[1], learnt[bt] = learnt[bt], learnt[1]
        return learnt, level[abs(learnt[1])]

    def backjump(lvl: int) -> None:
        nonlocal qhead
        while trail and level[abs(trail[-1])] > lvl:
            lit = trail.pop()
            v = abs(lit)
            val[v] = 0
            reason_cl[v] = None
            reason_bin[v] = 0
            heapq.heappush(heap, (-activity[v], v))
        del trail_lim[lvl:]
        qhead = len(trail)

    def add_learnt(learnt: list[int]) -> None:
        stats["learned"] += 1
        lvl = len(trail_lim)
        if len(learnt) == 1:
            assign(learnt[0], lvl, None)
        elif len(learnt) == 2:
            bin_imp[lidx(-learnt[0])].append(learnt[1])
            bin_imp[lidx(-learnt[1])].append(learnt[0])
            assign(learnt[0], lvl, None, learnt[1])
        else:
            cid = len(clauses)
            clauses.append(learnt)
            watches[lidx(learnt[0])].append(cid)
            watches[lidx(learnt[1])].append(cid)
            assign(learnt[0], lvl, cid)

    restart_base = 100
    conflicts_to_restart = restart_base * _luby(0)
    conflicts_since_restart = 0

    while True:
        confl, ca, cb = propagate()
        if confl is not None:
            stats["conflicts"] += 1
            conflicts_since_restart += 1
            if not trail_lim:
                return UNSAT, None, stats
            if 0 <= max_conflicts <= stats["conflicts"]:
                return UNKNOWN, None, stats
            learnt, bt_level = analyze(confl, ca, cb)
            backjump(bt_level)
            add_learnt(learnt)
            var_inc /= 0.95
            continue
        if len(trail) == num_vars:
            model = [0] * (num_vars + 1)
            for v in range(1, num_vars + 1):
                model[v] = 1 if val[v] == 1 else 0
            return SAT, model, stats
        if conflicts_since_restart >= conflicts_to_restart:
            stats["restarts"] += 1
            conflicts_since_restart = 0
            conflicts_to_restart = restart_base * _luby(stats["restarts"])
            backjump(0)
            continue
        # decide
        v = 0
        if rng.below(64) == 0:
            cand = 1 + rng.below(num_vars)
            if val[cand] == 0:
                v = cand
        while v == 0:
            act, cand = heapq.heappop(heap)
            if val[cand] == 0 and -act == activity[cand]:
                v = cand
        stats["decisions"] += 1
        trail_lim.append(len(trail))
        assign(v if phase[v] else -v, len(trail_lim), None)


# -- local search over perfect matchings --------------------------------------


def _blocking_scan(n, r_mf, r_fd, r_dm, mw, wd, dm, out):
    """Append blocking (i, j, k) triples to out; returns their count."""
    rm = [r_mf[i][mw[i]] for i in range(n)]
    rf = [r_fd[j][wd[j]] for j in range(n)]
    rd = [r_dm[k][dm[k]] for k in range(n)]
    cnt = 0
    for i in range(n):
        ri = r_mf[i]
        rmi = rm[i]
        for j in range(n):
            if ri[j] >= rmi:
                continue
            rj = r_fd[j]
            rfj = rf[j]
            for k in range(n):
                if rj[k] < rfj and r_dm[k][i] < rd[k]:
                    out.append((i, j, k))
                    cnt += 1
    return cnt


def count_blocking(r_mf, r_fd, r_dm, mw, wd) -> int:
    """Number of blocking triples of the perfect matching (mw, wd)."""
    return len(list_blocking(r_mf, r_fd, r_dm, mw, wd))


def list_blocking(r_mf, r_fd, r_dm, mw, wd) -> list[tuple[int, int, int]]:
    """Blocking (man, woman, dog) index triples, in scan order."""
    r_mf = _aslists(r_mf)
    r_fd = _aslists(r_fd)
    r_dm = _aslists(r_dm)
    n = len(r_mf)
    mw = list(mw)
    wd = list(wd)
    dm = [0] * n
    for i in range(n):
        dm[wd[mw[i]]] = i
    out: list[tuple[int, int, int]] = []
    _blocking_scan(n, r_mf, r_fd, r_dm, mw, wd, dm, out)
    return out


def local_search(r_mf, r_fd, r_dm, seed: int, max_iters: int,
                 restart_every: int) -> tuple[int, int, int, list[int], list[int]]:
    """Blocking-triple-count minimization over perfect matchings.

    State is a perfect matching (man i -> woman mw[i] -> dog wd[mw[i]]).
    Each iteration scans for blocking triples; if none, the matching is
    stable.  Otherwise one blocking triple is chosen uniformly at random,
    formed as a family, and the two broken families are repaired by randomly
    re-pairing the displaced agents.  Every restart_every iterations the
    state is re-randomized.  Returns (status, iterations, best_count, mw, wd)
    where (mw, wd) is the stable matching or the best state seen.
    """
    r_mf = _aslists(r_mf)
    r_fd = _aslists(r_fd)
    r_dm = _aslists(r_dm)
    n = len(r_mf)
    rng = SplitMix64(seed)

    def shuffled() -> list[int]:
        p = list(range(n))
        for i in range(n - 1, 0, -1):
            j = rng.below(i + 1)
            p[i], p[j] = p[j], p[i]
        return p

    def rebuild():
        mw = shuffled()
        wd = shuffled()
        wm = [0] * n
        dm = [0] * n
        for i in range(n):
            wm[mw[i]] = i
            dm[wd[mw[i]]] = i
        return mw, wd, wm, dm

    mw, wd, wm, dm = rebuild()
    best_count = -1
    best_mw: list[int] = []
    best_wd: list[int] = []
    blocking: list[tuple[int, int, int]] = []

    for it in range(max_iters):
        if restart_every > 0 and it > 0 and it % restart_every == 0:
            mw, wd, wm, dm = rebuild()
        blocking.clear()
        cnt = _blocking_scan(n, r_mf, r_fd, r_dm, mw, wd, dm, blocking)
        if cnt == 0:
            return 1, it, 0, mw, wd
        if best_count < 0 or cnt < best_count:
            best_count = cnt
            best_mw = mw[:]
            best_wd = wd[:]
        i, j, k = blocking[rng.below(cnt)]
        j1 = mw[i]
        k1 = wd[j1]
        m2 = wm[j]
        k2 = wd[j]
        m3 = dm[k]
        j3 = mw[m3]
        w0, w1 = (j1, j3) if rng.below(2) == 0 else (j3, j1)
        d0, d1 = (k1, k2) if rng.below(2) == 0 else (k2, k1)
        for m, w, d in ((i, j, k), (m2, w0, d0), (m3, w1, d1)):
            mw[m] = w
            wd[w] = d
            wm[w] = m
            dm[d] = m
    return 0, max_iters, best_count, best_mw, best_wd


def _aslists(mat) -> list[list[int]]:
    if hasattr(mat, "tolist"):
        return mat.tolist()
    return [list(row) for row in mat]
