"""Compare the numba and pure-numpy backends.

Each backend runs in its own interpreter because the choice is fixed at
import time by SPAP_DISABLE_NUMBA.  The worker reports timings and the
results it computed; the parent checks the results agree and prints the
speedup per task.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def _kernel_inputs(n1: int, seed: int):
    import numpy as np

    from spap import _kernels as K
    from spap.approx import approx_two
    from spap.instances import GenParams, generate

    inst = generate(GenParams(n1=n1, seed=seed))
    a = K.pack_instance(inst)
    m = approx_two(inst, seed)
    assign = np.full(n1, -1, dtype=np.int64)
    for s, p in m.pairs():
        assign[s - 1] = p - 1
    pcount = np.bincount(assign[assign >= 0], minlength=inst.n2).astype(np.int64)
    lcount = np.bincount(a.plect[assign[assign >= 0]], minlength=inst.n3).astype(np.int64)
    # drop a few students so the scan has something to find
    for i in range(0, n1, 7):
        if assign[i] >= 0:
            pcount[assign[i]] -= 1
            lcount[a.plect[assign[i]]] -= 1
            assign[i] = -1
    worst = np.zeros(inst.n3, dtype=np.int64)
    K.worst_nonempty_ranks(a.plect, a.lrank, pcount, worst)
    return a, assign, pcount, lcount, worst


def _timed(fn, repeat: int):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def worker(repeat: int, quick: bool) -> dict:
    from spap import _kernels as K
    from spap.instances import GenParams, generate
    from spap.solvers import max_stable_oracle, solve_exact

    # compile outside the timed region (a no-op for numpy)
    warm = generate(GenParams(n1=10, seed=99))
    max_stable_oracle(warm)
    for mode in ("with-coalition", "no-coalition+rotate"):
        solve_exact(warm, mode, warm_start=False, flow_bound=False)

    tasks = {}
    calls = 200 if quick else 2000
    a, assign, pcount, lcount, worst = _kernel_inputs(200, 3)

    def scan():
        for _ in range(calls):
            r = K.blocking_scan(a.pref, a.plen, a.plect, a.pcap, a.lcap, a.lrank, assign, pcount, lcount, worst)
        return [int(v) for v in r]

    def cycle():
        for _ in range(calls // 10):
            r = K.envy_has_cycle(a.srank, assign)
        return bool(r)

    tasks[f"blocking_scan n1=200 x{calls}"] = _timed(scan, repeat)
    tasks[f"envy_has_cycle n1=200 x{calls // 10}"] = _timed(cycle, repeat)

    count = 3 if quick else 10
    insts = [generate(GenParams(n1=8, pref_max=4, seed=s)) for s in range(count)]
    tasks[f"oracle n1=8 x{count}"] = _timed(lambda: [max_stable_oracle(i).size for i in insts], repeat)
    # without the warm start and flow bound the search itself dominates
    insts = [generate(GenParams(n1=14, seed=s)) for s in range(count // 2 + 1)]
    for mode in ("with-coalition", "no-coalition+rotate"):
        tasks[f"exact {mode} n1=14 x{len(insts)}"] = _timed(
            lambda: [solve_exact(i, mode, warm_start=False, flow_bound=False).size for i in insts], repeat)
    return {"backend": K.backend(), "tasks": {k: {"seconds": t, "result": r} for k, (t, r) in tasks.items()}}


def run_backend(disable: bool, repeat: int, quick: bool) -> dict:
    env = dict(os.environ, SPAP_DISABLE_NUMBA="1" if disable else "0")
    cmd = [sys.executable, __file__, "--worker", "--repeat", str(repeat)] + (["--quick"] if quick else [])
    out = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True).stdout
    return json.loads(out)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3, help="best of this many timings per task")
    ap.add_argument("--quick", action="store_true", help="smaller workloads")
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args(argv)
    if args.worker:
        print(json.dumps(worker(args.repeat, args.quick)))
        return 0

    fast = run_backend(False, args.repeat, args.quick)
    slow = run_backend(True, args.repeat, args.quick)
    print(f"{'task':<42}{fast['backend']:>12}{slow['backend']:>12}{'speedup':>10}  agree")
    agree_all = True
    for name, f in fast["tasks"].items():
        s = slow["tasks"][name]
        agree = f["result"] == s["result"]
        agree_all &= agree
        print(f"{name:<42}{f['seconds'] * 1000:>10.1f}ms{s['seconds'] * 1000:>10.1f}ms"
              f"{s['seconds'] / f['seconds']:>9.1f}x  {agree}")
    return 0 if agree_all else 1


if __name__ == "__main__":
    sys.exit(main())
