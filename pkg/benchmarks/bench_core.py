"""Benchmark the compiled core against the pure-Python fallback.

Workloads: (a) random request/response sequences through the chronicle
buffer (the hot loop of property tests and simulation batches), and (b) the
exact rank-test distribution kernels. Run with ``python benchmarks/bench_core.py``.
"""

import argparse
import random
import time

from asyncvis._core import _chronicle_py, _exact_py
from asyncvis.types import MONTHS, InteractionRequest, PolicySpec, ResponsePayload

try:
    from asyncvis._core import _chronicle_c, _exact_c
except ImportError:
    _chronicle_c = _exact_c = None


def drive_buffers(module, sequences, seed=12345):
    rng = random.Random(seed)
    kinds = ("blocking", "naive", "cumulative", "multiples", "overlay",
             "animation")
    sink = 0
    for i in range(sequences):
        kind = kinds[i % len(kinds)]
        if kind in ("multiples", "overlay"):
            policy = PolicySpec(kind=kind, cap=rng.randint(1, 5))
        elif kind == "animation":
            policy = PolicySpec(kind=kind, min_dwell=0.5)
        else:
            policy = PolicySpec(kind=kind)
        buf = module.ChronicleBuffer(policy, targets=MONTHS)
        t, rid, outstanding = 0.0, 0, []
        for _ in range(10):
            t += rng.random() * 2.0
            if outstanding and rng.random() < 0.5:
                req_id = outstanding.pop(rng.randrange(len(outstanding)))
                sink += len(buf.admit_response(
                    ResponsePayload(req_id, ((0, 1.0),), t)))
            else:
                rid += 1
                target = MONTHS[rng.randrange(len(MONTHS))]
                outstanding.append(rid)
                sink += len(buf.admit_request(InteractionRequest(rid, target, t)))
    return sink


def drive_exact(module, rounds, seed=99):
    rng = random.Random(seed)
    sink = 0
    for _ in range(rounds):
        n = rng.randint(18, 25)
        doubled = sorted(rng.randint(1, 2 * n) for _ in range(n))
        sink += module.signed_rank_counts(doubled)[-1]
        size = rng.randint(4, 9)
        pool = [rng.randint(1, 20) for _ in range(18)]
        sink += module.rank_sum_counts(pool, size)[-1]
    return sink


def timed(fn, *args):
    t0 = time.perf_counter()
    fn(*args)
    return time.perf_counter() - t0


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sequences", type=int, default=20_000,
                        help="buffer op sequences per variant")
    parser.add_argument("--rounds", type=int, default=300,
                        help="exact-kernel rounds per variant")
    args = parser.parse_args()

    rows = []
    pure_buf = timed(drive_buffers, _chronicle_py, args.sequences)
    rows.append(("chronicle ops", "pure", args.sequences / pure_buf, 1.0))
    if _chronicle_c is not None:
        comp_buf = timed(drive_buffers, _chronicle_c, args.sequences)
        rows.append(("chronicle ops", "compiled", args.sequences / comp_buf,
                     pure_buf / comp_buf))

    pure_ex = timed(drive_exact, _exact_py, args.rounds)
    rows.append(("exact kernels", "pure", args.rounds / pure_ex, 1.0))
    if _exact_c is not None:
        comp_ex = timed(drive_exact, _exact_c, args.rounds)
        rows.append(("exact kernels", "compiled", args.rounds / comp_ex,
                     pure_ex / comp_ex))

    print(f"{'workload':<16}{'variant':<10}{'throughput/s':>14}{'speedup':>9}")
    for workload, variant, rate, speedup in rows:
        print(f"{workload:<16}{variant:<10}{rate:>14.0f}{speedup:>8.2f}x")
    if _chronicle_c is None:
        print("compiled twins not built; showing pure-Python numbers only")


if __name__ == "__main__":
    main()
