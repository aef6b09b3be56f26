"""Compare the numba and numpy kernel backends on realistic inputs.

Run from a checkout with the package installed:

    python3 benchmarks/bench_kernels.py --days 10 --tx-per-day 5000

Prints per-backend wall times (best of --repeats) for occurrence grid
extraction and for SVR epoch training, then cross-checks that the two
backends produce matching results: grids must be identical, SVR weights
must agree to rounding error.
"""

import argparse
import time

import numpy as np

from txpattern import kernels
from txpattern.ingest import partition_daily
from txpattern.korder import occurrence_matrices
from txpattern.synth import SynthSpec, generate
from txpattern.txgraph import build_graph


def best_of(repeats: int, fn) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(
        description="benchmark the numba and numpy kernel backends")
    ap.add_argument("--days", type=int, default=10)
    ap.add_argument("--tx-per-day", type=int, default=5000)
    ap.add_argument("--order", type=int, default=3)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--svr-rows", type=int, default=1000)
    ap.add_argument("--svr-epochs", type=int, default=200)
    args = ap.parse_args()

    spec = SynthSpec(days=args.days, tx_per_day=args.tx_per_day, seed=args.seed,
                     fixed_tx_count=True, spend_probability=0.4)
    records, _ = generate(spec)
    graphs = [build_graph(w) for w in partition_daily(records)]
    n_tx = sum(len(g.tx_ids) for g in graphs)

    rng = np.random.default_rng(args.seed)
    sx = rng.standard_normal((args.svr_rows, 800))
    sy = rng.standard_normal(args.svr_rows)

    backends = ["numpy"] + (["numba"] if kernels.NUMBA_AVAILABLE else [])
    grids = {}
    svr = {}
    for name in backends:
        kernels.use_backend(name)
        kernels.warmup()  # JIT compiles outside the timed region
        grids[name] = [occurrence_matrices(g, args.order) for g in graphs]
        t_grid = best_of(
            args.repeats,
            lambda: [occurrence_matrices(g, args.order) for g in graphs])
        svr[name] = kernels.svr_epochs(sx, sy, 1.0, 0.1,
                                       args.svr_epochs, 1e-3, 0.0)
        t_svr = best_of(
            args.repeats,
            lambda: kernels.svr_epochs(sx, sy, 1.0, 0.1,
                                       args.svr_epochs, 1e-3, 0.0))
        print(f"{name:>6}: occurrence k<={args.order} on {n_tx} tx "
              f"over {len(graphs)} days {t_grid:8.3f}s | "
              f"svr {args.svr_rows}x800 x{args.svr_epochs} epochs "
              f"{t_svr:8.3f}s")

    if len(backends) == 2:
        if grids["numba"] != grids["numpy"]:
            raise SystemExit("FAIL: occurrence grids diverge between backends")
        w_nb, b_nb, _ = svr["numba"]
        w_np, b_np, _ = svr["numpy"]
        if not (np.allclose(w_nb, w_np, rtol=0, atol=1e-9)
                and abs(b_nb - b_np) < 1e-9):
            raise SystemExit("FAIL: svr solutions diverge between backends")
        print("cross-check: grids identical, svr weights agree to 1e-9")
    else:
        print("cross-check skipped: numba not installed")


if __name__ == "__main__":
    main()
