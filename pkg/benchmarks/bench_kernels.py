"""Compiled vs pure-Python MH kernel throughput.

Each backend runs in its own interpreter because the switch
(``CCMNET_DISABLE_NUMBA``) is read at import time.  Timings exclude
compilation: one short warm-up chain runs first.

    python benchmarks/bench_kernels.py --steps 200000
"""
import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, sys, time
import numpy as np
from ccmnet._jit import backend
from ccmnet.graph import Network, NodeClassification
from ccmnet.harness import build_nb_theta
from ccmnet.model import CcmSpec, CongruenceMapping, MultinomialDegree, PoissonMultinomialMixing
from ccmnet.sampler import ChainState

steps, n = int(sys.argv[1]), int(sys.argv[2])
specs = {
    "degree": CcmSpec(CongruenceMapping.degree(), MultinomialDegree(build_nb_theta(1.02, 6.19, n))),
    "mixing": CcmSpec(CongruenceMapping.mixing(NodeClassification.from_sizes([n // 2, n - n // 2])),
                      PoissonMultinomialMixing(3.0 * n, np.array([0.4, 0.2, 0.4]))),
}
out = {"backend": backend()}
for name, spec in specs.items():
    st = ChainState(Network(n), spec)
    rng = np.random.default_rng(0)
    st.advance(1000, rng)
    t = time.perf_counter()
    st.advance(steps, rng)
    out[name] = steps / (time.perf_counter() - t)
print(json.dumps(out))
"""


def measure(disable, steps, n):
    env = dict(os.environ)
    env.pop("CCMNET_DISABLE_NUMBA", None)
    if disable:
        env["CCMNET_DISABLE_NUMBA"] = "1"
    r = subprocess.run([sys.executable, "-c", CHILD, str(steps), str(n)], env=env,
                       capture_output=True, text=True, check=True)
    return json.loads(r.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=200_000, help="timed proposals per backend")
    ap.add_argument("--n", type=int, default=200, help="nodes")
    args = ap.parse_args(argv)
    fast = measure(False, args.steps, args.n)
    slow = measure(True, max(args.steps // 20, 1000), args.n)
    print(f"n={args.n}")
    print(f"{'kernel':8s} {'numba/s':>12s} {'python/s':>12s} {'speedup':>8s}")
    for k in ("degree", "mixing"):
        print(f"{k:8s} {fast[k]:12.0f} {slow[k]:12.0f} {fast[k] / slow[k]:8.1f}")
    if fast["backend"] != "numba":
        print("warning: numba unavailable, both rows ran the Python fallback")


if __name__ == "__main__":
    main()
