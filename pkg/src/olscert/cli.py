"""Command-line front end.

Exit status: 0 on success, 2 on usage errors, 1 when a computation fails
(domain errors, rank deficiency, unreadable inputs); failures also print a
one-line JSON object on stderr.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import bench, guarantees, matcore, solvers
from .coherence import MeasurementMatrix, profile
from .errors import OlsCertError

OUTPUT_DIR_ENV = "OLSCERT_OUTPUT_DIR"


class UsageError(Exception):
    pass


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser():
    p = _Parser(prog="olscert", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bounds", help="coherence profile or guarantee formulas")
    b.add_argument("--matrix", help="matrix CSV file: report its coherence profile")
    b.add_argument("--block-len", type=int, default=1)
    b.add_argument("--mu", type=float)
    b.add_argument("--mu-block", type=float)
    b.add_argument("--nu", type=float, default=0.0)
    b.add_argument("--K", type=int, help="total sparsity K (kd for blocks)")
    b.add_argument("--tau", type=float, help="probability-bound constant (default: mu)")
    b.add_argument("--sigma", type=float)
    b.add_argument("--M", type=int)
    b.add_argument("--l", type=int, default=0)

    n = sub.add_parser("noisy-bounds", help="noisy-recovery signal floors")
    n.add_argument("--mu", type=float, required=True)
    n.add_argument("--K", type=int, required=True, help="total sparsity K (kd for blocks)")
    n.add_argument("--sigma", type=float, required=True)
    n.add_argument("--M", type=int, required=True)
    n.add_argument("--l", type=int, default=0)
    n.add_argument("--mu-block", type=float)
    n.add_argument("--nu", type=float, default=0.0)
    n.add_argument("--block-len", type=int, default=1)

    e = sub.add_parser("erc", help="exact-recovery indicator for a support state")
    e.add_argument("--matrix", required=True)
    e.add_argument("--support", type=_int_list, required=True,
                   help="true support (block indices when --block-len > 1)")
    e.add_argument("--selected", type=_int_list, default=[])
    e.add_argument("--block-len", type=int, default=1)

    r = sub.add_parser("recover", help="run OLS, MOLS or BOLS on y")
    r.add_argument("--matrix", required=True)
    r.add_argument("--y", required=True)
    r.add_argument("--algo", choices=bench.ALGOS, required=True)
    r.add_argument("--sparsity", type=int, required=True,
                   help="K for OLS/MOLS iterations, block count k for BOLS")
    r.add_argument("--block-len", type=int, default=1)
    r.add_argument("--L", type=int, default=1)
    r.add_argument("--tol", type=float, default=solvers.DEFAULT_TOL)

    s = sub.add_parser("sweep", help="Monte Carlo recovery-frequency curve as CSV")
    s.add_argument("--config", help="JSON ExperimentConfig; flags below are then ignored")
    s.add_argument("--algo", choices=bench.ALGOS, default="ols")
    s.add_argument("--M", type=int)
    s.add_argument("--N", type=int)
    s.add_argument("--block-len", type=int, default=1)
    s.add_argument("--L", type=int, default=1)
    s.add_argument("--sparsity", type=_int_list)
    s.add_argument("--trials", type=int, default=200)
    s.add_argument("--sigma", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--radius", type=float, default=1e-6)
    s.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    s.add_argument("--out", help="output directory; the file is named by the config hash")

    lc = sub.add_parser("lemma-check",
                        help="check the projection-norm lower bound on Gaussian matrices")
    lc.add_argument("--M", type=int, required=True)
    lc.add_argument("--N", type=int, required=True)
    lc.add_argument("--K", type=int, required=True, help="sparsity K (block count k for blocks)")
    lc.add_argument("--block-len", type=int, default=1)
    lc.add_argument("--instances", type=int, default=10)
    lc.add_argument("--seed", type=int, default=0)

    for sp in (b, n, e, r, lc):
        sp.add_argument("--out", help="write the JSON report to this file")
    return p


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_bounds(a):
    if a.matrix is None and a.mu is None:
        raise UsageError("bounds: give --matrix or --mu")
    if a.matrix is not None:
        D = MeasurementMatrix.from_array(matcore.read_matrix(a.matrix), a.block_len)
        return profile(D).as_dict()
    mu = a.mu
    out = {"mu": mu, "mip_cap": 1 / mu + 1,
           "asymptotic_ols": guarantees.asymptotic_ols(mu),
           "tropp_omp": guarantees.tropp_omp(mu)}
    if a.mu_block is None and a.block_len == 1:
        out["threshold"] = guarantees.cardano_threshold_ols(mu).as_dict()
    else:
        mb = mu if a.mu_block is None else a.mu_block
        d = a.block_len
        out.update(mu_block=mb, nu=a.nu, d=d,
                   asymptotic_bols=guarantees.asymptotic_bols(mb, d),
                   bomp_bound=guarantees.bomp_bound(mb, d),
                   threshold=guarantees.cardano_threshold_bols(mu, mb, a.nu, d).as_dict())
    if a.K is not None:
        d = a.block_len
        if d == 1:
            T = guarantees.t_factor(mu, a.K)
            out["projection_bound_classic"] = guarantees.projection_bound_classic(mu, a.K)
        else:
            if a.K % d:
                raise UsageError("bounds: --K must be a multiple of --block-len")
            T = guarantees.t_factor_block(mu, a.nu, a.K // d, d)
        out["t_factor"] = T
        out["projection_bound"] = 1 / math.sqrt(T)
        if a.M is not None:
            tau = mu if a.tau is None else a.tau
            out["probability_bound"] = guarantees.probability_bound(a.M, a.K, tau, T, d)
    if a.sigma is not None:
        if a.M is None or a.K is None:
            raise UsageError("bounds: --sigma needs --M and --K")
        out["noisy"] = _noisy(a)
    return out


def _noisy(a):
    d = a.block_len
    if d == 1 and a.mu_block is None:
        return guarantees.noisy_floor_ols(a.mu, a.K, a.l, a.sigma, a.M).as_dict()
    if a.K % d:
        raise UsageError("--K must be a multiple of --block-len")
    mb = a.mu if a.mu_block is None else a.mu_block
    return guarantees.noisy_floor_bols(a.mu, mb, a.K // d, d, a.l, a.sigma, a.M,
                                       nu=a.nu).as_dict()


def cmd_noisy(a):
    return _noisy(a)


def cmd_erc(a):
    D = MeasurementMatrix.from_array(matcore.read_matrix(a.matrix), a.block_len)
    if a.block_len == 1:
        val = guarantees.erc_indicator_ols(D, a.support, a.selected)
    else:
        val = guarantees.erc_indicator_bols(D, a.support, a.selected)
    return {"indicator": val, "certified": val < 1, "block_len": a.block_len,
            "support": sorted(a.support), "selected": sorted(a.selected)}


def cmd_recover(a):
    A = matcore.read_matrix(a.matrix)
    y = matcore.read_vector(a.y)
    if A.shape[1] % a.block_len:
        raise UsageError("recover: --block-len must divide the number of columns")
    D = MeasurementMatrix.from_array(A, a.block_len)
    cfg = solvers.SolverConfig(a.sparsity, residual_tol=a.tol, mols_L=a.L)
    res = solvers.recover(D, y, a.algo, cfg)
    return res.as_dict()


def cmd_sweep(a):
    if a.config:
        cfg = bench.ExperimentConfig.from_json(a.config)
    else:
        if a.M is None or a.N is None or not a.sparsity:
            raise UsageError("sweep: give --config or all of --M, --N, --sparsity")
        cfg = bench.ExperimentConfig(M=a.M, N=a.N, sparsity=a.sparsity, algo=a.algo,
                                     d=a.block_len, L=a.L, trials=a.trials,
                                     sigma=a.sigma, seed=a.seed, success_radius=a.radius)
    curve = bench.run_curve(cfg, workers=max(1, a.threads))
    text = curve.to_csv()
    outdir = a.out or os.environ.get(OUTPUT_DIR_ENV)
    if outdir:
        os.makedirs(outdir, exist_ok=True)
        path = os.path.join(outdir, f"{cfg.algo}-{cfg.digest()}.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        sys.stdout.write(path + "\n")
    else:
        sys.stdout.write(text)
    return None


def cmd_lemma_check(a):
    reports = []
    for i in range(a.instances):
        seed = np.random.SeedSequence(entropy=a.seed, spawn_key=(i,))
        rng = np.random.default_rng(seed)
        D = MeasurementMatrix.from_array(rng.standard_normal((a.M, a.N)), a.block_len)
        reports.append(guarantees.check_projection_bounds(D, a.K))
    return {
        "instances": len(reports),
        "supports_checked": sum(r.supports_checked for r in reports),
        "violations": sum(r.violations for r in reports),
        "min_margin": min(r.min_norm - r.lower_bound for r in reports),
        "max_norm": max(r.max_norm for r in reports),
    }


COMMANDS = {
    "bounds": cmd_bounds,
    "noisy-bounds": cmd_noisy,
    "erc": cmd_erc,
    "recover": cmd_recover,
    "sweep": cmd_sweep,
    "lemma-check": cmd_lemma_check,
}


def _fail(exc, code):
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
    return code


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        result = COMMANDS[args.command](args)
    except UsageError as exc:
        return _fail(exc, 2)
    except (OlsCertError, ValueError, OSError, np.linalg.LinAlgError) as exc:
        return _fail(exc, 1)
    if result is not None:
        _emit(result, getattr(args, "out", None))
    return 0


if __name__ == "__main__":
    sys.exit(main())
