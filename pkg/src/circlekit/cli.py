"""Batch driver: one subcommand per invocation, JSON config in, CSV/JSON out.

Every output embeds the config hash, the seed and the toolkit version, so
reruns with identical configs are byte-identical.  Exit codes: 0 success,
2 input/spec error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .errors import ToolkitError
from .specs import SpecError, parse_diffeo, parse_field, parse_soliton

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3


def _config_hash(config) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp_circlekit_")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path, payload, config, seed):
    payload = dict(payload)
    payload["config_hash"] = _config_hash(config)
    payload["seed"] = seed
    payload["version"] = __version__
    _atomic_write(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _write_csv(path, header, rows, config, seed):
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow([f"# config_hash={_config_hash(config)}",
                f"seed={seed}", f"version={__version__}"])
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    _atomic_write(path, buf.getvalue())


# ---------------------------------------------------------------------------
# subcommands

def cmd_lambda_decay(config, out, seed):
    from .fourier import lambda_decay_report
    gamma = parse_diffeo(config["gamma"])
    s = float(config.get("s", 2.4))
    pmax = int(config.get("pmax", 48))
    rep = lambda_decay_report(gamma, s, pmax,
                              quad_points=config.get("quad_points"))
    _write_csv(out + ".csv", ["m", "n", "abs_lambda", "weighted"],
               [(m, n, f"{v:.12e}", f"{w:.12e}") for m, n, v, w in rep.rows()],
               config, seed)
    _write_json(out + ".json",
                {"sup_weighted": rep.sup_weighted,
                 "fitted_constant": rep.fitted_constant,
                 "fitted_exponent": (None if not np.isfinite(rep.fitted_exponent)
                                     else rep.fitted_exponent),
                 "degenerate": rep.degenerate, "s": s, "pmax": pmax},
                config, seed)


def cmd_hs_sweep(config, out, seed):
    from .current import hs_norm_sweep, sweep_verdict
    gamma = parse_diffeo(config["gamma"])
    cutoffs = [int(k) for k in config["cutoffs"]]
    if sorted(cutoffs) != cutoffs:
        raise SpecError("cutoff list must be increasing")
    sweep = hs_norm_sweep(gamma, cutoffs)
    verdict = sweep_verdict(sweep,
                            tail_tol=float(config.get("tail_tol", 1e-6)),
                            growth_tol=float(config.get("growth_tol", 0.10)))
    _write_json(out + ".json",
                {"gamma_spec": config["gamma"],
                 "s_hint": config.get("s_hint"),
                 "cutoffs": cutoffs,
                 "hs": [v for _, v in sweep],
                 "verdict": verdict},
                config, seed)


def cmd_kac(config, out, seed):
    from .virasoro import ModuleParams, exact_det, gram_matrix
    cs = [float(c) for c in config["c_values"]]
    hs = [float(h) for h in config["h_values"]]
    levels = [int(l) for l in config.get("levels", [1, 2])]
    exact = bool(config.get("exact", False))
    rows = []
    for lvl in levels:
        for c in cs:
            for h in hs:
                p = ModuleParams(c, h, lvl)
                if exact and lvl <= 4:
                    G = gram_matrix(p, lvl, exact=True)
                    det = float(exact_det(G))
                    Gf = np.array([[float(x) for x in row] for row in G])
                else:
                    Gf = gram_matrix(p, lvl)
                    det = float(np.linalg.det(Gf))
                mineig = float(np.min(np.linalg.eigvalsh(Gf)))
                rows.append((lvl, c, h, f"{det:.12e}", f"{mineig:.12e}"))
    _write_csv(out + ".csv", ["level", "c", "h", "det", "min_eigenvalue"],
               rows, config, seed)


def cmd_commutator(config, out, seed):
    from .virasoro import ModuleParams, VermaLevelSpace, commutator_check
    c, h, N = float(config["c"]), float(config["h"]), int(config["N"])
    f = parse_field(config["f"])
    g = parse_field(config["g"])
    space = VermaLevelSpace(ModuleParams(c, h, N))
    resid = commutator_check(space, f, g)
    from .virasoro import _series_of
    mmax = max(_series_of(f).max_mode, _series_of(g).max_mode)
    dim = int(np.sum(space.levels <= N - 2 * mmax))
    _write_json(out + ".json",
                {"c": c, "h": h, "N": N, "f": config["f"], "g": config["g"],
                 "exact_block_dim": dim, "residual": resid},
                config, seed)


def cmd_qei(config, out, seed):
    from .virasoro import ModuleParams, VermaLevelSpace, qei_bound, qei_check
    c, h, N = float(config["c"]), float(config.get("h", 0.0)), int(config["N"])
    field = parse_field(config["field"])
    max_mode = int(config.get("max_mode", 0))
    trials = int(config.get("trials", 100))
    space = VermaLevelSpace(ModuleParams(c, h, N))
    bound = qei_bound(field, c)
    gap = qei_check(space, field, max_mode, c, trials=trials, seed=seed, bound=bound)
    _write_json(out + ".json",
                {"c": c, "h": h, "N": N, "field": config["field"],
                 "bound": bound, "min_gap": gap, "trials": trials},
                config, seed)


def cmd_soliton_classify(config, out, seed):
    from .solitons import equivalent, is_proper, make_soliton
    tol = float(config.get("tol", 1e-9))
    items = config["items"]
    descs = []
    for item in items:
        nu = parse_soliton(item["spec"])
        descs.append((str(item["id"]), make_soliton(nu)))
    reps: list = []
    rows = []
    for ident, d in descs:
        rep_id = None
        for rid, rd in reps:
            if equivalent(d, rd, tol):
                rep_id = rid
                break
        if rep_id is None:
            reps.append((ident, d))
            rep_id = ident
        rows.append((ident, f"{d.r:.15g}", is_proper(d, tol), rep_id))
    _write_csv(out + ".csv", ["id", "r", "proper", "equivalence_class_representative"],
               rows, config, seed)


def cmd_weyl_check(config, out, seed):
    from .current import (OneParticleVector, TruncatedFock, inner_product,
                          weyl_matrix)
    modes = tuple(int(m) for m in config.get("modes", [1]))
    n_max = int(config.get("n_max", 40))
    K = max(modes)
    rng = np.random.default_rng(seed)
    fock = TruncatedFock(modes, n_max)
    f = OneParticleVector.zero(K)
    g = OneParticleVector.zero(K)
    for m in modes:
        f.coeffs[m + K] = (rng.normal() + 1j * rng.normal()) * 0.3
        g.coeffs[m + K] = (rng.normal() + 1j * rng.normal()) * 0.3
    Wf, Wg = weyl_matrix(fock, f), weyl_matrix(fock, g)
    fg = OneParticleVector(f.coeffs + g.coeffs, K)
    phase = np.exp(-0.5j * np.imag(inner_product(f, g)))
    sec = fock.sector(n_max // 2)
    resid = float(np.max(np.abs((Wf @ Wg - phase * weyl_matrix(fock, fg))[np.ix_(sec, sec)])))
    unit = float(np.max(np.abs(Wf.conj().T @ Wf - np.eye(fock.dim))))
    _write_json(out + ".json",
                {"modes": list(modes), "n_max": n_max,
                 "safe_sector_dim": int(np.sum(sec)),
                 "weyl_relation_residual": resid,
                 "unitarity_residual": unit},
                config, seed)


_COMMANDS = {
    "lambda-decay": cmd_lambda_decay,
    "hs-sweep": cmd_hs_sweep,
    "kac": cmd_kac,
    "commutator": cmd_commutator,
    "qei": cmd_qei,
    "soliton-classify": cmd_soliton_classify,
    "weyl-check": cmd_weyl_check,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="circlekit",
        description="numerical toolkit for circle-diffeomorphism representation data")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="path to the JSON config")
    parser.add_argument("--out", required=True,
                        help="output basename (suffixes .csv/.json are added)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int,
                        default=int(os.environ.get("CIRCLEKIT_THREADS", "0")),
                        help="advisory BLAS thread count (0 = leave unchanged)")
    args = parser.parse_args(argv)
    if args.threads > 0:
        os.environ.setdefault("OMP_NUM_THREADS", str(args.threads))
    try:
        with open(args.config) as f:
            config = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        _COMMANDS[args.command](config, args.out, args.seed)
    except (SpecError, KeyError) as exc:
        print(f"error: bad specification: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ToolkitError as exc:
        print(f"error: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
