"""Command-line harness: run one solver variant on a benchmark or user QEP.

Writes ``results.csv`` (converged pairs), ``history.csv`` (one row per cycle)
and ``summary.json`` into ``--out-dir``.  A ``--config`` file is a flat JSON
object whose keys mirror the long flag names; flags given on the command line
win over the file.
"""
import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .driver import SolverConfig, Status, Variant, solve
from .errors import IrsoarError
from .generators import EXAMPLES
from .problem import Mode, read_qep

EXIT_CODES = {Status.CONVERGED: 0, Status.MAX_RESTARTS: 2, Status.BREAKDOWN: 4}
EXIT_INPUT = 3

log = logging.getLogger("irsoar")


def parse_complex(text):
    """``"a+bi"``, ``"-13+0.4i"``, ``"2"`` or ``"0.5j"`` as a complex number."""
    s = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def build_parser():
    ap = argparse.ArgumentParser(prog="irsoar", description=__doc__.splitlines()[0])
    src = ap.add_argument_group("problem")
    src.add_argument("--example", choices=sorted(EXAMPLES))
    src.add_argument("--mm-m", dest="mm_m")
    src.add_argument("--mm-c", dest="mm_c")
    src.add_argument("--mm-k", dest="mm_k")
    src.add_argument("--xi", type=float, help="impedance for ex41 (default 1)")
    sol = ap.add_argument_group("solver")
    sol.add_argument("--variant", choices=[v.value for v in Variant])
    sol.add_argument("--m", type=int)
    sol.add_argument("--f", type=int)
    sol.add_argument("--k", type=int)
    sol.add_argument("--l", type=int)
    sol.add_argument("--tol", type=float)
    sol.add_argument("--sigma", type=parse_complex)
    sol.add_argument("--mode", choices=[m.value for m in Mode])
    sol.add_argument("--seed", type=int)
    sol.add_argument("--max-restarts", dest="max_restarts", type=int)
    out = ap.add_argument_group("output")
    out.add_argument("--out-dir", dest="out_dir")
    out.add_argument("--dump-vectors", dest="dump_vectors", action="store_true", default=None)
    out.add_argument("--config")
    out.add_argument("-v", "--verbose", action="store_true")
    return ap


DEFAULTS = {"variant": "irgsoar", "k": 6, "tol": 1e-10, "mode": "shiftinvert", "seed": 0,
            "max_restarts": 100, "out_dir": ".", "dump_vectors": False}


def resolve_options(ns):
    """Merge defaults < example defaults < config file < explicit flags."""
    given = {k: v for k, v in vars(ns).items() if v is not None}
    opts = dict(DEFAULTS)
    if ns.config:
        try:
            cfg = json.loads(Path(ns.config).read_text())
        except (OSError, ValueError) as exc:
            raise IrsoarError(f"cannot read config {ns.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise IrsoarError("config must be a flat JSON object")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        unknown = set(cfg) - set(vars(ns))
        if unknown:
            raise IrsoarError(f"unknown config keys: {sorted(unknown)}")
        given = {**cfg, **given}
    example = given.get("example")
    if example:
        if example not in EXAMPLES:
            raise IrsoarError(f"unknown example {example!r}")
        ex = EXAMPLES[example]
        opts.update(m=ex.m, f=ex.f, k=ex.k_wanted, tol=ex.tol, sigma=ex.sigma, mode=ex.mode)
    opts.update(given)
    if "sigma" in opts and isinstance(opts["sigma"], str):
        opts["sigma"] = parse_complex(opts["sigma"])
    return opts


def load_problem(opts):
    mm = [opts.get(k) for k in ("mm_m", "mm_c", "mm_k")]
    if opts.get("example"):
        if any(mm):
            raise IrsoarError("give either --example or --mm-m/--mm-c/--mm-k, not both")
        extra = {"xi": opts["xi"]} if opts.get("xi") is not None and opts["example"] == "ex41" else {}
        return EXAMPLES[opts["example"]].build(**extra)
    if not all(mm):
        raise IrsoarError("need --example or all three of --mm-m, --mm-c, --mm-k")
    return read_qep(*mm)


def write_outputs(out, result, cfg, problem):
    out.mkdir(parents=True, exist_ok=True)
    conv = [p for p in result.pairs if p.residual <= cfg.tol]
    with open(out / "results.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "re", "im", "residual"])
        for i, p in enumerate(conv):
            w.writerow([i, repr(p.lam.real), repr(p.lam.imag), repr(p.residual)])
    with open(out / "history.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["cycle", "variant", "worst_residual", "soar_s", "restart_s", "find_s"])
        for h in result.history:
            w.writerow([h.cycle, result.variant.value, repr(h.worst_residual),
                        h.soar_s, h.restart_s, h.find_s])
    summary = {
        "status": result.status.value,
        "cycles": result.restarts,
        "variant": result.variant.value,
        "n": problem.n, "m": cfg.m, "f": cfg.f, "k": cfg.k_wanted, "l": cfg.l,
        "tol": cfg.tol, "sigma": [cfg.sigma.real, cfg.sigma.imag], "mode": cfg.mode.value,
        "seed": cfg.seed, "warnings": result.warnings,
        "totals": result.totals(),
        "eigenvalues": [[p.lam.real, p.lam.imag, p.residual] for p in result.pairs],
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2))
    return conv


def _join_sigma(argv):
    # "--sigma -13+0.4i" would otherwise be read as an unknown option
    out, it = [], iter(argv)
    for a in it:
        if a == "--sigma":
            nxt = next(it, None)
            out.append("--sigma" if nxt is None else f"--sigma={nxt}")
        else:
            out.append(a)
    return out


def run_cli(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    ns = build_parser().parse_args(_join_sigma(argv))
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.INFO,
                        format="%(levelname)s %(message)s")
    try:
        opts = resolve_options(ns)
        problem = load_problem(opts)
        missing = [k for k in ("m", "f") if opts.get(k) is None]
        if missing:
            raise IrsoarError(f"missing solver parameters: {missing}")
        cfg = SolverConfig(m=opts["m"], f=opts["f"], k_wanted=opts["k"], l=opts.get("l"),
                           tol=opts["tol"], max_restarts=opts["max_restarts"],
                           variant=opts["variant"], seed=opts["seed"], mode=opts["mode"],
                           sigma=opts.get("sigma", 0j))
        result = solve(problem, cfg)
    except (IrsoarError, ValueError, TypeError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    out = Path(opts["out_dir"])
    conv = write_outputs(out, result, cfg, problem)
    if opts["dump_vectors"]:
        np.save(out / "vectors.npy", np.column_stack([p.y for p in conv])
                if conv else np.zeros((problem.n, 0), complex))
    log.info("%s: %s after %d restarts, %d/%d pairs converged", cfg.variant.value,
             result.status.value, result.restarts, len(conv), cfg.k_wanted)
    return EXIT_CODES[result.status]


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
