"""Command-line entry point: `swlattice <command> [options]`.

Exit status: 0 on success, 1 when a check fails, 2 on usage or input errors.
Numbers go to <out>/<command>.json; the terminal gets a short summary table.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import checks as chk
from .fields import BundleData, Configuration, curvature
from .flow import FlowParams, classify_critical_point, descend
from .functional import monopole_residual, residual_energy, sw_eval
from .hessian import spinor_norm_sq
from .hodge import betti_1, hodge_split, jacobian_coordinates
from .lattice import Lattice, d_star, inner, norm
from .report import (
    COMMAND_DEFAULTS,
    ConfigError,
    RunConfig,
    check,
    load_config,
    parse_config,
    resolve_output_dir,
    write_report,
)
from .snapshot import SnapshotError, load_snapshot, save_snapshot
from .spectral import (
    SpectralError,
    dstard_operator,
    hodge1_operator,
    la_operator,
    morse_index,
    reducible_kernel,
    spectrum,
)


def _kg_field(cfg: RunConfig, lat: Lattice) -> np.ndarray:
    if isinstance(cfg.kg, str):
        data = np.fromfile(cfg.kg, dtype="<f8")
        if data.size != lat.n_sites:
            raise ConfigError(f"kg payload {cfg.kg} has {data.size} values, lattice needs {lat.n_sites}")
        return data.astype(float).reshape(lat.shape)
    return np.full(lat.shape, float(cfg.kg))


def _configuration(cfg: RunConfig, snapshot: str | None, rng=None, amplitude=None) -> Configuration:
    if snapshot:
        return load_snapshot(snapshot)
    lat = Lattice(cfg.n, cfg.h)
    bundle = BundleData(tuple(cfg.flux), _kg_field(cfg, lat))
    if rng is not None:
        c = chk.random_configuration(lat, rng, amplitude, cfg.flux, bundle.kg)
        return c
    return Configuration(lat, lat.zeros(1), lat.spinor_zeros(), bundle)


# -- commands ----------------------------------------------------------------


def cmd_eval(cfg, args):
    rng = np.random.default_rng(cfg.seed) if cfg.params["random"] else None
    c = _configuration(cfg, args.snapshot, rng, cfg.params["amplitude"])
    e = sw_eval(c)
    first, second = monopole_residual(c)
    lat = c.lattice
    res = {"energy": e.as_dict(), "alpha_squared": c.bundle.alpha_squared,
           "residual_energy": residual_energy(c),
           "residual_curvature_norm": norm(lat, first),
           "residual_dirac_norm": float(np.sqrt(lat.weight * np.sum(np.abs(second) ** 2)))}
    return res, [], [("total", e.total)]


def cmd_grad_check(cfg, args):
    p = cfg.params
    rng = np.random.default_rng(cfg.seed)
    lat = Lattice(cfg.n, cfg.h)
    errs = []
    for _ in range(p["samples"]):
        c = chk.random_configuration(lat, rng, p["amplitude"], cfg.flux)
        errs.append(chk.gradient_check(c, rng, directions=1, step=p["step"]))
    worst = max(errs)
    return {"relative_errors": errs, "max_relative_error": worst}, [
        check("gradient_fd_relative_error", worst, p["tol"])
    ], [("max FD rel. error", worst)]


def cmd_hessian_check(cfg, args):
    p = cfg.params
    rng = np.random.default_rng(cfg.seed)
    lat = Lattice(cfg.n, cfg.h)
    fd, sym = [], []
    for _ in range(p["samples"]):
        c = chk.random_configuration(lat, rng, p["amplitude"], cfg.flux)
        fd.append(chk.hessian_fd_error(c, rng, p["step"]))
        sym.append(chk.hessian_symmetry_defect(c, rng, max(1, p["pairs"] // p["samples"])))
    return {"fd_errors": fd, "symmetry_defects": sym}, [
        check("hessian_fd_of_gradient", max(fd), p["fd_tol"]),
        check("hessian_symmetry", max(sym), p["sym_tol"]),
    ], [("max FD error", max(fd)), ("max symmetry defect", max(sym))]


def cmd_spectrum(cfg, args):
    p = cfg.params
    c = _configuration(cfg, args.snapshot)
    ops = {"LA": lambda: la_operator(c), "dstard": lambda: dstard_operator(c.lattice),
           "hodge1": lambda: hodge1_operator(c.lattice)}
    if p["operator"] not in ops:
        raise ConfigError(f"operator must be one of {sorted(ops)}, got {p['operator']!r}")
    op = ops[p["operator"]]()
    rep = spectrum(op, p["tau"], p["solver"], k=min(p["count"], op.dim), seed=cfg.seed)
    d = rep.as_dict()
    d["eigenvalues"] = d["eigenvalues"][: p["count"]]
    resid_ok = d["max_residual"] <= 1e-8 * max(1.0, max(abs(x) for x in d["eigenvalues"]))
    return d, [check("eigenpair_residual", d["max_residual"], 1e-8, resid_ok)], [
        ("operator", p["operator"]), ("lowest", d["eigenvalues"][0]), ("morse_index", rep.morse_index),
        ("kernel_dim", rep.kernel_dim)]


def cmd_index(cfg, args):
    p = cfg.params
    c = _configuration(cfg, args.snapshot)
    rep = morse_index(c, p["tau"], p["solver"], seed=cfg.seed)
    ker = reducible_kernel(c, p["tau"], p["solver"])
    res = {"morse_index": rep.morse_index, "spinor_kernel_dim": ker.spinor,
           "connection_kernel_dim": ker.connection, "gauge_slice_kernel_dim": ker.total,
           "spectrum": rep.as_dict()}
    return res, [], [("morse_index (real dim)", rep.morse_index), ("gauge-slice kernel", ker.total)]


def cmd_hodge(cfg, args):
    c = _configuration(cfg, args.snapshot)
    lat = c.lattice
    split = hodge_split(lat, c.a, cfg.params["rtol"])
    parts = {"exact": split.exact, "coexact": split.coexact, "harmonic": split.harmonic}
    scale = norm(lat, c.a) or 1.0
    ortho = max(abs(inner(lat, parts[u], parts[v])) for u, v in [("exact", "coexact"), ("exact", "harmonic"), ("coexact", "harmonic")])
    recon = norm(lat, split.reassemble() - c.a) / scale
    b1 = betti_1(lat if lat.n <= 5 else Lattice(2, lat.h))
    try:
        coords = list(jacobian_coordinates(c).coords)
    except ValueError:
        coords = None
    res = {"betti_1": b1, "norms": {k: norm(lat, v) for k, v in parts.items()},
           "orthogonality_residual": ortho / scale**2, "reconstruction_residual": recon,
           "jacobian_coordinates": coords}
    return res, [check("betti_1", abs(b1 - 4), 0), check("orthogonality", ortho / scale**2, 1e-10),
                 check("reconstruction", recon, 1e-10)], [("b1", b1), ("jacobian coords", coords)]


def cmd_flow(cfg, args):
    p = cfg.params
    rng = np.random.default_rng(cfg.seed) if p["start"] == "random" and not args.snapshot else None
    c0 = _configuration(cfg, args.snapshot, rng, p["amplitude"])
    fp = FlowParams(step=p["step"], max_iters=p["max_iters"], grad_tol=p["grad_tol"],
                    regauge_every=p["regauge_every"], seed=cfg.seed)
    tr = descend(c0, fp)
    T = tr.terminal
    kind = classify_critical_point(T, grad_tol=max(1e-8, p["grad_tol"]), phi_tol=p["phi_tol"]) if tr.status == "converged" else None
    res = {"trace": tr.as_dict(), "terminal_phi_norm": float(np.sqrt(spinor_norm_sq(T))),
           "terminal_dstar_F": norm(T.lattice, d_star(T.lattice, curvature(T))),
           "classification": None if kind is None else str(kind)}
    if p["save_terminal"]:
        save_snapshot(T, args.out_dir / "flow_terminal")
    mono = all(b <= a + 1e-9 * max(1.0, abs(a)) for a, b in zip(tr.energy, tr.energy[1:]))
    return res, [check("energy_monotone", 0.0 if mono else 1.0, 0.0, mono),
                 check("not_diverged", 0.0 if tr.status != "diverged" else 1.0, 0.0)], [
        ("status", tr.status), ("iterations", tr.iterations), ("terminal energy", tr.energy[-1]),
        ("terminal ||phi||", res["terminal_phi_norm"]), ("classification", res["classification"])]


def cmd_identity_check(cfg, args):
    p = cfg.params
    study = chk.identity_study(tuple(p["sizes"]), p["length"], flux=cfg.flux)
    ratios = study["ratios"]
    return study, [check(f"refinement_ratio_{i}", -r, -p["min_ratio"]) for i, r in enumerate(ratios)], [
        ("|defect|", study["abs_defect"]), ("ratios", ratios)]


COMMANDS = {
    "eval": cmd_eval,
    "grad-check": cmd_grad_check,
    "hessian-check": cmd_hessian_check,
    "spectrum": cmd_spectrum,
    "index": cmd_index,
    "hodge": cmd_hodge,
    "flow": cmd_flow,
    "identity-check": cmd_identity_check,
}

HELP = {
    "eval": "energy breakdown and monopole residual of a configuration",
    "grad-check": "finite-difference check of the gradient on random configurations",
    "hessian-check": "Hessian symmetry and finite-difference-of-gradient check",
    "spectrum": "lowest eigenvalues of L_A, d*d or the 1-form Hodge Laplacian",
    "index": "Morse index (real dimension) of a reducible configuration",
    "hodge": "Hodge split of a, b_1 and Jacobian-torus coordinates",
    "flow": "gradient descent followed by critical point classification",
    "identity-check": "Weitzenboeck identity refinement study",
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="swlattice", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, help=HELP[name], description=HELP[name])
        sp.add_argument("--config", help="JSON run configuration (strict keys)")
        sp.add_argument("--snapshot", help="snapshot directory to load the configuration from")
        sp.add_argument("--n", type=int, help="sites per axis")
        sp.add_argument("--h", type=float, help="lattice spacing")
        sp.add_argument("--kg", help="constant scalar curvature, or path to a float64 0-cochain payload")
        sp.add_argument("--flux", type=int, nargs=6, metavar="M", help="m01 m02 m03 m12 m13 m23")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output directory (overrides $SWLATTICE_OUTPUT_DIR)")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help=f"command parameter, keys: {', '.join(COMMAND_DEFAULTS[name])}")
    return ap


def _parse_value(text: str):
    import json

    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _merge(cfg: RunConfig, args) -> RunConfig:
    if args.n is not None:
        cfg.n = args.n
    if args.h is not None:
        cfg.h = args.h
    if args.flux is not None:
        cfg.flux = tuple(args.flux)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.kg is not None:
        try:
            cfg.kg = float(args.kg)
        except ValueError:
            cfg.kg = args.kg
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        if k not in cfg.params:
            raise ConfigError(f"unknown parameter {k!r} for {args.command!r}")
        cfg.params[k] = _parse_value(v)
    return cfg


def _summary(command: str, rows, checks, path: Path):
    width = max([len(str(r[0])) for r in rows] + [len(c["name"]) for c in checks] + [10])
    print(f"swlattice {command}")
    for k, v in rows:
        print(f"  {str(k):<{width}}  {v}")
    for c in checks:
        mark = "PASS" if c["passed"] else "FAIL"
        print(f"  {c['name']:<{width}}  {mark}  value={c['value']:.3e} limit={c['limit']:.3e}")
    print(f"  report: {path}")


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config, args.command) if args.config else parse_config({}, args.command)
        cfg = _merge(cfg, args)
        args.out_dir = resolve_output_dir(cfg, args.out)
        results, checks, rows = COMMANDS[args.command](cfg, args)
    except (ConfigError, SnapshotError, FileNotFoundError) as e:
        print(f"swlattice {args.command}: error: {e}", file=sys.stderr)
        return 2
    except SpectralError as e:
        print(f"swlattice {args.command}: spectral check failed: {e}", file=sys.stderr)
        return 1
    path = write_report(args.out_dir, args.command, cfg, results, checks)
    _summary(args.command, rows, checks, path)
    failed = [c["name"] for c in checks if not c["passed"]]
    if failed:
        print(f"  violated: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
