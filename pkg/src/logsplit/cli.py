"""Command-line front end.

Subcommands
    run        one splitting trajectory -> mass.csv, profiles.csv,
               snapshot coefficient files, manifest.json
    converge   tau sweep against a reference -> errors.csv, orders.csv
    proptest   randomized inequality suites -> props.csv, shift_bounds.csv
    norms      report the norms of a coefficient file
    gen-data   generate an initial-data family -> coefficient file + card

Exit codes: 0 success, 2 configuration problem, 3 solver abort,
4 property violation.  Configuration is TOML and fail-closed: any key
the schema does not know is an error, not a warning.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import harness, initdata, spectral, splitting, storage

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_PROPERTY = 4


class ConfigError(ValueError):
    pass


# every key any command may read; per-command subsets below
_REFERENCE_KEYS = {"kind", "tau", "N"}
_COMMON_KEYS = {"family", "lambda", "b", "zeta", "s", "beta", "gamma", "ell", "K", "seed"}
_RUN_KEYS = _COMMON_KEYS | {"tau", "T", "N", "q", "eps", "measure_times"}
_CONVERGE_KEYS = _COMMON_KEYS | {"taus", "T", "N", "q", "eps", "measure_times", "reference"}
_GEN_KEYS = _COMMON_KEYS


def _load_config(path, allowed: set) -> dict:
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}")
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"malformed TOML in {path}: {e}")
    for key in cfg:
        if key not in allowed:
            raise ConfigError(f"unknown config key {key!r}")
    if "reference" in cfg:
        if not isinstance(cfg["reference"], dict):
            raise ConfigError("reference must be a table")
        for key in cfg["reference"]:
            if key not in _REFERENCE_KEYS:
                raise ConfigError(f"unknown config key 'reference.{key}'")
    return cfg


def _need(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"missing config key {key!r}")
    return cfg[key]


def _make_data(cfg: dict) -> initdata.InitialData:
    family = _need(cfg, "family")
    try:
        if family == "gausson":
            return initdata.make_gausson(
                float(_need(cfg, "lambda")),
                b=float(cfg.get("b", 1.0)),
                zeta=int(cfg.get("zeta", 0)),
                modes=int(cfg.get("K", 200)),
            )
        if family == "random_hs":
            return initdata.make_random_hs(
                float(_need(cfg, "s")),
                float(_need(cfg, "beta")),
                int(_need(cfg, "K")),
                seed=int(_need(cfg, "seed")),
            )
        if family == "power_singular":
            return initdata.make_power_singular(
                float(_need(cfg, "gamma")), int(_need(cfg, "ell")), int(_need(cfg, "K"))
            )
    except ValueError as e:
        raise ConfigError(str(e))
    raise ConfigError(f"unknown family {family!r}")


def _reference_spec(cfg: dict, taus, family: str) -> harness.ReferenceSpec:
    ref = cfg.get("reference")
    if ref is None:
        if family == "gausson":
            return harness.ReferenceSpec("exact")
        return harness.ReferenceSpec(
            "numeric", tau=min(taus) / 16.0, modes=2 * max(_sweep_modes(cfg, taus))
        )
    kind = ref.get("kind", "numeric")
    if kind == "exact":
        return harness.ReferenceSpec("exact")
    try:
        return harness.ReferenceSpec(
            "numeric", tau=float(_need(ref, "tau")), modes=int(_need(ref, "N"))
        )
    except ValueError as e:
        raise ConfigError(str(e))


def _sweep_modes(cfg: dict, taus):
    if "N" in cfg:
        return [int(cfg["N"])] * len(taus)
    return [int(np.floor(1.0 / np.sqrt(t))) for t in taus]


def cmd_run(args) -> int:
    cfg = _load_config(args.config, _RUN_KEYS)
    data = _make_data(cfg)
    times = tuple(float(t) for t in cfg.get("measure_times", [float(_need(cfg, "T"))]))
    try:
        solver_cfg = splitting.SolverConfig(
            lam=float(_need(cfg, "lambda")),
            tau=float(_need(cfg, "tau")),
            final_time=float(_need(cfg, "T")),
            modes=int(_need(cfg, "N")),
            oversample=int(cfg.get("q", 4)),
            eps=float(cfg.get("eps", 0.0)),
            snapshot_times=times,
        )
    except ValueError as e:
        raise ConfigError(str(e))
    traj = splitting.run(solver_cfg, data.coeffs)

    out = args.out
    os.makedirs(out, exist_ok=True)
    mass_path = os.path.join(out, "mass.csv")
    storage.write_mass_csv(mass_path, traj)
    prof_path = os.path.join(out, "profiles.csv")
    storage.write_profiles_csv(prof_path, [(s.time, s.field) for s in traj.snapshots])
    artifacts = [mass_path, prof_path]
    for snap in traj.snapshots:
        p = os.path.join(out, f"snap_{storage.fmt(snap.time)}.coeff")
        spectral.write_coeff_file(p, snap.field.coeffs)
        artifacts.append(p)
    storage.write_manifest(
        os.path.join(out, "manifest.json"), kind="run", config=cfg, artifacts=artifacts
    )
    rep = harness.mass_report(traj)
    print(f"steps {traj.config.steps}")
    print(f"mass_drift {storage.fmt(rep.max_rel_drift)}")
    print(f"mass_monotone {rep.monotone_ok}")
    return EXIT_OK


def cmd_converge(args) -> int:
    cfg = _load_config(args.config, _CONVERGE_KEYS)
    data = _make_data(cfg)
    taus = tuple(float(t) for t in _need(cfg, "taus"))
    spec_kwargs = dict(
        lam=float(_need(cfg, "lambda")),
        taus=taus,
        final_time=float(_need(cfg, "T")),
        reference=_reference_spec(cfg, taus, data.family),
        oversample=int(cfg.get("q", 4)),
        eps=float(cfg.get("eps", 0.0)),
    )
    if "measure_times" in cfg:
        spec_kwargs["measure_times"] = tuple(float(t) for t in cfg["measure_times"])
    if "N" in cfg:
        spec_kwargs["fixed_modes"] = int(cfg["N"])
    try:
        spec = harness.SweepSpec(**spec_kwargs)
    except ValueError as e:
        raise ConfigError(str(e))

    table = harness.run_sweep(data, spec, workers=args.workers, cache_directory=args.cache_dir)

    out = args.out
    os.makedirs(out, exist_ok=True)
    err_path = os.path.join(out, "errors.csv")
    storage.write_errors_csv(err_path, table.csv_rows())
    fits = [harness.fit_order(table, t) for t in spec.measure_times]
    ord_path = os.path.join(out, "orders.csv")
    storage.write_orders_csv(ord_path, [(f.t, f.slope, f.intercept, f.r_squared) for f in fits])
    storage.write_manifest(
        os.path.join(out, "manifest.json"),
        kind="converge",
        config=cfg,
        artifacts=[err_path, ord_path],
        extra={"normalization": table.normalization},
    )
    for f in fits:
        print(f"t {storage.fmt(f.t)} slope {storage.fmt(f.slope)} r2 {storage.fmt(f.r_squared)}")
    return EXIT_OK


def cmd_proptest(args) -> int:
    scale = 0.5 if args.inject_violation else 1.0
    results = harness.property_suite(
        args.seed, scalar_pairs=args.scalar_pairs, fields=args.fields, bound_scale=scale
    )
    shift_rows = harness.shift_bounds_suite(args.seed, per_side=args.shift_samples)
    out = args.out
    os.makedirs(out, exist_ok=True)
    props_path = os.path.join(out, "props.csv")
    storage.write_props_csv(
        props_path, [(r.inequality, r.samples, r.worst_margin) for r in results]
    )
    shift_path = os.path.join(out, "shift_bounds.csv")
    storage.write_shift_bounds_csv(shift_path, shift_rows)
    storage.write_manifest(
        os.path.join(out, "manifest.json"),
        kind="proptest",
        config={
            "seed": args.seed,
            "scalar_pairs": args.scalar_pairs,
            "fields": args.fields,
            "shift_samples": args.shift_samples,
        },
        artifacts=[props_path, shift_path],
    )
    for r in results:
        print(f"{r.inequality} samples {r.samples} worst_margin {storage.fmt(r.worst_margin)}")
    print(f"shift_rows {len(shift_rows)} all_hold True")
    return EXIT_OK


def cmd_norms(args) -> int:
    try:
        cf = spectral.read_coeff_file(args.coeffs)
    except (OSError, ValueError) as e:
        raise ConfigError(f"cannot read coefficient file: {e}")
    s = args.s if args.s is not None else (cf.s if cf.s > 0 else 1.0)
    coeffs = cf.coeffs
    print(f"cutoff {cf.cutoff}")
    print(f"l2 {storage.fmt(spectral.l2_norm(coeffs))}")
    print(f"hs {storage.fmt(spectral.hs_norm(coeffs, s))}")
    print(f"hs_seminorm {storage.fmt(spectral.hs_seminorm(coeffs, s))}")
    if 0.0 < s < 1.0:
        gag = spectral.gagliardo_form(coeffs, s)
        print(f"gagliardo {storage.fmt(gag)}")
        lo, hi = spectral.equivalence_ratio_range(cf.cutoff, s)
        print(f"equivalence_lo {storage.fmt(lo)}")
        print(f"equivalence_hi {storage.fmt(hi)}")
        semi = spectral.hs_seminorm(coeffs, s)
        if semi > 0.0:
            print(f"gagliardo_over_seminorm_sq {storage.fmt(gag / semi**2)}")
    return EXIT_OK


def cmd_gen_data(args) -> int:
    cfg = _load_config(args.config, _GEN_KEYS)
    data = _make_data(cfg)
    out = args.out
    os.makedirs(out, exist_ok=True)
    coeff_path = os.path.join(out, "u0.coeff")
    meta = data.params
    spectral.write_coeff_file(
        coeff_path,
        data.coeffs,
        seed=int(meta.get("seed", 0)),
        s=float(meta.get("s", 0.0)),
        beta=float(meta.get("beta", 0.0)),
    )
    if args.csv:
        spectral.write_coeff_csv(os.path.join(out, "u0.csv"), data.coeffs)
    norms = {
        "l2": spectral.l2_norm(data.coeffs),
        "hs": data.hs_norm,
        "hs_index": data.hs_index,
    }
    storage.write_data_card(
        os.path.join(out, "u0_card.json"),
        family=data.family,
        params=data.params,
        norms=norms,
        coeff_file=coeff_path,
    )
    print(f"family {data.family}")
    print(f"cutoff {(data.coeffs.size - 1) // 2}")
    print(f"hs_norm {storage.fmt(data.hs_norm)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="logsplit", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="one splitting trajectory")
    run.add_argument("--config", required=True)
    run.add_argument("--out", required=True)
    run.set_defaults(func=cmd_run)

    conv = sub.add_parser("converge", help="tau sweep and order fit")
    conv.add_argument("--config", required=True)
    conv.add_argument("--out", required=True)
    conv.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    conv.add_argument("--cache-dir", default=None, help=f"reference cache (or ${storage.CACHE_ENV})")
    conv.set_defaults(func=cmd_converge)

    prop = sub.add_parser("proptest", help="randomized inequality suites")
    prop.add_argument("--seed", type=int, default=0)
    prop.add_argument("--scalar-pairs", type=int, default=10**5)
    prop.add_argument("--fields", type=int, default=10**3)
    prop.add_argument("--shift-samples", type=int, default=100)
    prop.add_argument("--out", required=True)
    prop.add_argument(
        "--inject-violation",
        action="store_true",
        help="shrink every bound to force a failure (checker self-test)",
    )
    prop.set_defaults(func=cmd_proptest)

    norms = sub.add_parser("norms", help="norms of a coefficient file")
    norms.add_argument("--coeffs", required=True)
    norms.add_argument("--s", type=float, default=None, help="Sobolev order (default: file header)")
    norms.set_defaults(func=cmd_norms)

    gen = sub.add_parser("gen-data", help="generate an initial-data family")
    gen.add_argument("--config", required=True)
    gen.add_argument("--out", required=True)
    gen.add_argument("--csv", action="store_true", help="also write a plain-text coefficient CSV")
    gen.set_defaults(func=cmd_gen_data)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except splitting.SolverAbort as e:
        print(f"solver abort: {e}", file=sys.stderr)
        return EXIT_SOLVER
    except harness.PropertyViolation as e:
        print(f"property violation: {e}", file=sys.stderr)
        return EXIT_PROPERTY


if __name__ == "__main__":
    sys.exit(main())
