"""Command-line front end.

Subcommands: simulate (one scenario file or preset), sweep (directory of
scenario files), psd (spectrum verification), validate (acceptance suite).
Seed and worker count resolve as: flag > LOSMIMO_SEED / LOSMIMO_WORKERS env
var > scenario file / default.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .harness import (
    parse_scenario_file,
    psd_check,
    run_scenario,
    write_rows,
    CSV_COLUMNS,
    _row_record,
)
from .phasenoise import StationaryModel, WienerModel, resolve_mask, sigma2_from_beta

_EPILOG = """examples:
  losmimo simulate fig2a-nopn --workers 4 --out fig2a.csv
  losmimo simulate my_run.scn --trials 100
  losmimo sweep scenarios/ --out sweep.csv
  losmimo psd wiener:sigma2=1e-4 --out psd.csv
  losmimo psd mask:reynolds85
  losmimo validate --workers 8
"""


def _env_int(name: str):
    v = os.environ.get(name)
    return int(v) if v else None


def _resolve_workers(args) -> int:
    if getattr(args, "workers", None) is not None:
        return args.workers
    env = _env_int("LOSMIMO_WORKERS")
    if env is not None:
        return max(1, env)
    return max(1, min(8, os.cpu_count() or 1))


def _apply_overrides(scenarios, args):
    seed = args.seed if args.seed is not None else _env_int("LOSMIMO_SEED")
    out = []
    for s in scenarios:
        if seed is not None:
            s = replace(s, master_seed=seed)
        if getattr(args, "trials", None) is not None:
            s = replace(s, trials=args.trials)
        out.append(s)
    return out


def _emit_rows(rows, out_path):
    if out_path:
        write_rows(out_path, rows)
        print(f"wrote {len(rows)} rows to {out_path}")
    else:
        print(",".join(CSV_COLUMNS))
        for r in rows:
            print(_row_record(r))


def _resolve_scenarios(target: str):
    if os.path.isfile(target):
        return [parse_scenario_file(target)]
    from .presets import expand_preset

    return expand_preset(target)


def _cmd_simulate(args) -> int:
    scenarios = _apply_overrides(_resolve_scenarios(args.target), args)
    workers = _resolve_workers(args)
    rows = []
    for s in scenarios:
        rows.extend(run_scenario(s, workers=workers))
    _emit_rows(rows, args.out)
    if any(r.scenario_id.startswith("fig4b") for r in rows):
        from .presets import rel_improvement_table

        table = rel_improvement_table(rows)
        if table:
            print("family,n,topology,snr_db,ser_plain,ser_comp,rel_improvement")
            lines = [
                f"{t['family']},{t['n']},{t['topology']},{t['snr_db']:g},"
                f"{t['ser_plain']:.6g},{t['ser_comp']:.6g},{t['rel_improvement']:.6g}"
                for t in table
            ]
            print("\n".join(lines))
            if args.out:
                stem, ext = os.path.splitext(args.out)
                with open(f"{stem}-relimp{ext or '.csv'}", "w") as fh:
                    fh.write("family,n,topology,snr_db,ser_plain,ser_comp,rel_improvement\n")
                    fh.write("\n".join(lines) + "\n")
    return 0


def _cmd_sweep(args) -> int:
    if not os.path.isdir(args.scenario_dir):
        raise ValueError(f"not a directory: {args.scenario_dir}")
    files = sorted(
        os.path.join(args.scenario_dir, f)
        for f in os.listdir(args.scenario_dir)
        if f.endswith(".scn")
    )
    if not files:
        raise ValueError(f"no .scn scenario files in {args.scenario_dir}")
    scenarios = _apply_overrides([parse_scenario_file(f) for f in files], args)
    workers = _resolve_workers(args)
    rows = []
    for s in scenarios:
        rows.extend(run_scenario(s, workers=workers))
    if args.out:
        write_rows(args.out, rows, append=args.append)
        print(f"wrote {len(rows)} rows to {args.out}")
    else:
        _emit_rows(rows, None)
    return 0


def _parse_kv(parts: str) -> dict:
    out = {}
    for item in parts.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise ValueError(f"expected key=value, got {item!r}")
        k, _, v = item.partition("=")
        out[k.strip()] = v.strip()
    return out


def _parse_model_spec(spec: str):
    """wiener:sigma2=1e-4[,ts=1e-9] | wiener:beta=8e3 | mask:NAME_OR_FILE[,filter_len=N,fs=1e9]."""
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "wiener":
        kv = _parse_kv(rest)
        ts = float(kv.pop("ts", 1e-9))
        if "sigma2" in kv:
            s2 = float(kv.pop("sigma2"))
        elif "beta" in kv:
            s2 = sigma2_from_beta(float(kv.pop("beta")), ts)
        else:
            raise ValueError("wiener spec needs sigma2= or beta=")
        if kv:
            raise ValueError(f"unknown wiener spec keys: {sorted(kv)}")
        return WienerModel(s2, ts)
    if kind == "mask":
        first, _, tail = rest.partition(",")
        kv = _parse_kv(tail) if tail else {}
        filter_len = int(kv.pop("filter_len", 4097))
        fs = float(kv.pop("fs", 1e9))
        if kv:
            raise ValueError(f"unknown mask spec keys: {sorted(kv)}")
        return StationaryModel(resolve_mask(first), filter_len=filter_len, f_sample=fs)
    # bare builtin mask name convenience
    try:
        return StationaryModel(resolve_mask(spec))
    except Exception:
        raise ValueError(
            f"cannot parse model spec {spec!r}; use wiener:sigma2=... or mask:NAME_OR_FILE"
        ) from None


def _cmd_psd(args) -> int:
    model = _parse_model_spec(args.model_spec)
    seed = args.seed if args.seed is not None else _env_int("LOSMIMO_SEED")
    report = psd_check(model, samples=args.samples, out_path=args.out, rs=seed)
    word = "PASS" if report.passed else "FAIL"
    print(f"{word}  psd {report.kind}: max in-band |err| {report.max_abs_err_db:.2f} dB (tol {report.tol_db:g} dB)")
    if args.out:
        print(f"wrote spectrum to {args.out}")
    return 0 if report.passed else 1


def _cmd_validate(args) -> int:
    from .acceptance import run_all

    workers = _resolve_workers(args)
    include_n96 = True if args.n96 else None
    _, ok = run_all(workers=workers, include_n96=include_n96)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="losmimo",
        description="LOS MIMO phase-noise link simulator",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one scenario file or preset")
    sim.add_argument("target", help="scenario file path or preset name (e.g. fig2a-nopn)")
    sim.add_argument("--seed", type=int, default=None, help="override master seed")
    sim.add_argument("--trials", type=int, default=None, help="override trials per SNR point")
    sim.add_argument("--workers", type=int, default=None, help="worker processes")
    sim.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    sim.set_defaults(func=_cmd_simulate)

    sw = sub.add_parser("sweep", help="run every .scn scenario file in a directory")
    sw.add_argument("scenario_dir")
    sw.add_argument("--seed", type=int, default=None)
    sw.add_argument("--trials", type=int, default=None)
    sw.add_argument("--workers", type=int, default=None)
    sw.add_argument("--out", default=None)
    sw.add_argument("--append", action="store_true", help="append to an existing CSV")
    sw.set_defaults(func=_cmd_sweep)

    psd = sub.add_parser("psd", help="verify a phase-noise model's spectrum")
    psd.add_argument("model_spec", help="wiener:sigma2=1e-4 | wiener:beta=8e3 | mask:reynolds85 | mask:file.txt")
    psd.add_argument("--samples", type=int, default=2**20)
    psd.add_argument("--seed", type=int, default=None)
    psd.add_argument("--out", default=None, help="CSV path for the estimated spectrum")
    psd.set_defaults(func=_cmd_psd)

    val = sub.add_parser("validate", help="run the acceptance suite")
    val.add_argument("--workers", type=int, default=None)
    val.add_argument("--n96", action="store_true", help="include the long N=96 sweep point")
    val.set_defaults(func=_cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
