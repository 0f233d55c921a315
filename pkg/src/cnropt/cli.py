"""Command-line entry point: generation, analytics, simulation, emulation, reports.

Every output file is written atomically (UTF-8, LF) with a sibling
``<name>.manifest.json`` recording the command, instance hash, configuration
echo, tool version, and timestamp. Exit codes: 0 success, 1 usage error,
2 validation error, 3 resource guard.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import hashlib
import io
import json
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__, backend, metrics, phase, recursion
from .cost import all_energies, enumerate_spectrum, load_instance, save_instance, string_of
from .emulator import Mode, table_report
from .errors import ResourceError, ValidationError
from .generate import Family, GeneratorSpec, generate
from .phase import CnrConfig
from .simulator import run_algorithm, t_marginal_levels

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_RESOURCE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage failures exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_scale(text: str) -> float:
    """Scale factor, decimal or symbolic like '45/2pi' / '45/(2*pi)'."""
    compact = text.strip().lower().replace(" ", "")
    match = re.fullmatch(r"([0-9.eE+-]+)/\(?2\*?pi\)?", compact)
    if match:
        return float(match.group(1)) / (2.0 * math.pi)
    try:
        return float(compact)
    except ValueError:
        raise ValidationError(f"cannot parse scale factor {text!r}") from None


def parse_p_list(text: str) -> list[int]:
    """Stage counts: '4', '4..9', or '4,5,7'."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo_i, hi_i = int(lo), int(hi)
        if hi_i < lo_i:
            raise ValidationError(f"empty stage range {text!r}")
        return list(range(lo_i, hi_i + 1))
    return [int(tok) for tok in text.split(",") if tok]


def _timestamp() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _atomic_write(path: Path, data: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(data, encoding="utf-8", newline="\n")
    os.replace(tmp, path)


def _write_manifest(out_path: Path, args, schema: str, config_echo: dict, instance: Path | None) -> None:
    manifest = {
        "tool": "cnropt",
        "version": __version__,
        "backend": backend.backend_name(),
        "schema": schema,
        "command": list(getattr(args, "_argv", [])),
        "created": _timestamp(),
        "instance": {"path": str(instance), "sha256": _sha256(instance)} if instance else None,
        "config": config_echo,
        "output": out_path.name,
    }
    _atomic_write(out_path.with_name(out_path.name + ".manifest.json"), json.dumps(manifest, indent=2) + "\n")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _atomic_write(path, buf.getvalue())


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _fmt(x: float) -> str:
    return repr(float(x))


def cmd_generate(args) -> int:
    family = Family.MAX_2_XOR if args.family == "max2xor" else Family.GAUSSIAN_2EDGE
    inst = generate(GeneratorSpec(family=family, n=args.n, seed=args.seed, density=args.density))
    out = _out_dir(args) / args.name
    save_instance(inst, out)
    _write_manifest(out, args, "instance-v1", {"family": args.family, "n": args.n, "density": args.density, "seed": args.seed}, None)
    print(f"wrote {out} ({len(inst.terms)} terms)")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    inst = load_instance(args.instance)
    raw = np.sort(all_energies(inst))
    out = _out_dir(args) / "spectrum.csv"
    _write_csv(out, ["zeta", "energy"], [[z, _fmt(e)] for z, e in enumerate(raw)])
    _write_manifest(out, args, "spectrum-v1", {"n": inst.n}, Path(args.instance))
    print(f"wrote {out} ({raw.shape[0]} rows)")
    return EXIT_OK


def cmd_qpe_dist(args) -> int:
    probs = phase.probabilities(args.delta, args.t)
    out = _out_dir(args) / "qpe_dist.csv"
    rows = [[string_of(d, args.t), d, _fmt(pr)] for d, pr in enumerate(probs)]
    _write_csv(out, ["bin", "value", "probability"], rows)
    _write_manifest(out, args, "qpe-dist-v1", {"delta": args.delta, "t": args.t}, None)
    print(f"wrote {out} ({len(rows)} bins, peak at {int(np.argmax(probs))})")
    return EXIT_OK


def cmd_recurse(args) -> int:
    inst = load_instance(args.instance)
    spec = enumerate_spectrum(inst)
    dist = recursion.distribution_at(spec, args.p)
    prefix = dist.prefix()
    tail = recursion.tail_at(spec, args.p)
    out = _out_dir(args) / "recursion.csv"
    rows = [
        [a + 1, _fmt(spec.energies[a]), int(spec.degeneracies[a]), _fmt(dist.probs[a]), _fmt(prefix[a]), _fmt(tail[a])]
        for a in range(spec.num_levels)
    ]
    _write_csv(out, ["level", "energy", "degeneracy", "prob", "cum_prob", "cum_complement"], rows)
    _write_manifest(out, args, "recursion-v1", {"p": args.p}, Path(args.instance))
    print(f"wrote {out} ({spec.num_levels} levels)")
    return EXIT_OK


def cmd_bounds(args) -> int:
    inst = load_instance(args.instance)
    spec = enumerate_spectrum(inst)
    lines = metrics.bound_lines(spec, args.eps)
    beta = lines.beta_max
    a_beta = metrics.a_beta_of(spec, beta)
    p = args.p if args.p is not None else metrics.min_p_for(args.eta, spec.n, a_beta)
    report = metrics.neighborhood_report(spec, beta, p)

    out = _out_dir(args)
    levels = np.arange(1, spec.num_levels + 1)
    e_crit = lines.e_critical(levels)
    e_bound = lines.e_bound(levels) if lines.e_bound is not None else np.full(spec.num_levels, np.nan)
    lines_csv = out / "bound_lines.csv"
    _write_csv(
        lines_csv,
        ["level", "energy", "critical_line", "bound_line"],
        [[int(a), _fmt(spec.energies[a - 1]), _fmt(e_crit[a - 1]), _fmt(e_bound[a - 1])] for a in levels],
    )
    payload = {
        "eps": args.eps,
        "eta": args.eta,
        "a_tilde": lines.a_tilde,
        "critical_slope": lines.critical_slope,
        "beta_max": lines.beta_max,
        "report": {
            "beta": report.beta,
            "a_beta": report.a_beta,
            "p": report.p,
            "cum_prob": report.cum_prob,
            "cum_complement": metrics.cumulative_complement_counts(spec.n, report.a_beta, report.p),
            "lower_bound": report.lower_bound,
            "avg_rel_error": report.avg_rel_error,
            "worst_case_cond": report.worst_case_cond,
        },
    }
    report_json = out / "bounds.json"
    _atomic_write(report_json, json.dumps(payload, indent=2) + "\n")
    _write_manifest(report_json, args, "bounds-v1", {"eps": args.eps, "eta": args.eta, "p": p}, Path(args.instance))
    _write_manifest(lines_csv, args, "bound-lines-v1", {"eps": args.eps}, Path(args.instance))
    print(f"wrote {report_json} and {lines_csv} (beta_max={beta}, p={p})")
    return EXIT_OK


def _config_from(args, spec=None) -> CnrConfig:
    scale = parse_scale(args.scale)
    accuracy = args.accuracy if args.accuracy is not None else 2.0 ** (-args.t)
    config = CnrConfig(t=args.t, scale=scale, accuracy=accuracy)
    if spec is not None:
        config.require_valid_for(spec.c_min, spec.c_max)
    return config


def cmd_simulate(args) -> int:
    inst = load_instance(args.instance)
    spec = enumerate_spectrum(inst)
    config = _config_from(args, spec)
    dist = run_algorithm(inst, config, args.p)
    out = _out_dir(args) / "simulate_dist.csv"
    rows = [[string_of(code, inst.n), _fmt(pr)] for code, pr in enumerate(dist)]
    _write_csv(out, ["state", "probability"], rows)

    echo = {"p": args.p, "t": args.t, "scale": config.scale, "accuracy": config.accuracy}
    if args.exact_check:
        sim_levels = t_marginal_levels(dist, spec, m=args.p)
        ideal = recursion.distribution_at(spec, args.p)
        tv = 0.5 * float(np.abs(sim_levels.probs - ideal.probs).sum())
        echo["tv_distance_to_recursion"] = tv
        print(f"total variation vs recursion: {tv:.3e}")
    _write_manifest(out, args, "simulate-v1", echo, Path(args.instance))
    print(f"wrote {out}")
    return EXIT_OK


def cmd_emulate(args) -> int:
    inst = load_instance(args.instance)
    spec = enumerate_spectrum(inst)
    mode = Mode(args.mode)
    config = _config_from(args, spec) if mode is Mode.QPE_SAMPLED else None
    p_values = parse_p_list(args.p)
    samples = int(float(args.samples))
    rows = table_report(inst, spec, p_values, args.beta, samples, args.seed, mode, config)
    out = _out_dir(args) / "emulate_table.csv"
    header = [
        "p", "beta_plus_1", "a_beta", "cum_prob", "cum_se", "avg_rel_error", "avg_se",
        "worst_cond", "worst_se", "exact_cum", "exact_avg", "exact_worst", "samples", "mode",
    ]
    _write_csv(
        out,
        header,
        [
            [r.p, r.beta + 1, r.a_beta, _fmt(r.cum_prob), _fmt(r.cum_se), _fmt(r.avg_rel_error),
             _fmt(r.avg_se), _fmt(r.worst_cond), _fmt(r.worst_se), _fmt(r.exact_cum),
             _fmt(r.exact_avg), _fmt(r.exact_worst), r.samples, r.mode]
            for r in rows
        ],
    )
    echo = {"p": p_values, "beta": args.beta, "samples": samples, "seed": args.seed, "mode": args.mode}
    if config is not None:
        echo.update({"t": config.t, "scale": config.scale})
    _write_manifest(out, args, "emulate-v1", echo, Path(args.instance))
    print(f"wrote {out} ({len(rows)} rows)")
    return EXIT_OK


def cmd_report(args) -> int:
    inst = load_instance(args.instance)
    spec = enumerate_spectrum(inst)
    p_values = parse_p_list(args.p)

    if args.beta is not None:
        beta = args.beta
    elif args.eps is not None:
        alphas = metrics.relative_errors(spec)
        beta = int(np.sum(alphas <= args.eps + 1e-15)) - 1  # widest width the true energies admit
    else:
        raise ValidationError("report needs either --beta or --eps")

    a_beta = metrics.a_beta_of(spec, beta)
    rows = []
    for p in p_values:
        rows.append({
            "source": "true_energy",
            "p": p,
            "beta_plus_1": beta + 1,
            "a_beta": a_beta,
            "cum_prob": metrics.cumulative_prob(spec, beta, p),
            "cum_complement": metrics.cumulative_complement_counts(spec.n, a_beta, p),
            "avg_rel_error": metrics.avg_relative_error(spec, beta, p),
            "worst_cond": metrics.worst_case_conditional(spec, beta, p),
        })
    if args.eps is not None:
        beta_b = metrics.beta_upper_bound(spec, args.eps)
        a_b = metrics.a_beta_of(spec, beta_b)
        p_top = max(p_values)
        rows.insert(0, {
            "source": "bound_line",
            "p": p_top,
            "beta_plus_1": beta_b + 1,
            "a_beta": a_b,
            "cum_prob": metrics.cumulative_prob(spec, beta_b, p_top),
            "cum_complement": metrics.cumulative_complement_counts(spec.n, a_b, p_top),
            "avg_rel_error": metrics.avg_relative_error(spec, beta_b, p_top),
            "worst_cond": metrics.worst_case_conditional(spec, beta_b, p_top),
        })

    emp = {}
    if args.samples is not None:
        mode = Mode(args.mode)
        config = _config_from(args, spec) if mode is Mode.QPE_SAMPLED else None
        for row in table_report(inst, spec, p_values, beta, int(float(args.samples)), args.seed, mode, config):
            emp[row.p] = row

    out = _out_dir(args) / "report.csv"
    header = ["source", "p", "beta_plus_1", "a_beta", "cum_prob", "cum_prob_4dp", "cum_complement",
              "avg_rel_error", "avg_rel_error_4dp", "worst_cond", "worst_cond_4dp",
              "emp_cum_prob", "emp_cum_se"]
    csv_rows = []
    for row in rows:
        e = emp.get(row["p"]) if row["source"] == "true_energy" else None
        csv_rows.append([
            row["source"], row["p"], row["beta_plus_1"], row["a_beta"],
            _fmt(row["cum_prob"]), f"{row['cum_prob']:.4f}", _fmt(row["cum_complement"]),
            _fmt(row["avg_rel_error"]), f"{row['avg_rel_error']:.4f}",
            _fmt(row["worst_cond"]), f"{row['worst_cond']:.4f}",
            _fmt(e.cum_prob) if e else "", _fmt(e.cum_se) if e else "",
        ])
    _write_csv(out, header, csv_rows)
    json_out = _out_dir(args) / "report.json"
    _atomic_write(json_out, json.dumps(rows, indent=2) + "\n")
    echo = {"p": p_values, "beta": beta, "eps": args.eps, "samples": args.samples, "seed": args.seed}
    _write_manifest(out, args, "report-v1", echo, Path(args.instance))
    _write_manifest(json_out, args, "report-v1", echo, Path(args.instance))
    print(f"wrote {out} ({len(csv_rows)} rows)")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="cnropt", description=__doc__)
    parser.add_argument("--version", action="version", version=f"cnropt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a random instance JSON")
    g.add_argument("--family", choices=["gaussian", "max2xor"], required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--density", type=float, default=None, help="edge density (max2xor only)")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--name", default="instance.json")
    g.add_argument("--out", default=".")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("spectrum", help="sorted (zeta, energy) scatter data")
    s.add_argument("--instance", required=True)
    s.add_argument("--out", default=".")
    s.set_defaults(func=cmd_spectrum)

    q = sub.add_parser("qpe-dist", help="readout distribution over the 2^t bins")
    q.add_argument("--delta", type=float, required=True)
    q.add_argument("--t", type=int, required=True)
    q.add_argument("--out", default=".")
    q.set_defaults(func=cmd_qpe_dist)

    r = sub.add_parser("recurse", help="exact level distribution after p stages")
    r.add_argument("--instance", required=True)
    r.add_argument("--p", type=int, required=True)
    r.add_argument("--out", default=".")
    r.set_defaults(func=cmd_recurse)

    b = sub.add_parser("bounds", help="critical/admissible lines and neighborhood report")
    b.add_argument("--instance", required=True)
    b.add_argument("--eps", type=float, required=True)
    b.add_argument("--eta", type=float, default=0.9)
    b.add_argument("--p", type=int, default=None, help="stages; default from --eta")
    b.add_argument("--out", default=".")
    b.set_defaults(func=cmd_bounds)

    m = sub.add_parser("simulate", help="exact statevector run at small width")
    m.add_argument("--instance", required=True)
    m.add_argument("--p", type=int, required=True)
    m.add_argument("--t", type=int, required=True)
    m.add_argument("--M", dest="scale", required=True, help="scale factor; accepts '45/2pi'")
    m.add_argument("--b", dest="accuracy", type=float, default=None)
    m.add_argument("--exact-check", action="store_true")
    m.add_argument("--out", default=".")
    m.set_defaults(func=cmd_simulate)

    e = sub.add_parser("emulate", help="Monte Carlo tournament at full problem scale")
    e.add_argument("--instance", required=True)
    e.add_argument("--p", required=True, help="stages: '4', '4..9', or '4,6'")
    e.add_argument("--samples", default="1e5")
    e.add_argument("--mode", choices=["ideal", "qpe"], default="ideal")
    e.add_argument("--t", type=int, default=7)
    e.add_argument("--M", dest="scale", default="45/2pi")
    e.add_argument("--b", dest="accuracy", type=float, default=None)
    e.add_argument("--beta", type=int, required=True)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out", default=".")
    e.set_defaults(func=cmd_emulate)

    t = sub.add_parser("report", help="joined exact/empirical neighborhood table")
    t.add_argument("--instance", required=True)
    t.add_argument("--p", required=True)
    t.add_argument("--beta", type=int, default=None)
    t.add_argument("--eps", type=float, default=None)
    t.add_argument("--samples", default=None)
    t.add_argument("--mode", choices=["ideal", "qpe"], default="ideal")
    t.add_argument("--t", type=int, default=7)
    t.add_argument("--M", dest="scale", default="45/2pi")
    t.add_argument("--b", dest="accuracy", type=float, default=None)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", default=".")
    t.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args._argv = ["cnropt", *argv]
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"cnropt: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ResourceError as exc:
        print(f"cnropt: resource guard: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
