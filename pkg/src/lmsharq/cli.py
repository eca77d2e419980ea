"""Command-line front end.

Subcommands build the MI table, calibrate the decoding requirement,
export channel realizations, and drive single runs or sweeps whose
tidy CSV output is meant to be plotted directly.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import replace
from pathlib import Path

from lmsharq import metrics, presets
from lmsharq.channel import empirical_cdf, generate_series
from lmsharq.errors import ConfigError
from lmsharq.fec import calibrate_mi_req, load_wer_curve
from lmsharq.mi import (
    DEFAULT_MAX_DB,
    DEFAULT_MIN_DB,
    DEFAULT_POINTS,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    build_mi_table,
    load_mi_csv,
    save_mi_csv,
)
from lmsharq.schemes import PROB_PRESETS, STATIC_PRESETS
from lmsharq.sim import SCHEMES, SimConfig, run, sweep

# The only bundled profile: GEO forward link, 500 kbps QPSK, 500 ms
# round trip, 10 minute runs. Plain SimConfig defaults.
PROFILES = {"geo-baseline": {}}

SWEEP_HEADER = ("scheme", "environment", "es_n0_db", "efficiency", "mean_delay_s")


def _fmt(value) -> str:
    return format(float(value), ".6g")


def _parse_es_list(text: str) -> list[float]:
    """Accept '10', '7,10,13' or 'start:stop:step' (stop inclusive)."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"expected start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ConfigError(f"bad Es/N0 range {text!r}")
        out = []
        x = start
        while x <= stop + 1e-9:
            out.append(round(x, 9))
            x += step
        return out
    return [float(p) for p in text.split(",") if p]


def _profile_config(args) -> SimConfig:
    if args.profile not in PROFILES:
        raise ConfigError(
            f"unknown profile {args.profile!r}, expected one of {sorted(PROFILES)}"
        )
    overrides = dict(PROFILES[args.profile])
    for name in ("duration_s", "max_transmissions"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    return SimConfig(
        scheme=getattr(args, "scheme", "adaptive"),
        environment=args.env,
        es_n0_ref_db=0.0,
        probs_preset=getattr(args, "probs", None) or "case3",
        static_preset=getattr(args, "static", None) or "classical-equal",
        seed=getattr(args, "seed", 1),
        clear_sky=getattr(args, "clear_sky", False),
        **overrides,
    )


def _prepared(config: SimConfig):
    mi_table = presets.default_mi_table()
    spec = presets.default_code_spec(mi_table)
    model = None if config.clear_sky else presets.load_environment(config.environment)
    return model, spec, mi_table


def _write_rows(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _metric_row(log, n_bins: int) -> list[str]:
    m = metrics.RunMetrics.from_log(log)
    fractions = list(m.decode_fraction_per_transmission)[:n_bins]
    fractions += [0.0] * (n_bins - len(fractions))
    return (
        [m.scheme, log.config.environment, _fmt(m.es_n0_ref_db), _fmt(m.efficiency_bits_per_symbol), _fmt(m.mean_delay_s)]
        + [_fmt(f) for f in fractions]
        + [_fmt(m.wer), str(m.seed)]
    )


def _sweep_header(n_bins: int):
    return SWEEP_HEADER + tuple(f"p{j}" for j in range(1, n_bins + 1)) + ("wer", "seed")


def cmd_mi_table(args) -> int:
    table = build_mi_table(args.min_db, args.max_db, args.points, args.samples, args.seed)
    save_mi_csv(table, args.out)
    print(f"wrote {len(table.es_n0_linear)} grid points to {args.out}")
    return 0


def cmd_calibrate(args) -> int:
    curve = load_wer_curve(args.wer_curve) if args.wer_curve else presets.load_reference_wer()
    table = load_mi_csv(args.mi_table) if args.mi_table else presets.default_mi_table()
    mi_req = calibrate_mi_req(curve, args.target_wer, table)
    print(f"target_wer = {_fmt(args.target_wer)}")
    print(f"mi_req_per_bit = {_fmt(mi_req)}")
    return 0


def cmd_channel(args) -> int:
    model = presets.load_environment(args.env)
    series = generate_series(model, args.duration_s, args.seed)
    series.to_csv(args.out)
    print(f"wrote {len(series.rho)} samples to {args.out}")
    if args.cdf_out:
        cdf = empirical_cdf(series)
        n = len(cdf.sorted_rho)
        rows = (
            (_fmt(20.0 * math.log10(r)), _fmt((i + 1) / n))
            for i, r in enumerate(cdf.sorted_rho)
        )
        _write_rows(Path(args.cdf_out), ("rho_db", "cdf"), rows)
        print(f"wrote {n} CDF points to {args.cdf_out}")
    return 0


def cmd_run(args) -> int:
    config = replace(_profile_config(args), es_n0_ref_db=args.es_n0_db)
    model, spec, mi_table = _prepared(config)
    log = run(config, model, spec, mi_table)
    m = metrics.RunMetrics.from_log(log)
    print(f"scheme = {m.scheme}")
    print(f"environment = {config.environment}")
    print(f"es_n0_db = {_fmt(m.es_n0_ref_db)}")
    print(f"seed = {m.seed}")
    print(f"generated = {m.generated}")
    print(f"decoded = {m.decoded}")
    print(f"censored = {m.censored}")
    print(f"wer = {_fmt(m.wer)}")
    print(f"efficiency_bits_per_symbol = {_fmt(m.efficiency_bits_per_symbol)}")
    print(f"mean_delay_s = {_fmt(m.mean_delay_s)}")
    for j, frac in enumerate(m.decode_fraction_per_transmission, start=1):
        print(f"p{j} = {_fmt(frac)}")
    if args.codewords_csv:
        rows = (
            (
                c.id,
                int(c.decoded),
                c.n_transmissions,
                c.n_total_sent,
                _fmt(c.transmissions[0].start_time_s),
                _fmt(c.decode_time_s) if c.decode_time_s is not None else "",
            )
            for c in log.codewords
        )
        _write_rows(
            Path(args.codewords_csv),
            ("codeword_id", "decoded", "n_transmissions", "total_bits", "first_start_s", "decode_time_s"),
            rows,
        )
        print(f"wrote {log.generated} codewords to {args.codewords_csv}")
    return 0


def cmd_sweep(args) -> int:
    config = _profile_config(args)
    schemes = [s for s in args.schemes.split(",") if s]
    for s in schemes:
        if s not in SCHEMES:
            raise ConfigError(f"unknown scheme {s!r}, expected one of {SCHEMES}")
    es_list = _parse_es_list(args.esn0)
    seeds = [int(s) for s in args.seeds.split(",") if s]
    if not schemes or not es_list or not seeds:
        raise ConfigError("schemes, esn0 and seeds must all be non-empty")
    logs = sweep(config, es_list, schemes, seeds)
    n_bins = config.max_transmissions
    _write_rows(Path(args.out), _sweep_header(n_bins), (_metric_row(lg, n_bins) for lg in logs))
    print(f"wrote {len(logs)} rows to {args.out}")
    return 0


FIGURES = {
    "eff-its": dict(env="its", schemes=("classical", "enhanced", "adaptive")),
    "delay-its": dict(env="its", schemes=("classical", "enhanced", "adaptive")),
    "eff-open": dict(env="open", schemes=("classical", "enhanced", "adaptive")),
    "cases-its": dict(env="its", schemes=("adaptive",), probs=("case1", "case2", "case3")),
}


def cmd_figures(args) -> int:
    if args.which not in FIGURES:
        raise ConfigError(f"unknown figure preset {args.which!r}, expected one of {sorted(FIGURES)}")
    recipe = FIGURES[args.which]
    out = Path(args.out_dir) / f"{args.which}.csv"
    es_list = _parse_es_list(args.esn0)
    base = SimConfig(environment=recipe["env"], seed=args.seed)
    n_bins = base.max_transmissions
    rows = []
    if "probs" in recipe:
        header = _sweep_header(n_bins) + ("probs",)
        for preset in recipe["probs"]:
            cfg = replace(base, probs_preset=preset)
            for log in sweep(cfg, es_list, recipe["schemes"], [args.seed]):
                rows.append(_metric_row(log, n_bins) + [preset])
    else:
        header = _sweep_header(n_bins)
        for log in sweep(base, es_list, recipe["schemes"], [args.seed]):
            rows.append(_metric_row(log, n_bins))
    _write_rows(out, header, rows)
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lmsharq",
        description="Link-level HARQ simulator for land-mobile-satellite channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mi-table", help="build the per-bit MI table and save it as CSV")
    p.add_argument("--out", default="qpsk_mi.csv")
    p.add_argument("--min-db", type=float, default=DEFAULT_MIN_DB)
    p.add_argument("--max-db", type=float, default=DEFAULT_MAX_DB)
    p.add_argument("--points", type=int, default=DEFAULT_POINTS)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_mi_table)

    p = sub.add_parser("calibrate", help="derive the per-bit MI requirement from a WER curve")
    p.add_argument("--wer-curve", help="CSV curve; defaults to the shipped one")
    p.add_argument("--mi-table", help="MI table CSV; defaults to the shipped one")
    p.add_argument("--target-wer", type=float, default=1e-4)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("channel", help="generate an attenuation series and export it")
    p.add_argument("--env", default="its")
    p.add_argument("--duration-s", type=float, default=600.0)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", default="series.csv")
    p.add_argument("--cdf-out")
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("run", help="one simulation run, metrics on stdout")
    p.add_argument("--scheme", default="adaptive", choices=SCHEMES)
    p.add_argument("--env", default="its")
    p.add_argument("--esn0", dest="es_n0_db", type=float, required=True)
    p.add_argument("--probs", choices=sorted(PROB_PRESETS))
    p.add_argument("--static", choices=sorted(STATIC_PRESETS))
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--duration-s", dest="duration_s", type=float)
    p.add_argument("--max-transmissions", dest="max_transmissions", type=int)
    p.add_argument("--clear-sky", action="store_true")
    p.add_argument("--profile", default="geo-baseline")
    p.add_argument("--codewords-csv", help="also write one CSV row per codeword")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="cross-product of schemes and Es/N0 points, tidy CSV")
    p.add_argument("--schemes", default="classical,enhanced,adaptive")
    p.add_argument("--esn0", default="7:13:1")
    p.add_argument("--env", default="its")
    p.add_argument("--seeds", default="1")
    p.add_argument("--probs", choices=sorted(PROB_PRESETS))
    p.add_argument("--static", choices=sorted(STATIC_PRESETS))
    p.add_argument("--duration-s", dest="duration_s", type=float)
    p.add_argument("--max-transmissions", dest="max_transmissions", type=int)
    p.add_argument("--profile", default="geo-baseline")
    p.add_argument("--out", default="sweep.csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figures", help="write the CSV behind one of the standard plots")
    p.add_argument("--which", required=True)
    p.add_argument("--esn0", default="7:13:1")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_figures)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"missing file or asset: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"invalid data: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
