"""
Command-line front end: ``chirpranging <command> [options]``.

Commands
--------
synth    transmitted chirp and one received snippet
rir      room impulse response between source and receiver
range    distances from recorded snippets (all configured estimators)
mc       Monte Carlo repeats at one receiver
grid     sweep over the receiver grid, with heatmaps
ppf      prominence-factor sweep
compare  estimator comparison across SNR values
power    duty-cycled power budget and battery life

Exit status is 0 on success, 2 for configuration errors and 3 for runtime
failures. Output goes to ``--out``, else ``$CHIRPRANGING_OUT``, else ``./out``.
"""

import argparse
import csv
import logging
import math
import os
import sys

import numpy as np

from . import io as cio
from .config import METHOD_NAMES, read_config
from .errors import ConfigError, RangingError
from .estimators import estimate_distances
from .experiments import (compare_estimators, run_grid_sweep, run_monte_carlo,
                          run_ppf_sweep)
from .plots import cdf_svg, heatmap_svg
from .power import (RECEIVER_COMPONENTS, battery_life, duty_cycle_power,
                    raw_battery_life)
from .room import compute_rir, simulate_reception
from .signals import NoiseSpec, generate_chirp

OUT_ENV = "CHIRPRANGING_OUT"
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
TEMPLATES = ("paper-chirp",)

log = logging.getLogger("chirpranging")


def _overrides(args):
    out = list(args.set or [])
    if args.alpha is not None:
        out.append(f"room.absorption={args.alpha}")
    if args.snr:
        out.append("noise.snr_db=" + ",".join(args.snr))
    if args.seed is not None:
        out.append(f"noise.seed={args.seed}")
    if args.scale is not None:
        out.append(f"experiment.scale={args.scale}")
    if args.estimator:
        out.append("estimators.methods=" + ",".join(args.estimator))
    if args.ppf is not None:
        out.append(f"estimators.ppf={args.ppf}")
    if args.trials is not None:
        out.append(f"experiment.trials={args.trials}")
        out.append(f"experiment.grid_trials={args.trials}")
    if args.workers is not None:
        out.append(f"experiment.workers={args.workers}")
    return out


def _out_dir(args):
    path = args.out or os.environ.get(OUT_ENV) or "out"
    os.makedirs(path, exist_ok=True)
    return path


def _ext(args):
    return "wav" if args.format == "wav" else "csv"


def _fmt(args):
    return "wav_pcm16" if args.format == "wav" else "csv_float"


def _snr_tag(snr):
    return "inf" if math.isinf(snr) else f"{snr:g}"


def _settings_dict(s):
    return {
        "room": {"dims": list(s.room.dims), "absorption": s.room.absorption,
                 "speed_of_sound": s.room.speed_of_sound},
        "source": list(s.source),
        "chirp": {"f_start": s.chirp.f_start, "f_end": s.chirp.f_end, "tau_tx": s.chirp.tau_tx,
                  "amplitude": s.chirp.amplitude, "sample_rate": s.chirp.sample_rate},
        "timing": {"tau_rx": s.timing.tau_rx, "wake_offset": s.timing.wake_offset},
        "seed": s.seed, "scale": s.scale, "bits": s.bits,
        "max_order": "auto" if s.max_order is None else s.max_order,
    }


def _stats_dict(stats):
    return {label: st.as_dict() for label, st in stats.items()}


def _print_stats(stats, title):
    print(title)
    print(f"  {'estimator':<24}{'mean':>10}{'P50':>10}{'P95':>10}{'P100':>10}")
    for label, st in stats.items():
        print(f"  {label:<24}{st.mean:>10.4f}{st.p50:>10.4f}{st.p95:>10.4f}{st.p100:>10.4f}")


def _error_curves(records):
    curves = {}
    for r in records:
        curves.setdefault(r.estimator, []).append(r.abs_error)
    return curves


def cmd_synth(s, args, out):
    chirp = generate_chirp(s.chirp)
    path = os.path.join(out, f"chirp.{_ext(args)}")
    cio.save_waveform(chirp, path, _fmt(args))
    receiver = s.mc_receiver()
    snr = s.snr_list[0]
    snippet = simulate_reception(s.chirp, s.room, s.source, receiver, NoiseSpec(snr, s.seed),
                                 s.timing.wake_offset, s.timing.tau_rx, s.bits, s.max_order)
    spath = os.path.join(out, f"snippet.{_ext(args)}")
    if args.format == "wav":
        peak = float(np.max(np.abs(snippet.samples))) or 1.0
        snippet = snippet.with_samples(snippet.samples / peak)
    cio.save_waveform(snippet, spath, _fmt(args))
    cio.write_summary({"settings": _settings_dict(s), "receiver": list(receiver),
                       "true_distance_m": math.dist(s.source, receiver), "snr_db": snr,
                       "chirp_samples": len(chirp), "snippet_samples": len(snippet)},
                      os.path.join(out, "summary.json"))
    print(f"wrote {path} ({len(chirp)} samples) and {spath} ({len(snippet)} samples)")


def cmd_rir(s, args, out):
    receiver = s.mc_receiver()
    rir = compute_rir(s.room, s.source, receiver, s.chirp.sample_rate, s.max_order,
                      length=s.timing.wake_offset + s.timing.tau_rx)
    taps = rir.taps
    path = os.path.join(out, f"rir.{_ext(args)}")
    if args.format == "wav":
        taps = taps.with_samples(taps.samples / float(np.max(np.abs(taps.samples))))
    cio.save_waveform(taps, path, _fmt(args))
    nz = np.flatnonzero(rir.taps.samples)
    cio.write_summary({"settings": _settings_dict(s), "receiver": list(receiver),
                       "max_order": rir.max_order, "n_taps": len(rir.taps),
                       "nonzero_taps": int(nz.size),
                       "direct_delay_s": math.dist(s.source, receiver) / s.room.speed_of_sound},
                      os.path.join(out, "summary.json"))
    print(f"wrote {path}: {len(rir.taps)} taps, max order {rir.max_order}")


def _template(name):
    if name not in TEMPLATES:
        raise ConfigError([f"unknown template {name!r}; choose from {TEMPLATES}"])


def cmd_range(s, args, out):
    if not args.input:
        raise ConfigError(["range needs at least one --input file"])
    _template(args.template)
    template = generate_chirp(s.chirp)
    fmt = None if args.format is None else _fmt(args)
    labels = [e.label for e in s.estimators]
    rows = []
    for path in args.input:
        snippet = cio.load_waveform(path, fmt, sample_rate=s.chirp.sample_rate)
        dists = estimate_distances(snippet, template, s.timing, s.estimators)
        rows.append((path, [float(d) for d in dists]))
    csv_path = os.path.join(out, "ranges.csv")
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["input", "estimator", "estimated_distance_m"])
        for path, dists in rows:
            for label, d in zip(labels, dists):
                w.writerow([os.path.basename(path), label, cio.fmt_float(d)])
    cio.write_summary({"settings": _settings_dict(s), "template": args.template,
                       "ranges": {os.path.basename(p): dict(zip(labels, d)) for p, d in rows}},
                      os.path.join(out, "summary.json"))
    print(f"{'input':<28}" + "".join(f"{lb:>24}" for lb in labels))
    for path, dists in rows:
        print(f"{os.path.basename(path):<28}" + "".join(f"{d:>24.4f}" for d in dists))


def cmd_mc(s, args, out):
    receiver = s.mc_receiver()
    records, summary, curves = [], {}, {}
    for snr in s.snr_list:
        cfg = s.experiment(receivers=[receiver], snr_db=snr, trials=s.trials)
        res = run_monte_carlo(cfg)
        records.extend(res.records)
        summary[_snr_tag(snr)] = {
            "stats": _stats_dict(res.stats),
            "gaussian_fit": {k: {"mean": m, "std": sd} for k, (m, sd) in res.fits.items()},
        }
        _print_stats(res.stats, f"SNR {_snr_tag(snr)} dB, {s.trials} trials, "
                                f"d = {res.true_distance:.4f} m")
        for label, errs in _error_curves(res.records).items():
            curves[f"{label} @ {_snr_tag(snr)} dB"] = errs
    cio.save_results(records, os.path.join(out, "results.csv"))
    cio.write_summary({"settings": _settings_dict(s), "receiver": list(receiver),
                       "trials": s.trials, "by_snr": summary},
                      os.path.join(out, "summary.json"))
    cdf_svg(curves, os.path.join(out, "cdf.svg"), "Monte Carlo error CDF")


def cmd_grid(s, args, out):
    records, summary = [], {}
    for snr in s.snr_list:
        cfg = s.experiment(snr_db=snr, trials=s.grid_trials)
        res = run_grid_sweep(cfg)
        records.extend(res.records)
        tag = _snr_tag(snr)
        summary[tag] = _stats_dict(res.stats)
        _print_stats(res.stats, f"grid {s.grid.nx}x{s.grid.ny}, alpha {s.room.absorption}, "
                                f"SNR {tag} dB")
        vmax = max(float(np.max(h)) for h in res.heatmaps.values())
        for label, hm in res.heatmaps.items():
            heatmap_svg(hm, os.path.join(out, f"heatmap_{label}_snr{tag}.svg"),
                        f"{label}, alpha={s.room.absorption:g}, SNR={tag} dB",
                        s.grid.margin, s.grid.margin, s.grid.spacing, vmax)
        cdf_svg(_error_curves(res.records), os.path.join(out, f"cdf_snr{tag}.svg"),
                f"grid error CDF, SNR={tag} dB")
    cio.save_results(records, os.path.join(out, "results.csv"))
    cio.write_summary({"settings": _settings_dict(s), "grid": [s.grid.nx, s.grid.ny],
                       "grid_trials": s.grid_trials, "by_snr": summary},
                      os.path.join(out, "summary.json"))


def cmd_ppf(s, args, out):
    cfg = s.experiment(trials=s.grid_trials)
    res = run_ppf_sweep(cfg, s.ppf_values, s.snr_list)
    with open(os.path.join(out, "ppf.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["snr_db", "ppf", "mean_m", "p50_m", "p95_m", "p100_m"])
        for snr in s.snr_list:
            for p in res.ppf_values:
                st = res.stats[snr][p]
                w.writerow([cio.fmt_float(snr), cio.fmt_float(p)] +
                           [cio.fmt_float(v) for v in (st.mean, st.p50, st.p95, st.p100)])
    summary = {_snr_tag(snr): {"optimum": res.optimum[snr], "band": res.bands[snr],
                               "stats": {f"{p:g}": res.stats[snr][p].as_dict()
                                         for p in res.ppf_values}}
               for snr in s.snr_list}
    fit = None if res.fit is None else dict(zip("abc", res.fit))
    cio.write_summary({"settings": _settings_dict(s), "by_snr": summary, "fit": fit},
                      os.path.join(out, "summary.json"))
    for snr in s.snr_list:
        print(f"SNR {_snr_tag(snr)} dB: best PPF {res.optimum[snr]:g}, "
              f"band {res.bands[snr][0]:g}..{res.bands[snr][-1]:g}")
    if fit:
        print("fit ppf = {a:.3g} exp({b:.3g} snr) + {c:.3g}".format(**fit))


def cmd_compare(s, args, out):
    cfg = s.experiment(trials=s.grid_trials)
    res = compare_estimators(cfg, s.snr_list)
    records = [r for snr in s.snr_list for r in res.grids[snr].records]
    cio.save_results(records, os.path.join(out, "results.csv"))
    tags = [_snr_tag(v) for v in s.snr_list]
    print(f"  {'estimator':<24}{'metric':<8}" + "".join(f"{t + ' dB':>10}" for t in tags))
    table = []
    for label, metric, vals in res.table():
        print(f"  {label:<24}{metric:<8}" + "".join(f"{v:>10.4f}" for v in vals))
        table.append({"estimator": label, "metric": metric, "values": dict(zip(tags, vals))})
    for snr, tag in zip(s.snr_list, tags):
        cdf_svg(_error_curves(res.grids[snr].records), os.path.join(out, f"cdf_snr{tag}.svg"),
                f"estimator comparison, SNR={tag} dB")
    cio.write_summary({"settings": _settings_dict(s), "table": table},
                      os.path.join(out, "summary.json"))


def cmd_power(s, args, out):
    p = s.power
    pb = duty_cycle_power(RECEIVER_COMPONENTS, p["supply_voltage"], p["active_time"], p["period"])
    life = battery_life(pb.total_nw, p["capacity_mah"], p["supply_voltage"],
                        p["shelf_life_years"])
    raw = raw_battery_life(pb.total_nw, p["capacity_mah"], p["supply_voltage"])
    with open(os.path.join(out, "power.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["component", "active_nw", "passive_nw", "total_nw"])
        for row in pb.rows():
            w.writerow([row[0]] + [cio.fmt_float(v) for v in row[1:]])
    cio.write_summary({"duty_cycle": pb.duty_cycle, "supply_voltage": pb.supply_voltage,
                       "rows": [dict(zip(("component", "active_nw", "passive_nw", "total_nw"), r))
                                for r in pb.rows()],
                       "battery_life_years": life, "raw_battery_life_years": raw},
                      os.path.join(out, "summary.json"))
    print(f"duty cycle {pb.duty_cycle:g} at {pb.supply_voltage:g} V")
    print(f"  {'component':<14}{'active nW':>12}{'passive nW':>12}{'total nW':>12}")
    for name, a, ps, t in pb.rows():
        print(f"  {name:<14}{a:>12.1f}{ps:>12.1f}{t:>12.1f}")
    print(f"battery life {life:.2f} years (uncapped {raw:.2f})")


COMMANDS = {
    "synth": cmd_synth, "rir": cmd_rir, "range": cmd_range, "mc": cmd_mc, "grid": cmd_grid,
    "ppf": cmd_ppf, "compare": cmd_compare, "power": cmd_power,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI configuration file")
    common.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./out)")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--scale", choices=("desk", "paper"))
    common.add_argument("--alpha", type=float, help="wall absorption coefficient")
    common.add_argument("--snr", action="append",
                        help="SNR in dB ('inf' for noiseless); repeat or comma-separate")
    common.add_argument("--estimator", action="append", metavar="NAME",
                        help=f"one of {', '.join(METHOD_NAMES)}; repeatable")
    common.add_argument("--ppf", type=float, help="prominence factor in percent")
    common.add_argument("--trials", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--input", nargs="+", help="recorded snippets for 'range'")
    common.add_argument("--template", default="paper-chirp", help="matched-filter template")
    common.add_argument("--format", choices=("csv", "wav"),
                        help="waveform file format (default csv; inferred on input)")
    common.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE",
                        help="override any config value")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="chirpranging", description=__doc__.split("\n")[1])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=fn.__name__.replace("cmd_", ""))
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        settings = read_config(args.config, _overrides(args))
        if args.command == "range":
            _template(args.template)
    except ConfigError as exc:
        print("configuration error:", file=sys.stderr)
        for p in exc.problems:
            print(f"  - {p}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        out = _out_dir(args)
        COMMANDS[args.command](settings, args, out)
    except ConfigError as exc:
        print("configuration error:", file=sys.stderr)
        for p in exc.problems:
            print(f"  - {p}", file=sys.stderr)
        return EXIT_CONFIG
    except (RangingError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return 0


if __name__ == "__main__":
    sys.exit(main())
