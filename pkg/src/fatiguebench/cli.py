"""Command line entry point: ``fatiguebench <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric/domain error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .damage import SNCurve, damage_series, edl, miner_damage
from .errors import DataError, DomainError
from .harness import load_config, run_compare, write_report
from .hysteresis import (accumulated_damage, calibrate_to_reference, make_paper_bank,
                         make_uniform_bank, preisach_bound)
from .markov import intensity, mc_damage, rfm_to_markov, simulate
from .rainflow import build_rfm, count_cycles, cycle_arrays, histograms
from .signal import LevelGrid, TurningPoints, discretize, extract_turning_points, load_series
from .spectral import (bandwidth_params, benasciutti_rate, estimate_psd, narrowband_rate,
                       spectral_moments)
from . import synth

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_DOMAIN = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _columns(text):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected TIME,VALUE")
    return tuple(int(p) if p.isdigit() else p for p in parts)


def _add_input(p):
    p.add_argument("input", help="CSV file with time and value columns")
    p.add_argument("--columns", type=_columns, default=(0, 1),
                   help="time,value columns by name or 0-based index (default 0,1)")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--out", required=True, help="output directory")


def _add_sn(p):
    p.add_argument("--k", type=float, default=4.0, help="S-N exponent")
    p.add_argument("--K", type=float, default=6.25e37, help="S-N constant")
    p.add_argument("--convention", choices=("amplitude", "range"), default="amplitude")


def _sn(a):
    return SNCurve(a.k, a.K, a.convention)


def _series(a):
    return load_series(a.input, a.columns, a.delimiter)


def _outdir(a):
    out = Path(a.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _dump(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def cmd_rainflow(a):
    s = _series(a)
    tp = extract_turning_points(s, a.min_range)
    cycles = count_cycles(tp)
    out = _outdir(a)
    amp, mean, w, i0, i1 = cycle_arrays(cycles)
    _write_csv(out / "cycles.csv", ["amplitude", "mean", "weight", "t_start", "t_end"],
               [[repr(float(x)) for x in r] for r in
                zip(amp, mean, w, s.t[i0], s.t[i1])])
    grid = LevelGrid.covering(tp.v, a.n_bins)
    dtp = discretize(tp, grid)
    rfm = build_rfm(count_cycles(TurningPoints(dtp.idx, dtp.values(), len(s))), grid)
    rfm.to_csv(out / "rfm.csv")
    (out / "rfm.json").write_text(rfm.to_json() + "\n", encoding="utf-8")
    (ac, ae), (mc, me) = histograms(cycles, a.n_bins)
    _dump(out / "histograms.json", {"amplitude": {"counts": ac.tolist(), "edges": ae.tolist()},
                                    "mean": {"counts": mc.tolist(), "edges": me.tolist()}})
    print(f"{len(tp)} turning points, {len(cycles)} cycles, total weight {w.sum():g}")


def cmd_damage(a):
    s = _series(a)
    sn = _sn(a)
    cycles = count_cycles(extract_turning_points(s, a.min_range))
    ds = damage_series(cycles, sn, s)
    out = _outdir(a)
    ds.to_csv(out / "damage.csv")
    D = miner_damage(cycles, sn)
    summary = {"damage": D, "duration": s.duration, "f_eq": a.f_eq,
               "edl": edl(D, s.duration, a.f_eq, sn), "sn": vars(sn)}
    _dump(out / "damage.json", summary)
    print(f"D = {D:.6g}, EDL = {summary['edl']:.6g}")


def cmd_spectral(a):
    s = _series(a)
    sn = _sn(a)
    psd = estimate_psd(s, a.segment_len, a.overlap, a.window)
    m = spectral_moments(psd)
    out = _outdir(a)
    psd.to_csv(out / "psd.csv")
    bw = bandwidth_params(m)
    d_b, fac = benasciutti_rate(m, sn, return_factor=True)
    res = {"lambda": list(m.as_tuple()), "alpha1": bw.alpha1, "alpha2": bw.alpha2,
           "narrowband_rate": narrowband_rate(m, sn), "benasciutti_rate": d_b,
           "benasciutti_factor": fac, "duration": s.duration, "estimator": psd.meta,
           "sn": vars(sn)}
    _dump(out / "spectral.json", res)
    print(f"d_nb = {res['narrowband_rate']:.6g} 1/s, E[d] = {d_b:.6g} 1/s")


def cmd_markov(a):
    s = _series(a)
    sn = _sn(a)
    tp = extract_turning_points(s, a.min_range)
    grid = LevelGrid.covering(tp.v, a.n_bins)
    dtp = discretize(tp, grid)
    rfm = build_rfm(count_cycles(TurningPoints(dtp.idx, dtp.values(), len(s))), grid)
    model = rfm_to_markov(rfm)
    out = _outdir(a)
    (out / "model.json").write_text(model.to_json() + "\n", encoding="utf-8")
    rate = (len(tp) - 1) / s.duration
    Q = intensity(model, rate)
    np.savetxt(out / "intensity.csv", Q.Q, delimiter=",", fmt="%.17g")
    seeds = [a.seed + i for i in range(a.ensemble)]
    finals = []
    rows = []
    for seed in seeds:
        ds = mc_damage(simulate(model, len(tp), seed), model, sn, duration=s.duration)
        finals.append(ds.final)
        rows.extend([seed, repr(float(t)), repr(float(x))] for t, x in zip(ds.t, ds.accumulated))
    _write_csv(out / "mc_damage.csv", ["seed", "t", "accumulated"], rows)
    _dump(out / "markov.json", {"seeds": seeds, "finals": finals, "rate": rate,
                                "n_steps": len(tp), "sn": vars(sn)})
    print(f"mean final damage {np.mean(finals):.6g} over {len(seeds)} seed(s)")


def cmd_hysteresis(a):
    s = _series(a)
    sn = _sn(a)
    M = preisach_bound(s, absolute=not a.literal_bound)
    bank = make_paper_bank(M) if a.mode == "paper3relay" else make_uniform_bank(a.n_levels, M, sn)
    ds = accumulated_damage(bank, s)
    res = {"mode": a.mode, "M": M, "damage": ds.final}
    if a.reference is not None:
        c = calibrate_to_reference(ds, a.reference)
        ds = ds.scaled(c)
        res["scale"] = c
    out = _outdir(a)
    ds.to_csv(out / "damage.csv")
    (out / "bank.json").write_text(bank.snapshot() + "\n", encoding="utf-8")
    _dump(out / "hysteresis.json", res)
    print(f"Var(H(s)) = {res['damage']:.6g}")


def cmd_compare(a):
    overrides = {}
    if a.seed is not None:
        overrides["markov.seed"] = a.seed
    if a.ensemble is not None:
        overrides["markov.ensemble"] = a.ensemble
    cfg = load_config(a.config, overrides)
    out = a.out or cfg.output_dir
    report = run_compare(cfg)
    write_report(report, out)
    print(f"wrote {Path(out) / 'report.json'} and {Path(out) / 'curves.csv'}")


def cmd_synth(a):
    if a.kind == "sine":
        s = synth.sine(a.amp, a.freq, a.fs, a.dur)
    elif a.kind == "noise":
        s = synth.bandpassed_noise(a.freq, a.rel_bw, a.fs, a.dur, a.seed, a.amp)
    else:
        s = synth.white_noise(a.amp, a.fs, a.dur, a.seed)
    rows = ([repr(float(t)), repr(float(v))] for t, v in zip(s.t, s.v))
    if a.out in (None, "-"):
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["t", "v"])
        w.writerows(rows)
    else:
        Path(a.out).parent.mkdir(parents=True, exist_ok=True)
        _write_csv(a.out, ["t", "v"], rows)


def build_parser():
    p = _Parser(prog="fatiguebench", description="Fatigue damage estimators")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("rainflow", help="rainflow cycles, matrix and histograms")
    _add_input(r)
    r.add_argument("--n-bins", type=int, default=10)
    r.add_argument("--min-range", type=float, default=0.0)
    r.set_defaults(func=cmd_rainflow)

    d = sub.add_parser("damage", help="Miner damage series and EDL")
    _add_input(d)
    _add_sn(d)
    d.add_argument("--min-range", type=float, default=0.0)
    d.add_argument("--f-eq", type=float, default=1.0, help="EDL reference frequency [Hz]")
    d.set_defaults(func=cmd_damage)

    s = sub.add_parser("spectral", help="PSD, moments, narrow-band and Benasciutti rates")
    _add_input(s)
    _add_sn(s)
    s.add_argument("--segment-len", type=int, default=None)
    s.add_argument("--overlap", type=float, default=0.5)
    s.add_argument("--window", default="hann")
    s.set_defaults(func=cmd_spectral)

    m = sub.add_parser("markov", help="RFM to Markov model and Monte-Carlo damage")
    _add_input(m)
    _add_sn(m)
    m.add_argument("--n-bins", type=int, default=10)
    m.add_argument("--min-range", type=float, default=0.0)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--ensemble", type=int, default=1)
    m.set_defaults(func=cmd_markov)

    h = sub.add_parser("hysteresis", help="Preisach relay-bank damage")
    _add_input(h)
    _add_sn(h)
    h.add_argument("--mode", choices=("paper3relay", "uniform"), default="paper3relay")
    h.add_argument("--n-levels", type=int, default=32)
    h.add_argument("--reference", type=float, default=None,
                   help="scale weights so the final damage equals this value")
    h.add_argument("--literal-bound", action="store_true",
                   help="use max(min s, max s) instead of the absolute bound")
    h.set_defaults(func=cmd_hysteresis)

    c = sub.add_parser("compare", help="run every method from a config file")
    c.add_argument("--config", required=True)
    c.add_argument("--out", default=None)
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--ensemble", type=int, default=None)
    c.set_defaults(func=cmd_compare)

    y = sub.add_parser("synth", help="generate reference signals")
    y.add_argument("kind", choices=("sine", "noise", "white"))
    y.add_argument("--amp", type=float, default=1.0, help="amplitude (sine) or std (noise)")
    y.add_argument("--freq", type=float, default=1.0, help="frequency or band center [Hz]")
    y.add_argument("--rel-bw", type=float, default=0.05, help="relative bandwidth (noise)")
    y.add_argument("--fs", type=float, default=100.0)
    y.add_argument("--dur", type=float, default=100.0)
    y.add_argument("--seed", type=int, default=0)
    y.add_argument("--out", default=None, help="CSV path (stdout when omitted)")
    y.set_defaults(func=cmd_synth)
    return p


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return EXIT_OK if not e.code else EXIT_USAGE
    try:
        args.func(args)
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except (DataError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
