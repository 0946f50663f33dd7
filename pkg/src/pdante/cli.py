"""``pdante`` command line.

Subcommands: ``profile``, ``ensemble``, ``validity-map``, ``resonances`` and
``replay``. Angles are entered as fractions of pi (``--theta-frac 60`` is
pi/60). Frequencies are in Hz, times in the unit named by the flag.

Exit codes: 0 success, 2 usage error, 3 physical precondition violated,
4 numerical failure (for example a Bessel series that does not converge).
"""

import argparse
import os
import sys

import numpy as np

from . import aht, profiles, sequences, serialize
from .errors import ConvergenceError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_NUMERIC = 4

SEQUENCES = ("dante", "pdante-random", "pdante-cosine", "pdante-udd")
FAMILIES = ("random", "cosine-prime")
ENGINE_CHOICES = ("exact", "aht-1", "aht-2", "aht1", "aht2")

# parameter keys that name output locations; not part of the experiment
_OUTPUT_KEYS = ("out", "out_dir", "manifest", "lines_out", "func", "command")


def offset_grid(start, stop, step):
    """Inclusive grid ``start, start + step, ..., stop`` (Hz)."""
    if stop < start:
        raise ValueError(f"--to-hz {stop} is below --from-hz {start}")
    if start == stop:
        return np.array([float(start)])
    if not step > 0:
        raise ValueError(f"--step-hz must be positive, got {step}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def _ratio_grid(lo, hi, step):
    if hi < lo or not step > 0:
        raise ValueError("offset-ratio range needs max >= min and a positive step")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return np.round(lo + step * np.arange(count), 12)


def _angle(frac):
    if frac == 0:
        raise ValueError("angle fraction must be non-zero")
    return np.pi / frac


def _f_value(args):
    if args.f_prime is not None:
        return 1 / np.sqrt(sequences.prime(args.f_prime))
    return args.f


def _add_pulse_args(p):
    p.add_argument("--n", type=int, default=30, help="number of pulses")
    p.add_argument("--theta-frac", type=float, default=60.0, help="flip angle is pi/FRAC")
    p.add_argument("--tp-ns", type=float, default=720.0, help="pulse length (ns)")
    p.add_argument("--nu0-hz", type=float, default=0.0, help="target frequency (Hz)")


def _add_grid_args(p, lo=-580.0, hi=580.0, step=10.0):
    p.add_argument("--from-hz", type=float, default=lo)
    p.add_argument("--to-hz", type=float, default=hi)
    p.add_argument("--step-hz", type=float, default=step)


def _add_f_args(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--f", type=float, default=1 / np.sqrt(2), help="cosine modulation parameter")
    g.add_argument("--f-prime", type=int, default=None, help="use f = 1/sqrt(P-th prime)")


def build_parser():
    parser = argparse.ArgumentParser(prog="pdante", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="excitation profile of one sequence")
    p.add_argument("--seq", choices=SEQUENCES, required=True)
    _add_pulse_args(p)
    p.add_argument("--tau-ms", type=float, default=2.0, help="delay (dante) or base delay (cosine)")
    p.add_argument("--mean-delay-ms", type=float, default=None,
                   help="cosine: solve the base delay for this mean delay")
    p.add_argument("--delta-ratio", type=float, default=1 / np.sqrt(2), help="cosine: delta_tau / tau")
    _add_f_args(p)
    p.add_argument("--total-delay-ms", type=float, default=46.4, help="random: sum of delays")
    p.add_argument("--seed", type=int, default=0, help="random: generator seed")
    p.add_argument("--scale-ms", type=float, default=2.063, help="udd: delay scale")
    _add_grid_args(p)
    p.add_argument("--engine", choices=ENGINE_CHOICES, default="exact")
    p.add_argument("--out", default="-", help="CSV path or - for stdout")
    p.add_argument("--manifest", default=None, help="manifest path (default OUT.manifest.json)")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("ensemble", help="averaged profiles over a sequence family")
    p.add_argument("--family", choices=FAMILIES, required=True)
    _add_pulse_args(p)
    p.add_argument("--navg", type=int, default=100)
    p.add_argument("--checkpoints", default="1,25,100", help="comma-separated N_avg values")
    p.add_argument("--mean-delay-ms", type=float, default=1.6)
    p.add_argument("--delta-ratio", type=float, default=1 / np.sqrt(2), help="cosine-prime: delta_tau / tau")
    p.add_argument("--seed", type=int, default=0, help="random: seed of member 1")
    _add_grid_args(p, -1000.0, 1000.0, 2.0)
    p.add_argument("--engine", choices=ENGINE_CHOICES, default="exact")
    p.add_argument("--window-hz", type=float, default=profiles.DEFAULT_EXCLUSION,
                   help="baseline statistics use |offset| > WINDOW")
    p.add_argument("--exclude-resonances", action="store_true",
                   help="also drop neighbourhoods of member resonances from the statistics")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("validity-map", help="exact vs AHT distance over (N, w_z/w_rf)")
    p.add_argument("--total-frac", type=float, default=2.0, help="total flip is pi/FRAC")
    p.add_argument("--tau-over-tp", type=float, default=1000.0)
    p.add_argument("--n-min", type=int, default=30)
    p.add_argument("--n-max", type=int, default=300)
    p.add_argument("--n-step", type=int, default=1)
    p.add_argument("--ratio-min", type=float, default=0.0)
    p.add_argument("--ratio-max", type=float, default=2.0)
    p.add_argument("--ratio-step", type=float, default=0.01)
    p.add_argument("--order", type=int, choices=(1, 2), default=2)
    p.add_argument("--lines", default="1,2", help="resonance line indices for the sidecar")
    p.add_argument("--out", default="-")
    p.add_argument("--lines-out", default=None, help="ridge-line sidecar (default OUT.lines.csv)")
    p.add_argument("--manifest", default=None)
    p.set_defaults(func=cmd_validity_map)

    p = sub.add_parser("resonances", help="predicted resonance comb of a cosine-modulated train")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--inv-tau-hz", type=float, default=None, help="1/tau (Hz)")
    g.add_argument("--tau-ms", type=float, default=None)
    _add_f_args(p)
    p.add_argument("--delta-ratio", type=float, default=1 / np.sqrt(2))
    p.add_argument("--m-min", type=int, default=-3)
    p.add_argument("--m-max", type=int, default=3)
    p.add_argument("--n-min", type=int, default=-3)
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--max-hz", type=float, default=None, help="drop |delta_nu| above this")
    p.add_argument("--out", default="-")
    p.add_argument("--manifest", default=None)
    p.set_defaults(func=cmd_resonances)

    p = sub.add_parser("replay", help="regenerate the outputs recorded in a manifest")
    p.add_argument("manifest_path")
    p.add_argument("--out-dir", default=None, help="write outputs here (default: manifest dir)")
    p.set_defaults(func=cmd_replay)
    return parser


def _params(args):
    return {k: v for k, v in vars(args).items() if k not in _OUTPUT_KEYS}


def _emit(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        serialize.write_text(path, text)


def _write_manifest(path, m):
    if path is not None:
        serialize.write_text(path, serialize.manifest_text(m))


def _default_manifest(args):
    if args.manifest is not None:
        return args.manifest
    if args.out in (None, "-"):
        return None
    return args.out + ".manifest.json"


def make_sequence(params):
    """Build the single-sequence spec described by ``profile`` parameters."""
    n = params["n"]
    theta = _angle(params["theta_frac"])
    t_p = params["tp_ns"] * 1e-9
    nu0 = params["nu0_hz"]
    seq = params["seq"]
    if seq == "dante":
        if nu0 != 0:
            raise ValueError("dante sequences have nu0 = 0; use pdante-cosine with --delta-ratio 0")
        return sequences.dante(n, theta, t_p, params["tau_ms"] * 1e-3)
    if seq == "pdante-random":
        return sequences.pdante_random(n, theta, t_p, params["total_delay_ms"] * 1e-3, nu0, params["seed"])
    if seq == "pdante-cosine":
        f = _f_value(argparse.Namespace(**params))
        if f == 0:
            raise ValueError("modulation parameter f must be non-zero")
        ratio = params["delta_ratio"]
        if params["mean_delay_ms"] is not None:
            tau = sequences.cosine_base_delay(n, params["mean_delay_ms"] * 1e-3, ratio, f)
        else:
            tau = params["tau_ms"] * 1e-3
        return sequences.pdante_cosine(n, theta, t_p, tau, ratio * tau, f, nu0)
    return sequences.pdante_udd_like(n, theta, t_p, params["scale_ms"] * 1e-3, nu0)


def make_family(params):
    n = params["n"]
    theta = _angle(params["theta_frac"])
    t_p = params["tp_ns"] * 1e-9
    mean = params["mean_delay_ms"] * 1e-3
    if params["navg"] < 1:
        raise ValueError(f"--navg must be >= 1, got {params['navg']}")
    if params["family"] == "random":
        return sequences.random_family(n, theta, t_p, mean * (n - 1), params["navg"], params["seed"],
                                       params["nu0_hz"])
    return sequences.cosine_family(n, theta, t_p, mean, params["delta_ratio"], params["navg"],
                                   params["nu0_hz"])


def _checkpoints(text, navg):
    try:
        ks = sorted({int(x) for x in text.split(",") if x.strip()})
    except ValueError:
        raise ValueError(f"bad checkpoint list {text!r}") from None
    ks = [k for k in ks if 1 <= k <= navg]
    return ks or [navg]


def run_profile(params, specs=None):
    spec = specs[0] if specs else make_sequence(params)
    grid = offset_grid(params["from_hz"], params["to_hz"], params["step_hz"])
    prof = profiles.profile(spec, grid, params["engine"])
    return {"profile": serialize.profile_csv(prof)}, [spec]


def run_ensemble(params, specs=None):
    specs = specs or make_family(params)
    grid = offset_grid(params["from_hz"], params["to_hz"], params["step_hz"])
    members = profiles.member_profiles(specs, grid, params["engine"])
    engine = profiles.normalize_engine(params["engine"])
    window = params["window_hz"]
    mask = profiles._window_mask(grid, window)
    outputs = {}
    stats = []
    for k in _checkpoints(params["checkpoints"], len(specs)):
        avg = members[:k].mean(axis=0)
        prof = profiles.Profile(grid, avg[0], avg[1], avg[2], engine)
        outputs[f"navg_{k}"] = serialize.profile_csv(prof)
        m = mask & profiles.resonance_mask(specs[:k], grid, window) if params["exclude_resonances"] else mask
        exc, z, std = profiles._stats(avg, m)
        stats.append((k, std, exc, z))
    outputs["fluctuations"] = serialize.fluctuation_csv(stats)
    return outputs, specs


def run_validity_map(params, specs=None):
    ns = np.arange(params["n_min"], params["n_max"] + 1, params["n_step"])
    if ns.size == 0:
        raise ValueError("empty N range")
    ratios = _ratio_grid(params["ratio_min"], params["ratio_max"], params["ratio_step"])
    total = _angle(params["total_frac"])
    vmap = profiles.validity_map(total, params["tau_over_tp"], ns, ratios, params["order"])
    rows = []
    for line in sorted({int(x) for x in params["lines"].split(",") if x.strip()}):
        for r in ratios:
            pos = aht.dante_line_position(total, params["tau_over_tp"], line, r)
            lo, hi = aht.dante_ridge_lines(total, params["tau_over_tp"], line, r)
            rows.append((line, r, pos, lo, hi))
    return {"map": serialize.validity_csv(vmap),
            "lines": serialize.csv_text(serialize.LINES_HEADER, rows)}, []


def run_resonances(params, specs=None):
    if params["tau_ms"] is not None:
        tau = params["tau_ms"] * 1e-3
    else:
        inv = params["inv_tau_hz"] if params["inv_tau_hz"] is not None else 625.13
        if not inv > 0:
            raise ValueError("1/tau must be positive")
        tau = 1 / inv
    f = _f_value(argparse.Namespace(**params))
    preds = aht.pdante_resonances(tau, f, params["delta_ratio"],
                                  (params["m_min"], params["m_max"]), (params["n_min"], params["n_max"]))
    if params["max_hz"] is not None:
        preds = [p for p in preds if abs(p.delta_nu) <= params["max_hz"]]
    return {"resonances": serialize.resonance_csv(preds)}, []


RUNNERS = {
    "profile": run_profile,
    "ensemble": run_ensemble,
    "validity-map": run_validity_map,
    "resonances": run_resonances,
}


def _seeds(command, params, specs):
    if command in ("profile", "ensemble") and (params.get("seq") == "pdante-random" or params.get("family") == "random"):
        return [s.seed for s in specs]
    return []


def _single_output(args, command, primary, extra=None):
    params = _params(args)
    outputs, specs = RUNNERS[command](params)
    _emit(args.out, outputs[primary])
    names = {primary: os.path.basename(args.out) if args.out != "-" else "-"}
    if extra:
        for key, path in extra.items():
            if path is not None:
                serialize.write_text(path, outputs[key])
                names[key] = os.path.basename(path)
    m = serialize.manifest(command, params, names, _seeds(command, params, specs), specs)
    _write_manifest(_default_manifest(args), m)
    return EXIT_OK


def cmd_profile(args):
    if args.f == 0:
        raise _UsageError("--f must be non-zero")
    return _single_output(args, "profile", "profile")


def cmd_validity_map(args):
    lines_out = args.lines_out
    if lines_out is None and args.out != "-":
        lines_out = args.out + ".lines.csv"
    return _single_output(args, "validity-map", "map", {"lines": lines_out})


def cmd_resonances(args):
    if args.f == 0:
        raise _UsageError("--f must be non-zero")
    return _single_output(args, "resonances", "resonances")


def cmd_ensemble(args):
    params = _params(args)
    outputs, specs = run_ensemble(params)
    os.makedirs(args.out_dir, exist_ok=True)
    names = {}
    for key, text in outputs.items():
        name = f"ensemble_{key}.csv"
        serialize.write_text(os.path.join(args.out_dir, name), text)
        names[key] = name
    m = serialize.manifest("ensemble", params, names, _seeds("ensemble", params, specs), specs)
    _write_manifest(os.path.join(args.out_dir, "manifest.json"), m)
    return EXIT_OK


def cmd_replay(args):
    m = serialize.read_manifest(args.manifest_path)
    command = m["command"]
    if command not in RUNNERS:
        raise ValueError(f"manifest names unknown command {command!r}")
    out_dir = args.out_dir or os.path.dirname(os.path.abspath(args.manifest_path))
    os.makedirs(out_dir, exist_ok=True)
    outputs, _ = RUNNERS[command](m["parameters"], m["sequences"] or None)
    for key, name in m["outputs"].items():
        if name == "-":
            sys.stdout.write(outputs[key])
        else:
            serialize.write_text(os.path.join(out_dir, name), outputs[key])
    return EXIT_OK


class _UsageError(Exception):
    pass


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        parser.error(str(exc))
    except ConvergenceError as exc:
        print(f"pdante: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"pdante: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
