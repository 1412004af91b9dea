"""Command-line entry point: ``onsim <command> [options]``.

Commands reproduce the homodyne distributions and gate-fidelity curves, run
the 03-state preparation and single circuit shots, and report the Wigner,
quartic and product-expansion checks.  CSV output carries '#' metadata
lines; JSON output is a flat object.  Exit codes: 0 ok, 2 usage error,
3 numerical-guard failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from . import circuit, fock, metrics, prep, states
from .grid import Grid, NumericalGuardError

EXIT_USAGE = 2
EXIT_GUARD = 3

INPUT_GRAMMAR = (
    "KIND:VALUE or KIND:START..STOP[:STEP], KIND one of "
    "fock (photon number), coherent (x displacement), "
    "squeezed (dB, momentum squeezed), xsqueezed (dB, x squeezed), vacuum"
)
DEFAULT_STEPS = {"fock": 1.0, "coherent": 0.5, "squeezed": 0.5, "xsqueezed": 0.5}
REFERENCE_INPUTS = ("fock:0..5", "squeezed:0..9.5", "coherent:-1..1.5")


class UsageError(Exception):
    pass


# -- parsing -------------------------------------------------------------------

def parse_input_spec(text: str):
    """``"coherent:-1..1.5"`` -> ``("coherent", [-1.0, -0.5, ..., 1.5])``."""
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind == "vacuum" and not rest:
        return "fock", [0.0]
    if kind not in DEFAULT_STEPS or not rest:
        raise UsageError(f"cannot parse input {text!r}; expected {INPUT_GRAMMAR}")
    try:
        if ".." in rest:
            start_s, _, tail = rest.partition("..")
            stop_s, _, step_s = tail.partition(":")
            start, stop = float(start_s), float(stop_s)
            step = float(step_s) if step_s else DEFAULT_STEPS[kind]
            if step <= 0 or stop < start:
                raise ValueError
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = [round(start + i * step, 12) for i in range(count)]
        else:
            values = [float(rest)]
    except ValueError:
        raise UsageError(f"cannot parse input {text!r}; expected {INPUT_GRAMMAR}") from None
    if kind == "fock" and any(v != int(v) or v < 0 for v in values):
        raise UsageError("Fock inputs need non-negative integers")
    return kind, values


def parse_values(text: str) -> list[float]:
    try:
        if ".." in text:
            start_s, _, tail = text.partition("..")
            stop_s, _, step_s = tail.partition(":")
            start, stop, step = float(start_s), float(stop_s), float(step_s or 1)
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 12) for i in range(count)]
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse values {text!r}; use START..STOP:STEP or a,b,c") from None


def make_state(kind: str, value: float, grid: Grid) -> states.PositionWaveFunction:
    if kind == "fock":
        return states.fock_wavefunction(int(value), grid)
    if kind == "coherent":
        return states.coherent_x_wavefunction(value, grid)
    if kind == "squeezed":
        return states.squeezed_vacuum_wavefunction(value, grid, quadrature="p")
    if kind == "xsqueezed":
        return states.squeezed_vacuum_wavefunction(value, grid, quadrature="x")
    raise UsageError(f"unknown input kind {kind!r}")


def resolve_grid(args, wide: bool = False) -> Grid:
    """Grid from --xmax/--npoints; wide-state defaults keep the default spacing."""
    if args.xmax is None and args.npoints is None:
        return metrics.WIDE_GRID if wide else Grid.default()
    xmax = args.xmax if args.xmax is not None else (24.0 if wide else 12.0)
    npoints = args.npoints if args.npoints is not None else (8191 if wide else 4096)
    return Grid.symmetric(xmax, npoints)


# -- output ---------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj) + 0.0  # no negative zeros in output
        return float(f"{f:.12g}") if math.isfinite(f) else None
    return obj


def metadata_lines(command: str, args, grid: Grid | None, extra: dict | None = None) -> list[str]:
    lines = [f"# onsim {__version__} command={command}"]
    parts = []
    if grid is not None:
        parts += [f"x_min={_fmt(grid.x_min)}", f"x_max={_fmt(grid.x_max)}", f"n_points={grid.n_points}"]
    parts += [f"cutoff={args.cutoff}", f"seed={args.seed}"]
    lines.append("# " + " ".join(parts))
    for k, v in (extra or {}).items():
        lines.append(f"# {k}={_fmt(v)}")
    return lines


def render_csv(meta: list[str], header: list[str], rows) -> str:
    out = list(meta)
    out.append(",".join(header))
    for row in rows:
        out.append(",".join(_fmt(v) for v in row))
    return "\n".join(out) + "\n"


def render_json(obj: dict) -> str:
    return json.dumps(_clean(obj), indent=2) + "\n"


def emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")


def emit_summary(summary: dict, csv_path: Path | None) -> None:
    text = render_json(summary)
    if csv_path is None:
        sys.stderr.write(text)
    else:
        csv_path.with_suffix(".json").write_text(text, encoding="utf-8")


def _out_dir(args) -> Path | None:
    return Path(args.out) if args.out else None


def _monotone(values):
    d = np.diff(np.asarray(values, dtype=float))
    return bool(np.all(d > 0)), bool(np.all(d < 0))


# -- commands -------------------------------------------------------------------

def cmd_homodyne_dist(args) -> int:
    specs = args.input or []
    if args.defaults or not specs:
        specs = list(REFERENCE_INPUTS)
    out_dir = _out_dir(args)
    combined = []
    for text in specs:
        kind, values = parse_input_spec(text)
        grid = resolve_grid(args, wide=(kind == "squeezed"))
        resource = circuit.resource_03(args.gamma, grid)
        for v in sorted(values):
            psi = make_state(kind, v, grid)
            dens = circuit.homodyne_density(psi, resource)
            label = f"{kind}:{_fmt(v)}"
            rows = list(zip(dens.grid.points, dens.values))
            if out_dir is not None:
                meta = metadata_lines("homodyne-dist", args, grid,
                                      {"input": label, "gamma": args.gamma, "variance": dens.variance()})
                emit(render_csv(meta, ["q", "p_q"], rows), out_dir / f"homodyne_{kind}_{_fmt(v)}.csv")
            else:
                combined.extend((label, q, p) for q, p in rows)
    if out_dir is None:
        meta = metadata_lines("homodyne-dist", args, None, {"gamma": args.gamma})
        emit(render_csv(meta, ["input", "q", "p_q"], combined), None)
    return 0


def cmd_fidelity(args) -> int:
    kinds = args.sweep or []
    if args.defaults or not kinds:
        kinds = list(metrics.SWEEP_KINDS)
    out_dir = _out_dir(args)
    for kind in kinds:
        values = parse_values(args.values) if args.values else None
        grid = resolve_grid(args, wide=(kind == "squeezing"))
        rows = metrics.fidelity_sweeps(kind, values, gamma=args.gamma, x0=args.x0, grid=grid)
        fids = [f for _, f in rows]
        inc, dec = _monotone(fids)
        param = {"gamma": "gamma", "squeezing": "db", "fock": "n"}[kind]
        summary = {
            "sweep": kind,
            "rows": len(rows),
            "gamma": None if kind == "gamma" else args.gamma,
            "x0": args.x0 if kind == "gamma" else None,
            "min": min(fids),
            "max": max(fids),
            "strictly_increasing": inc,
            "strictly_decreasing": dec,
        }
        meta = metadata_lines("fidelity", args, grid, {"sweep": kind})
        path = out_dir / f"fidelity_{kind}.csv" if out_dir is not None else None
        emit(render_csv(meta, [param, "fidelity"], rows), path)
        emit_summary(summary, path)
    return 0


def _prep_state(a0, y, cutoff):
    params = prep.solve_prep_params(a0, y)
    state, prob = prep.prepare_on3_circuit(params, cutoff)
    ideal = prep.prepare_on3_ideal(params, cutoff)
    return params, state, prob, ideal


def cmd_prep03(args) -> int:
    cutoff = args.cutoff
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", fock.CutoffWarning)
        params, state, prob, ideal = _prep_state(args.a0, args.y, cutoff)
        fid = fock.fidelity(state, ideal)
        chain, _ = prep.prepare_on3_circuit(params, cutoff, path="chain")
        _, state2, _, ideal2 = _prep_state(args.a0, args.y, 2 * cutoff)
        fid2 = fock.fidelity(state2, ideal2)
    # the |0> coefficient is made real positive for reporting
    phase = state[0] / abs(state[0]) if abs(state[0]) > 0 else 1.0
    shown = state / phase
    result = {
        "a0": args.a0,
        "y": params.y,
        "r": params.r,
        "c": params.c,
        "c_rescaled": params.c_rescaled,
        "cutoff": cutoff,
        "success_probability": prob,
        "fidelity_to_ideal": fid,
        "chain_path_fidelity": fock.fidelity(state, chain),
        "cutoff_convergence_delta": abs(fid2 - fid),
        "amp_1": abs(state[1]),
        "amp_2": abs(state[2]),
        "ratio_3_over_0_im": (shown[3] / shown[0]).imag,
        "tail_mass": fock.tail_mass(fock.tmss(params.r, cutoff, guard=math.inf)),
        "coefficients_re": shown.real,
        "coefficients_im": shown.imag,
        "warnings": sorted({str(w.message) for w in caught}),
    }
    emit(render_json(result), Path(args.out) if args.out else None)
    return 0


def cmd_circuit(args) -> int:
    kind, values = parse_input_spec(args.input)
    if len(values) != 1:
        raise UsageError("circuit takes a single input state")
    grid = resolve_grid(args, wide=(kind == "squeezed"))
    psi = make_state(kind, values[0], grid)
    rng = np.random.default_rng(args.seed)
    u = float(rng.random())
    if args.mode == "deterministic":
        outcome = circuit.run_deterministic(psi, args.a0, u)
        target = circuit.ideal_output(psi, outcome.q, args.a0)
    else:
        spec = circuit.PostSelectSpec(args.q0, args.eps)
        outcome = circuit.run_postselected(psi, args.a0, spec, u, conditional=args.conditional)
        target = circuit.ideal_output(psi, 0.0, args.a0)
    out = outcome.output
    result = {
        "mode": args.mode,
        "input": f"{kind}:{_fmt(values[0])}",
        "a0": args.a0,
        "seed": args.seed,
        "u": u,
        "q": outcome.q,
        "accepted": outcome.accepted,
        "acceptance_mass": outcome.acceptance_mass,
        "raw_norm2": outcome.raw_norm2,
        "mean_x": states.expectation(out, "x"),
        "mean_x2": states.expectation(out, "x2"),
        "mean_p": states.expectation(out, "p"),
        "fidelity_to_target": metrics.state_fidelity(out, target),
    }
    if args.mode == "postselected":
        result.update(q0=args.q0, eps=args.eps, conditional=args.conditional)
    emit(render_json(result), Path(args.out) if args.out else None)
    return 0


def parabola_constancy(gamma: float, n_x: int = 9, consts=(-2.0, 0.0, 1.5)) -> bool:
    """W is constant along 3 gamma x^2 - p = C for several C."""
    xs = np.linspace(-2.0, 2.0, n_x)
    for c in consts:
        ws = [states.wigner_cubic(gamma, [x], [3 * gamma * x * x - c])[0, 0] for x in xs]
        if np.ptp(ws) > 1e-12:
            return False
    return True


def cmd_wigner(args) -> int:
    if args.gamma == 0:
        raise UsageError("the cubic-state Wigner function needs gamma != 0")
    xs = np.linspace(args.xrange[0], args.xrange[1], args.n)
    ps = np.linspace(args.prange[0], args.prange[1], args.n)
    w = states.wigner_cubic(args.gamma, xs, ps)
    flag = parabola_constancy(args.gamma)
    rows = [(x, p, w[i, j]) for i, x in enumerate(xs) for j, p in enumerate(ps)]
    meta = metadata_lines("wigner", args, None, {"gamma": args.gamma, "parabola_contours_constant": flag})
    path = Path(args.out) if args.out else None
    emit(render_csv(meta, ["x", "p", "W"], rows), path)
    emit_summary({"gamma": args.gamma, "points": len(rows), "parabola_contours_constant": flag,
                  "min": float(w.min()), "max": float(w.max())}, path)
    return 0


def quartic_report(psi, a0: float, q: float) -> dict:
    raw, expo = circuit.quartic_effective(psi, q, a0)
    aligned = expo.amplitudes * np.exp(0.75j * a0)
    rel = math.sqrt(raw.with_amplitudes(raw.amplitudes - aligned).norm2() / raw.norm2())
    spec = states.ONSpec.from_strength(4, a0)
    via = circuit.effective_operator(psi, states.on_wavefunction(spec, psi.grid), q)
    scale = spec.c * math.pi ** -0.25
    path_err = math.sqrt(via.with_amplitudes(via.amplitudes / scale - raw.amplitudes).norm2() / raw.norm2())
    return {"relative_difference": rel, "bound": 10 * a0 * a0, "within_bound": rel <= 10 * a0 * a0,
            "resource_path_error": path_err}


def cmd_quartic(args) -> int:
    kind, values = parse_input_spec(args.input)
    grid = resolve_grid(args, wide=(kind == "squeezed"))
    psi = make_state(kind, values[0], grid)
    result = {"a0": args.a0, "q": args.q, "input": args.input, **quartic_report(psi, args.a0, args.q)}
    emit(render_json(result), Path(args.out) if args.out else None)
    return 0


def accuracy_report(psi, gamma: float, n_steps: int) -> dict:
    x = psi.x
    h = x ** 3
    prod2 = circuit.product_step(psi, gamma, 2).amplitudes
    taylor2 = (1 + 1j * gamma * h - 0.5 * gamma ** 2 * h * h) * psi.amplitudes
    delta = np.abs(prod2 - taylor2)
    expected = 0.25 * gamma ** 2 * x ** 6 * np.abs(psi.amplitudes)
    exact = states.apply_phase_gate(psi, states.GateSpec(3, gamma))
    product = circuit.product_step(psi, gamma, n_steps)
    return {
        "delta2_max": float(delta.max()),
        "delta2_expected_max": float(expected.max()),
        "delta2_residual": float(np.max(np.abs(delta - expected))),
        "product_fidelity": metrics.state_fidelity(product, exact),
    }


def cmd_accuracy(args) -> int:
    kind, values = parse_input_spec(args.input)
    grid = resolve_grid(args, wide=(kind == "squeezed"))
    psi = make_state(kind, values[0], grid)
    result = {"gamma": args.gamma, "n_steps": args.n_steps, "input": args.input,
              **accuracy_report(psi, args.gamma, args.n_steps)}
    emit(render_json(result), Path(args.out) if args.out else None)
    return 0


def run_defaults(args) -> int:
    root = Path(args.out or "onsim-out")
    args.out = str(root / "homodyne")
    args.input, args.gamma, args.x0 = None, 0.1, 0.0
    cmd_homodyne_dist(args)
    args.out = str(root / "fidelity")
    args.sweep, args.values = None, None
    return cmd_fidelity(args)


# -- parser ---------------------------------------------------------------------

def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--xmax", type=float, default=d(None), help="grid half-width (default 12; 24 for squeezed inputs)")
    parser.add_argument("--npoints", type=int, default=d(None), help="grid points (default 4096; 8191 for squeezed inputs)")
    parser.add_argument("--cutoff", type=int, default=d(40), help="Fock cutoff per mode (default 40)")
    parser.add_argument("--seed", type=int, default=d(0), help="RNG seed for homodyne draws (default 0)")
    parser.add_argument("--out", default=d(None), help="output file (directory for homodyne-dist/fidelity)")
    parser.add_argument("--defaults", action="store_true", default=d(False),
                        help="run the reference homodyne and fidelity sweeps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="onsim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"onsim {__version__}")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command")

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        _global_options(p, suppress=True)
        p.set_defaults(func=func)
        return p

    p = add("homodyne-dist", cmd_homodyne_dist, "homodyne outcome densities p(q)")
    p.add_argument("--input", action="append", help=INPUT_GRAMMAR)
    p.add_argument("--gamma", type=float, default=0.1)

    p = add("fidelity", cmd_fidelity, "average gate-fidelity sweeps")
    p.add_argument("--sweep", action="append", choices=metrics.SWEEP_KINDS)
    p.add_argument("--values", help="sweep values as START..STOP:STEP or a,b,c")
    p.add_argument("--gamma", type=float, default=0.1, help="gate strength for squeezing/fock sweeps")
    p.add_argument("--x0", type=float, default=0.0, help="coherent displacement for the gamma sweep")

    p = add("prep03", cmd_prep03, "simulate the 03 resource preparation")
    p.add_argument("--a0", type=float, default=0.1)
    p.add_argument("--y", type=float, default=0.5, help="tanh r of the two-mode squeezer")

    p = add("circuit", cmd_circuit, "one seeded run of the gate circuit")
    p.add_argument("--mode", choices=("deterministic", "postselected"), default="deterministic")
    p.add_argument("--input", default="vacuum", help=INPUT_GRAMMAR)
    p.add_argument("--a0", type=float, default=0.1)
    p.add_argument("--q0", type=float, default=0.0)
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--conditional", action="store_true", help="draw q conditioned on acceptance")

    p = add("wigner", cmd_wigner, "Wigner function of the cubic phase state")
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--xrange", type=float, nargs=2, default=(-4.0, 4.0))
    p.add_argument("--prange", type=float, nargs=2, default=(-4.0, 4.0))
    p.add_argument("--n", type=int, default=81)

    p = add("quartic", cmd_quartic, "first-order quartic filter vs its exponentiated form")
    p.add_argument("--a0", type=float, default=0.01)
    p.add_argument("--q", type=float, default=0.0)
    p.add_argument("--input", default="vacuum")

    p = add("accuracy", cmd_accuracy, "product expansion vs second-order Taylor expansion")
    p.add_argument("--gamma", type=float, default=0.05)
    p.add_argument("--n-steps", type=int, default=64)
    p.add_argument("--input", default="vacuum")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for key, default in (("xmax", None), ("npoints", None), ("cutoff", 40), ("seed", 0),
                         ("out", None), ("defaults", False)):
        if not hasattr(args, key):
            setattr(args, key, default)
    try:
        if args.command is None:
            if args.defaults:
                return run_defaults(args)
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"onsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalGuardError as exc:
        print(f"onsim: numerical guard: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
