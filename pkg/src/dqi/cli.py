"""Command-line entry point.

    dqi resources --instance g.txt --format edgelist [--transpile]
    dqi simulate  --instance inst.json --shots 10000 --seed 7 --out run/
    dqi compare-decoders --instance inst.json
    dqi sweep --m-min 5 --m-max 15 --m-step 5 --out sweep/

Exit codes: 0 success, 2 input error, 3 simulation infeasible, 4 zero
postselection mass.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .builder import LookupCapError, PipelineConfig, build_pipeline, dqi_layout
from .builder import DEFAULT_LOOKUP_CAP, build_gje_decoder, build_lookup_decoder
from .circuit import Circuit, ResourceReport, Stage, count_gates, predict_resources
from .instances import (
    InstanceFormatError,
    MaxCutGraph,
    XorsatInstance,
    cycle_maxcut,
    expected_satisfied_fraction,
    maxcut_to_xorsat,
    objective_values,
)
from .simulator import DENSE_MAX_QUBITS, AUTO_DENSE_MAX_QUBITS, PostselectionError, marginal, postselect, run, sample
from .transpile import TRANSPILE_BASIS, transpile

log = logging.getLogger("dqi")

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_ZERO_POSTSELECTION = 0, 2, 3, 4
SPARSE_BUDGET_QUBITS = 34
STAGE_ORDER = [s.value for s in Stage]


def transpile_circuit(c: Circuit) -> Circuit:
    """The --transpile pipeline: basis gates only, MCX expanded, inverse pairs cancelled."""
    return transpile(c, TRANSPILE_BASIS, expand_mcx=True, optimize=True)


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# -- input ----------------------------------------------------------------------

def load_instance(path: str, fmt: str | None = None) -> tuple[XorsatInstance, str]:
    """Read an instance file; returns the instance and the raw text."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror or exc}", EXIT_INPUT) from None
    if fmt is None:
        fmt = "xorsat-json" if path.endswith(".json") else "edgelist"
    try:
        if fmt == "xorsat-json":
            inst = XorsatInstance.from_json(text)
        else:
            inst = maxcut_to_xorsat(MaxCutGraph.from_edgelist(text))
    except (InstanceFormatError, ValueError) as exc:
        raise CliError(f"{path}: {exc}", EXIT_INPUT) from None
    return inst, text


def _check_ell(inst: XorsatInstance, ell: int) -> None:
    if not 0 <= ell <= inst.m:
        raise CliError(f"--ell must lie in 0..{inst.m}, got {ell}", EXIT_INPUT)


# -- resources --------------------------------------------------------------------

def _stage_circuit(inst: XorsatInstance, ell: int, stage: str, cap: int) -> Circuit:
    if stage == Stage.GJE.value:
        return build_gje_decoder(inst.B)
    if stage == Stage.LOOKUP.value:
        return build_lookup_decoder(inst.B, ell, cap)
    return build_pipeline(PipelineConfig(inst, ell, "gje")).stages[stage]


def _measure(c: Circuit, stage: str, transpile: bool) -> ResourceReport:
    return count_gates(transpile_circuit(c) if transpile else c, stage)


def resource_rows(inst: XorsatInstance, ell: int, transpile: bool = False, cap: int = DEFAULT_LOOKUP_CAP) -> list[dict]:
    """Measured and closed-form resources for all seven stages."""
    pipeline = build_pipeline(PipelineConfig(inst, ell, "gje"))
    rows = []
    for stage in STAGE_ORDER:
        row: dict = {"stage": stage, "title": Stage(stage).title}
        try:
            if stage == Stage.LOOKUP.value:
                c = build_lookup_decoder(inst.B, ell, cap)
            else:
                c = pipeline.stages[stage]
            row["measured"] = _measure(c, stage, transpile).to_dict()
        except LookupCapError as exc:
            row["measured"] = None
            row["note"] = str(exc)
        row["predicted"] = predict_resources(stage, inst.m, inst.n, ell).to_dict() if ell >= 1 else None
        rows.append(row)
    return rows


def _total(d: dict | None) -> int | None:
    return None if d is None else sum(d["counts"].values())


def render_rows(rows: list[dict]) -> str:
    header = ["stage", "gates", "depth", "qubits", "table_gates", "table_depth", "table_qubits"]
    body = []
    for r in rows:
        meas, pred = r["measured"], r["predicted"]
        bound = pred is not None and any(v for k, v in pred["bound_flags"].items() if k != "depth")
        dbound = pred is not None and pred["bound_flags"].get("depth", False)
        body.append([
            r["title"],
            "-" if meas is None else str(_total(meas)),
            "-" if meas is None else str(meas["depth"]),
            "-" if meas is None else str(meas["qubits"]),
            "-" if pred is None else ("<=" if bound else "") + str(_total(pred)),
            "-" if pred is None else ("<=" if dbound else "") + str(pred["depth"]),
            "-" if pred is None else str(pred["qubits"]),
        ])
    widths = [max(len(x) for x in col) for col in zip(header, *body)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in body]
    return "\n".join(line.rstrip() for line in lines) + "\n"


# -- simulation ---------------------------------------------------------------------

def _resolve_engine(engine: str, qubits: int) -> str:
    if engine == "auto":
        engine = "dense" if qubits <= AUTO_DENSE_MAX_QUBITS else "sparse"
    limit = DENSE_MAX_QUBITS if engine == "dense" else SPARSE_BUDGET_QUBITS
    if qubits > limit:
        raise CliError(f"{qubits} qubits exceeds the {engine} engine budget of {limit}", EXIT_INFEASIBLE)
    return engine


@dataclass
class Distribution:
    probs: np.ndarray
    postselection_probability: float
    engine: str
    peak_support: int
    state: object = field(repr=False, default=None)


def simulate_distribution(
    cfg: PipelineConfig, engine: str = "auto", transpile: bool = False, postselect_mode: str = "strict"
) -> Distribution:
    """Distribution over x read from the syndrome register after the full circuit."""
    qubits = cfg.m + cfg.n
    engine = _resolve_engine(engine, qubits)
    try:
        circuit = build_pipeline(cfg).full
    except LookupCapError as exc:
        raise CliError(str(exc), EXIT_INFEASIBLE) from None
    if transpile:
        circuit = transpile_circuit(circuit)
    stats: dict = {}
    state = run(circuit, engine=engine, stats=stats)
    err, syn = dqi_layout(cfg.m, cfg.n)
    zero = "0" * cfg.m
    if postselect_mode == "strict":
        try:
            state, prob = postselect(state, err, zero)
        except PostselectionError as exc:
            raise CliError(f"postselection failed: {exc}", EXIT_ZERO_POSTSELECTION) from None
    else:
        prob = float(marginal(state, err)[0])
    return Distribution(marginal(state, syn), prob, engine, stats["peak_support"], state)


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


@dataclass
class RunReport:
    config: dict
    instance: dict
    stages: dict
    postselection_probability: float
    satisfied_fraction: float
    predicted_fraction: float | None
    artifacts: list[str]
    wall_time_s: float
    seed: int
    engine: str
    peak_support: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


def distribution_csv(n: int, f: np.ndarray, probs: np.ndarray, freqs: np.ndarray) -> str:
    lines = ["bitstring,objective,exact_probability,sampled_frequency"]
    for x in range(2**n):
        lines.append(f"{x:0{n}b},{int(f[x])},{float(probs[x])!r},{float(freqs[x])!r}")
    return "\n".join(lines) + "\n"


def distribution_json(n: int, f: np.ndarray, probs: np.ndarray, freqs: np.ndarray) -> str:
    rows = [
        {"bitstring": f"{x:0{n}b}", "objective": int(f[x]),
         "exact_probability": float(probs[x]), "sampled_frequency": float(freqs[x])}
        for x in range(2**n)
    ]
    return json.dumps(rows, indent=1) + "\n"


# -- commands -----------------------------------------------------------------------

def cmd_resources(args) -> int:
    inst, _ = load_instance(args.instance, args.format)
    _check_ell(inst, args.ell)
    rows = resource_rows(inst, args.ell, args.transpile, args.lookup_cap)
    text = render_rows(rows)
    doc = {"m": inst.m, "n": inst.n, "ell": args.ell, "transpiled": bool(args.transpile), "stages": rows}
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        if args.emit in ("json", "both"):
            _write_atomic(out / "resources.json", json.dumps(doc, indent=2, sort_keys=True) + "\n")
        if args.emit in ("csv", "both"):
            _write_atomic(out / "resources.txt", text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    t0 = time.perf_counter()
    inst, raw = load_instance(args.instance, args.format)
    _check_ell(inst, args.ell)
    if args.shots < 1:
        raise CliError("--shots must be positive", EXIT_INPUT)
    cfg = PipelineConfig(inst, args.ell, args.decoder, args.lookup_cap)
    if inst.n > 24:
        raise CliError("objective table limited to n <= 24 variables", EXIT_INFEASIBLE)
    dist = simulate_distribution(cfg, args.engine, args.transpile, args.postselect)
    _, syn = dqi_layout(inst.m, inst.n)
    probs = dist.probs / dist.probs.sum()
    record = sample(dist.state, args.shots, args.seed, reg=syn)
    freqs = np.zeros(2**inst.n)
    for bits, count in record.outcomes.items():
        freqs[int(bits, 2)] = count / args.shots
    f = objective_values(inst)
    satisfied = float(probs @ ((f + inst.m) / 2)) / inst.m
    predicted = expected_satisfied_fraction(inst.m, args.ell) if args.ell >= 1 else None

    out = Path(args.out)
    artifacts = []
    if args.emit in ("csv", "both"):
        _write_atomic(out / "distribution.csv", distribution_csv(inst.n, f, probs, freqs))
        artifacts.append(str(out / "distribution.csv"))
    if args.emit in ("json", "both"):
        _write_atomic(out / "distribution.json", distribution_json(inst.n, f, probs, freqs))
        artifacts.append(str(out / "distribution.json"))
    pipeline = build_pipeline(cfg)
    stages = {name: _measure(c, name, args.transpile).to_dict() for name, c in pipeline.stages.items()}
    report = RunReport(
        config={
            "command": "simulate", "instance_path": args.instance, "format": args.format,
            "instance_sha256": hashlib.sha256(raw.encode()).hexdigest(), "ell": args.ell,
            "decoder": args.decoder, "shots": args.shots, "seed": args.seed, "engine": args.engine,
            "postselect": args.postselect, "transpile": bool(args.transpile), "lookup_cap": args.lookup_cap,
            "weights": [float(x) for x in cfg.resolved_weights()],
        },
        instance=inst.to_dict(),
        stages=stages,
        postselection_probability=dist.postselection_probability,
        satisfied_fraction=satisfied,
        predicted_fraction=predicted,
        artifacts=artifacts,
        wall_time_s=time.perf_counter() - t0,
        seed=args.seed,
        engine=dist.engine,
        peak_support=dist.peak_support,
    )
    _write_atomic(out / "report.json", report.to_json())
    pred = "n/a" if predicted is None else f"{predicted:.4f}"
    print(
        f"postselection probability {dist.postselection_probability:.6f}; "
        f"<s>/m = {satisfied:.4f} (asymptotic prediction {pred}); wrote {out / 'report.json'}"
    )
    return EXIT_OK


def compare_decoders(inst: XorsatInstance, ell: int, engine: str = "auto", transpile: bool = False,
                     cap: int = DEFAULT_LOOKUP_CAP) -> dict:
    """Resources of both decoders plus the distance between their output distributions.

    ``transpile`` applies to the gate counts only.  Distributions come from
    the logical circuits, which the transpiled ones equal up to global phase;
    simulating an expanded lookup table borrows superposed qubits as dirty
    ancillas and is orders of magnitude slower.
    """
    reports, dists = {}, {}
    for name in ("gje", "lookup"):
        cfg = PipelineConfig(inst, ell, name, cap)
        try:
            c = _stage_circuit(inst, ell, name, cap)
        except LookupCapError as exc:
            raise CliError(str(exc), EXIT_INFEASIBLE) from None
        reports[name] = _measure(c, name, transpile).to_dict()
        d = simulate_distribution(cfg, engine, False, "strict")
        dists[name] = (d.probs / d.probs.sum(), d.postselection_probability)
    g_total, l_total = _total(reports["gje"]), _total(reports["lookup"])
    return {
        "m": inst.m, "n": inst.n, "ell": ell, "transpiled": bool(transpile),
        "distributions_from": "logical circuits",
        "decoders": reports,
        "postselection_probability": {k: v[1] for k, v in dists.items()},
        "total_variation": total_variation(dists["gje"][0], dists["lookup"][0]),
        "gate_ratio_lookup_over_gje": (l_total / g_total) if g_total else None,
    }


def cmd_compare(args) -> int:
    inst, _ = load_instance(args.instance, args.format)
    _check_ell(inst, args.ell)
    doc = compare_decoders(inst, args.ell, args.engine, args.transpile, args.lookup_cap)
    doc["seed"] = args.seed
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    sys.stdout.write(text)
    if args.out:
        _write_atomic(Path(args.out) / "comparison.json", text)
    return EXIT_OK


SWEEP_COLUMNS = ["m", "n", "ell", "stage", "gates", "depth", "qubits", "table_gates", "table_depth", "table_qubits"]


def sweep_rows(ms, ell: int, transpile: bool = False, cap: int = DEFAULT_LOOKUP_CAP) -> list[dict]:
    """Resource rows for the cycle-graph family (m = n) at each size."""
    out = []
    for m in ms:
        inst = maxcut_to_xorsat(cycle_maxcut(m))
        for r in resource_rows(inst, ell, transpile, cap):
            meas, pred = r["measured"], r["predicted"]
            if meas is None:
                log.warning("m=%d: %s skipped (%s)", m, r["stage"], r.get("note"))
                continue
            out.append({
                "m": m, "n": inst.n, "ell": ell, "stage": r["stage"],
                "gates": _total(meas), "depth": meas["depth"], "qubits": meas["qubits"],
                "table_gates": _total(pred) if pred else "", "table_depth": pred["depth"] if pred else "",
                "table_qubits": pred["qubits"] if pred else "",
            })
    return out


def cmd_sweep(args) -> int:
    if args.m_min < 3 or args.m_max < args.m_min or args.m_step < 1:
        raise CliError("need 3 <= --m-min <= --m-max and --m-step >= 1", EXIT_INPUT)
    ms = range(args.m_min, args.m_max + 1, args.m_step)
    if args.ell > args.m_min:
        raise CliError(f"--ell {args.ell} exceeds the smallest size {args.m_min}", EXIT_INPUT)
    rows = sweep_rows(ms, args.ell, args.transpile, args.lookup_cap)
    text = ",".join(SWEEP_COLUMNS) + "\n" + "".join(
        ",".join(str(r[c]) for c in SWEEP_COLUMNS) + "\n" for r in rows
    )
    if args.out:
        out = Path(args.out)
        if args.emit in ("csv", "both"):
            _write_atomic(out / "sweep.csv", text)
        if args.emit in ("json", "both"):
            _write_atomic(out / "sweep.json", json.dumps(rows, indent=1) + "\n")
        print(f"wrote {len(rows)} rows to {out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dqi", description="DQI circuit synthesis, resource counts and simulation")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, instance=True):
        if instance:
            sp.add_argument("--instance", required=True, help="instance file")
            sp.add_argument("--format", choices=["xorsat-json", "edgelist"], default=None,
                            help="default: xorsat-json for *.json, edgelist otherwise")
        sp.add_argument("--ell", type=int, default=2)
        sp.add_argument("--transpile", action="store_true", help="count/simulate after basis transpilation")
        sp.add_argument("--lookup-cap", type=int, default=DEFAULT_LOOKUP_CAP)
        sp.add_argument("--out", default=None)
        sp.add_argument("--emit", choices=["csv", "json", "both"], default="both")

    sp = sub.add_parser("resources", help="per-stage gate counts, depth and width")
    common(sp)
    sp.set_defaults(func=cmd_resources)

    sp = sub.add_parser("simulate", help="run the full circuit and write the output distribution")
    common(sp)
    sp.add_argument("--decoder", choices=["gje", "lookup"], default="gje")
    sp.add_argument("--shots", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--engine", choices=["dense", "sparse", "auto"], default="auto")
    sp.add_argument("--postselect", choices=["strict", "none"], default="strict")
    sp.set_defaults(func=cmd_simulate, out="dqi-run")

    sp = sub.add_parser("compare-decoders", help="GJE vs lookup resources and output distributions")
    common(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--engine", choices=["dense", "sparse", "auto"], default="auto")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("sweep", help="resource curves over cycle-graph instances of growing size")
    common(sp, instance=False)
    sp.add_argument("--m-min", type=int, default=5)
    sp.add_argument("--m-max", type=int, default=15)
    sp.add_argument("--m-step", type=int, default=5)
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
