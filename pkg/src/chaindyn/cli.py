"""Configuration-driven entry point.

Subcommands: ``run <config>`` (JSON or TOML), ``preset <name> <analysis...>``,
``list-presets``.  Reports are written as a deterministic report.json plus
CSV curves; timestamps live in run_meta.json.  Exit codes: 0 success, 1
analysis precondition failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

try:
    import tomllib  # py311+
except ImportError:  # pragma: no cover
    import tomli as tomllib

from . import presets, report
from .errors import ChainDynError, InvalidArgumentError, NotTransitiveError
from .graph import build_chain_graph
from .space import (
    FiniteMetricSpace,
    build_circle_grid,
    build_disjoint_union,
    build_product,
    build_shift_space,
)
from .structure import OdometerSpec, build_odometer_space, epsilon_classes, k_ladder
from .system import GeneratorSystem, system_from_descriptions

ANALYSIS_KINDS = ("entropy", "recurrence", "mixing", "decompose", "ladder", "verify-all")


@dataclass
class RunConfig:
    system_source: dict  # {"preset": name, "overrides": {...}} or {"space":..., "maps":...}
    analyses: list[dict]
    seed: int = 0
    out_dir: str = "chaindyn-out"
    budget_points: int = 1 << 20
    budget_words: int = 4096
    fmt: str = "both"  # json | csv | both


class ConfigError(ChainDynError):
    pass


def _require(cond: bool, msg: str):
    if not cond:
        raise ConfigError(msg)


def _validate_ladder(values, what: str):
    _require(isinstance(values, (list, tuple)) and values, f"{what}: must be a nonempty list")
    _require(all(isinstance(v, (int, float)) and v > 0 for v in values), f"{what}: values must be positive")
    _require(
        all(a > b for a, b in zip(values, values[1:])),
        f"{what}: ladder must be strictly decreasing",
    )
    return [float(v) for v in values]


def parse_config(text: str) -> RunConfig:
    """Parse a JSON or TOML configuration document into a validated RunConfig."""
    doc = None
    json_err = toml_err = None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        json_err = f"JSON: line {e.lineno}, col {e.colno}: {e.msg}"
    if doc is None:
        try:
            doc = tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            toml_err = f"TOML: {e}"
    if doc is None:
        raise ConfigError(f"config is neither valid JSON nor TOML ({json_err}; {toml_err})")
    _require(isinstance(doc, dict), "config root must be a table/object")

    if "preset" in doc:
        source = {"preset": doc["preset"], "overrides": doc.get("overrides", {})}
    else:
        _require("space" in doc and "maps" in doc, "config needs either 'preset' or 'space' + 'maps'")
        source = {"space": doc["space"], "maps": doc["maps"]}

    analyses = doc.get("analyses", [])
    _require(isinstance(analyses, list) and analyses, "config needs a nonempty 'analyses' list")
    for a in analyses:
        _require(isinstance(a, dict) and "kind" in a, "each analysis needs a 'kind'")
        _require(a["kind"] in ANALYSIS_KINDS, f"unknown analysis kind {a['kind']!r}")
        for key in ("eps_ladder", "delta_ladder"):
            if key in a:
                a[key] = _validate_ladder(a[key], f"analysis {a['kind']}, {key}")

    budgets = doc.get("budget", {})
    bp = int(budgets.get("points", 1 << 20))
    bw = int(budgets.get("words", 4096))
    _require(bp > 0 and bw > 0, "budgets must be positive")
    return RunConfig(
        system_source=source,
        analyses=analyses,
        seed=int(doc.get("seed", 0)),
        out_dir=str(doc.get("out_dir", "chaindyn-out")),
        budget_points=bp,
        budget_words=bw,
        fmt=str(doc.get("format", "both")),
    )


def build_space_from_spec(spec: dict) -> FiniteMetricSpace:
    _require(isinstance(spec, dict) and "kind" in spec, "space spec needs a 'kind'")
    kind = spec["kind"]
    if kind == "circle":
        return build_circle_grid(int(spec["points"]), float(spec.get("circumference", 1.0)))
    if kind == "disjoint_union":
        parts = [build_space_from_spec(p) for p in spec["parts"]]
        return build_disjoint_union(parts, float(spec["cross_distance"]))
    if kind == "product":
        return build_product(build_space_from_spec(spec["a"]), build_space_from_spec(spec["b"]))
    if kind == "shift":
        return build_shift_space(int(spec["symbols"]), int(spec["depth"]))
    if kind == "odometer":
        return build_odometer_space(OdometerSpec(tuple(int(j) for j in spec["radices"])))
    raise ConfigError(f"unknown space kind {kind!r}")


def build_system_from_config(config: RunConfig) -> GeneratorSystem:
    src = config.system_source
    if "preset" in src:
        return presets.build_preset(src["preset"], **src.get("overrides", {}))
    space = build_space_from_spec(src["space"])
    try:
        return system_from_descriptions(space, src["maps"])
    except ChainDynError as e:
        raise ConfigError(f"malformed map expression: {e}") from e


# -- analysis dispatch -----------------------------------------------------------


def _analysis_entropy(g, params, config):
    from .entropy import pseudo_entropy, spectral_growth_rate

    eps_ladder = params.get("eps_ladder") or [params.get("epsilon", 0.1)]
    delta_ladder = params.get("delta_ladder") or [params.get("delta", eps_ladder[-1])]
    n_range = tuple(params.get("n_range", (1, 4)))
    word_sample = int(params.get("word_sample", 0))
    if word_sample == 0 and g.m ** n_range[1] > config.budget_words:
        word_sample = 256
    result = pseudo_entropy(
        g, eps_ladder, delta_ladder, n_range, word_sample=word_sample, seed=config.seed
    )
    oracle = spectral_growth_rate(build_chain_graph(g, min(delta_ladder)))
    payload = result.to_dict()
    payload["spectral_oracle"] = oracle
    curves = [
        (
            "entropy_curve.csv",
            ["n", "log_avg_count"],
            [[n, v] for n, v in result.corner.raw_curve],
        )
    ]
    return payload, curves, True


def _analysis_recurrence(g, params, config):
    from .recurrence import recurrence_time

    cg = build_chain_graph(g, float(params.get("epsilon", 0.1)))
    rep = recurrence_time(cg)
    curves = [
        (
            "recurrence_per_point.csv",
            ["point_id", "r"],
            [[i, r if r is not None else ""] for i, r in enumerate(rep.r_per_point)],
        )
    ]
    return rep.to_dict(), curves, rep.recurrent


def _analysis_mixing(g, params, config):
    from .recurrence import is_chain_mixing, mixing_time

    epsilon = float(params.get("epsilon", 0.1))
    delta_ball = float(params.get("delta_ball", epsilon))
    cg = build_chain_graph(g, epsilon)
    rep = mixing_time(cg, delta_ball)
    payload = rep.to_dict()
    payload["mixing"] = is_chain_mixing(cg)
    curves = []
    if "eps_ladder" in params:
        rows = []
        for eps in params["eps_ladder"]:
            sub = mixing_time(build_chain_graph(g, eps), delta_ball)
            rows.append([eps, sub.m_global if sub.m_global is not None else ""])
        curves.append(("mixing_curve.csv", ["epsilon", "m_global"], rows))
    return payload, curves, payload["mixing"]


def _analysis_decompose(g, params, config):
    epsilon = float(params.get("epsilon", 0.1))
    cg = build_chain_graph(g, epsilon)
    try:
        rep = epsilon_classes(cg)
    except NotTransitiveError as e:
        return {"error": str(e)}, [], False
    curves = [
        (
            "classes.csv",
            ["point_id", "class"],
            [[i, c] for i, c in enumerate(rep.class_of)],
        )
    ]
    return rep.to_dict(), curves, rep.permutation_ok


def _analysis_ladder(g, params, config):
    eps_ladder = params.get("eps_ladder")
    _require(eps_ladder is not None, "ladder analysis needs eps_ladder")
    diag = k_ladder(g, eps_ladder)
    curves = [
        (
            "k_ladder.csv",
            ["epsilon", "k"],
            [[e, k] for e, k in diag.entries],
        )
    ]
    return diag.to_dict(), curves, not diag.truncated_reason


def _analysis_verify_all(g, params, config):
    """Battery: counting oracle, skew identity, recurrence/mixing flags,
    decomposition, and an exact small-word sandwich spot check."""
    from .entropy import (
        pseudo_separated_count,
        pseudo_spanning_count,
        spectral_growth_rate,
        verify_skew_identity,
    )
    from .recurrence import recurrence_time

    epsilon = float(params.get("epsilon", 1.0 / 32))
    delta = float(params.get("delta", epsilon))
    payload: dict = {}
    ok = True
    cg = build_chain_graph(g, epsilon)
    rep = recurrence_time(cg)
    payload["recurrence"] = rep.to_dict()

    skew = verify_skew_identity(g, delta, budget_points=config.budget_points)
    payload["skew_identity"] = skew.to_dict()
    ok &= skew.discrepancy <= 1e-6 and skew.factorization_ok

    payload["spectral_oracle"] = spectral_growth_rate(cg)

    try:
        dec = epsilon_classes(cg)
        payload["decomposition"] = dec.to_dict()
        ok &= dec.permutation_ok
    except NotTransitiveError:
        payload["decomposition"] = {"error": "not chain transitive"}

    sandwich = []
    for letter in range(g.m):
        w = g.word([letter])
        n_sep, tag_sep = pseudo_separated_count(cg, w, epsilon)
        n_span_half, _ = pseudo_spanning_count(cg, w, epsilon / 2)
        n_span, _ = pseudo_spanning_count(cg, w, epsilon)
        good = n_span_half >= n_sep >= n_span
        sandwich.append(
            {
                "word": list(w.letters),
                "exact": tag_sep == "exact",
                "spanning_half_eps": n_span_half,
                "separated": n_sep,
                "spanning": n_span,
                "holds": good,
            }
        )
        ok &= good
    payload["sandwich"] = sandwich
    return payload, [], ok


_DISPATCH = {
    "entropy": _analysis_entropy,
    "recurrence": _analysis_recurrence,
    "mixing": _analysis_mixing,
    "decompose": _analysis_decompose,
    "ladder": _analysis_ladder,
    "verify-all": _analysis_verify_all,
}


def run(config: RunConfig) -> int:
    """Execute all requested analyses; write report + curves; return exit code."""
    t0 = time.time()
    try:
        g = build_system_from_config(config)
    except ConfigError:
        raise
    except ChainDynError as e:
        raise ConfigError(str(e)) from e

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    analyses_payload = {}
    all_ok = True
    for spec in sorted(config.analyses, key=lambda a: a["kind"]):
        kind = spec["kind"]
        payload, curves, ok = _DISPATCH[kind](g, spec, config)
        payload["effective_tolerances"] = {
            "quantization_error": g.quantization_error,
            "params": {k: v for k, v in spec.items() if k != "kind"},
        }
        analyses_payload[kind] = payload
        all_ok &= ok
        if config.fmt in ("csv", "both"):
            for fname, header, rows in curves:
                report.write_csv(out_dir / f"{kind}_{fname}", header, rows)
    if config.fmt in ("json", "both"):
        (out_dir / "report.json").write_text(
            report.assemble_report(g.describe(), analyses_payload)
        )
        (out_dir / "run_meta.json").write_text(
            json.dumps({"elapsed_s": time.time() - t0, "seed": config.seed})
        )
    return 0 if all_ok else 1


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="chaindyn")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-dir", default=None)
    parser.add_argument("--budget-points", type=int, default=1 << 20)
    parser.add_argument("--budget-words", type=int, default=4096)
    parser.add_argument("--format", choices=["json", "csv", "both"], default="both")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run analyses from a JSON/TOML config file")
    p_run.add_argument("config", type=Path)

    p_preset = sub.add_parser("preset", help="run analyses on a named preset")
    p_preset.add_argument("name")
    p_preset.add_argument("analysis", nargs="+", choices=ANALYSIS_KINDS)

    sub.add_parser("list-presets", help="list built-in example systems")

    args = parser.parse_args(argv)

    if args.command == "list-presets":
        for name, desc in presets.list_presets():
            print(f"{name:24s} {desc}")
        return 0

    try:
        if args.command == "run":
            config = parse_config(args.config.read_text())
        else:
            defaults = presets.preset_default_analysis_params(args.name)
            analyses = []
            for kind in args.analysis:
                spec = {"kind": kind, **{
                    k: v for k, v in defaults.items()
                    if k in ("epsilon", "delta", "delta_ball", "eps_ladder")
                }}
                analyses.append(spec)
            config = RunConfig(
                system_source={"preset": args.name, "overrides": {}},
                analyses=analyses,
            )
        if args.out_dir is not None:
            config.out_dir = args.out_dir
        config.seed = args.seed
        config.budget_points = args.budget_points
        config.budget_words = args.budget_words
        config.fmt = args.format
        code = run(config)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except ChainDynError as e:
        print(f"analysis error: {e}", file=sys.stderr)
        return 1
    return code


if __name__ == "__main__":
    sys.exit(main())
