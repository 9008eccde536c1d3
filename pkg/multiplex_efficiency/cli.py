#!/usr/bin/env python3
"""
Multiplex Efficiency Runner
Command-line entry point: loads an edge list, runs one analysis and writes the report.

    python -m multiplex_efficiency efficiency datasets/example_shuttles.edges --gamma 0,0.5 --k 1,2
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from .analysis import efficiency_report, redundancy_scan, redundant_edges
from .config import FORMAT_CHOICES, METHOD_CHOICES, RunConfig, load_run_config
from .data_loader import load_multiplex, write_multiplex
from .errors import (ConfigError, DataFormatError, InvalidNetworkError, MultiplexError,
                     NumericalError, SelectionError, UsageError)
from .network import MultiplexNetwork, build_path_tensor
from .paths import diameter, k_path_gamma, path_length_matrix, supra_dijkstra_oracle
from .perturbation import HARMONIC, PERRON, efficiency_profile, enhancement_report
from .reports import Report, base_record, format_number, format_vector, matrix_lines

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3

EXIT_CODES = {
    UsageError: EXIT_USAGE,
    ConfigError: EXIT_USAGE,
    DataFormatError: EXIT_DATA,
    InvalidNetworkError: EXIT_DATA,
    SelectionError: EXIT_DATA,
    NumericalError: EXIT_NUMERICAL,
}

ORACLE_TOLERANCE = 1e-9

SUBCOMMANDS = ("info", "pathlen", "efficiency", "redundant", "recommend", "oracle-check",
               "sweep", "export")


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so usage errors get exit code 1"""

    def error(self, message):
        raise UsageError(message)


def exit_code_for(exc: Exception) -> int:
    for error_type, code in EXIT_CODES.items():
        if isinstance(exc, error_type):
            return code
    return EXIT_DATA


def parse_gamma_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"--gamma expects comma-separated numbers, got {text!r}")


def parse_k_list(text: str) -> Optional[List[int]]:
    """'max' selects the fixed point"""
    if text.strip().lower() == "max":
        return None
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"--k expects comma-separated integers or 'max', got {text!r}")


def _budgets(config: RunConfig) -> List[Optional[int]]:
    return [None] if config.ks is None else list(config.ks)


def _pair_label(net: MultiplexNetwork, pair) -> str:
    h, k = pair
    return f"({net.vertex_labels[h]},{net.vertex_labels[k]})"


# ------------------------------------------------------------------ subcommands

def cmd_info(net: MultiplexNetwork, config: RunConfig) -> Report:
    report = Report("info")
    counts = net.edge_counts()
    layers = [
        {"layer": ell + 1, "label": net.layer_labels[ell], "arcs": counts[ell],
         "undirected": net.undirected[ell]}
        for ell in range(net.n_layers)
    ]
    record = base_record(net.n_vertices, net.n_layers)
    record.update(layers=layers, edge_total=net.edge_total())
    report.records.append(record)
    report.table = pd.DataFrame(layers)

    report.banner("MULTIPLEX SUMMARY")
    report.lines.append(f"Vertices: {net.n_vertices}")
    report.lines.append(f"Layers: {net.n_layers}")
    report.lines.append(f"Edges: {net.edge_total()} ({sum(counts)} arcs)")
    for entry in layers:
        kind = "undirected" if entry["undirected"] else "directed"
        report.lines.append(f"  ├── layer {entry['label']}: {entry['arcs']} arcs, {kind}")
    return report


def _layer_sets(res, labels) -> Dict[str, Dict[str, List[int]]]:
    sets = {}
    for i in range(res.n_vertices):
        for j in range(res.n_vertices):
            arrival, start = res.arrival_layers(i, j), res.start_layers(i, j)
            if arrival or start:
                sets[f"{labels[i]},{labels[j]}"] = {
                    "arrival": sorted(ell + 1 for ell in arrival),
                    "start": sorted(ell + 1 for ell in start),
                }
    return sets


def cmd_pathlen(net: MultiplexNetwork, config: RunConfig) -> Report:
    report = Report("pathlen")
    pt = build_path_tensor(net)
    rows = []
    for gamma in config.gammas:
        fixed, fixed_point_k = path_length_matrix(net, pt, gamma)
        diam = diameter(fixed)
        for k in _budgets(config):
            res = fixed.relabel(fixed_point_k) if k is None else k_path_gamma(net, pt, gamma, k)
            record = base_record(net.n_vertices, net.n_layers, gamma, res.k)
            record.update(fixed_point_k=fixed_point_k, diameter=diam.value,
                          diameter_pairs=[[i + 1, j + 1] for i, j in diam.pairs],
                          p=res.p)
            if config.show_layer_sets:
                record["layer_sets"] = _layer_sets(res, net.vertex_labels)
            report.records.append(record)

            for i in range(net.n_vertices):
                for j in range(net.n_vertices):
                    if i == j:
                        continue
                    row = {"gamma": gamma, "k": res.k, "src": i + 1, "dst": j + 1,
                           "p": float(res.p[i, j])}
                    if config.show_layer_sets:
                        row["arrival"] = " ".join(str(ell + 1) for ell in sorted(res.arrival_layers(i, j)))
                        row["start"] = " ".join(str(ell + 1) for ell in sorted(res.start_layers(i, j)))
                    rows.append(row)

            report.banner(f"PATH LENGTH MATRIX  gamma={format_number(gamma)}  K={res.k}")
            report.lines.extend(matrix_lines(res.p, net.vertex_labels))
            report.lines.append(f"Fixed point: P = P^{fixed_point_k}")
            report.lines.append(f"Diameter: {format_number(diam.value)} attained by "
                                + ", ".join(_pair_label(net, pair) for pair in diam.pairs))
            if config.show_layer_sets:
                for pair, sets in record["layer_sets"].items():
                    report.lines.append(f"  ({pair}) start {sets['start']} arrival {sets['arrival']}")
    report.table = pd.DataFrame(rows)
    return report


def cmd_efficiency(net: MultiplexNetwork, config: RunConfig) -> Report:
    report = Report("efficiency")
    report.banner("GLOBAL K-EFFICIENCY")
    rows = []
    for gamma in config.gammas:
        for k in _budgets(config):
            result = efficiency_report(net, gamma, k)
            record = base_record(net.n_vertices, net.n_layers, gamma, result.k)
            record.update(efficiency=result.efficiency, h_in=result.h_in, h_out=result.h_out,
                          diameter=result.diameter, fixed_point_k=result.fixed_point_k)
            report.records.append(record)
            rows.append({"gamma": gamma, "k": result.k, "efficiency": result.efficiency,
                         "diameter": result.diameter, "fixed_point_k": result.fixed_point_k})
            report.lines.append(f"gamma={format_number(gamma)}  K={result.k}  "
                                f"e={format_number(result.efficiency)}")
            report.lines.append(f"  h_in  {format_vector(result.h_in)}")
            report.lines.append(f"  h_out {format_vector(result.h_out)}")
    report.table = pd.DataFrame(rows)
    return report


def cmd_redundant(net: MultiplexNetwork, config: RunConfig) -> Report:
    report = Report("redundant")
    pt = build_path_tensor(net)
    rows = []
    for gamma in config.gammas:
        fixed, fixed_point_k = path_length_matrix(net, pt, gamma)
        for k in _budgets(config):
            if k is None:
                redundancy = redundancy_scan(net, gamma)
            else:
                redundancy = redundant_edges(net, pt, gamma, k_path_gamma(net, pt, gamma, k),
                                             is_fixed_point=k >= fixed.k)
            edges = [edge.to_dict() for edge in redundancy.redundant]
            record = base_record(net.n_vertices, net.n_layers, gamma, redundancy.k)
            record.update(fixed_point_k=fixed_point_k, redundant=edges,
                          status="complete" if redundancy.is_fixed_point else "certificates")
            report.records.append(record)
            for edge in edges:
                rows.append(dict(edge, gamma=gamma, k=redundancy.k))

            state = "fixed point" if redundancy.is_fixed_point else "unflagged edges undetermined"
            report.banner(f"REDUNDANT EDGES  gamma={format_number(gamma)}  K={redundancy.k} ({state})")
            if not edges:
                report.lines.append("✅ no redundant edges")
            for group in redundancy.undirected_groups(net):
                first = group[0]
                arrow = "--" if len(group) == 2 else "->"
                report.lines.append(
                    f"  • {net.vertex_labels[first.i]}{arrow}{net.vertex_labels[first.j]} "
                    f"layer {net.layer_labels[first.layer]}: weight {format_number(first.weight)}"
                    f" > bound {format_number(first.bound)} (K={first.k_used})")
    report.table = pd.DataFrame(rows, columns=["gamma", "k", "src", "dst", "layer", "weight",
                                               "bound", "k_used"])
    return report


def cmd_recommend(net: MultiplexNetwork, config: RunConfig) -> Report:
    report = Report("recommend")
    methods = (HARMONIC, PERRON) if config.method == "both" else (config.method,)
    rows = []
    for gamma in config.gammas:
        for k in _budgets(config):
            recommendations, failures = [], []
            for method in methods:
                try:
                    recommendations.append(
                        enhancement_report(net, gamma, k, method, config.strengthening_factor,
                                           config.perron_tol, config.perron_max_iter))
                except NumericalError as exc:
                    # report a failure only while another method has an answer
                    if not recommendations and method == methods[-1]:
                        raise
                    logger.warning("%s selection failed at gamma=%s: %s", method, gamma, exc)
                    failures.append({"method": method, "error": str(exc)})
            first = recommendations[0]
            record = base_record(net.n_vertices, net.n_layers, gamma, first.k)
            record.update(efficiency=first.efficiency_before,
                          recommendation=[r.to_dict() for r in recommendations] + failures)
            report.records.append(record)

            report.banner(f"STRENGTHENING  gamma={format_number(gamma)}  K={first.k}")
            for failure in failures:
                report.lines.append(f"❌ {failure['method']}: {failure['error']}")
            for rec in recommendations:
                layers = sorted({ell + 1 for _, _, ell, _, _ in rec.strengthened})
                rows.append({"gamma": gamma, "k": rec.k, "method": rec.method,
                             "pairs": ";".join(_pair_label(net, p) for p in rec.pairs),
                             "applied": _pair_label(net, rec.applied_pair),
                             "layers": " ".join(str(ell) for ell in layers),
                             "efficiency_before": rec.efficiency_before,
                             "efficiency_after": rec.efficiency_after})
                report.lines.append(f"{rec.method}: pairs "
                                    + ", ".join(_pair_label(net, p) for p in rec.pairs))
                report.lines.append(f"  applied {_pair_label(net, rec.applied_pair)} in layers {layers}")
                report.lines.append(f"  efficiency {format_number(rec.efficiency_before)} -> "
                                    f"{format_number(rec.efficiency_after)}")
    report.table = pd.DataFrame(rows)
    return report


def cmd_oracle_check(net: MultiplexNetwork, config: RunConfig) -> Report:
    report = Report("oracle-check")
    report.banner("SUPRA-GRAPH DIJKSTRA CROSS-CHECK")
    rows = []
    failures = []
    for gamma in config.gammas:
        fixed, fixed_point_k = path_length_matrix(net, None, gamma)
        oracle = supra_dijkstra_oracle(net, gamma)
        same_pattern = bool(np.array_equal(np.isinf(fixed.p), np.isinf(oracle)))
        finite = np.isfinite(fixed.p) & np.isfinite(oracle)
        deviation = float(np.abs(fixed.p[finite] - oracle[finite]).max()) if finite.any() else 0.0
        ok = same_pattern and deviation <= ORACLE_TOLERANCE

        record = base_record(net.n_vertices, net.n_layers, gamma, fixed_point_k)
        record.update(fixed_point_k=fixed_point_k, max_deviation=deviation, agree=ok)
        report.records.append(record)
        rows.append({"gamma": gamma, "max_deviation": deviation, "agree": ok})
        marker = "✅" if ok else "❌"
        report.lines.append(f"{marker} gamma={format_number(gamma)}  max deviation "
                            f"{format_number(deviation)}")
        if not ok:
            failures.append(gamma)
    report.table = pd.DataFrame(rows)
    if failures:
        report.failure = NumericalError(
            f"K-path engine disagrees with the supra-graph oracle at gamma={failures}")
    return report


def cmd_sweep(net: MultiplexNetwork, config: RunConfig) -> Report:
    report = Report("sweep")
    frames = []
    for gamma in config.gammas:
        profile = efficiency_profile(net, gamma, config.ks, config.strengthening_factor,
                                     config.perron_tol, config.perron_max_iter)
        profile.insert(0, "gamma", gamma)
        frames.append(profile)
        for row in profile.to_dict("records"):
            record = base_record(net.n_vertices, net.n_layers, gamma, int(row["k"]))
            record.update(efficiency=row["efficiency"], hk_pair=row["hk_pair"],
                          wk_pair=row["wk_pair"], rho=row["rho"],
                          efficiency_after=row["efficiency_after"])
            report.records.append(record)

        report.banner(f"EFFICIENCY PROFILE  gamma={format_number(gamma)}")
        report.lines.append(f"{'K':>4} {'(HK)':>16} {'(WK)':>16} {'e^K':>12} {'after':>12}")
        for row in profile.to_dict("records"):
            report.lines.append(f"{int(row['k']):>4} {row['hk_pair']:>16} {row['wk_pair']:>16} "
                                f"{format_number(row['efficiency']):>12} "
                                f"{format_number(row['efficiency_after']):>12}")
    report.table = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()
    return report


def cmd_export(net: MultiplexNetwork, config: RunConfig) -> Report:
    if not config.out:
        raise UsageError("export needs --out <path>")
    path = write_multiplex(net, config.out)
    report = Report("export")
    record = base_record(net.n_vertices, net.n_layers)
    record.update(path=str(path))
    report.records.append(record)
    report.lines.append(f"✅ wrote {sum(net.edge_counts())} arcs to {path}")
    return report


COMMANDS: Dict[str, Callable[[MultiplexNetwork, RunConfig], Report]] = {
    "info": cmd_info,
    "pathlen": cmd_pathlen,
    "efficiency": cmd_efficiency,
    "redundant": cmd_redundant,
    "recommend": cmd_recommend,
    "oracle-check": cmd_oracle_check,
    "sweep": cmd_sweep,
    "export": cmd_export,
}


# ------------------------------------------------------------------------ runner

def load_network(config: RunConfig) -> MultiplexNetwork:
    if not config.edges:
        raise UsageError("no edge file given")
    return load_multiplex(config.edges,
                          undirected=config.undirected_hint,
                          largest_component_only=config.largest_component_only,
                          zero_based=config.zero_based,
                          vertex_labels_path=config.vertex_labels,
                          layer_labels_path=config.layer_labels)


def build_report(config: RunConfig, subcommand: str,
                 net: Optional[MultiplexNetwork] = None) -> Report:
    """Run one subcommand and return its report; errors propagate"""
    if subcommand not in COMMANDS:
        raise UsageError(f"unknown subcommand {subcommand!r}")
    config.validate()
    if net is None:
        net = load_network(config)
    return COMMANDS[subcommand](net, config)


def run_command(config: RunConfig, subcommand: str,
                net: Optional[MultiplexNetwork] = None) -> int:
    """Run, write the report (stdout or ``config.out``) and return the exit status"""
    try:
        report = build_report(config, subcommand, net)
        output = report.render(config.output_format)
        if config.out and subcommand != "export":
            Path(config.out).parent.mkdir(parents=True, exist_ok=True)
            Path(config.out).write_text(output, encoding="utf-8")
            print(f"✅ report written to {config.out}", file=sys.stderr)
        else:
            sys.stdout.write(output)
        if report.failure is not None:
            raise report.failure
    except MultiplexError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        if isinstance(exc, ConfigError):
            for error in exc.errors:
                print(f"  • {error}", file=sys.stderr)
        return exit_code_for(exc)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("edges", nargs="?", help="Edge list file: 'layer src dst [weight]' per line")
    common.add_argument("--config", help="YAML or JSON run configuration")
    common.add_argument("--gamma", type=parse_gamma_list, help="Switching costs, e.g. 0,0.5,1")
    common.add_argument("--k", dest="ks", type=parse_k_list, default=argparse.SUPPRESS,
                        help="Edge budgets, e.g. 1,2,7, or 'max' for the fixed point")
    common.add_argument("--method", choices=METHOD_CHOICES, help="Selection rule for recommend")
    common.add_argument("--undirected", action="store_const", const=True,
                        help="Insert every record in both directions")
    common.add_argument("--largest-component", action="store_const", const=True,
                        help="Keep only the largest connected component")
    common.add_argument("--zero-based", action="store_const", const=True,
                        help="Indices in the input files start at 0")
    common.add_argument("--factor", type=float, help="Strengthening factor in (0, 1)")
    common.add_argument("--format", dest="output_format", choices=FORMAT_CHOICES,
                        help="Report format")
    common.add_argument("--out", help="Write the report (or exported edges) to this path")
    common.add_argument("--tol", type=float, help="Perron power iteration tolerance")
    common.add_argument("--max-iter", type=int, help="Perron power iteration limit")
    common.add_argument("--vertex-labels", help="File with 'index label' lines for vertices")
    common.add_argument("--layer-labels", help="File with 'index label' lines for layers")
    common.add_argument("--layer-sets", action="store_const", const=True,
                        help="Include start/arrival layer sets in pathlen output")
    common.add_argument("--verbose", action="store_true", help="Debug logging")

    parser = _Parser(description="Path lengths, efficiency and edge strengthening on "
                                 "multiplex networks with layer-switching cost")
    subparsers = parser.add_subparsers(dest="subcommand", metavar="subcommand")
    subparsers.required = True
    helps = {
        "info": "Vertex, layer and edge counts",
        "pathlen": "K-path length matrices and the fixed point",
        "efficiency": "Global K-efficiency and harmonic centralities",
        "redundant": "Redundant intra-layer edges",
        "recommend": "Edge to strengthen and the efficiency gain",
        "oracle-check": "Compare against Dijkstra on the supra graph",
        "sweep": "Per-K selections and efficiencies before/after strengthening",
        "export": "Write the (possibly restricted) multiplex as an edge list",
    }
    for name in SUBCOMMANDS:
        subparsers.add_parser(name, parents=[common], help=helps[name])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    config = load_run_config(args.config) if args.config else RunConfig()
    return config.with_overrides(
        edges=args.edges,
        gammas=args.gamma,
        method=args.method,
        undirected_hint=args.undirected,
        largest_component_only=args.largest_component,
        zero_based=args.zero_based,
        strengthening_factor=args.factor,
        output_format=args.output_format,
        out=args.out,
        perron_tol=args.tol,
        perron_max_iter=args.max_iter,
        vertex_labels=args.vertex_labels,
        layer_labels=args.layer_labels,
        show_layer_sets=args.layer_sets,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s - %(levelname)s - %(message)s",
    )
    try:
        config = config_from_args(args)
        # "--k max" must be able to clear a list coming from the config file
        if hasattr(args, "ks"):
            config.ks = args.ks
        config.validate()
    except MultiplexError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return exit_code_for(exc)
    return run_command(config, args.subcommand)


if __name__ == "__main__":
    sys.exit(main())
