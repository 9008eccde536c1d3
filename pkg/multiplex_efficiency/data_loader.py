"""
Edge-list ingestion and export.

Files hold one intra-layer edge per line, ``layer src dst [weight]`` with 1-based
indices; ``#`` starts a comment and blank lines are skipped.  A leading
``# multiplex vertices=N layers=L`` directive (written by ``write_multiplex``) fixes the
sizes so isolated vertices and empty layers survive a round trip, and
``# vertex-label i name`` / ``# layer-label l name`` directives carry labels.
"""

import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple, Union

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import DataFormatError, InvalidNetworkError
from .network import MultiplexNetwork, supra_matrix

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

HEADER_PATTERN = re.compile(r"^#\s*multiplex\s+vertices=(\d+)\s+layers=(\d+)\s*$")
LABEL_PATTERN = re.compile(r"^#\s*(vertex|layer)-label\s+(\d+)\s+(.+?)\s*$")


@dataclass(frozen=True)
class EdgeRecord:
    """One parsed line, 1-based"""

    layer: int
    src: int
    dst: int
    weight: float
    line_number: int = 0


def _parse_index(token: str, what: str, zero_based: bool, path, line_number) -> int:
    try:
        value = int(token)
    except ValueError:
        raise DataFormatError(f"{what} index {token!r} is not an integer", path, line_number)
    if zero_based:
        value += 1
    if value < 1:
        raise DataFormatError(f"{what} index {token} must be positive", path, line_number)
    return value


def parse_edge_line(line: str, line_number: int = 0, path: Optional[str] = None,
                    zero_based: bool = False) -> Optional[EdgeRecord]:
    """Parse one line; comments and blank lines give None"""
    content = line.split("#", 1)[0].strip()
    if not content:
        return None

    tokens = content.split()
    if len(tokens) not in (3, 4):
        raise DataFormatError(
            f"expected 'layer src dst [weight]', got {len(tokens)} field(s)", path, line_number)

    layer = _parse_index(tokens[0], "layer", zero_based, path, line_number)
    src = _parse_index(tokens[1], "vertex", zero_based, path, line_number)
    dst = _parse_index(tokens[2], "vertex", zero_based, path, line_number)
    if src == dst:
        raise DataFormatError(f"self loop on vertex {src} in layer {layer}", path, line_number)

    weight = 1.0
    if len(tokens) == 4:
        try:
            weight = float(tokens[3])
        except ValueError:
            raise DataFormatError(f"weight {tokens[3]!r} is not a number", path, line_number)
        if not math.isfinite(weight) or weight <= 0:
            raise DataFormatError(f"weight must be positive and finite, got {tokens[3]}",
                                  path, line_number)
    return EdgeRecord(layer, src, dst, weight, line_number)


def _read_lines(path: Path, kind: str) -> Iterator[Tuple[int, str]]:
    """(line number, line) pairs; unreadable or undecodable files become DataFormatError"""
    if not path.exists():
        raise DataFormatError(f"{kind} file not found", str(path))
    line_number = 0
    try:
        with open(path, "r", encoding="utf-8") as handle:
            for line_number, line in enumerate(handle, 1):
                yield line_number, line
    except UnicodeDecodeError as exc:
        raise DataFormatError(f"not UTF-8 text after line {line_number} ({exc.reason})", str(path))
    except OSError as exc:
        raise DataFormatError(f"cannot read {kind} file: {exc.strerror or exc}", str(path))


def load_edge_records(edges_path: PathLike,
                      zero_based: bool = False) -> Tuple[List[EdgeRecord], Optional[Tuple[int, int]]]:
    """All edge records of a file plus the declared (vertices, layers), if any"""
    path = Path(edges_path)
    records = []
    declared = None
    for line_number, line in _read_lines(path, "edge"):
        match = HEADER_PATTERN.match(line.strip())
        if match:
            declared = (int(match.group(1)), int(match.group(2)))
            continue
        record = parse_edge_line(line, line_number, str(path), zero_based)
        if record is not None:
            records.append(record)

    logger.debug("read %d edge record(s) from %s", len(records), path)
    return records, declared


def load_label_directives(edges_path: PathLike) -> Tuple[Dict[int, str], Dict[int, str]]:
    """``# vertex-label i name`` and ``# layer-label l name`` lines of an edge file, 1-based"""
    path = Path(edges_path)
    found: Dict[str, Dict[int, str]] = {"vertex": {}, "layer": {}}
    for line_number, line in _read_lines(path, "edge"):
        match = LABEL_PATTERN.match(line.strip())
        if not match:
            continue
        kind, index, label = match.group(1), int(match.group(2)), match.group(3)
        if index < 1 or index in found[kind]:
            raise DataFormatError(f"bad or repeated {kind} label index {index}", str(path), line_number)
        found[kind][index] = label
    return found["vertex"], found["layer"]


def load_labels(labels_path: PathLike, zero_based: bool = False) -> Dict[int, str]:
    """
    ``index label`` per line (extra columns ignored) mapped to {1-based index: label}.

    A first line whose index is not an integer is taken as a column header.
    """
    path = Path(labels_path)
    labels: Dict[int, str] = {}
    seen_content = False
    for line_number, line in _read_lines(path, "label"):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        tokens = content.split()
        first = not seen_content
        seen_content = True
        if first and not tokens[0].lstrip("-").isdigit():
            continue
        if len(tokens) < 2:
            raise DataFormatError("expected 'index label'", str(path), line_number)
        index = _parse_index(tokens[0], "label", zero_based, str(path), line_number)
        if index in labels:
            raise DataFormatError(f"index {index} labelled twice", str(path), line_number)
        labels[index] = tokens[1]
    return labels


def _apply_labels(mapping: Dict[int, str], count: int, kind: str, path) -> List[str]:
    out_of_range = [index for index in mapping if index > count]
    if out_of_range:
        raise DataFormatError(f"{kind} label index {min(out_of_range)} exceeds {count}", str(path))
    return [mapping.get(index, str(index)) for index in range(1, count + 1)]


def largest_component(net: MultiplexNetwork) -> List[int]:
    """
    Vertices of the largest weakly connected component of the supra graph at gamma = 1.

    Every positive gamma gives the same components; ties go to the component holding
    the smallest vertex index.
    """
    supra = supra_matrix(net, 1.0)
    _, component_of = connected_components(supra.matrix, directed=True, connection="weak")
    per_vertex = component_of[:net.n_vertices]
    counts = np.bincount(per_vertex)
    best = per_vertex[np.flatnonzero(counts[per_vertex] == counts.max())[0]]
    return [int(v) for v in np.flatnonzero(per_vertex == best)]


def load_multiplex(edges_path: PathLike,
                   undirected: bool = False,
                   largest_component_only: bool = False,
                   zero_based: bool = False,
                   vertex_labels_path: Optional[PathLike] = None,
                   layer_labels_path: Optional[PathLike] = None) -> MultiplexNetwork:
    """
    Build a MultiplexNetwork from an edge-list file.

    ``undirected`` inserts each record in both directions.  ``largest_component_only``
    restricts to the largest component and renumbers vertices; labels keep the original
    1-based indices (or the label file's names).
    """
    records, declared = load_edge_records(edges_path, zero_based)
    path = str(edges_path)
    if not records and declared is None:
        raise DataFormatError("no edges found", path)

    n_vertices = max([max(r.src, r.dst) for r in records] + [declared[0] if declared else 0])
    n_layers = max([r.layer for r in records] + [declared[1] if declared else 0])
    if declared and (n_vertices > declared[0] or n_layers > declared[1]):
        raise DataFormatError(
            f"records exceed the declared size vertices={declared[0]} layers={declared[1]}", path)

    weights: Dict[Tuple[int, int, int], Tuple[float, int]] = {}
    duplicates = 0
    for record in records:
        arcs = [(record.src, record.dst)]
        if undirected:
            arcs.append((record.dst, record.src))
        for src, dst in arcs:
            key = (record.layer - 1, src - 1, dst - 1)
            previous = weights.get(key)
            if previous is None:
                weights[key] = (record.weight, record.line_number)
            elif previous[0] != record.weight:
                raise DataFormatError(
                    f"edge {src}->{dst} in layer {record.layer} has weight {record.weight}, "
                    f"but {previous[0]} on line {previous[1]}", path, record.line_number)
            else:
                duplicates += 1
    if duplicates:
        logger.warning("%s: %d duplicate edge record(s) ignored", path, duplicates)

    vertex_directives, layer_directives = load_label_directives(edges_path)
    vertex_labels = None
    if vertex_labels_path is not None:
        vertex_labels = _apply_labels(load_labels(vertex_labels_path, zero_based), n_vertices,
                                      "vertex", vertex_labels_path)
    elif vertex_directives:
        vertex_labels = _apply_labels(vertex_directives, n_vertices, "vertex", path)
    layer_labels = None
    if layer_labels_path is not None:
        layer_labels = _apply_labels(load_labels(layer_labels_path, zero_based), n_layers,
                                     "layer", layer_labels_path)
    elif layer_directives:
        layer_labels = _apply_labels(layer_directives, n_layers, "layer", path)

    try:
        net = MultiplexNetwork.from_edges(
            n_vertices, n_layers,
            ((ell, i, j, w) for (ell, i, j), (w, _) in weights.items()),
            vertex_labels=vertex_labels, layer_labels=layer_labels)
    except InvalidNetworkError as exc:
        raise DataFormatError(str(exc), path)

    if largest_component_only:
        keep = largest_component(net)
        if len(keep) < net.n_vertices:
            logger.info("restricted to the largest component: %d of %d vertices",
                        len(keep), net.n_vertices)
            net = net.subnetwork(keep)

    logger.info("loaded %s: N=%d, L=%d, %d arc(s)", path, net.n_vertices, net.n_layers,
                sum(net.edge_counts()))
    return net


def write_multiplex(net: MultiplexNetwork, edges_path: PathLike) -> Path:
    """
    Write every arc as ``layer src dst weight`` (1-based) behind a size directive.

    Vertex and layer labels other than the default 1-based indices go out as
    ``# vertex-label`` / ``# layer-label`` directives so a reload restores them.
    """
    path = Path(edges_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"# multiplex vertices={net.n_vertices} layers={net.n_layers}\n")
        for kind, labels in (("vertex", net.vertex_labels), ("layer", net.layer_labels)):
            for index, label in enumerate(labels, 1):
                if label != str(index):
                    handle.write(f"# {kind}-label {index} {label}\n")
        for ell, i, j, weight in net.edges():
            handle.write(f"{ell + 1} {i + 1} {j + 1} {weight!r}\n")
    logger.info("wrote %d arc(s) to %s", sum(net.edge_counts()), path)
    return path
