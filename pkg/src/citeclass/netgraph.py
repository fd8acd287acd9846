"""Flow network: community detection and force-directed layout.

The graph has one node per class (sized by the target-system class size)
and one directed edge per positive flow. Community detection runs greedy
modularity maximization (Clauset-Newman-Moore) on the symmetrized graph:
start from singletons, repeatedly merge the pair of communities with the
largest gain dQ = 2*(e_ij - a_i*a_j) while it is positive, ties broken by
the smallest community-id pair.

The layout minimizes the LinLog energy
    sum_edges w_uv*|x_u - x_v|  -  sum_pairs r_uv*ln|x_u - x_v|
by gradient descent with a backtracking line search. The repulsion factor
r_uv is deg_u*deg_v in the node-repulsion variant (default) or 1 in the
edge-repulsion variant. O(n^2) dense evaluation is fine at <= a few hundred
nodes.
"""

from __future__ import annotations

import json
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .corpus import ParseError, ValidationError
from .flow import FlowMatrix

GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"
FORMATS = ("json", "graphml")
VARIANTS = ("node", "edge")


@dataclass(frozen=True, slots=True)
class GraphNode:
    class_code: str
    size: float


@dataclass(frozen=True, slots=True)
class GraphEdge:
    source: str
    target: str
    weight: float


@dataclass(slots=True)
class FlowGraph:
    nodes: list[GraphNode]
    edges: list[GraphEdge]

    def node_codes(self) -> list[str]:
        return [n.class_code for n in self.nodes]


@dataclass(slots=True)
class Partition:
    community: dict[str, int]
    q: float


@dataclass(frozen=True, slots=True)
class LayoutParams:
    iterations: int = 500
    step: float = 0.1
    seed: int = 0
    variant: str = "node"

    def __post_init__(self):
        errors = []
        if self.iterations < 1:
            errors.append(f"iterations must be >= 1, got {self.iterations}")
        if not (self.step > 0.0):
            errors.append(f"step must be > 0, got {self.step}")
        if self.variant not in VARIANTS:
            errors.append(f"unknown layout variant {self.variant!r}")
        if errors:
            raise ValidationError(errors)


@dataclass(slots=True)
class Layout:
    positions: dict[str, tuple[float, float]]
    final_energy: float
    energy_trace: tuple[float, ...]


def build_flow_graph(matrix: FlowMatrix, epsilon: float = 1e-6) -> FlowGraph:
    """One node per class sized by its target-system weight; one directed
    edge per flow entry of at least epsilon."""
    classes = matrix.classes()
    if not classes:
        raise ValidationError(["cannot build a graph from an empty flow matrix"])
    nodes = [GraphNode(c, matrix.size_b.get(c, 0.0)) for c in classes]
    edges = [
        GraphEdge(i, j, w)
        for (i, j), w in sorted(matrix.flow.items())
        if w >= epsilon and i != j
    ]
    return FlowGraph(nodes, edges)


def _symmetric_weights(graph: FlowGraph) -> dict[tuple[int, int], float]:
    """Undirected pair weights (sum of both directions) on node indices."""
    idx = {c: i for i, c in enumerate(graph.node_codes())}
    sym: dict[tuple[int, int], float] = {}
    for e in graph.edges:
        i, j = idx[e.source], idx[e.target]
        if i == j:
            continue
        key = (i, j) if i < j else (j, i)
        sym[key] = sym.get(key, 0.0) + e.weight
    return sym


def modularity(graph: FlowGraph, partition: dict[str, int] | Partition) -> float:
    """Weighted modularity Q = sum_c (e_cc - a_c^2) on the symmetrized
    graph. A graph with no edges scores 0."""
    community = partition.community if isinstance(partition, Partition) else partition
    codes = graph.node_codes()
    for c in codes:
        if c not in community:
            raise ValidationError([f"partition does not cover node {c!r}"])
    sym = _symmetric_weights(graph)
    two_m = 2.0 * math.fsum(sym.values())
    if two_m <= 0.0:
        return 0.0
    comm_of = [community[c] for c in codes]
    e_cc: dict[int, float] = {}
    a: dict[int, float] = {}
    for (i, j), w in sym.items():
        ci, cj = comm_of[i], comm_of[j]
        a[ci] = a.get(ci, 0.0) + w / two_m
        a[cj] = a.get(cj, 0.0) + w / two_m
        if ci == cj:
            e_cc[ci] = e_cc.get(ci, 0.0) + 2.0 * w / two_m
    q = 0.0
    for c in set(comm_of):
        ac = a.get(c, 0.0)
        q += e_cc.get(c, 0.0) - ac * ac
    return q


def detect_communities(graph: FlowGraph) -> Partition:
    """Greedy modularity merging; returns the partition at the maximum Q
    reached (Q only grows while merges are accepted)."""
    codes = graph.node_codes()
    n = len(codes)
    sym = _symmetric_weights(graph)
    two_m = 2.0 * math.fsum(sym.values())
    if two_m <= 0.0:
        return Partition({c: i for i, c in enumerate(codes)}, 0.0)

    # e[i][j]: inter-community weight fraction; a[i]: degree fraction
    e: dict[int, dict[int, float]] = {i: {} for i in range(n)}
    a = [0.0] * n
    for (i, j), w in sym.items():
        frac = w / two_m
        e[i][j] = e[i].get(j, 0.0) + frac
        e[j][i] = e[j].get(i, 0.0) + frac
        a[i] += frac
        a[j] += frac
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    q = -math.fsum(ai * ai for ai in a)

    while len(members) > 1:
        best_dq = 0.0
        best: tuple[int, int] | None = None
        for i in sorted(members):
            row = e[i]
            for j in sorted(row):
                if j <= i:
                    continue
                dq = 2.0 * (row[j] - a[i] * a[j])
                if dq > best_dq:
                    best_dq = dq
                    best = (i, j)
        if best is None:
            break
        i, j = best
        q += best_dq
        members[i].extend(members[j])
        del members[j]
        a[i] += a[j]
        for k, w in e[j].items():
            if k == i:
                continue
            e[i][k] = e[i].get(k, 0.0) + w
            e[k][i] = e[k].get(i, 0.0) + w
            del e[k][j]
        e[i].pop(j, None)
        del e[j]

    community: dict[str, int] = {}
    for new_id, old_id in enumerate(sorted(members, key=lambda c: min(members[c]))):
        for node in members[old_id]:
            community[codes[node]] = new_id
    return Partition(community, q)


def _pair_distances(x: np.ndarray) -> np.ndarray:
    diff = x[:, None, :] - x[None, :, :]
    return np.sqrt((diff * diff).sum(axis=2))


def _energy(x: np.ndarray, w: np.ndarray, rep: np.ndarray, upper: np.ndarray) -> float:
    d = _pair_distances(x)
    att_mask = upper & (w > 0.0)
    rep_mask = upper & (rep > 0.0)
    if np.any(d[rep_mask] <= 0.0):
        return math.inf
    att = float((w[att_mask] * d[att_mask]).sum())
    with np.errstate(divide="ignore"):
        rep_term = float((rep[rep_mask] * np.log(d[rep_mask])).sum())
    return att - rep_term


def _gradient(x: np.ndarray, w: np.ndarray, rep: np.ndarray) -> np.ndarray:
    d = _pair_distances(x)
    np.fill_diagonal(d, math.inf)
    inv = 1.0 / d
    coef = w * inv - rep * inv * inv
    return coef.sum(axis=1)[:, None] * x - coef @ x


def linlog_layout(graph: FlowGraph, params: LayoutParams = LayoutParams()) -> Layout:
    """Deterministic gradient descent from seeded random positions. The
    energy trace holds the initial energy plus every accepted step; accepted
    steps strictly decrease energy."""
    codes = graph.node_codes()
    n = len(codes)
    rng = np.random.default_rng(params.seed)
    x = rng.random((n, 2))

    idx = {c: i for i, c in enumerate(codes)}
    w = np.zeros((n, n))
    for e in graph.edges:
        i, j = idx[e.source], idx[e.target]
        if i != j:
            w[i, j] += e.weight
            w[j, i] += e.weight
    if params.variant == "node":
        deg = w.sum(axis=1)
        rep = np.outer(deg, deg)
    else:
        rep = np.ones((n, n))
    np.fill_diagonal(rep, 0.0)
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)

    def separated(pos: np.ndarray) -> np.ndarray:
        # coincident nodes get a seeded jitter of magnitude 1e-9
        for _ in range(100):
            d = _pair_distances(pos)
            np.fill_diagonal(d, math.inf)
            ii, jj = np.nonzero(d == 0.0)
            keep = ii < jj
            if not keep.any():
                return pos
            pos = pos.copy()
            for k in np.unique(jj[keep]):
                off = rng.standard_normal(2)
                norm = math.sqrt(float(off @ off))
                if norm == 0.0:
                    continue
                pos[int(k)] += off / norm * 1e-9
        raise ValidationError(["could not separate coincident nodes"])

    x = separated(x)
    energy = _energy(x, w, rep, upper)
    trace = [energy]
    step = params.step
    for _ in range(params.iterations):
        grad = _gradient(x, w, rep)
        if not np.isfinite(grad).all():
            break
        s = step
        accepted = None
        while s > 1e-18:
            cand = separated(x - s * grad)
            cand_energy = _energy(cand, w, rep, upper)
            if cand_energy < energy:
                accepted = (cand, cand_energy)
                break
            s /= 2.0
        if accepted is None:
            break
        x, new_energy = accepted
        trace.append(new_energy)
        converged = abs(energy - new_energy) < 1e-9 * max(abs(energy), 1e-12)
        energy = new_energy
        step = s * 2.0
        if converged:
            break

    positions = {codes[i]: (float(x[i, 0]), float(x[i, 1])) for i in range(n)}
    return Layout(positions, energy if n else 0.0, tuple(trace))


def export_graph(
    graph: FlowGraph,
    partition: Partition,
    layout: Layout,
    fmt: str,
    path: str,
) -> None:
    """Write plot-ready graph data; byte-deterministic given inputs."""
    codes = graph.node_codes()
    if set(partition.community) != set(codes) or set(layout.positions) != set(codes):
        raise ValidationError(["graph, partition, and layout cover different node sets"])
    if fmt == "json":
        obj = {
            "nodes": [
                {
                    "id": node.class_code,
                    "size": node.size,
                    "community": partition.community[node.class_code],
                    "x": layout.positions[node.class_code][0],
                    "y": layout.positions[node.class_code][1],
                }
                for node in sorted(graph.nodes, key=lambda n: n.class_code)
            ],
            "edges": [
                {"from": e.source, "to": e.target, "weight": e.weight}
                for e in sorted(graph.edges, key=lambda e: (e.source, e.target))
            ],
        }
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")
    elif fmt == "graphml":
        lines = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<graphml xmlns="{GRAPHML_NS}">',
            '  <key id="size" for="node" attr.name="size" attr.type="double"/>',
            '  <key id="community" for="node" attr.name="community" attr.type="int"/>',
            '  <key id="x" for="node" attr.name="x" attr.type="double"/>',
            '  <key id="y" for="node" attr.name="y" attr.type="double"/>',
            '  <key id="weight" for="edge" attr.name="weight" attr.type="double"/>',
            '  <graph id="G" edgedefault="directed">',
        ]
        for node in sorted(graph.nodes, key=lambda n: n.class_code):
            px, py = layout.positions[node.class_code]
            lines.append(f'    <node id="{escape(node.class_code, {chr(34): "&quot;"})}">')
            lines.append(f'      <data key="size">{node.size!r}</data>')
            lines.append(f'      <data key="community">{partition.community[node.class_code]}</data>')
            lines.append(f'      <data key="x">{px!r}</data>')
            lines.append(f'      <data key="y">{py!r}</data>')
            lines.append("    </node>")
        for e in sorted(graph.edges, key=lambda e: (e.source, e.target)):
            src = escape(e.source, {chr(34): "&quot;"})
            tgt = escape(e.target, {chr(34): "&quot;"})
            lines.append(f'    <edge source="{src}" target="{tgt}">')
            lines.append(f'      <data key="weight">{e.weight!r}</data>')
            lines.append("    </edge>")
        lines.append("  </graph>")
        lines.append("</graphml>")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines))
            fh.write("\n")
    else:
        raise ValidationError([f"unknown graph format {fmt!r}"])


def load_graph(path: str, fmt: str) -> tuple[FlowGraph, dict[str, int], dict[str, tuple[float, float]]]:
    """Read back an exported graph: (graph, community map, positions)."""
    if fmt == "json":
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
        nodes = [GraphNode(rec["id"], float(rec["size"])) for rec in obj["nodes"]]
        edges = [GraphEdge(rec["from"], rec["to"], float(rec["weight"])) for rec in obj["edges"]]
        community = {rec["id"]: int(rec["community"]) for rec in obj["nodes"]}
        positions = {rec["id"]: (float(rec["x"]), float(rec["y"])) for rec in obj["nodes"]}
        return FlowGraph(nodes, edges), community, positions
    if fmt == "graphml":
        ns = {"g": GRAPHML_NS}
        try:
            root = ET.parse(path).getroot()
        except ET.ParseError as e:
            raise ParseError(f"{path}: invalid GraphML: {e}") from None
        nodes, community, positions = [], {}, {}
        for el in root.findall(".//g:node", ns):
            data = {d.get("key"): d.text or "" for d in el.findall("g:data", ns)}
            code = el.get("id") or ""
            nodes.append(GraphNode(code, float(data["size"])))
            community[code] = int(data["community"])
            positions[code] = (float(data["x"]), float(data["y"]))
        edges = [
            GraphEdge(
                el.get("source") or "",
                el.get("target") or "",
                float({d.get("key"): d.text or "" for d in el.findall("g:data", ns)}["weight"]),
            )
            for el in root.findall(".//g:edge", ns)
        ]
        return FlowGraph(nodes, edges), community, positions
    raise ValidationError([f"unknown graph format {fmt!r}"])
