"""Text and figure renderings of computed results."""

import csv
import io
import json
from typing import Dict, List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.collections import LineCollection  # noqa: E402
from matplotlib.patches import Polygon  # noqa: E402

from coordination_core.fields.cyclotomic import CycloInt  # noqa: E402
from coordination_core.fields.quadfield import QuadRat  # noqa: E402
from coordination_core.geometry.polygeom import ConvexPolygon  # noqa: E402
from coordination_core.tilings.coordnum import BfsResult, CoordEntry  # noqa: E402
from coordination_core.tilings.frequencies import ShellEntry  # noqa: E402
from coordination_core.tilings.modelset import Patch  # noqa: E402

SVG_DECIMALS = 6
# Fixed ids and no timestamp, so reruns write identical files.
plt.rcParams["svg.hashsalt"] = "coordination-core"
plt.rcParams["svg.fonttype"] = "none"


def _csv(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _json(document: object) -> str:
    return json.dumps(document, indent=2) + "\n"


def _quad_columns(value: QuadRat) -> List[object]:
    return [value.p, value.q, value.r]


def coordination_csv(entries: Sequence[CoordEntry]) -> str:
    rows = [[entry.k, *_quad_columns(entry.s_c), entry.s_c.to_decimal(3), entry.method] for entry in entries]
    return _csv(["k", "p", "q", "r", "float", "method"], rows)


def contributions_csv(entries: Sequence[CoordEntry]) -> str:
    rows = [
        [entry.k, *_quad_columns(r_sq), *_quad_columns(part), part.to_decimal(6)]
        for entry in entries
        for r_sq, part in entry.contributions
    ]
    return _csv(["k", "r_sq_p", "r_sq_q", "r_sq_r", "part_p", "part_q", "part_r", "part_float"], rows)


def coordination_json(entries: Sequence[CoordEntry], meta: Dict[str, object]) -> str:
    return _json({**meta, "entries": [entry.to_dict() for entry in entries]})


def shelling_csv(entries: Sequence[ShellEntry]) -> str:
    rows = [
        [*_quad_columns(entry.r_sq), entry.r_sq.to_decimal(6), *_quad_columns(entry.value),
         entry.value.to_decimal(6), entry.orbit_count, entry.symmetry_orbits]
        for entry in entries
    ]
    header = ["r_sq_p", "r_sq_q", "r_sq_r", "r_sq_float", "p", "q", "r", "float", "vectors", "orbits"]
    return _csv(header, rows)


def shelling_json(entries: Sequence[ShellEntry], meta: Dict[str, object]) -> str:
    return _json({**meta, "shells": [entry.to_dict() for entry in entries]})


def nu_text(value: QuadRat) -> str:
    return f"{value}\n"


def nu_csv(z: CycloInt, value: QuadRat) -> str:
    return _csv(["a0", "a1", "a2", "a3", "n", "p", "q", "r", "float"],
                [[*z.coords, z.n, *_quad_columns(value), value.to_decimal(6)]])


def nu_json(z: CycloInt, value: QuadRat) -> str:
    return _json({"z": list(z.coords), "n": z.n, "nu": value.to_dict(), "float": float(value)})


def bfs_csv(result: BfsResult) -> str:
    return _csv(["k", "mean", "centers"], [[k, f"{mean:.6f}", result.centers] for k, mean in result.rows])


def bfs_json(result: BfsResult) -> str:
    return _json(result.to_dict())


def window_csv(polygon: ConvexPolygon) -> str:
    rows = [
        [*_quad_columns(v.x), *_quad_columns(v.y), f"{x:.{SVG_DECIMALS}f}", f"{y:.{SVG_DECIMALS}f}"]
        for v, (x, y) in zip(polygon.vertices, polygon.float_vertices())
    ]
    return _csv(["x_p", "x_q", "x_r", "y_p", "y_q", "y_r", "x_float", "y_float"], rows)


def window_json(polygon: ConvexPolygon, meta: Dict[str, object]) -> str:
    return _json({**meta, **polygon.to_dict(), "svg_path": polygon.to_svg_path(SVG_DECIMALS)})


def patch_csv(patch: Patch) -> str:
    rows = [
        [i, *vertex.coords, f"{x:.{SVG_DECIMALS}f}", f"{y:.{SVG_DECIMALS}f}", len(patch.adjacency[i])]
        for i, (vertex, (x, y)) in enumerate(zip(patch.vertices, patch.positions.tolist()))
    ]
    return _csv(["index", "a0", "a1", "a2", "a3", "x", "y", "degree"], rows)


def patch_json(patch: Patch) -> str:
    return _json({**patch.to_dict(), "statistics": patch.statistics()})


def fig2_rows(entries: Sequence[CoordEntry], deltas: Sequence[Tuple[int, QuadRat]]) -> List[List[object]]:
    by_k = {entry.k: entry for entry in entries}
    return [
        [k, *_quad_columns(by_k[k].s_c), by_k[k].s_c.to_decimal(6), *_quad_columns(delta), delta.to_decimal(6)]
        for k, delta in deltas
    ]


def fig2_csv(entries: Sequence[CoordEntry], deltas: Sequence[Tuple[int, QuadRat]]) -> str:
    header = ["k", "s_c_p", "s_c_q", "s_c_r", "s_c_float", "delta_p", "delta_q", "delta_r", "delta_float"]
    return _csv(header, fig2_rows(entries, deltas))


def fig2_json(entries: Sequence[CoordEntry], deltas: Sequence[Tuple[int, QuadRat]]) -> str:
    by_k = {entry.k: entry for entry in entries}
    return _json({
        "tiling": "ammann-beenker",
        "series": [
            {"k": k, "s_c": by_k[k].s_c.to_dict(), "delta": delta.to_dict(), "delta_float": float(delta)}
            for k, delta in deltas
        ],
    })


def report_json(checks: Sequence[Dict[str, object]]) -> str:
    return _json({"checks": list(checks), "passed": all(check["passed"] for check in checks)})


def report_text(checks: Sequence[Dict[str, object]]) -> str:
    lines = [f"{'PASS' if check['passed'] else 'FAIL'} {check['name']}: {check['detail']}" for check in checks]
    return "\n".join(lines) + "\n"


def _svg(fig) -> str:
    buffer = io.StringIO()
    fig.savefig(buffer, format="svg", metadata={"Date": None}, bbox_inches="tight")
    plt.close(fig)
    return buffer.getvalue()


def _rounded(values) -> np.ndarray:
    return np.round(np.asarray(values, dtype=np.float64), SVG_DECIMALS)


def window_svg(polygon: ConvexPolygon, title: Optional[str] = None) -> str:
    fig, ax = plt.subplots(figsize=(4, 4))
    ax.add_patch(Polygon(_rounded(polygon.float_vertices()), closed=True, fill=False, linewidth=1.0))
    x_low, y_low, x_high, y_high = polygon.float_bbox()
    pad = 0.05 * max(x_high - x_low, y_high - y_low)
    ax.set_xlim(x_low - pad, x_high + pad)
    ax.set_ylim(y_low - pad, y_high + pad)
    ax.set_aspect("equal")
    ax.set_axis_off()
    if title:
        ax.set_title(title)
    return _svg(fig)


def patch_svg(patch: Patch) -> str:
    """Vertices as dots, edges as segments."""
    positions = _rounded(patch.positions)
    segments = [(positions[i], positions[j]) for i, j in patch.edges()]
    fig, ax = plt.subplots(figsize=(8, 8))
    ax.add_collection(LineCollection(segments, colors="black", linewidths=0.5))
    ax.scatter(positions[:, 0], positions[:, 1], s=2, color="tab:red", zorder=2)
    radius = float(patch.radius)
    ax.set_xlim(-radius, radius)
    ax.set_ylim(-radius, radius)
    ax.set_aspect("equal")
    ax.set_axis_off()
    return _svg(fig)


def fig2_svg(entries: Sequence[CoordEntry], deltas: Sequence[Tuple[int, QuadRat]]) -> str:
    """s_c(k) and its consecutive differences against k, side by side."""
    ks = np.array([entry.k for entry in entries])
    values = _rounded([float(entry.s_c) for entry in entries])
    delta_ks = np.array([k for k, _ in deltas])
    delta_values = _rounded([float(delta) for _, delta in deltas])
    fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4))
    left.plot(ks, values, ".", markersize=2)
    left.set_xlabel("k")
    left.set_ylabel("s_c(k)")
    right.plot(delta_ks, delta_values, ".", markersize=2)
    right.set_xlabel("k")
    right.set_ylabel("s_c(k+1) - s_c(k)")
    fig.tight_layout()
    return _svg(fig)
