"""Deterministic CSV/JSON output and run manifests."""

from __future__ import annotations

import hashlib
import json
import os

import numpy as np

from .exceptions import ParseError
from .integrate import Trajectory

FORMAT_VERSION = "dynpr-manifest/1"
MANIFEST_NAME = "manifest.json"


def fmt(x):
    # 17 significant digits round-trip any double
    return format(float(x), ".17g")


def write_scores(path, columns, index_name="node"):
    """Write ``{name: vector}`` as ``node,<name>...`` sorted by node."""
    names = list(columns)
    cols = [np.asarray(columns[c], dtype=float) for c in names]
    n = cols[0].size
    lines = [",".join([index_name] + names)]
    for i in range(n):
        lines.append(",".join([str(i)] + [fmt(c[i]) for c in cols]))
    write_text(path, "\n".join(lines) + "\n")


def read_scores(path, column=None):
    """Read a ``node,<score>...`` file; returns ``(header, matrix)`` or one column."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if len(header) < 2 or header[0] != "node":
            raise ParseError(f"{path}: expected a 'node,...' header", 1)
        try:
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise ParseError(f"{path}: {exc}") from None
    if data.shape[0] == 0:
        raise ParseError(f"{path}: no rows")
    order = np.argsort(data[:, 0], kind="stable")
    data = data[order]
    if column is None:
        return header[1:], data[:, 1:]
    if column not in header[1:]:
        raise ParseError(f"{path}: no column {column!r} (have {header[1:]})")
    return data[:, header.index(column)]


def write_trajectory(path, traj):
    """Long-form ``t,node,score`` rows ordered by time then node."""
    n = traj.n
    nodes = [str(i) for i in range(n)]
    chunks = ["t,node,score\n"]
    for t, x in zip(traj.times, traj.states):
        ts = fmt(t)
        chunks.append("".join(f"{ts},{nodes[i]},{fmt(x[i])}\n" for i in range(n)))
    write_text(path, "".join(chunks))


def read_trajectory(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "t,node,score":
            raise ParseError(f"{path}: expected header t,node,score", 1)
        try:
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise ParseError(f"{path}: {exc}") from None
    if data.size == 0:
        raise ParseError(f"{path}: trajectory has no rows")
    times, t_idx = np.unique(data[:, 0], return_inverse=True)
    nodes = data[:, 1].astype(np.int64)
    n = int(nodes.max()) + 1
    states = np.full((times.size, n), np.nan)
    states[t_idx, nodes] = data[:, 2]
    if np.isnan(states).any():
        raise ParseError(f"{path}: trajectory is missing (t, node) entries")
    return Trajectory(times, states)


def write_json(path, obj):
    write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def write_manifest(out_dir, command, params, inputs):
    """Record everything needed to re-run ``command``."""
    manifest = {
        "format_version": FORMAT_VERSION,
        "command": command,
        "params": params,
        "inputs": {k: {"path": v, "sha256": file_digest(v)} for k, v in sorted(inputs.items()) if v},
        "out": os.path.abspath(out_dir),
    }
    write_json(os.path.join(out_dir, MANIFEST_NAME), manifest)
    return manifest


def read_manifest(path):
    with open(path, encoding="utf-8") as fh:
        try:
            manifest = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from None
    if manifest.get("format_version") != FORMAT_VERSION:
        raise ParseError(f"{path}: unsupported manifest version {manifest.get('format_version')!r}")
    return manifest
