"""Chunk I/O and a synthetic drifting-stream generator.

CSV layout: one row per instance, feature columns first, the binary label
last. An optional header names the columns f0..f{d-1},label. Floats are
written in shortest round-trip form, so write followed by read reproduces a
chunk exactly.

The generator draws two Gaussian clusters on opposite sides of a linear
decision boundary and labels each point by the side of the boundary it falls
on, then flips labels with a configured probability. Drift rotates the
boundary while leaving the clusters alone, so the input distribution stays
put and only the labeling rule moves: a sudden drift swaps in the rotated
boundary at one chunk, a gradual drift interpolates the rotation across a
span of chunks.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import Chunk, validate_chunk
from .errors import ChunkFormatError, LabelError, RaggedRowError

__all__ = ["DriftSpec", "StreamSpec", "read_chunk_csv", "write_chunk_csv", "generate_stream"]

DRIFT_KINDS = ("none", "sudden", "gradual")

# cluster geometry: centers sit at +-_CLUSTER_OFFSET along the boundary
# normal, with isotropic spread _CLUSTER_SPREAD around each center
_CLUSTER_OFFSET = 2.0
_CLUSTER_SPREAD = 0.5


@dataclass(frozen=True)
class DriftSpec:
    """What happens to the decision boundary over the stream.

    ``at_chunk`` is the first affected chunk (0-based stream position, so
    the initial chunk 0 is never drifted). ``magnitude`` scales the rotation
    up to a quarter turn at 1.0. ``gradual_span`` spreads the rotation over
    that many chunks for kind "gradual".
    """

    kind: str = "none"
    at_chunk: int = 1
    magnitude: float = 1.0
    gradual_span: int = 1

    def __post_init__(self) -> None:
        if self.kind not in DRIFT_KINDS:
            raise ValueError(f"drift kind must be one of {DRIFT_KINDS}, got {self.kind!r}")
        if self.at_chunk < 1:
            raise ValueError(f"at_chunk must be >= 1, got {self.at_chunk}")
        if not 0.0 < self.magnitude <= 1.0:
            raise ValueError(f"magnitude must lie in (0, 1], got {self.magnitude}")
        if self.gradual_span < 1:
            raise ValueError(f"gradual_span must be >= 1, got {self.gradual_span}")


@dataclass(frozen=True)
class StreamSpec:
    n_chunks: int
    chunk_size: int
    dimensionality: int
    class_balance: float = 0.5
    noise: float = 0.0
    seed: int = 0
    drift: DriftSpec = field(default_factory=DriftSpec)

    def __post_init__(self) -> None:
        if self.n_chunks < 1:
            raise ValueError(f"n_chunks must be >= 1, got {self.n_chunks}")
        if self.chunk_size < 0:
            raise ValueError(f"chunk_size must be >= 0, got {self.chunk_size}")
        if self.dimensionality < 2:
            raise ValueError(f"dimensionality must be >= 2, got {self.dimensionality}")
        if not 0.0 < self.class_balance < 1.0:
            raise ValueError(f"class_balance must lie in (0, 1), got {self.class_balance}")
        if not 0.0 <= self.noise < 1.0:
            raise ValueError(f"noise must lie in [0, 1), got {self.noise}")


def read_chunk_csv(path, has_header: bool = True) -> Chunk:
    """Parse a chunk file. The chunk id is the file's stem.

    Raises RaggedRowError on inconsistent column counts, LabelError on a
    label outside {0, 1}, and ChunkFormatError on anything else, always
    naming the offending 1-based row.
    """
    path = Path(path)
    features: list[list[float]] = []
    labels: list[int] = []
    width: int | None = None
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for row_no, row in enumerate(reader, start=1):
            if row_no == 1 and has_header:
                width = len(row)
                if width < 2:
                    raise ChunkFormatError(f"{path}: header has {width} columns, need at least 2")
                continue
            if not row:
                continue
            if width is None:
                width = len(row)
                if width < 2:
                    raise ChunkFormatError(f"{path}: row {row_no} has {width} columns, need at least 2")
            if len(row) != width:
                raise RaggedRowError(
                    f"{path}: row {row_no} has {len(row)} columns, expected {width}"
                )
            values = []
            for col, cell in enumerate(row[:-1]):
                try:
                    values.append(float(cell))
                except ValueError:
                    raise ChunkFormatError(
                        f"{path}: row {row_no}, column {col}: cannot parse {cell!r} as a number"
                    ) from None
            try:
                label_value = float(row[-1])
            except ValueError:
                raise LabelError(
                    f"{path}: row {row_no}: cannot parse label {row[-1]!r}"
                ) from None
            if label_value not in (0.0, 1.0):
                raise LabelError(
                    f"{path}: row {row_no}: label {row[-1]!r} not in {{0, 1}}"
                )
            features.append(values)
            labels.append(int(label_value))
    if width is None:
        raise ChunkFormatError(f"{path}: empty file with no header to infer dimensionality")
    chunk = Chunk.from_arrays(path.stem, np.array(features, dtype=np.float64).reshape(len(features), width - 1), np.array(labels, dtype=np.int64))
    result = validate_chunk(chunk)
    if not result.ok:
        first = result.violations[0]
        raise ChunkFormatError(
            f"{path}: row {(first.index or 0) + (2 if has_header else 1)}: {first.reason}"
        )
    return chunk


def write_chunk_csv(chunk: Chunk, path, header: bool = True) -> None:
    """Write a chunk in the layout read_chunk_csv expects. Floats use their
    shortest round-trip representation; lines end with LF."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if header:
            writer.writerow([f"f{i}" for i in range(chunk.dimensionality)] + ["label"])
        for inst in chunk.instances:
            writer.writerow([repr(float(v)) for v in inst.features] + [int(inst.label)])


def _boundary_angle(drift: DriftSpec, chunk_index: int) -> float:
    """Rotation fraction (of magnitude * 90 degrees) applied at this chunk."""
    if drift.kind == "none" or chunk_index < drift.at_chunk:
        return 0.0
    if drift.kind == "sudden":
        return 1.0
    progressed = chunk_index - drift.at_chunk + 1
    return min(progressed / drift.gradual_span, 1.0)


def generate_stream(spec: StreamSpec) -> list[Chunk]:
    """Generate the full stream deterministically from the seed.

    The boundary normal and the rotation plane come from one child seed;
    every chunk draws from its own child seed, so chunks could be generated
    independently.
    """
    root = np.random.SeedSequence(spec.seed)
    children = root.spawn(spec.n_chunks + 1)
    geometry = np.random.default_rng(children[0])
    normal = geometry.standard_normal(spec.dimensionality)
    normal /= np.linalg.norm(normal)
    # boost the normal's largest coordinate so the dominant variance
    # direction of every chunk keeps a stable, sign-consistent anchor entry
    # under per-chunk component fits (real streams of this shape have one
    # heavily dominant direction; a near-tie between coordinates would make
    # the fitted orientation flip with sampling noise)
    anchor = int(np.argmax(np.abs(normal)))
    normal[anchor] = math.copysign(1.0, normal[anchor])
    normal /= np.linalg.norm(normal)
    other = geometry.standard_normal(spec.dimensionality)
    other -= (other @ normal) * normal
    other /= np.linalg.norm(other)

    chunks = []
    for i in range(spec.n_chunks):
        rng = np.random.default_rng(children[i + 1])
        sides = np.where(rng.random(spec.chunk_size) < spec.class_balance, 1.0, -1.0)
        points = sides[:, None] * (_CLUSTER_OFFSET * normal) + rng.normal(
            0.0, _CLUSTER_SPREAD, (spec.chunk_size, spec.dimensionality)
        )
        theta = _boundary_angle(spec.drift, i) * spec.drift.magnitude * math.pi / 2.0
        boundary = math.cos(theta) * normal + math.sin(theta) * other
        labels = (points @ boundary > 0.0).astype(np.int64)
        if spec.noise > 0.0:
            flips = rng.random(spec.chunk_size) < spec.noise
            labels = labels ^ flips
        chunks.append(Chunk.from_arrays(f"chunk_{i:03d}", points, labels))
    return chunks
