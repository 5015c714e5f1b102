"""Versioned binary serialization of a built index.

Layout: an 8-byte header (magic + format version), a section table, then
the section payloads.  Everything is little-endian; distances are 64-bit
floats, so loaded indexes answer queries bit-for-bit like the in-memory
build.  A hash of the source grid is embedded and checked on load so an
index can never be queried against the wrong map.  Build timings are
deliberately not stored: files from identical inputs are byte-identical.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

from .hub_labels import HubLabel
from .index import EhlIndex, Region
from .maps import ConvexVertex, PolygonalMap

MAGIC = b"HGIX"
VERSION = 1


class IndexFormatError(ValueError):
    """Raised when an index file is malformed or does not match the map."""


@dataclass(frozen=True)
class BuildMeta:
    mode: str
    budget_units: int
    alpha: float
    seed: int
    outcome: str


def map_hash(pmap: PolygonalMap) -> bytes:
    h = hashlib.sha256()
    h.update(struct.pack("<II", pmap.grid.width, pmap.grid.height))
    h.update(pmap.grid.blocked.tobytes())
    return h.digest()


def _pack_str(s: str) -> bytes:
    raw = s.encode()
    return struct.pack("<I", len(raw)) + raw


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, fmt: str):
        vals = struct.unpack_from("<" + fmt, self.data, self.pos)
        self.pos += struct.calcsize("<" + fmt)
        return vals

    def take_str(self) -> str:
        (n,) = self.take("I")
        raw = self.data[self.pos:self.pos + n]
        self.pos += n
        return raw.decode()


def _sec_labels(labels: list[list[HubLabel]]) -> bytes:
    parts = [struct.pack("<I", len(labels))]
    for lab in labels:
        parts.append(struct.pack("<I", len(lab)))
        for e in lab:
            parts.append(struct.pack("<IdI", e.hub, e.dist, e.next_hop))
    return b"".join(parts)


def _sec_vertices(vertices: list[ConvexVertex]) -> bytes:
    parts = [struct.pack("<I", len(vertices))]
    for v in vertices:
        parts.append(struct.pack("<ddI", float(v.x), float(v.y), v.obstacle))
    return b"".join(parts)


def _sec_regions(regions: list[Region | None]) -> bytes:
    parts = [struct.pack("<I", len(regions))]
    for r in regions:
        if r is None:
            parts.append(struct.pack("<B", 0))
            continue
        parts.append(struct.pack("<BId", 1, len(r.cells), r.score))
        for i, j in sorted(r.cells):
            parts.append(struct.pack("<II", i, j))
        parts.append(struct.pack("<I", len(r.groups)))
        for hub in sorted(r.groups):
            pairs = r.groups[hub]
            parts.append(struct.pack("<II", hub, len(pairs)))
            for via, dist in pairs:
                parts.append(struct.pack("<Id", via, dist))
    return b"".join(parts)


def save_index(path: str, index: EhlIndex, pmap: PolygonalMap, meta: BuildMeta) -> None:
    sections: list[tuple[bytes, bytes]] = [
        (b"maphash ", map_hash(pmap)),
        (b"grid    ", struct.pack("<IId", index.ncols, index.nrows, index.cell_size)),
        (b"meta    ", _pack_str(meta.mode) + _pack_str(meta.outcome)
         + struct.pack("<QdQ", meta.budget_units, meta.alpha, meta.seed)),
        (b"vertices", _sec_vertices(index.vertices)),
        (b"labels  ", _sec_labels(index.hub_labels)),
        (b"regions ", _sec_regions(index.regions)),
        (b"mapper  ", struct.pack("<I", len(index.mapper))
         + struct.pack(f"<{len(index.mapper)}i", *index.mapper)),
    ]
    header = MAGIC + struct.pack("<HH", VERSION, 0) + struct.pack("<I", len(sections))
    offset = len(header) + len(sections) * 24
    table = b""
    body = b""
    for name, payload in sections:
        table += name + struct.pack("<QQ", offset, len(payload))
        body += payload
        offset += len(payload)
    with open(path, "wb") as fh:
        fh.write(header + table + body)


def load_index(path: str, pmap: PolygonalMap) -> tuple[EhlIndex, BuildMeta]:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != MAGIC:
        raise IndexFormatError("not an index file (bad magic)")
    version, _ = struct.unpack_from("<HH", data, 4)
    if version != VERSION:
        raise IndexFormatError(f"unsupported format version {version}")
    (nsec,) = struct.unpack_from("<I", data, 8)
    sections: dict[str, bytes] = {}
    pos = 12
    for _ in range(nsec):
        name = data[pos:pos + 8].decode().strip()
        off, length = struct.unpack_from("<QQ", data, pos + 8)
        sections[name] = data[off:off + length]
        pos += 24

    if sections["maphash"] != map_hash(pmap):
        raise IndexFormatError("index was built for a different map")

    ncols, nrows, cell_size = struct.unpack("<IId", sections["grid"])

    r = _Reader(sections["meta"])
    mode = r.take_str()
    outcome = r.take_str()
    budget, alpha, seed = r.take("QdQ")
    meta = BuildMeta(mode, budget, alpha, seed, outcome)

    r = _Reader(sections["vertices"])
    (nv,) = r.take("I")
    vertices = []
    for vid in range(nv):
        x, y, obstacle = r.take("ddI")
        xi, yi = int(x), int(y)
        vertices.append(ConvexVertex(vid, xi if xi == x else x,
                                     yi if yi == y else y, obstacle))

    r = _Reader(sections["labels"])
    (nl,) = r.take("I")
    labels: list[list[HubLabel]] = []
    for _ in range(nl):
        (k,) = r.take("I")
        labels.append([HubLabel(*r.take("IdI")) for _ in range(k)])

    r = _Reader(sections["regions"])
    (nr,) = r.take("I")
    regions: list[Region | None] = []
    for rid in range(nr):
        (live,) = r.take("B")
        if not live:
            regions.append(None)
            continue
        ncells, score = r.take("Id")
        cells = {tuple(r.take("II")) for _ in range(ncells)}
        (ngroups,) = r.take("I")
        groups: dict[int, list[tuple[int, float]]] = {}
        for _ in range(ngroups):
            hub, npairs = r.take("II")
            groups[hub] = [tuple(r.take("Id")) for _ in range(npairs)]
        regions.append(Region(rid, cells, groups, score=score))

    r = _Reader(sections["mapper"])
    (nm,) = r.take("I")
    mapper = list(r.take(f"{nm}i"))

    index = EhlIndex(cell_size, ncols, nrows, regions, mapper,
                     vertices=vertices, hub_labels=labels)
    return index, meta
