"""Index file round-trips, integrity checks, and byte-level determinism."""

import pytest

from hubgrid.compress import CompressionConfig, compress
from hubgrid.hub_labels import build_hub_labels
from hubgrid.index import build_ehl
from hubgrid.io import BuildMeta, IndexFormatError, load_index, map_hash, save_index
from hubgrid.maps import convex_vertices, extract_obstacles
from hubgrid.visibility import build_visibility_graph

from mapgen import small_random_map

META = BuildMeta("uniform", 123, 0.2, 7, "fit")


@pytest.fixture()
def built(tmp_path):
    pmap = extract_obstacles(small_random_map(55))
    verts = convex_vertices(pmap)
    labels = build_hub_labels(build_visibility_graph(pmap, verts))
    index = build_ehl(pmap, labels, verts)
    compress(index, CompressionConfig(index.memory_units // 2))
    return pmap, index


def test_roundtrip_preserves_everything(tmp_path, built):
    pmap, index = built
    path = str(tmp_path / "x.idx")
    save_index(path, index, pmap, META)
    loaded, meta = load_index(path, pmap)
    assert meta == META
    assert (loaded.cell_size, loaded.ncols, loaded.nrows) == \
           (index.cell_size, index.ncols, index.nrows)
    assert loaded.mapper == index.mapper
    assert [(v.id, v.x, v.y, v.obstacle) for v in loaded.vertices] == \
           [(v.id, v.x, v.y, v.obstacle) for v in index.vertices]
    assert loaded.hub_labels == index.hub_labels
    for a, b in zip(loaded.regions, index.regions):
        assert (a is None) == (b is None)
        if a is not None:
            assert a.cells == b.cells and a.groups == b.groups and a.score == b.score


def test_identical_builds_are_byte_identical(tmp_path):
    paths = []
    for k in range(2):
        pmap = extract_obstacles(small_random_map(56))
        verts = convex_vertices(pmap)
        labels = build_hub_labels(build_visibility_graph(pmap, verts))
        index = build_ehl(pmap, labels, verts)
        compress(index, CompressionConfig(index.memory_units // 3))
        path = str(tmp_path / f"{k}.idx")
        save_index(path, index, pmap, META)
        paths.append(path)
    a, b = (open(p, "rb").read() for p in paths)
    assert a == b


def test_wrong_map_is_rejected(tmp_path, built):
    pmap, index = built
    path = str(tmp_path / "x.idx")
    save_index(path, index, pmap, META)
    other = extract_obstacles(small_random_map(57))
    assert map_hash(other) != map_hash(pmap)
    with pytest.raises(IndexFormatError):
        load_index(path, other)


def test_bad_magic_is_rejected(tmp_path, built):
    pmap, _ = built
    path = tmp_path / "junk.idx"
    path.write_bytes(b"NOPE" + bytes(64))
    with pytest.raises(IndexFormatError):
        load_index(str(path), pmap)
