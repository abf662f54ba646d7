"""Annotation parsing and polygon rasterization against a brute-force oracle.

The oracle tests every pixel center with the classic even-odd ray cast
(one float expression per edge, strict comparisons) and must agree with the
scanline implementation on every pixel of every random polygon.
"""
from __future__ import annotations

import json

import numpy as np
import pytest

from pushbroom import (
    AnnotationParseError,
    InvalidInputError,
    LabelMappingError,
    NUM_CLASSES,
    harmonize_hyperspectral,
    load_palette,
    parse_annotations,
    rasterize,
)

from conftest import annotation_doc, square


def oracle_point_in_polygon(px: float, py: float, pts: list[tuple[float, float]]) -> bool:
    inside = False
    n = len(pts)
    j = n - 1
    for i in range(n):
        xi, yi = pts[i]
        xj, yj = pts[j]
        if (yi > py) != (yj > py):
            x_cross = (xj - xi) * (py - yi) / (yj - yi) + xi
            if px < x_cross:
                inside = not inside
        j = i
    return inside


def oracle_mask(width: int, height: int, shapes: list[tuple[list, int]]) -> np.ndarray:
    mask = np.zeros((height, width), dtype=np.uint8)
    for pts, class_index in shapes:
        for y in range(height):
            for x in range(width):
                if oracle_point_in_polygon(x + 0.5, y + 0.5, [tuple(p) for p in pts]):
                    mask[y, x] = class_index
    return mask


def doc_json(width, height, shapes):
    return json.dumps(annotation_doc(width, height, shapes))


# parsing


def test_parse_empty_document():
    doc = parse_annotations(doc_json(8, 8, []))
    assert doc.image_width == 8 and doc.image_height == 8
    assert doc.shapes == ()


def test_parse_triangle_passthrough():
    doc = parse_annotations(doc_json(10, 10, [("cytoplasm", [[1, 1], [5, 1], [3, 4]])]))
    assert len(doc.shapes) == 1
    assert doc.shapes[0].label == "cytoplasm"
    assert len(doc.shapes[0].points) == 3


def test_parse_accepts_dict_and_bytes():
    raw = annotation_doc(6, 6, [("nuclear", square(1, 1, 4, 4))])
    from_dict = parse_annotations(raw)
    from_bytes = parse_annotations(json.dumps(raw).encode("utf-8"))
    assert from_dict == from_bytes


def test_parse_malformed_json_reports_location():
    with pytest.raises(AnnotationParseError) as err:
        parse_annotations('{"imageWidth": 6,', source="badfile.json")
    assert "badfile.json" in str(err.value)
    assert "line" in str(err.value)


def test_parse_requires_dims_and_shape_fields():
    with pytest.raises(AnnotationParseError):
        parse_annotations(json.dumps({"shapes": []}))
    with pytest.raises(AnnotationParseError):
        parse_annotations(json.dumps({"imageWidth": 5, "imageHeight": 5, "shapes": [{"points": [[0, 0]] * 3}]}))


def test_parse_rejects_short_polygons():
    with pytest.raises(AnnotationParseError):
        parse_annotations(doc_json(8, 8, [("nuclear", [[0, 0], [4, 4]])]))


def test_parse_unknown_labels_collected_and_sorted():
    shapes = [
        ("mitochondria", square(0, 0, 2, 2)),
        ("axon", square(2, 2, 4, 4)),
        ("mitochondria", square(1, 1, 3, 3)),
    ]
    with pytest.raises(LabelMappingError) as err:
        parse_annotations(doc_json(8, 8, shapes))
    msg = str(err.value)
    assert "axon" in msg and "mitochondria" in msg
    assert msg.index("axon") < msg.index("mitochondria")


def test_parse_clamps_vertices_to_bounds():
    doc = parse_annotations(doc_json(8, 8, [("nuclear", [[-5, 2], [20, 2], [4, 30]])]))
    xs = [p[0] for p in doc.shapes[0].points]
    ys = [p[1] for p in doc.shapes[0].points]
    assert min(xs) >= 0 and max(xs) <= 8
    assert min(ys) >= 0 and max(ys) <= 8


def test_palette_synonyms_resolve():
    palette = load_palette()
    assert palette["cytoplasm"] == 1
    assert palette["cancer cytoplasm"] == 1
    assert palette["nucleus"] == palette["nuclear"] == 2
    assert palette["red blood cell"] == palette["rbc"] == 3
    assert palette["background"] == 0
    assert all(v < NUM_CLASSES for v in palette.values())


# rasterization


def test_rasterize_empty_doc_is_zero():
    doc = parse_annotations(doc_json(6, 7, []))
    mask = rasterize(doc)
    assert mask.shape == (7, 6)
    assert not mask.any()


def test_rasterize_square_frozen_example():
    doc = parse_annotations(doc_json(6, 6, [("cancer cytoplasm", square(1, 1, 4, 4))]))
    mask = rasterize(doc)
    assert int((mask == 1).sum()) == 9
    assert np.array_equal(np.nonzero(mask)[0], np.repeat([1, 2, 3], 3))


def test_rasterize_paint_order_later_wins():
    shapes = [
        ("cancer cytoplasm", square(0, 0, 4, 4)),
        ("nuclear", square(2, 2, 4, 4)),
    ]
    doc = parse_annotations(doc_json(4, 4, shapes))
    mask = rasterize(doc)
    expect = oracle_mask(4, 4, [(square(0, 0, 4, 4), 1), (square(2, 2, 4, 4), 2)])
    assert np.array_equal(mask, expect)
    assert mask[3, 3] == 2 and mask[0, 0] == 1


def _random_polygon(rng, width, height, n_pts):
    pts = rng.uniform([0, 0], [width, height], size=(n_pts, 2))
    return [[float(x), float(y)] for x, y in pts]


@pytest.mark.parametrize("trial", range(25))
def test_rasterize_matches_pixel_center_oracle(trial):
    rng = np.random.default_rng(1000 + trial)
    width = int(rng.integers(4, 33))
    height = int(rng.integers(4, 33))
    label = ["cancer cytoplasm", "nuclear", "rbc", "fibroblast"][trial % 4]
    pts = _random_polygon(rng, width, height, int(rng.integers(3, 9)))
    doc = parse_annotations(doc_json(width, height, [(label, pts)]))
    mask = rasterize(doc)
    palette = load_palette()
    expect = oracle_mask(width, height, [(doc.shapes[0].points, palette[label])])
    assert np.array_equal(mask, expect)


def test_rasterize_histogram_equals_oracle_with_overlaps():
    rng = np.random.default_rng(77)
    shapes = [
        ("cancer cytoplasm", _random_polygon(rng, 24, 24, 6)),
        ("nuclear", _random_polygon(rng, 24, 24, 5)),
        ("rbc", _random_polygon(rng, 24, 24, 4)),
    ]
    doc = parse_annotations(doc_json(24, 24, shapes))
    mask = rasterize(doc)
    palette = load_palette()
    expect = oracle_mask(
        24, 24, [(s.points, palette[s.label]) for s in doc.shapes]
    )
    assert np.array_equal(mask, expect)
    assert np.array_equal(np.bincount(mask.reshape(-1), minlength=5),
                          np.bincount(expect.reshape(-1), minlength=5))


# harmonization


def test_harmonize_identity_on_three_classes():
    mask = np.array([[0, 1], [2, 0]], dtype=np.uint8)
    out = harmonize_hyperspectral(mask)
    assert np.array_equal(out, mask)
    assert out is not mask


def test_harmonize_rejects_cmos_only_classes():
    for bad in (3, 4):
        mask = np.full((2, 2), bad, dtype=np.uint8)
        with pytest.raises(InvalidInputError) as err:
            harmonize_hyperspectral(mask)
        assert str(bad) in str(err.value)
