import json
import os
import shutil
import subprocess
from pathlib import Path

import numpy as np
import pytest

import textdct

ROOT = Path(__file__).resolve().parents[2]


def tool(env, name):
    path = os.environ.get(env)
    if path and Path(path).exists():
        return path
    for candidate in (ROOT / "build" / "tools" / name, ROOT / "build" / "tests" / name):
        if candidate.exists():
            return str(candidate)
    return shutil.which(name)


CLI = tool("TEXTDCT_CLI", "textdct")
NMS_CASES = tool("TEXTDCT_NMS_CASES", "nms_cases")
needs_cli = pytest.mark.skipif(CLI is None, reason="textdct CLI not built")


def run(*args):
    return subprocess.run(args, check=True, capture_output=True, text=True).stdout


def random_masks(count, seed=3):
    rng = np.random.default_rng(seed)
    masks = []
    for _ in range(count):
        h, w = rng.integers(12, 90, size=2)
        yy, xx = np.mgrid[0:h, 0:w]
        m = np.zeros((h, w), dtype=np.uint8)
        for _ in range(rng.integers(1, 4)):
            cy, cx = rng.uniform(0, h), rng.uniform(0, w)
            ry, rx = rng.uniform(2, h / 2 + 2), rng.uniform(2, w / 2 + 2)
            m |= (((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 <= 1).astype(np.uint8)
        masks.append(m)
    return masks


def rows(m):
    return ["".join("1" if v else "0" for v in r) for r in m]


@pytest.fixture(scope="module")
def cli_vectors(tmp_path_factory):
    if CLI is None:
        pytest.skip("textdct CLI not built")
    d = tmp_path_factory.mktemp("codec")
    masks = random_masks(50)
    with open(d / "masks.jsonl", "w") as f:
        for i, m in enumerate(masks):
            f.write(json.dumps({"id": f"m{i}", "rows": rows(m)}) + "\n")
    run(CLI, "encode", "--masks", str(d / "masks.jsonl"), "--k", "32", "--n", "300",
        "--out", str(d / "vec.jsonl"))
    run(CLI, "decode", "--in", str(d / "vec.jsonl"), "--values", "--tau-b", "0.35",
        "--out", str(d / "dec.jsonl"))
    vec = [json.loads(l) for l in open(d / "vec.jsonl")]
    dec = [json.loads(l) for l in open(d / "dec.jsonl")]
    return masks, vec, dec


def test_version_in_lockstep():
    cmake = (ROOT / "CMakeLists.txt").read_text()
    assert f"set(TEXTDCT_VERSION {textdct.__version__})" in cmake


def test_encode_matches_cli(cli_vectors):
    masks, vec, _ = cli_vectors
    assert len(vec) == 50
    for m, v in zip(masks, vec):
        ours = textdct.encode(m, k=32, n=300)
        assert v["k"] == 32 and v["n"] == 300
        assert np.max(np.abs(ours - np.array(v["coeffs"]))) <= 1e-6


def test_decode_matches_cli(cli_vectors):
    _, vec, dec = cli_vectors
    for v, d in zip(vec, dec):
        grid = textdct.decode(np.array(v["coeffs"]), k=32)
        assert np.max(np.abs(grid.ravel() - np.array(d["values"]))) <= 1e-6
        assert rows(textdct.binarize(grid, 0.35)) == d["rows"]


@pytest.mark.skipif(NMS_CASES is None, reason="nms_cases not built")
def test_nms_index_sets_match_primary():
    cases = [json.loads(l) for l in run(NMS_CASES, "100", "13").splitlines()]
    assert len(cases) == 100
    for c in cases:
        boxes = np.array(c["boxes"], dtype=np.float64).reshape(-1, 4)
        scores = np.array(c["scores"], dtype=np.float32)
        kernels = np.array(c["kernel_ids"], dtype=np.int32)
        for name in ("s_nms", "nms", "k_nms"):
            got = getattr(textdct, name)(boxes, scores, kernels, iou_threshold=c["iou"])
            assert set(got.tolist()) == set(c[name]), name


@needs_cli
def test_labels_match_cli(tmp_path):
    run(CLI, "synth", "--count", "6", "--seed", "9", "--out", str(tmp_path / "c.jsonl"))
    run(CLI, "labels", "--corpus", str(tmp_path / "c.jsonl"), "--out", str(tmp_path / "l.jsonl"))
    corpus = [json.loads(l) for l in open(tmp_path / "c.jsonl")]
    labels = [json.loads(l) for l in open(tmp_path / "l.jsonl")]
    for rec, lab in zip(corpus, labels):
        polys = [np.array(i["points"]) for i in rec["instances"]]
        ignore = [i["ignore"] for i in rec["instances"]]
        ours = textdct.generate_labels(polys, rec["width"], rec["height"], ignore)
        assert ours["kernel"].ravel().tolist() == lab["kernel"]
        assert ours["ignore"].ravel().tolist() == lab["ignore"]
        assert ours["conflicts"] == lab["conflicts"]
        for cell in lab["cells"]:
            r, c = divmod(cell["cell"], lab["cols"])
            assert ours["assignment"][r, c] == cell["instance"]
            assert np.array_equal(ours["box_target"][r, c], np.float32(cell["box"]))


def test_empty_inputs():
    assert not textdct.encode(np.zeros((0, 0), np.uint8), 8, 10).any()
    assert not textdct.decode(np.zeros(0), 8).any()
    assert textdct.s_nms(np.zeros((0, 4)), np.zeros(0, np.float32)).size == 0
    labels = textdct.generate_labels([], 64, 48)
    assert labels["kernel"].shape == (6, 8) and labels["positives"] == 0
    assert labels["vectors"].shape == (0, 300)
    assert textdct.dice_loss(np.zeros(0, np.float32), np.zeros(0, np.float32)) == (0.0, True)


def test_shape_and_dtype_errors():
    with pytest.raises(TypeError, match="mask"):
        textdct.encode(np.zeros((4, 4), np.float32), 8, 10)
    with pytest.raises(ValueError, match="points"):
        textdct.encode_polygon(np.zeros((5, 3)), 8, 10)
    with pytest.raises(ValueError, match="scores"):
        textdct.s_nms(np.zeros((3, 4)), np.zeros(2, np.float32))
    with pytest.raises(ValueError, match="gt"):
        textdct.dice_loss(np.zeros(3, np.float32), np.zeros(4, np.float32))
    with pytest.raises(textdct.CodecError):
        textdct.decode(np.zeros(65), 8)


def test_losses():
    ones = np.ones(16, np.float32)
    assert textdct.dice_loss(ones, ones)[0] == pytest.approx(0.0)
    assert textdct.dice_loss(ones, np.zeros(16, np.float32))[0] == pytest.approx(1.0)
    box = np.array([0.0, 0.0, 2.0, 2.0])
    assert textdct.giou_loss(box, box) == (0.0, False)
    # Disjoint unit boxes: 1 - 0 + (121 - 2) / 121.
    far = textdct.giou_loss(np.array([0.0, 0, 1, 1]), np.array([10.0, 10, 11, 11]))[0]
    assert far == pytest.approx(1 + 119 / 121)
    np.testing.assert_array_equal(textdct.smooth_l1(np.array([-2.0, -0.5, 0.5, 2.0])),
                                  [1.5, 0.125, 0.125, 1.5])
    pred = np.array([0.5, -2.0], np.float32)
    assert textdct.mask_vector_loss(pred, np.zeros(2, np.float32), True) == 0.125 + 1.5
    assert textdct.mask_vector_loss(pred, np.zeros(2, np.float32), False) == 0.0
    assert textdct.total_loss(1.0, 2.0, 3.0, 0.5, 2.0)["total"] == 8.0


def test_postprocess_recovers_ground_truth():
    square = np.array([[40, 40], [120, 40], [120, 96], [40, 96]], dtype=float)
    lab = textdct.generate_labels([square], 160, 128)
    rows_, cols = lab["kernel"].shape
    scores = lab["kernel"].astype(np.float32)
    boxes = np.ascontiguousarray(lab["box_target"].transpose(2, 0, 1))
    vectors = np.zeros((300, rows_, cols), np.float32)
    vectors[:, lab["kernel"] == 1] = lab["vectors"][0][:, None]
    dets = textdct.postprocess(scores, boxes, vectors, 160, 128)
    assert len(dets) == 1
    x0, y0, x1, y1 = dets[0]["box"]
    assert (x0, y0, x1, y1) == pytest.approx((40, 40, 120, 96), abs=1e-4)
    assert len(dets[0]["contours"]) == 1
