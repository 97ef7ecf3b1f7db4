"""End-to-end CLI pipeline on synthetic image containers.

Builds tiny 8x8x3 byte-image datasets (the outliers carry vertical
pixel correlation), then drives the fit / score / eval / sweep-l
commands exactly as one would with real CIFAR-10 batches.
"""

import pathlib
import tempfile

import numpy as np

from wntest.cli import main
from wntest.tensor_io import RANGE_RAW, ImageGeometry, SampleMatrix, write_container

work = pathlib.Path(tempfile.mkdtemp(prefix="wntest-demo-"))
rng = np.random.default_rng(0)


def make(path, n, vertical_corr=0.0):
    imgs = rng.integers(0, 256, (n, 8, 8, 3)).astype(np.float64)
    if vertical_corr:
        for i in range(1, 8):
            imgs[:, i] = vertical_corr * imgs[:, i - 1] + (1 - vertical_corr) * imgs[:, i]
    write_container(path, SampleMatrix(ImageGeometry(8, 8, 3), np.round(imgs).reshape(n, -1), RANGE_RAW))


make(work / "train.oodt", 500)
make(work / "test.oodt", 200)
make(work / "smooth.oodt", 200, vertical_corr=0.6)

cfg = work / "run.cfg"
cfg.write_text(
    f"train={work / 'train.oodt'}\n"
    f"inlier_test={work / 'test.oodt'}\n"
    f"outlier.smooth={work / 'smooth.oodt'}\n"
    f"model={work / 'model'}\n"
    f"out={work / 'out'}\n"
    "eps=1e-2\nlags=vertical\nL=48\ntests=wn,lh,lh2s\nbootstrap_trials=300\n"
)

for argv in (
    ["fit", "--config", str(cfg)],
    ["score", "--config", str(cfg)],
    ["eval", "--config", str(cfg), "--seed", "0"],
    ["sweep-l", "--config", str(cfg), "24,48,72"],
):
    print(f"\n$ wntest {' '.join(argv)}")
    rc = main(argv)
    assert rc == 0, rc

print(f"\nartifacts in {work}/out: report.csv, ranks.csv, sweep_l.csv, per-dataset scores")
