"""Scoring predicted mattes: SAD / MSE / MAD and their (E) variants.

Per entity the raw absolute-difference sum, mean squared error, and mean
absolute difference are computed against the ground-truth visible alpha.
Entity-averaged aggregates mean over every scored record; image-averaged
(E) variants mean within each image first, which penalizes models that
cannot tell apart entities sharing an image. Reported SAD applies the
usual 1e-3 scale to the raw pixel sum.
"""

import numpy as np
from pathlib import Path

from matteforge import BuildConfig, build_dataset, evaluate_run
from matteforge.raster import load_alpha, save_alpha
from _assets import demo_backgrounds, demo_pool, demo_tables

out_dir = Path(__file__).parent / "output" / "evalset"
catalog = demo_pool("train", humans=6, animals=2, objects=2)
config = BuildConfig(master_seed=7, composites_per_group_train=3,
                     extra_random_train=1)
manifest = build_dataset(config, catalog, demo_backgrounds(),
                         out_dir=out_dir, tables=demo_tables())

# a perfect predictor: copy the ground truth
perfect = out_dir / "pred_perfect"
# a sloppy predictor: binarize the matte (loses all soft edges)
sloppy = out_dir / "pred_binarized"
for image in manifest.images:
    for entity in image.entities:
        gt = load_alpha(out_dir / entity.visible_alpha_path)
        save_alpha(perfect / image.image_id / f"{entity.entity_id}.png", gt)
        save_alpha(sloppy / image.image_id / f"{entity.entity_id}.png",
                   (gt > 0.5).astype(np.float64))

for name, pred in (("perfect", perfect), ("binarized", sloppy)):
    report = evaluate_run(pred, manifest, setting="expression",
                          manifest_dir=out_dir)
    print(f"{name:10s} SAD={report.sad:.4f} MSE={report.mse:.5f} "
          f"MAD={report.mad:.5f} | SAD(E)={report.sad_e:.4f} "
          f"MSE(E)={report.mse_e:.5f} MAD(E)={report.mad_e:.5f}")
    report.write(out_dir / f"report_{name}.json")

print(f"\nreports written next to the dataset in {out_dir}")
