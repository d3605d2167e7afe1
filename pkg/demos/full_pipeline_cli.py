"""The whole pipeline through the command-line interface.

Every step of the toolkit is also a CLI subcommand, so the full chain
runs without writing Python: synthesize fixture scans, compute saliency
from exported tensors, attribute saliency to layers, build per-class
profiles, score scans against them, and render an overlay. This script
drives the installed CLI with subprocess and shows each command it runs.
"""

import csv
import json
import subprocess
import sys
import tempfile
from pathlib import Path

work = Path(tempfile.mkdtemp(prefix="layerfocus_demo_"))
classes = ("CNV", "DME", "DRUSEN", "NORMAL")


def run(*args):
    cmd = [sys.executable, "-m", "layerfocus", *map(str, args)]
    print("$", " ".join(cmd[2:]))
    subprocess.run(cmd, check=True)


# 1. synthesize a cohort of (saliency, label map) fixture pairs
scans = work / "scans"
run("synth", "--seed", 11, "--height", 72, "--width", 48, "--count", 8,
    "--out-dir", scans)

# 2. sidecar metadata: two scans per class, all classified correctly
meta = work / "meta.csv"
with open(meta, "w", newline="") as fh:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["scan_id", "predicted", "truth"])
    for i in range(8):
        writer.writerow([f"scan{i:03d}", classes[i % 4], classes[i % 4]])

# 3. attribute every scan's saliency across its segmented layers
records = work / "records.csv"
run("attribute", "--saliency-dir", scans, "--labels-dir", scans,
    "--meta", meta, "--out", records)

# 4. build per-class profiles from the correctly classified records
profiles = work / "profiles.json"
run("profile", "--records", records, "--out", profiles)

# 5. score every record against its predicted class profile
scores = work / "scores.csv"
run("score", "--records", records, "--profiles", profiles,
    "--threshold", "3.0", "--out", scores)

# 6. histogram of the differences, and an overlay of the first scan
run("histogram", "--scores", scores, "--bin-width", "1.0",
    "--out", work / "histogram.csv")
run("overlay", "--saliency", scans / "scan000.rlt",
    "--labels", scans / "scan000.pgm", "--alpha", "0.5",
    "--out", work / "scan000_overlay.ppm")

print(f"\nartifacts in {work}:")
for path in sorted(work.rglob("*")):
    if path.is_file():
        print(f"  {path.relative_to(work)}")

flagged = sum(1 for row in csv.DictReader(open(scores)) if row["flagged"] == "true")
built = json.loads(profiles.read_text())
print(f"\nprofiles built for {sorted(built)} ({built[classes[0]]['n']} scans each)")
print(f"{flagged} flagged layer rows in {scores.name}")
