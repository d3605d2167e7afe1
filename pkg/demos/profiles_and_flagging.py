"""Per-class attribution profiles and z-score flagging of odd scans.

Across many correctly classified scans, each class has a stable
signature of which layers the model attends to. The profile stores the
per-layer mean and standard deviation; a new scan is scored against the
profile of its predicted class, and any layer whose z-score reaches the
threshold flags the scan for review. This script fabricates a cohort,
builds profiles, then scores one conforming scan and one outlier.
"""

import numpy as np

from layerfocus import (
    RETINAL_LAYERS,
    AttributionRecord,
    build_profiles,
    deviation_histogram,
    deviation_report,
    flag,
)

rng = np.random.default_rng(42)

# a fabricated cohort: the model looks mostly at ONL-ISM on healthy
# scans and shifts toward ILM/INL on disease
signatures = {
    "NORMAL": np.array([8.0, 20.5, 8.8, 10.0, 30.9, 13.2, 8.6]),
    "CNV": np.array([5.4, 14.0, 12.3, 12.7, 35.9, 9.9, 9.8]),
}
records = []
for cls, signature in signatures.items():
    for i in range(40):
        noisy = np.clip(signature + rng.normal(0.0, 1.5, size=7), 0.1, None)
        noisy = noisy / noisy.sum() * 100.0
        records.append(AttributionRecord(f"{cls.lower()}_{i:02d}", cls, cls, noisy))

profiles = build_profiles(records)
for cls, profile in profiles.items():
    print(f"{cls}: n={profile.n}")
    print(f"  mean {np.round(profile.mean, 2)}")
    print(f"  std  {np.round(profile.std, 2)}")

# a conforming scan: drawn from the same recipe as the cohort
typical = signatures["NORMAL"] + rng.normal(0.0, 1.0, size=7)
typical = typical / typical.sum() * 100.0
report = deviation_report(typical, profiles["NORMAL"])
verdict = flag(report, threshold=3.0)
print(f"\ntypical scan: suspicious={verdict.suspicious}, max |z| {verdict.max_abs_z:.2f}")

# an outlier: the model fixated on the retinal surface instead
odd = np.array([35.0, 18.0, 9.0, 8.0, 18.0, 7.0, 5.0])
report = deviation_report(odd, profiles["NORMAL"])
verdict = flag(report, threshold=3.0)
print(f"surface-fixated scan: suspicious={verdict.suspicious}")
for name, z in zip(RETINAL_LAYERS, report.z):
    marker = " <-- offends" if name in verdict.offending_layers else ""
    print(f"  {name:8s} z={z:+6.2f}{marker}")

# distribution of all NORMAL differences from their own profile
diffs = np.concatenate(
    [
        deviation_report(r.attribution, profiles["NORMAL"]).difference
        for r in records
        if r.truth == "NORMAL"
    ]
)
hist = deviation_histogram(diffs, bin_width=1.0)
print("\ndifference histogram over the healthy cohort (bin width 1):")
for left, count in zip(hist.bin_left, hist.counts):
    print(f"  [{left:+5.1f}, {left + 1:+5.1f})  {'*' * int(count)}")
