"""Tour of the on-disk formats: RLT tensors and PGM label maps.

The toolkit exchanges arrays through two tiny formats. RLT holds one
little-endian float32 tensor behind a 'RLT1' magic and a dimension
table; label maps ride in binary PGM where the gray value is the region
label. This script writes both, peeks at the raw bytes, and reads them
back.
"""

import tempfile
from pathlib import Path

import numpy as np

from layerfocus import read_labelmap, read_tensor, write_labelmap, write_tensor

work = Path(tempfile.mkdtemp(prefix="layerfocus_demo_"))

# a 2x3 tensor: header is 4 magic bytes, 1 rank byte, two u32 dims
tensor = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
rlt_path = work / "demo.rlt"
write_tensor(tensor, rlt_path)

raw = rlt_path.read_bytes()
print(f"wrote {rlt_path} ({len(raw)} bytes)")
print(f"  magic {raw[:4]!r}, rank {raw[4]}, dims {np.frombuffer(raw[5:13], '<u4')}")
print(f"  payload holds {len(raw) - 13} bytes = 6 float32 values")

back = read_tensor(rlt_path)
print(f"  read back shape {back.shape}, dtype {back.dtype}, max {back.max()}")

# a label map: nine regions, gray value = label index
labels = np.repeat(np.arange(9, dtype=np.uint8), 2)[:, None].repeat(4, axis=1)
pgm_path = work / "demo.pgm"
write_labelmap(labels, pgm_path)
print(f"\nwrote {pgm_path} ({pgm_path.stat().st_size} bytes)")
print(f"  header {pgm_path.read_bytes()[:11]!r}")

round_tripped = read_labelmap(pgm_path)
print(f"  read back {round_tripped.shape}, labels {sorted(set(round_tripped.flat))}")
assert np.array_equal(round_tripped, labels)
print("\nround trips are exact; corrupt files raise FormatError naming the byte offset")
