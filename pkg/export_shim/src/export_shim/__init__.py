"""Bridge from convolutional models to the attribution toolkit's file formats."""

from .errors import ExportError
from .export import (
    ScanExport,
    export_batch,
    export_scan,
    export_segmentation,
    truth_from_name,
)
from .formats import (
    read_image_pgm,
    write_image_pgm,
    write_labelmap,
    write_tensor,
)
from .models import (
    CLASSES,
    ToyClassifier,
    ToySegmenter,
    build_models,
    load_checkpoint,
    save_checkpoint,
)

__version__ = "0.1.0"
