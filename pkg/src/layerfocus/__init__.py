"""Region-level attribution of saliency maps over retinal-layer segmentations.

The package turns pixel-level saliency plus a 9-region segmentation
into per-layer focus percentages, builds per-class statistical profiles
of those percentages and flags predictions whose explanations deviate
suspiciously from the profile.
"""

from .attribution import (
    CLASSES,
    LABEL_NAMES,
    RETINAL_LAYERS,
    AttributionRecord,
    attribute_scan,
    layer_attribution,
    layer_masses,
    read_records_csv,
    write_records_csv,
)
from .classification import (
    MetricsSummary,
    confusion,
    metrics,
    metrics_to_json,
    read_pairs_csv,
)
from .errors import (
    DegenerateExplanationError,
    FormatError,
    LayerFocusError,
    ValidationError,
)
from .gradcam import compute_saliency, gradcam_coarse, neuron_weights, normalize_minmax
from .profiles import (
    ClassProfile,
    DeviationReport,
    FlagDecision,
    HistogramData,
    build_profiles,
    class_weights,
    deviation_histogram,
    deviation_report,
    flag,
    profiles_from_json,
    profiles_to_json,
    write_deviation_csv,
    write_histogram_csv,
)
from .render import LABEL_PALETTE, heat_colormap, render_overlay, write_ppm
from .synth import SynthSpec, Xorshift64Star, equal_bands, generate
from .tensor_io import (
    read_labelmap,
    read_tensor,
    resize_bilinear,
    write_labelmap,
    write_tensor,
)

__version__ = "0.1.0"
