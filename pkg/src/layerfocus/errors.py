"""Exception types shared across the toolkit."""


class LayerFocusError(Exception):
    """Base class for all layerfocus errors."""


class FormatError(LayerFocusError):
    """A file does not conform to its declared binary layout."""


class ValidationError(LayerFocusError):
    """Inputs are structurally readable but violate a contract."""


class DegenerateExplanationError(ValidationError):
    """Saliency carries no mass on any attributable retinal layer."""
