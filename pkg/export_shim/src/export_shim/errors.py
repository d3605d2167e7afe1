class ExportError(Exception):
    """Base error for export failures: bad inputs, bad models, bad shapes."""
