"""Image-guided novel view synthesis with learned view-dependent effects."""

__version__ = "0.1.0"
