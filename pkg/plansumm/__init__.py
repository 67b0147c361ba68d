"""Summary information for BDI/HTN plan libraries: preconditions, must and
mentioned literals, and planning with abstract operators built from them."""

__version__ = "1.0.0"
