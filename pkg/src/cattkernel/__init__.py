"""catt-kernel: interpreter and typechecker for a globular weak
infinity-category type theory with configurable semistrict normalisation."""

__version__ = "0.1.0"
