"""Decision procedures and semantic oracles for finitary domain logics."""

__version__ = "0.1.0"
