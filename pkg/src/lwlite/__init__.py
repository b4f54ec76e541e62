"""lw-lite: an ML-like language with extensible records, fine-grained
overloading, implicit parameters and the ``inject`` / ``eject`` operators."""

__version__ = "0.1.0"
