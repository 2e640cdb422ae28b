"""asrt: a proof kernel for intuitionistic arithmetic with a
self-applicative assertibility operator, plus the licensing machinery
built on top of it."""

__version__ = "0.1.0"
