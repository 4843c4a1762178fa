"""Exact and numerical checks for Kodaira-Spencer constants on Siegel and
quaternionic Shimura varieties: number fields, lattices, quaternion orders,
period lattices, metric comparisons and local Hom-module lemmas."""

__version__ = "0.1.0"
