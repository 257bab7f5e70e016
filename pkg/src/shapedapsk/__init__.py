"""Shaped and uniform LDPC-coded 32-APSK: transmitter, BICM-ID receiver, EXIT design tools."""

__version__ = "0.1.0"
