"""Simulation and analysis workbench for single-photon quantum communication.

Subpackages cover SPDC pair-source physics (:mod:`photonlab.spdc`), detector
presets (:mod:`photonlab.detectors`), Monte Carlo photon statistics and peak
fitting (:mod:`photonlab.photostats`, :mod:`photonlab.peakfit`), the
quantum-state kernel with tomography (:mod:`photonlab.qstate`), the BB84
engine and key relay (:mod:`photonlab.qkd`), and the classical cipher and
steganography suite (:mod:`photonlab.ciphers`, :mod:`photonlab.stego`).
The command-line front door lives in :mod:`photonlab.cli`.
"""

__version__ = "1.0.0"
